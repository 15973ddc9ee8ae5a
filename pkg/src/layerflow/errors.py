"""Exception types shared across the solver."""
from __future__ import annotations


class SolverAbort(RuntimeError):
    """Raised when the solution leaves the domain of validity.

    Carries enough context (step, time, cell) to locate the blow-up.
    """

    def __init__(self, message: str, step: int | None = None,
                 time: float | None = None, cell: int | None = None):
        where = []
        if step is not None:
            where.append(f"step {step}")
        if time is not None:
            where.append(f"t={time:.6g}")
        if cell is not None:
            where.append(f"cell {cell}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)
        self.step = step
        self.time = time
        self.cell = cell


class ConfigError(ValueError):
    """Raised for malformed or invalid scenario configurations.

    `problems` lists every issue found, each tagged with the offending
    key and line number where known.
    """

    def __init__(self, problems: list[str]):
        self.problems = list(problems)
        super().__init__("\n".join(self.problems))
