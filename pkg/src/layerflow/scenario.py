"""Scenario description: plain-text config parsing, validation, and the
construction of initial fields.

The config format is flat `section.key = value` lines with `#`
comments.  Lists are comma separated.  Parsing collects every problem
it can find (unknown keys, malformed numbers, missing required keys,
out-of-range values), each tagged with the offending key and line, and
reports them all at once.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .errors import ConfigError
from .geometry import LayerPartition
from .gridops import BOUNDARY_KINDS, Grid

BATHYMETRY_KINDS = ("flat", "slope", "bump", "table")
INIT_KINDS = ("lake_at_rest", "dam_break", "shear", "table")
INTEGRATORS = ("forward-euler", "ssp-rk2")
PLACEMENTS = ("interface", "layer")
SOLVERS = ("multilayer", "sv1")


@dataclass(frozen=True)
class MeshSpec:
    x_min: float = 0.0
    x_max: float = 1.0
    n_cells: int = 0


@dataclass(frozen=True)
class LayersSpec:
    n: int = 1
    fractions: Optional[tuple] = None


@dataclass(frozen=True)
class BathymetrySpec:
    kind: str = "flat"
    z0: float = 0.0
    s: float = 0.0
    a: float = 0.0
    x0: float = 0.0
    width: float = 1.0
    values: Optional[tuple] = None


@dataclass(frozen=True)
class InitSpec:
    kind: str = ""
    eta0: float = 0.0
    eta_l: float = 0.0
    eta_r: float = 0.0
    x0: float = 0.0
    u: Optional[tuple] = None
    H_values: Optional[tuple] = None
    u_values: Optional[tuple] = None


@dataclass(frozen=True)
class PhysicsSpec:
    g: float = 0.0
    mu: float = 0.0
    k_l: float = 0.0
    k_t: float = 0.0
    placement: str = "interface"
    solver: str = "multilayer"


@dataclass(frozen=True)
class ControlsSpec:
    cfl: float = 0.5
    t_end: float = 1.0
    integrator: str = "ssp-rk2"
    viscous_safety: float = 0.5


@dataclass(frozen=True)
class OutputSpec:
    directory: str = "out"
    snapshot_every: float = 0.0


@dataclass(frozen=True)
class Scenario:
    mesh: MeshSpec = field(default_factory=MeshSpec)
    boundary: str = "periodic"
    layers: LayersSpec = field(default_factory=LayersSpec)
    bathymetry: BathymetrySpec = field(default_factory=BathymetrySpec)
    init: InitSpec = field(default_factory=InitSpec)
    physics: PhysicsSpec = field(default_factory=PhysicsSpec)
    controls: ControlsSpec = field(default_factory=ControlsSpec)
    output: OutputSpec = field(default_factory=OutputSpec)

    @property
    def n_layers(self) -> int:
        return self.layers.n

    def grid(self) -> Grid:
        return Grid(self.mesh.x_min, self.mesh.x_max, self.mesh.n_cells)

    def partition(self) -> LayerPartition:
        if self.layers.fractions is None:
            return LayerPartition.uniform(self.layers.n)
        return LayerPartition(np.array(self.layers.fractions))

    def validate(self) -> "Scenario":
        problems = validate_scenario(self)
        if problems:
            raise ConfigError(problems)
        return self


# --- config registry -------------------------------------------------------

# key -> (value type, section attr, field attr)
_REGISTRY = {
    "mesh.x_min": ("float", "mesh", "x_min"),
    "mesh.x_max": ("float", "mesh", "x_max"),
    "mesh.n_cells": ("int", "mesh", "n_cells"),
    "boundary.kind": ("str", None, "boundary"),
    "layers.n": ("int", "layers", "n"),
    "layers.fractions": ("floats", "layers", "fractions"),
    "bathymetry.kind": ("str", "bathymetry", "kind"),
    "bathymetry.z0": ("float", "bathymetry", "z0"),
    "bathymetry.s": ("float", "bathymetry", "s"),
    "bathymetry.a": ("float", "bathymetry", "a"),
    "bathymetry.x0": ("float", "bathymetry", "x0"),
    "bathymetry.width": ("float", "bathymetry", "width"),
    "bathymetry.values": ("floats", "bathymetry", "values"),
    "init.kind": ("str", "init", "kind"),
    "init.eta0": ("float", "init", "eta0"),
    "init.eta_l": ("float", "init", "eta_l"),
    "init.eta_r": ("float", "init", "eta_r"),
    "init.x0": ("float", "init", "x0"),
    "init.u": ("floats", "init", "u"),
    "init.H_values": ("floats", "init", "H_values"),
    "init.u_values": ("floats", "init", "u_values"),
    "physics.g": ("float", "physics", "g"),
    "physics.mu": ("float", "physics", "mu"),
    "physics.k_l": ("float", "physics", "k_l"),
    "physics.k_t": ("float", "physics", "k_t"),
    "physics.placement": ("str", "physics", "placement"),
    "physics.solver": ("str", "physics", "solver"),
    "controls.cfl": ("float", "controls", "cfl"),
    "controls.t_end": ("float", "controls", "t_end"),
    "controls.integrator": ("str", "controls", "integrator"),
    "controls.viscous_safety": ("float", "controls", "viscous_safety"),
    "output.directory": ("str", "output", "directory"),
    "output.snapshot_every": ("float", "output", "snapshot_every"),
}

_REQUIRED = ("mesh.x_min", "mesh.x_max", "mesh.n_cells", "init.kind", "physics.g")


def _parse_value(kind: str, raw: str):
    if kind == "str":
        return raw
    if kind == "int":
        return int(raw)
    if kind == "float":
        return float(raw)
    if kind == "floats":
        parts = [p.strip() for p in raw.split(",")]
        return tuple(float(p) for p in parts if p != "")
    raise AssertionError(kind)


def parse_scenario(text: str) -> Scenario:
    """Parse a config document; raises ConfigError listing every problem."""
    problems: list[str] = []
    values: dict[str, object] = {}
    lines_seen: dict[str, int] = {}

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            problems.append(f"line {lineno}: expected 'section.key = value', got {line!r}")
            continue
        key, _, val = line.partition("=")
        key = key.strip()
        val = val.strip()
        if key not in _REGISTRY:
            problems.append(f"line {lineno}: unknown key {key!r}")
            continue
        if key in values:
            problems.append(f"line {lineno}: duplicate key {key!r} "
                            f"(first set on line {lines_seen[key]})")
            continue
        kind = _REGISTRY[key][0]
        try:
            values[key] = _parse_value(kind, val)
        except ValueError:
            problems.append(f"line {lineno}: {key}: malformed {kind} value {val!r}")
            continue
        lines_seen[key] = lineno

    for key in _REQUIRED:
        if key not in values:
            problems.append(f"{key}: required key is missing")
    if problems:
        raise ConfigError(problems)

    scn = Scenario()
    sections = {name: {} for name in
                ("mesh", "layers", "bathymetry", "init", "physics", "controls", "output")}
    boundary = scn.boundary
    for key, value in values.items():
        _, section, attr = _REGISTRY[key]
        if section is None:
            boundary = value
        else:
            sections[section][attr] = value
    scn = Scenario(
        mesh=replace(scn.mesh, **sections["mesh"]),
        boundary=boundary,
        layers=replace(scn.layers, **sections["layers"]),
        bathymetry=replace(scn.bathymetry, **sections["bathymetry"]),
        init=replace(scn.init, **sections["init"]),
        physics=replace(scn.physics, **sections["physics"]),
        controls=replace(scn.controls, **sections["controls"]),
        output=replace(scn.output, **sections["output"]),
    )
    problems = validate_scenario(scn, lines_seen)
    if problems:
        raise ConfigError(problems)
    return scn


def _fmt(value) -> str:
    if isinstance(value, bool):
        raise AssertionError("no boolean config values")
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return format(value, ".17g")
    if isinstance(value, tuple):
        return ", ".join(format(v, ".17g") for v in value)
    return str(value)


def format_scenario(scn: Scenario) -> str:
    """Emit a config document that parses back to an equal Scenario."""
    lines = []
    for key, (kind, section, attr) in _REGISTRY.items():
        value = scn.boundary if section is None else getattr(getattr(scn, section), attr)
        if value is None:
            continue
        lines.append(f"{key} = {_fmt(value)}")
    return "\n".join(lines) + "\n"


def validate_scenario(scn: Scenario, lines: Optional[dict] = None) -> list[str]:
    """All semantic problems of a scenario, formatted for reporting."""
    problems: list[str] = []
    lines = lines or {}

    def bad(key: str, message: str):
        ln = lines.get(key)
        where = f" (line {ln})" if ln else ""
        problems.append(f"{key}: {message}{where}")

    m = scn.mesh
    if not np.isfinite(m.x_min) or not np.isfinite(m.x_max) or m.x_max <= m.x_min:
        bad("mesh.x_max", f"domain [{m.x_min:g}, {m.x_max:g}] is empty or not finite")
    if m.n_cells < 3:
        bad("mesh.n_cells", f"need at least 3 cells, got {m.n_cells}")

    if scn.boundary not in BOUNDARY_KINDS:
        bad("boundary.kind", f"unknown boundary {scn.boundary!r}, expected one of {BOUNDARY_KINDS}")

    lay = scn.layers
    if lay.n < 1:
        bad("layers.n", f"need at least one layer, got {lay.n}")
    if lay.fractions is not None:
        if len(lay.fractions) != lay.n:
            bad("layers.fractions", f"{len(lay.fractions)} fractions for layers.n = {lay.n}")
        elif any(f <= 0 for f in lay.fractions):
            bad("layers.fractions", "fractions must be strictly positive")
        elif abs(sum(lay.fractions) - 1.0) > 1e-12:
            bad("layers.fractions", f"fractions sum to {sum(lay.fractions):.17g}, expected 1")

    b = scn.bathymetry
    if b.kind not in BATHYMETRY_KINDS:
        bad("bathymetry.kind", f"unknown kind {b.kind!r}, expected one of {BATHYMETRY_KINDS}")
    elif b.kind == "table":
        if b.values is None:
            bad("bathymetry.values", "required for bathymetry.kind = table")
        elif m.n_cells >= 3 and len(b.values) != m.n_cells:
            bad("bathymetry.values", f"{len(b.values)} values for {m.n_cells} cells")
    if b.kind == "bump" and b.width <= 0:
        bad("bathymetry.width", "bump width must be positive")

    ini = scn.init
    if ini.kind not in INIT_KINDS:
        bad("init.kind", f"unknown kind {ini.kind!r}, expected one of {INIT_KINDS}")
    elif ini.kind == "shear":
        if ini.u is None:
            bad("init.u", "required for init.kind = shear (one velocity per layer)")
        elif lay.n >= 1 and len(ini.u) != lay.n:
            bad("init.u", f"{len(ini.u)} velocities for {lay.n} layers")
    elif ini.kind == "table":
        if ini.H_values is None:
            bad("init.H_values", "required for init.kind = table")
        elif m.n_cells >= 3 and len(ini.H_values) != m.n_cells:
            bad("init.H_values", f"{len(ini.H_values)} values for {m.n_cells} cells")
        if ini.u_values is None:
            bad("init.u_values", "required for init.kind = table")
        elif m.n_cells >= 3 and lay.n >= 1 and len(ini.u_values) != lay.n * m.n_cells:
            bad("init.u_values",
                f"{len(ini.u_values)} values, expected layers.n * n_cells = {lay.n * m.n_cells}")
    if ini.kind == "table" and ini.H_values is not None and any(v < 0 for v in ini.H_values):
        bad("init.H_values", "depths must be nonnegative")
    if ini.u is not None and ini.kind != "shear" and ini.kind in INIT_KINDS:
        if len(ini.u) != lay.n:
            bad("init.u", f"{len(ini.u)} velocities for {lay.n} layers")

    p = scn.physics
    if not (p.g > 0.0) or not np.isfinite(p.g):
        bad("physics.g", f"gravity must be positive and finite, got {p.g:g}")
    if p.mu < 0 or not np.isfinite(p.mu):
        bad("physics.mu", "viscosity must be nonnegative and finite")
    if p.k_l < 0 or p.k_t < 0:
        bad("physics.k_l", "friction coefficients must be nonnegative")
    if p.placement not in PLACEMENTS:
        bad("physics.placement", f"unknown placement {p.placement!r}, expected one of {PLACEMENTS}")
    if p.solver not in SOLVERS:
        bad("physics.solver", f"unknown solver {p.solver!r}, expected one of {SOLVERS}")
    elif p.solver == "sv1" and lay.n != 1:
        bad("physics.solver", f"solver sv1 requires layers.n = 1, got {lay.n}")

    c = scn.controls
    if not (0.0 < c.cfl <= 1.0):
        bad("controls.cfl", f"cfl must lie in (0, 1], got {c.cfl:g}")
    if not (c.t_end > 0.0) or not np.isfinite(c.t_end):
        bad("controls.t_end", f"t_end must be positive and finite, got {c.t_end:g}")
    if c.integrator not in INTEGRATORS:
        bad("controls.integrator",
            f"unknown integrator {c.integrator!r}, expected one of {INTEGRATORS}")
    if not (0.0 < c.viscous_safety <= 1.0):
        bad("controls.viscous_safety",
            f"viscous_safety must lie in (0, 1], got {c.viscous_safety:g}")

    if scn.output.snapshot_every < 0:
        bad("output.snapshot_every", "snapshot cadence must be nonnegative")
    return problems


# --- field construction ----------------------------------------------------

def bathymetry_values(scn: Scenario, grid: Grid) -> np.ndarray:
    """Bed elevation sampled at cell centers."""
    b = scn.bathymetry
    x = grid.x
    if b.kind == "flat":
        return np.full(grid.n_cells, b.z0)
    if b.kind == "slope":
        return b.z0 + b.s * x
    if b.kind == "bump":
        return b.z0 + b.a * np.exp(-(((x - b.x0) / b.width) ** 2))
    return np.asarray(b.values, dtype=float)


def initial_fields(scn: Scenario, grid: Grid, part: LayerPartition,
                   zb: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Initial (H, q); free surfaces below the bed give dry columns."""
    ini = scn.init
    n = grid.n_cells
    N = part.n_layers
    if ini.kind == "lake_at_rest":
        H = np.maximum(ini.eta0 - zb, 0.0)
    elif ini.kind == "dam_break":
        eta = np.where(grid.x < ini.x0, ini.eta_l, ini.eta_r)
        H = np.maximum(eta - zb, 0.0)
    elif ini.kind == "shear":
        H = np.maximum(ini.eta0 - zb, 0.0)
    else:  # table
        H = np.asarray(ini.H_values, dtype=float)

    if ini.kind == "table":
        u = np.asarray(ini.u_values, dtype=float).reshape(N, n)
    elif ini.u is not None:
        u = np.repeat(np.asarray(ini.u, dtype=float)[:, None], n, axis=1)
    else:
        u = np.zeros((N, n))

    from .geometry import layer_thicknesses
    from .state import H_DRY

    q = layer_thicknesses(H, part) * u
    q[:, H <= H_DRY] = 0.0
    return H, q
