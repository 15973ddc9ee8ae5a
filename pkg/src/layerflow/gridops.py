"""Uniform 1-D mesh and the shared finite-difference primitives.

Every derivative taken anywhere in the solver goes through `ddx` / `d2dx2`
so that discrete identities (telescoping sums, product-rule groupings)
hold between modules.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

PERIODIC = "periodic"
WALL = "wall"
TRANSMISSIVE = "transmissive"

BOUNDARY_KINDS = (PERIODIC, WALL, TRANSMISSIVE)


@dataclass(frozen=True)
class Grid:
    """Uniform mesh of cell centers on [x_min, x_max]."""

    x_min: float
    x_max: float
    n_cells: int

    def __post_init__(self):
        if not (np.isfinite(self.x_min) and np.isfinite(self.x_max)):
            raise ValueError("grid bounds must be finite")
        if self.x_max <= self.x_min:
            raise ValueError("grid needs x_max > x_min")
        if self.n_cells < 3:
            raise ValueError("grid needs at least 3 cells")

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.n_cells

    @property
    def x(self) -> np.ndarray:
        return self.x_min + (np.arange(self.n_cells) + 0.5) * self.dx


def check_boundary(bc: str) -> str:
    if bc not in BOUNDARY_KINDS:
        raise ValueError(f"unknown boundary kind {bc!r}, expected one of {BOUNDARY_KINDS}")
    return bc


def ddx(f: np.ndarray, dx: float, bc: str) -> np.ndarray:
    """Centered first derivative along the last axis.

    Periodic domains wrap; otherwise the two boundary cells fall back to
    one-sided first-order differences.
    """
    if bc == PERIODIC:
        return (np.roll(f, -1, axis=-1) - np.roll(f, 1, axis=-1)) / (2.0 * dx)
    check_boundary(bc)
    out = np.empty_like(f, dtype=float)
    out[..., 1:-1] = (f[..., 2:] - f[..., :-2]) / (2.0 * dx)
    out[..., 0] = (f[..., 1] - f[..., 0]) / dx
    out[..., -1] = (f[..., -1] - f[..., -2]) / dx
    return out


def d2dx2(f: np.ndarray, dx: float, bc: str) -> np.ndarray:
    """Three-point second derivative along the last axis."""
    dx2 = dx * dx
    if bc == PERIODIC:
        return (np.roll(f, -1, axis=-1) - 2.0 * f + np.roll(f, 1, axis=-1)) / dx2
    check_boundary(bc)
    out = np.empty_like(f, dtype=float)
    out[..., 1:-1] = (f[..., 2:] - 2.0 * f[..., 1:-1] + f[..., :-2]) / dx2
    # one-sided copies of the adjacent interior stencil
    out[..., 0] = (f[..., 2] - 2.0 * f[..., 1] + f[..., 0]) / dx2
    out[..., -1] = (f[..., -1] - 2.0 * f[..., -2] + f[..., -3]) / dx2
    return out


def pad_cells(f: np.ndarray, bc: str, sign: float = 1.0) -> np.ndarray:
    """Extend the last axis by one ghost cell on each side.

    `sign` applies to the ghost values for wall mirroring (use -1 for
    velocities, +1 for thicknesses and bathymetry).
    """
    if bc == PERIODIC:
        return np.concatenate([f[..., -1:], f, f[..., :1]], axis=-1)
    check_boundary(bc)
    lo = f[..., :1]
    hi = f[..., -1:]
    if bc == WALL:
        lo = sign * lo
        hi = sign * hi
    return np.concatenate([lo, f, hi], axis=-1)
