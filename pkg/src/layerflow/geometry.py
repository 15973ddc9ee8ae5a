"""Vertical layer partition and the per-column geometry it induces.

The water column of depth H(x) above the bed z_b(x) is sliced into N
layers of prescribed relative thickness l_a (independent of x and t):

    h_a = l_a H,   interface heights  z_if[k] = z_b + sum_{j<k} h_j,
    midpoints      z_mid[a] = (z_if[a] + z_if[a+1]) / 2.

Index conventions used across the package: layers a = 0..N-1 from the
bed upward, interfaces k = 0..N with k=0 the bed and k=N the free
surface.  `h_half[k]` is the vertical gap between the midpoints of the
layers adjacent to interface k; at the bed and surface it degenerates
to half the single adjacent layer thickness.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .gridops import check_boundary, ddx

PARTITION_TOL = 1e-14


@dataclass(frozen=True)
class LayerPartition:
    """Relative layer thicknesses l_a > 0 with sum(l) == 1."""

    fractions: np.ndarray

    def __post_init__(self):
        frac = np.asarray(self.fractions, dtype=float)
        object.__setattr__(self, "fractions", frac)
        if frac.ndim != 1 or frac.size == 0:
            raise ValueError("layer fractions must be a non-empty 1-D sequence")
        if not np.all(np.isfinite(frac)) or np.any(frac <= 0.0):
            raise ValueError("layer fractions must be finite and strictly positive")
        if abs(frac.sum() - 1.0) > PARTITION_TOL:
            raise ValueError(
                f"layer fractions sum to {frac.sum():.17g}, expected 1 within {PARTITION_TOL}"
            )

    @classmethod
    def uniform(cls, n_layers: int) -> "LayerPartition":
        if n_layers < 1:
            raise ValueError("need at least one layer")
        return cls(np.full(n_layers, 1.0 / n_layers))

    @property
    def n_layers(self) -> int:
        return self.fractions.size

    @property
    def cumulative(self) -> np.ndarray:
        """Partial sums sum_{j<=a} l_j, shape (N,)."""
        return np.cumsum(self.fractions)


@dataclass(frozen=True)
class Bathymetry:
    """Bed elevation with its centered slope and slope cosine."""

    zb: np.ndarray
    slope: np.ndarray
    cos: np.ndarray


def make_bathymetry(zb: np.ndarray, dx: float, bc: str) -> Bathymetry:
    zb = np.asarray(zb, dtype=float)
    check_boundary(bc)
    if not np.all(np.isfinite(zb)):
        raise ValueError("bed elevation must be finite")
    slope = ddx(zb, dx, bc)
    return Bathymetry(zb=zb, slope=slope, cos=1.0 / np.sqrt(1.0 + slope * slope))


@dataclass(frozen=True)
class InterfaceGeometry:
    """All per-column geometric fields for one (H, z_b, partition) triple.

    Shapes: layer fields (N, n), interface fields (N+1, n).
    """

    h: np.ndarray          # layer thicknesses
    z_if: np.ndarray       # interface heights, z_if[0] = z_b, z_if[N] = z_b + H
    z_mid: np.ndarray      # layer midpoints
    h_half: np.ndarray     # midpoint gaps across each interface
    dz_if_dx: np.ndarray   # interface slopes
    cos_if: np.ndarray     # interface slope cosines
    dz_mid_dx: np.ndarray  # midpoint slopes


def layer_thicknesses(H: np.ndarray, part: LayerPartition) -> np.ndarray:
    """h_a = l_a H with the top layer closed as H - sum of the others.

    The correction keeps sum_a h_a == H bit-for-bit (sequential order),
    so cumulative interface heights land exactly on z_b + H.
    """
    H = np.asarray(H, dtype=float)
    h = part.fractions[:, None] * H
    if part.n_layers > 1:
        h[-1] = H - np.cumsum(h[:-1], axis=0)[-1]
    else:
        h[0] = H
    return h


def build_geometry(
    H: np.ndarray,
    bathy: Bathymetry,
    part: LayerPartition,
    dx: float,
    bc: str,
) -> InterfaceGeometry:
    """Assemble the layer geometry for a depth field H >= 0."""
    H = np.asarray(H, dtype=float)
    check_boundary(bc)
    if not np.all(np.isfinite(H)):
        raise ValueError("depth field must be finite")
    if np.any(H < 0.0):
        ix = int(np.argmin(H))
        raise ValueError(f"negative depth H={H[ix]:.6g} at cell {ix}")
    if H.shape != bathy.zb.shape:
        raise ValueError("depth and bathymetry shapes differ")

    n = H.size
    N = part.n_layers
    h = layer_thicknesses(H, part)

    z_if = np.empty((N + 1, n))
    z_if[0] = bathy.zb
    z_if[1:] = bathy.zb + np.cumsum(h, axis=0)
    z_mid = 0.5 * (z_if[:-1] + z_if[1:])

    h_half = np.empty((N + 1, n))
    h_half[0] = 0.5 * h[0]
    h_half[-1] = 0.5 * h[-1]
    if N > 1:
        h_half[1:-1] = 0.5 * (h[:-1] + h[1:])

    dz_if_dx = ddx(z_if, dx, bc)
    return InterfaceGeometry(
        h=h,
        z_if=z_if,
        z_mid=z_mid,
        h_half=h_half,
        dz_if_dx=dz_if_dx,
        cos_if=1.0 / np.sqrt(1.0 + dz_if_dx * dz_if_dx),
        dz_mid_dx=ddx(z_mid, dx, bc),
    )
