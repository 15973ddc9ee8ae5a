"""Conserved state, hydrostatic pressures and interlayer mass exchange.

The prognostic variables are the total depth H (the layer split is
fixed, so per-layer mass is l_a H) and the layer discharges q_a = h_a
u_a.  Because the interfaces are not material surfaces, mass crosses
them at rate G[k]; eliminating the interface kinematics against the
depth equation gives, per cell,

    G[k] = sum_{j<k} d_j - (sum_{j<k} l_j) * sum_j d_j,

where d_j is the discrete divergence of the layer-j mass flux taken
from the same numerical fluxes as the depth update.  G vanishes
identically at the bed and at the free surface.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import LayerPartition, layer_thicknesses

# Depth below which a column is treated as dry: velocities are zeroed
# and momentum is dropped.
H_DRY = 1e-8


@dataclass
class LayerState:
    """Depth H (n,) and layer discharges q (N, n)."""

    H: np.ndarray
    q: np.ndarray

    def __post_init__(self):
        self.H = np.asarray(self.H, dtype=float)
        self.q = np.atleast_2d(np.asarray(self.q, dtype=float))
        if self.q.shape[-1] != self.H.shape[-1]:
            raise ValueError("H and q disagree on the number of cells")

    @property
    def n_layers(self) -> int:
        return self.q.shape[0]

    def copy(self) -> "LayerState":
        return LayerState(self.H.copy(), self.q.copy())


def velocities(
    H: np.ndarray, q: np.ndarray, part: LayerPartition, h_dry: float = H_DRY
) -> np.ndarray:
    """Layer velocities u_a = q_a / h_a, zeroed on dry columns."""
    if q.shape[0] != part.n_layers:
        raise ValueError(f"{q.shape[0]} discharge rows for {part.n_layers} layers")
    h = layer_thicknesses(H, part)
    u = np.zeros_like(q)
    wet = H > h_dry
    u[:, wet] = q[:, wet] / h[:, wet]
    return u


def hydrostatic_pressures(h: np.ndarray, g: float) -> tuple[np.ndarray, np.ndarray]:
    """Pressures (divided by density) at layer midpoints and interfaces.

    p_if[k] = g * (weight of water above interface k), so p_if[N] = 0 at
    the free surface, and p_mid[a] = p_if[a+1] + g h_a / 2.  Returns
    (p_mid (N, n), p_if (N+1, n)).
    """
    N, n = h.shape
    p_if = np.zeros((N + 1, n))
    p_if[:-1] = g * np.cumsum(h[::-1], axis=0)[::-1]
    p_mid = p_if[1:] + 0.5 * g * h
    return p_mid, p_if


def exchange_fluxes(div: np.ndarray, part: LayerPartition) -> np.ndarray:
    """Interface mass-transfer rates G (N+1, n) from per-layer divergences.

    `div` holds the discrete d_j = dx-divergence of the layer-j mass
    flux, shape (N, n).  Bed and surface rows are exactly zero.
    """
    N, n = div.shape
    if N != part.n_layers:
        raise ValueError(f"{N} divergence rows for {part.n_layers} layers")
    G = np.zeros((N + 1, n))
    if N > 1:
        dcum = np.cumsum(div, axis=0)
        G[1:-1] = dcum[:-1] - part.cumulative[:-1, None] * dcum[-1]
    return G


def interface_velocities(u: np.ndarray, G: np.ndarray, mode: str = "upwind") -> np.ndarray:
    """Velocity advected through each interface, shape (N+1, n).

    G[k] > 0 feeds the layer below interface k, so the donor is the
    layer above and its velocity is carried through; G[k] <= 0 drains
    the lower layer and the lower velocity is carried.  The centered
    variant is kept only as a test mode: it is not energy-diffusive.
    """
    N, n = u.shape
    u_if = np.empty((N + 1, n))
    u_if[0] = u[0]
    u_if[-1] = u[-1]
    if N > 1:
        if mode == "upwind":
            u_if[1:-1] = np.where(G[1:-1] <= 0.0, u[:-1], u[1:])
        elif mode == "centered":
            u_if[1:-1] = 0.5 * (u[:-1] + u[1:])
        else:
            raise ValueError(f"unknown interface velocity mode {mode!r}")
    return u_if
