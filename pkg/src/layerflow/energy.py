"""Discrete mechanical-energy audit.

Each layer carries E_a = h_a (u_a^2/2 + g z_mid,a).  Two sink terms are
tracked exactly from the scheme's own quantities:

  * exchange dissipation: every interface transfer G destroys kinetic
    energy at rate (1/2) (u_above - u_below)^2 |G| because the upwinded
    interface velocity carries the donor layer's momentum;
  * viscous dissipation: for a Newtonian closure the work of the stress
    terms collapses to -(h/mu) (Sxx^2 + Szx^2) summed over the stress
    carriers, plus the bottom friction drain -(kappa/cos^3) u_1^2.

The budget residual compares the measured energy change per step with
the boundary flux and these sinks; it is a consistency indicator, not a
conserved quantity.
"""
from __future__ import annotations

import numpy as np

from .geometry import InterfaceGeometry
from .gridops import PERIODIC, ddx
from .rheology import INTERFACE, FrictionLaw, RheologyModel, StressField


def layer_energies(u: np.ndarray, geom: InterfaceGeometry, g: float) -> np.ndarray:
    """Mechanical energy density per layer, shape (N, n)."""
    return geom.h * (0.5 * u * u + g * geom.z_mid)


def total_energy(u: np.ndarray, geom: InterfaceGeometry, g: float, dx: float) -> float:
    return float(layer_energies(u, geom, g).sum() * dx)


def interface_energy_term(u_lo: np.ndarray, u_hi: np.ndarray,
                          u_int: np.ndarray, G: np.ndarray) -> np.ndarray:
    """Energy production of one interface transfer for a given u_int.

    Zero-mean-square only for the upwind choice; any other convex blend
    of u_lo/u_hi can inject energy when G pushes against the shear.
    """
    return G * (u_int * (u_lo - u_hi) - 0.5 * u_lo * u_lo + 0.5 * u_hi * u_hi)


def exchange_dissipation(u: np.ndarray, G: np.ndarray, dx: float) -> float:
    """Total D_G <= 0 from upwinded interlayer transfers."""
    if u.shape[0] < 2:
        return 0.0
    du = u[1:] - u[:-1]
    return float(-0.5 * (du * du * np.abs(G[1:-1])).sum() * dx)


def newtonian_dissipation(
    S: StressField, geom: InterfaceGeometry, model: RheologyModel,
    friction: FrictionLaw, H: np.ndarray, u: np.ndarray,
    cos_b: np.ndarray, dx: float,
) -> tuple[float, float]:
    """Compact dissipation (stress part, friction part), both <= 0.

    The stress part divides by mu, which is exact for the built-in
    Newtonian closures; custom stress laws are outside the audit.
    """
    friction_part = float(-(friction.kappa(u[0], H) / cos_b**3 * u[0] * u[0]).sum() * dx)
    if model.stress_fn is not None:
        raise NotImplementedError("energy audit covers the built-in Newtonian closures only")
    if model.mu <= 0.0:
        return 0.0, friction_part
    if model.placement == INTERFACE:
        quad = geom.h_half * (S.xx_if * S.xx_if + S.zx_if * S.zx_if)
    else:
        quad = geom.h * (S.xx_mid * S.xx_mid + S.zx_mid * S.zx_mid)
    return float(-(quad.sum() / model.mu) * dx), friction_part


def energy_flux_density(
    u: np.ndarray, w: np.ndarray, geom: InterfaceGeometry,
    p_mid: np.ndarray, g: float, S: StressField | None,
    dx: float, bc: str,
) -> np.ndarray:
    """Horizontal energy flux per cell (n,), used for boundary budgets.

    Advective/pressure part u (E + h p) per layer, plus the in-layer
    viscous working when a stress field is supplied.
    """
    E = layer_energies(u, geom, g)
    flux = (u * (E + geom.h * p_mid)).sum(axis=0)
    if S is not None:
        inner = ddx(geom.h * geom.z_mid * S.zx_mid, dx, bc)
        work = u * (geom.h * (S.xx_mid - S.zz_mid) + inner) + w * geom.h * S.zx_mid
        flux = flux - work.sum(axis=0)
    return flux


def budget_residuals(
    times: np.ndarray, E_total: np.ndarray, boundary_influx: np.ndarray,
    D_G: np.ndarray, R_E_stress: np.ndarray, R_E_friction: np.ndarray,
) -> np.ndarray:
    """Per-step residuals of the energy balance, length len(times)-1.

    residual_n = dE/dt - influx_n - D_G_n - R_E_n with all right-hand
    sides evaluated at the step start.
    """
    dt = np.diff(times)
    dE = np.diff(E_total)
    sinks = boundary_influx + D_G + R_E_stress + R_E_friction
    return dE / dt - sinks[:-1]


def boundary_influx(flux_density: np.ndarray, bc: str) -> float:
    """Net energy inflow across the domain ends (0 on periodic domains)."""
    if bc == PERIODIC:
        return 0.0
    return float(flux_density[0] - flux_density[-1])
