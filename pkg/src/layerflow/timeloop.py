"""Explicit time integration with adaptive stable steps.

The step size satisfies the advective CFL condition and, for viscous
runs, explicit-diffusion bounds for the vertical shear stencil (gap^2 /
2 mu), the horizontal stress divergence (dx^2 / 4 mu) and the
fourth-order cross terms weighted by interface heights (dx^4 / mu z^2).
Friction adds a relaxation bound h_1 cos^3 / kappa.  After every stage
the depth is clipped: small negatives (round-off from drying fronts)
snap to zero and the momentum of dry columns is dropped; anything worse
aborts with the offending cell.
"""
from __future__ import annotations

import sys
import time
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import energy as energy_mod
from .errors import SolverAbort
from .euler import euler_rhs
from .geometry import (Bathymetry, InterfaceGeometry, LayerPartition,
                       build_geometry, make_bathymetry)
from .gridops import Grid
from .rheology import (FrictionLaw, RheologyModel, StressField, stress_closure,
                       viscous_rhs)
from .scenario import Scenario, bathymetry_values, initial_fields
from .state import H_DRY, LayerState, hydrostatic_pressures, velocities
from .sv import sv_dissipation, sv_rhs, sv_velocity

FORWARD_EULER = "forward-euler"
SSP_RK2 = "ssp-rk2"


@dataclass
class TimeControls:
    t_end: float
    cfl: float = 0.5
    viscous_safety: float = 0.5
    integrator: str = SSP_RK2

    def __post_init__(self):
        if not (0.0 < self.cfl <= 1.0):
            raise ValueError("cfl must lie in (0, 1]")
        if not (0.0 < self.viscous_safety <= 1.0):
            raise ValueError("viscous_safety must lie in (0, 1]")
        if self.integrator not in (FORWARD_EULER, SSP_RK2):
            raise ValueError(f"unknown integrator {self.integrator!r}")
        if not (self.t_end > 0.0):
            raise ValueError("t_end must be positive")


@dataclass
class Diagnostics:
    """Per-evaluation fields reused by the audit and the output layer."""

    geom: InterfaceGeometry
    u: np.ndarray
    G: np.ndarray
    u_if: np.ndarray
    stress: Optional[StressField]
    max_speed: float
    diss_exchange: float
    diss_stress: float
    diss_friction: float


@dataclass
class RhsEval:
    dH: np.ndarray
    dq: np.ndarray
    diag: Optional[Diagnostics] = None


@dataclass
class SimContext:
    """Everything make_rhs derived from a scenario."""

    grid: Grid
    bc: str
    part: LayerPartition
    bathy: Bathymetry
    g: float
    model: RheologyModel
    friction: FrictionLaw
    controls: TimeControls
    h_dry: float = H_DRY

    @property
    def dx(self) -> float:
        return self.grid.dx


def stable_dt(
    H: np.ndarray,
    u: np.ndarray,
    geom: InterfaceGeometry,
    ctx: SimContext,
) -> float:
    """Largest step honoring the advective, viscous and friction bounds."""
    c = ctx.controls
    dx = ctx.dx
    wet = H > ctx.h_dry
    if not np.any(wet):
        return c.cfl * dx / np.sqrt(ctx.g * ctx.h_dry)
    speed = float((np.abs(u[:, wet]).max(axis=0) + np.sqrt(ctx.g * H[wet])).max())
    dt = c.cfl * dx / speed if speed > 0.0 else np.inf

    bounds = []
    mu = ctx.model.mu
    if ctx.model.active and mu > 0.0:
        gap = float(geom.h_half[:, wet].min())
        bounds.append(gap * gap / (2.0 * mu))
        bounds.append(dx * dx / (4.0 * mu))
        zmax = float(np.abs(geom.z_if[:, wet]).max())
        if zmax > 0.0:
            bounds.append(dx**4 / (mu * zmax * zmax))
    if ctx.friction.active:
        kappa = ctx.friction.kappa(u[0], H)[wet]
        cos3 = ctx.bathy.cos[wet] ** 3
        h1 = geom.h[0, wet]
        pos = kappa > 0.0
        if np.any(pos):
            bounds.append(float((h1[pos] * cos3[pos] / kappa[pos]).min()))
    if bounds:
        dt = min(dt, c.viscous_safety * min(bounds))
    if not (dt > 0.0):
        raise SolverAbort(f"nonpositive stable step dt={dt:g}")
    return float(dt)


def _clip_dry(state: LayerState, h_dry: float, neg_tol: float,
              step_no: int, t: float) -> LayerState:
    H, q = state.H, state.q
    if not (np.all(np.isfinite(H)) and np.all(np.isfinite(q))):
        cell = int(np.flatnonzero(~(np.isfinite(H) & np.isfinite(q).all(axis=0)))[0])
        raise SolverAbort("non-finite state after update", step=step_no, time=t, cell=cell)
    hmin = H.min()
    if hmin < -neg_tol:
        cell = int(np.argmin(H))
        raise SolverAbort(f"depth fell to {hmin:.3e}, beyond the clipping tolerance",
                          step=step_no, time=t, cell=cell)
    if hmin < 0.0:
        np.maximum(H, 0.0, out=H)
    q[:, H <= h_dry] = 0.0
    return state


def step(
    state: LayerState,
    dt: float,
    rhs: Callable[[LayerState], RhsEval],
    integrator: str = SSP_RK2,
    h_dry: float = H_DRY,
    neg_tol: float = 1e-10,
    first_stage: Optional[RhsEval] = None,
    step_no: int = 0,
    t: float = 0.0,
) -> LayerState:
    """Advance one step with forward Euler or two-stage SSP Runge-Kutta."""
    r1 = first_stage if first_stage is not None else rhs(state)
    s1 = LayerState(state.H + dt * r1.dH, state.q + dt * r1.dq)
    _clip_dry(s1, h_dry, neg_tol, step_no, t)
    if integrator == FORWARD_EULER:
        return s1
    if integrator != SSP_RK2:
        raise ValueError(f"unknown integrator {integrator!r}")
    r2 = rhs(s1)
    out = LayerState(0.5 * (state.H + s1.H + dt * r2.dH),
                     0.5 * (state.q + s1.q + dt * r2.dq))
    return _clip_dry(out, h_dry, neg_tol, step_no, t)


def make_context(scn: Scenario) -> SimContext:
    grid = scn.grid()
    part = scn.partition()
    zb = bathymetry_values(scn, grid)
    bathy = make_bathymetry(zb, grid.dx, scn.boundary)
    ctx = SimContext(
        grid=grid,
        bc=scn.boundary,
        part=part,
        bathy=bathy,
        g=scn.physics.g,
        model=RheologyModel(mu=scn.physics.mu, placement=scn.physics.placement),
        friction=FrictionLaw(k_l=scn.physics.k_l, k_t=scn.physics.k_t),
        controls=TimeControls(
            t_end=scn.controls.t_end,
            cfl=scn.controls.cfl,
            viscous_safety=scn.controls.viscous_safety,
            integrator=scn.controls.integrator,
        ),
    )
    return ctx


def make_rhs(scn: Scenario) -> tuple[LayerState, Callable[[LayerState], RhsEval], SimContext]:
    """Initial state plus the full right-hand-side closure for a scenario."""
    scn.validate()
    ctx = make_context(scn)
    zb = ctx.bathy.zb
    H0, q0 = initial_fields(scn, ctx.grid, ctx.part, zb)
    state0 = LayerState(H0, q0)

    if scn.physics.solver == "sv1":
        rhs = _make_sv_rhs(ctx)
    else:
        rhs = _make_multilayer_rhs(ctx)
    return state0, rhs, ctx


def _make_multilayer_rhs(ctx: SimContext) -> Callable[[LayerState], RhsEval]:
    dx, bc, g = ctx.dx, ctx.bc, ctx.g
    viscous = ctx.model.active or ctx.friction.active

    def rhs(state: LayerState) -> RhsEval:
        geom = build_geometry(state.H, ctx.bathy, ctx.part, dx, bc)
        ev = euler_rhs(state.H, state.q, ctx.bathy, ctx.part, g, dx, bc, ctx.h_dry)
        u = velocities(state.H, state.q, ctx.part, ctx.h_dry)
        dq = ev.dq
        S = None
        if viscous:
            S = stress_closure(ctx.model, ctx.friction, state.H, u, geom, dx, bc)
            dq = dq + viscous_rhs(S, geom, dx, bc)
        d_exch = energy_mod.exchange_dissipation(u, ev.G, dx)
        if S is not None:
            d_stress, d_fric = energy_mod.newtonian_dissipation(
                S, geom, ctx.model, ctx.friction, state.H, u, geom.cos_if[0], dx)
        else:
            d_stress, d_fric = 0.0, 0.0
        diag = Diagnostics(geom=geom, u=u, G=ev.G, u_if=ev.u_if, stress=S,
                           max_speed=ev.max_speed, diss_exchange=d_exch,
                           diss_stress=d_stress, diss_friction=d_fric)
        return RhsEval(dH=ev.dH, dq=dq, diag=diag)

    return rhs


def _make_sv_rhs(ctx: SimContext) -> Callable[[LayerState], RhsEval]:
    dx, bc, g = ctx.dx, ctx.bc, ctx.g
    mu = ctx.model.mu
    k_l, k_t = ctx.friction.k_l, ctx.friction.k_t
    zb = ctx.bathy.zb

    def rhs(state: LayerState) -> RhsEval:
        H = state.H
        q = state.q[0]
        ev = sv_rhs(H, q, zb, g, mu, k_l, k_t, dx, bc, ctx.h_dry)
        u = sv_velocity(H, q, ctx.h_dry)
        geom = build_geometry(H, ctx.bathy, ctx.part, dx, bc)
        d_total = sv_dissipation(ev, H, u, zb, mu, k_l, k_t, dx, bc)
        kappa = ctx.friction.kappa(u, H)
        d_fric = float(-(kappa / ctx.bathy.cos**3 * u * u).sum() * dx)
        G = np.zeros((2, H.size))
        diag = Diagnostics(geom=geom, u=u[None, :], G=G, u_if=np.vstack([u, u]),
                           stress=None, max_speed=ev.max_speed,
                           diss_exchange=0.0, diss_stress=d_total - d_fric,
                           diss_friction=d_fric)
        return RhsEval(dH=ev.dH, dq=ev.dq[None, :], diag=diag)

    return rhs


@dataclass
class RunResult:
    """Trajectory-level outputs: per-step audit series plus snapshots."""

    times: np.ndarray               # (steps+1,)
    E_total: np.ndarray             # energy at each recorded time
    D_G: np.ndarray                 # exchange dissipation at step starts
    R_E: np.ndarray                 # viscous stress dissipation
    friction: np.ndarray            # wall-friction dissipation
    influx: np.ndarray              # net boundary energy inflow
    mass: np.ndarray                # total water volume
    residuals: np.ndarray           # (steps,) budget residuals
    snapshots: list                 # [(t, Diagnostics, LayerState), ...]
    summary: dict
    final: LayerState


def _influx(diag: Diagnostics, ctx: SimContext) -> float:
    if ctx.bc == "periodic":
        return 0.0
    from .kinematics import reconstruct_w

    p_mid, _ = hydrostatic_pressures(diag.geom.h, ctx.g)
    w, _ = reconstruct_w(diag.u, diag.geom, ctx.dx, ctx.bc)
    flux = energy_mod.energy_flux_density(
        diag.u, w, diag.geom, p_mid, ctx.g, diag.stress, ctx.dx, ctx.bc)
    return energy_mod.boundary_influx(flux, ctx.bc)


def run(
    scn: Scenario,
    progress_every: int = 0,
    max_steps: int = 10_000_000,
) -> RunResult:
    """Integrate a scenario to t_end, auditing energy and mass each step."""
    state, rhs, ctx = make_rhs(scn)
    controls = ctx.controls
    dx = ctx.dx
    t_end = controls.t_end
    every = scn.output.snapshot_every
    neg_tol = 1e-10 * max(1.0, float(state.H.max()))

    times = [0.0]
    cols = {name: [] for name in ("E", "DG", "RE", "fric", "influx", "mass")}
    snapshots = []
    wall0 = time.perf_counter()

    def audit(r: RhsEval):
        d = r.diag
        cols["E"].append(energy_mod.total_energy(d.u, d.geom, ctx.g, dx))
        cols["DG"].append(d.diss_exchange)
        cols["RE"].append(d.diss_stress)
        cols["fric"].append(d.diss_friction)
        cols["influx"].append(_influx(d, ctx))
        cols["mass"].append(float(state.H.sum() * dx))

    t = 0.0
    step_no = 0
    r = rhs(state)
    audit(r)
    snapshots.append((t, r.diag, state.copy()))
    next_snap = every if every > 0 else np.inf

    while t < t_end * (1.0 - 1e-13):
        dt = stable_dt(state.H, r.diag.u, r.diag.geom, ctx)
        dt = min(dt, t_end - t)
        if dt <= max(1e-13, 1e-13 * t_end):
            raise SolverAbort("time step collapsed", step=step_no, time=t)
        state = step(state, dt, rhs, controls.integrator, ctx.h_dry,
                     neg_tol, first_stage=r, step_no=step_no, t=t)
        t += dt
        step_no += 1
        if step_no > max_steps:
            raise SolverAbort("step budget exhausted", step=step_no, time=t)
        r = rhs(state)
        times.append(t)
        audit(r)
        if t >= next_snap * (1.0 - 1e-12):
            snapshots.append((t, r.diag, state.copy()))
            while next_snap <= t * (1.0 + 1e-12):
                next_snap += every
        if progress_every and step_no % progress_every == 0:
            print(f"step={step_no} t={t:.6g} dt={dt:.3e} "
                  f"mass={cols['mass'][-1]:.12g} energy={cols['E'][-1]:.12g}",
                  file=sys.stderr)

    if snapshots[-1][0] != t:
        snapshots.append((t, r.diag, state.copy()))

    times = np.array(times)
    E = np.array(cols["E"])
    DG = np.array(cols["DG"])
    RE = np.array(cols["RE"])
    fric = np.array(cols["fric"])
    influx = np.array(cols["influx"])
    mass = np.array(cols["mass"])
    residuals = (energy_mod.budget_residuals(times, E, influx, DG, RE, fric)
                 if len(times) > 1 else np.zeros(0))

    m0 = mass[0] if mass[0] != 0.0 else 1.0
    summary = {
        "steps": step_no,
        "t_end": t,
        "mass_drift": float(np.abs(mass - mass[0]).max() / abs(m0)),
        "energy_change": float(E[-1] - E[0]),
        "min_depth": float(state.H.min()),
        "wall_time": time.perf_counter() - wall0,
    }
    return RunResult(times=times, E_total=E, D_G=DG, R_E=RE, friction=fric,
                     influx=influx, mass=mass, residuals=residuals,
                     snapshots=snapshots, summary=summary, final=state)
