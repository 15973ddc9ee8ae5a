"""Snapshot and audit-series CSV output.

All numbers are written with 17 significant digits so files are
byte-for-byte reproducible and round-trip to the exact binary floats.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .kinematics import reconstruct_w
from .energy import layer_energies
from .state import hydrostatic_pressures
from .timeloop import Diagnostics, RunResult, SimContext


@dataclass
class Snapshot:
    """One output frame: geometry, velocities and derived diagnostics."""

    t: float
    x: np.ndarray       # (n,)
    zb: np.ndarray      # (n,)
    H: np.ndarray       # (n,)
    eta: np.ndarray     # (n,) free surface
    u: np.ndarray       # (N, n)
    w: np.ndarray       # (N, n)
    G: np.ndarray       # (N-1, n) interior interface transfers
    p: np.ndarray       # (N, n) midpoint pressures
    E: np.ndarray       # (N, n) layer energies


def snapshot_frame(t: float, H: np.ndarray, diag: Diagnostics,
                   ctx: SimContext) -> Snapshot:
    geom = diag.geom
    w, _ = reconstruct_w(diag.u, geom, ctx.dx, ctx.bc)
    p_mid, _ = hydrostatic_pressures(geom.h, ctx.g)
    return Snapshot(
        t=t,
        x=ctx.grid.x,
        zb=ctx.bathy.zb,
        H=H.copy(),
        eta=geom.z_if[-1].copy(),
        u=diag.u.copy(),
        w=w,
        G=diag.G[1:-1].copy(),
        p=p_mid,
        E=layer_energies(diag.u, geom, ctx.g),
    )


def _num(v: float) -> str:
    return format(float(v), ".17g")


def snapshot_header(n_layers: int) -> list[str]:
    cols = ["x", "zb", "H", "eta"]
    cols += [f"u_{a + 1}" for a in range(n_layers)]
    cols += [f"w_{a + 1}" for a in range(n_layers)]
    cols += [f"G_{k}h" for k in range(1, n_layers)]
    cols += [f"p_{a + 1}" for a in range(n_layers)]
    cols += [f"E_{a + 1}" for a in range(n_layers)]
    return cols


def write_snapshot(path, snap: Snapshot) -> None:
    N = snap.u.shape[0]
    table = np.vstack([snap.x, snap.zb, snap.H, snap.eta,
                       snap.u, snap.w, snap.G, snap.p, snap.E])
    with open(path, "w", newline="\n") as f:
        f.write(f"# t = {_num(snap.t)}\n")
        f.write(",".join(snapshot_header(N)) + "\n")
        for i in range(table.shape[1]):
            f.write(",".join(_num(v) for v in table[:, i]) + "\n")


def read_snapshot(path) -> tuple[float, list[str], np.ndarray]:
    """Inverse of write_snapshot: (t, column names, table (n, n_cols))."""
    with open(path) as f:
        first = f.readline().strip()
        t = float(first.split("=", 1)[1])
        names = f.readline().strip().split(",")
        rows = [[float(v) for v in line.split(",")] for line in f if line.strip()]
    return t, names, np.array(rows)


ENERGY_COLUMNS = ["t", "E_total", "D_G", "R_E", "friction", "residual", "mass"]


def write_energy_series(path, result: RunResult) -> None:
    """Per-step audit rows; the residual of the closing row is nan."""
    res = np.append(result.residuals, np.nan)
    with open(path, "w", newline="\n") as f:
        f.write(",".join(ENERGY_COLUMNS) + "\n")
        for k in range(result.times.size):
            row = (result.times[k], result.E_total[k], result.D_G[k],
                   result.R_E[k], result.friction[k], res[k], result.mass[k])
            f.write(",".join(_num(v) for v in row) + "\n")


def read_energy_series(path) -> tuple[list[str], np.ndarray]:
    with open(path) as f:
        names = f.readline().strip().split(",")
        rows = [[float(v) for v in line.split(",")] for line in f if line.strip()]
    return names, np.array(rows)
