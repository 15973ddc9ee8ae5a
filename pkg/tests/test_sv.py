"""Standalone single-layer reference solver."""
import numpy as np

from layerflow.euler import euler_rhs
from layerflow.geometry import LayerPartition, make_bathymetry
from layerflow.sv import sv_dissipation, sv_rhs, sv_velocity


def test_sv_velocity_masks_dry_cells():
    H = np.array([1.0, 0.0, 2.0])
    q = np.array([0.5, 3.0, -1.0])
    u = sv_velocity(H, q)
    assert np.allclose(u, [0.5, 0.0, -0.5])


def test_sv_lake_at_rest():
    rng = np.random.default_rng(59)
    n, dx = 50, 0.02
    zb = 0.3 * rng.random(n)
    H = 1.0 - zb
    for bc in ("periodic", "wall", "transmissive"):
        ev = sv_rhs(H, np.zeros(n), zb, 9.81, 0.0, 0.0, 0.0, dx, bc)
        assert np.abs(ev.dH).max() < 1e-13
        assert np.abs(ev.dq).max() < 1e-12


def test_sv_flat_periodic_conservation():
    rng = np.random.default_rng(61)
    n, dx = 40, 0.025
    H = rng.uniform(0.3, 1.5, n)
    q = rng.standard_normal(n) * 0.4
    ev = sv_rhs(H, q, np.zeros(n), 9.81, 0.0, 0.0, 0.0, dx, "periodic")
    assert abs(ev.dH.sum() * dx) < 1e-14
    assert abs(ev.dq.sum() * dx) < 1e-13


def test_sv_friction_is_a_local_drag():
    # x-uniform flow on a flat bed: the momentum tendency is exactly
    # -(k_l + k_t H |u|) u
    n = 8
    H = np.full(n, 1.3)
    u0 = 0.7
    ev = sv_rhs(H, H * u0, np.zeros(n), 9.81, 0.0, 0.2, 0.1, 0.5, "periodic")
    kappa = 0.2 + 0.1 * 1.3 * 0.7
    assert np.allclose(ev.dq, -kappa * u0, atol=1e-14)
    assert np.allclose(ev.dH, 0.0, atol=1e-15)


def test_sv_dissipation_sign_on_random_states():
    rng = np.random.default_rng(67)
    n, dx = 24, 1.0 / 24
    x = (np.arange(n) + 0.5) * dx
    for trial in range(30):
        zb = 0.1 * np.sin(2 * np.pi * x + rng.uniform(0, 7))
        H = 1.0 + 0.3 * rng.random(n)
        q = H * rng.standard_normal(n) * 0.5
        mu = 10.0 ** rng.uniform(-3, -1)
        ev = sv_rhs(H, q, zb, 9.81, mu, 0.05, 0.02, dx, "periodic")
        d = sv_dissipation(ev, H, sv_velocity(H, q), zb, mu, 0.05, 0.02,
                           dx, "periodic")
        assert d <= 0.0


def test_sv_matches_multilayer_on_open_boundaries():
    # same right-hand side through both code paths, transmissive walls
    rng = np.random.default_rng(71)
    n, dx = 30, 1.0 / 30
    x = (np.arange(n) + 0.5) * dx
    zb = -0.4 + 0.1 * np.sin(2 * np.pi * x)
    H = 0.8 + 0.1 * np.cos(4 * np.pi * x)
    u = 0.2 * np.sin(2 * np.pi * x)
    bc = "transmissive"
    ref = sv_rhs(H, H * u, zb, 9.81, 0.0, 0.0, 0.0, dx, bc)
    part = LayerPartition.uniform(1)
    bathy = make_bathymetry(zb, dx, bc)
    ev = euler_rhs(H, (H * u)[None, :], bathy, part, 9.81, dx, bc)
    assert np.abs(ev.dH - ref.dH).max() < 1e-14
    assert np.abs(ev.dq[0] - ref.dq).max() < 1e-13
