"""Column state helpers: velocities, pressures and interface exchange."""
import numpy as np

from layerflow.geometry import LayerPartition
from layerflow.state import (exchange_fluxes, hydrostatic_pressures,
                             interface_velocities, velocities)


def test_velocities_mask_dry_columns():
    part = LayerPartition.uniform(2)
    H = np.array([2.0, 0.0, 1e-12])
    q = np.array([[1.0, 3.0, 5.0], [2.0, 4.0, 6.0]])
    u = velocities(H, q, part, h_dry=1e-8)
    assert np.allclose(u[:, 0], [1.0, 2.0])
    assert (u[:, 1:] == 0.0).all()


def test_hydrostatic_pressures_match_loop():
    rng = np.random.default_rng(3)
    g = 9.81
    h = rng.uniform(0.1, 2.0, size=(4, 7))
    p_mid, p_if = hydrostatic_pressures(h, g)
    N, n = h.shape
    for i in range(n):
        for k in range(N + 1):
            ref = g * h[k:, i].sum()
            assert abs(p_if[k, i] - ref) < 1e-12 * max(1.0, ref)
        for a in range(N):
            ref = g * (h[a + 1:, i].sum() + 0.5 * h[a, i])
            assert abs(p_mid[a, i] - ref) < 1e-12 * max(1.0, ref)
    assert (p_if[-1] == 0.0).all()
    assert np.allclose(p_if[0], g * h.sum(axis=0))


def test_exchange_fluxes_vanish_at_bed_and_surface():
    rng = np.random.default_rng(5)
    part = LayerPartition(np.array([0.2, 0.3, 0.5]))
    div = rng.standard_normal((3, 11))
    G = exchange_fluxes(div, part)
    assert (G[0] == 0.0).all()
    assert (G[-1] == 0.0).all()


def test_exchange_fluxes_match_loop():
    rng = np.random.default_rng(6)
    part = LayerPartition(np.array([0.4, 0.1, 0.5]))
    div = rng.standard_normal((3, 9))
    G = exchange_fluxes(div, part)
    c = np.concatenate([[0.0], np.cumsum(part.fractions)])
    for i in range(9):
        total = div[:, i].sum()
        for k in range(4):
            ref = div[:k, i].sum() - c[k] * total
            assert abs(G[k, i] - ref) < 1e-13


def test_proportional_divergence_exchanges_nothing():
    # when every layer drains in proportion to its fraction the interfaces
    # move with the column and no mass crosses them
    part = LayerPartition(np.array([0.25, 0.35, 0.4]))
    D = np.array([1.7, -0.3, 0.0, 2.2])
    div = part.fractions[:, None] * D[None, :]
    G = exchange_fluxes(div, part)
    assert np.abs(G).max() < 1e-14


def test_single_layer_has_no_exchange():
    part = LayerPartition.uniform(1)
    div = np.array([[1.0, -2.0, 3.0]])
    G = exchange_fluxes(div, part)
    assert G.shape == (2, 3)
    assert (G == 0.0).all()


def test_interface_velocity_takes_donor_side():
    # G > 0 sends mass downward, so the layer above the interface donates
    u = np.array([[1.0, 1.0], [2.0, 2.0]])
    G = np.array([[0.0, 0.0], [0.5, -0.5], [0.0, 0.0]])
    u_if = interface_velocities(u, G)
    assert u_if[1, 0] == 2.0
    assert u_if[1, 1] == 1.0
    # bed and surface rows carry the adjacent layer velocity
    assert (u_if[0] == u[0]).all()
    assert (u_if[-1] == u[-1]).all()


def test_interface_velocity_centered_mode():
    u = np.array([[1.0], [3.0]])
    G = np.array([[0.0], [9.9], [0.0]])
    u_if = interface_velocities(u, G, mode="centered")
    assert u_if[1, 0] == 2.0
