"""Derivative stencils, ghost padding and the cell-centered grid."""
import numpy as np
import pytest

from layerflow.gridops import Grid, d2dx2, ddx, pad_cells


def test_grid_centers_and_spacing():
    g = Grid(0.0, 1.0, 4)
    assert g.dx == 0.25
    assert np.allclose(g.x, [0.125, 0.375, 0.625, 0.875])


def test_grid_rejects_bad_domains():
    with pytest.raises(ValueError):
        Grid(0.0, 1.0, 2)
    with pytest.raises(ValueError):
        Grid(1.0, 1.0, 10)
    with pytest.raises(ValueError):
        Grid(0.0, np.inf, 10)


def test_ddx_exact_on_linear_fields():
    # one-sided end stencils keep linear fields exact for open boundaries
    n, dx = 17, 0.3
    x = np.arange(n) * dx
    f = 2.0 - 1.5 * x
    for bc in ("transmissive", "wall"):
        assert np.allclose(ddx(f, dx, bc), -1.5, atol=1e-13)


def test_ddx_periodic_second_order():
    errs = []
    for n in (32, 64):
        dx = 1.0 / n
        x = (np.arange(n) + 0.5) * dx
        f = np.sin(2 * np.pi * x)
        d = ddx(f, dx, "periodic")
        errs.append(np.abs(d - 2 * np.pi * np.cos(2 * np.pi * x)).max())
    order = np.log2(errs[0] / errs[1])
    assert order > 1.9


def test_d2dx2_exact_on_quadratics_inside():
    n, dx = 12, 0.1
    x = np.arange(n) * dx
    f = 3.0 * x * x - x + 2.0
    d2 = d2dx2(f, dx, "transmissive")
    assert np.allclose(d2[1:-1], 6.0, atol=1e-10)


def test_pad_cells_periodic_wraps():
    f = np.array([1.0, 2.0, 3.0])
    p = pad_cells(f, "periodic")
    assert list(p) == [3.0, 1.0, 2.0, 3.0, 1.0]


def test_pad_cells_transmissive_copies_edges():
    f = np.array([1.0, 2.0, 3.0])
    p = pad_cells(f, "transmissive")
    assert list(p) == [1.0, 1.0, 2.0, 3.0, 3.0]


def test_pad_cells_wall_flips_sign():
    f = np.array([1.0, 2.0, 3.0])
    p = pad_cells(f, "wall", sign=-1.0)
    assert list(p) == [-1.0, 1.0, 2.0, 3.0, -3.0]
    # depth-like fields keep their sign at walls
    p2 = pad_cells(f, "wall")
    assert list(p2) == [1.0, 1.0, 2.0, 3.0, 3.0]


def test_unknown_boundary_rejected():
    f = np.zeros(4)
    with pytest.raises(ValueError):
        ddx(f, 0.1, "open")
    with pytest.raises(ValueError):
        pad_cells(f, "open")
