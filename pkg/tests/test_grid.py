import numpy as np
import pytest
from hypothesis import given, strategies as st

from fracorlicz.grid import (BadGeometry, DiagonalPair, DomainMismatch, GridFunction, build_grid,
                             holder_matrix, holder_quotient)


def test_node_counts_1d():
    d = build_grid((0, 1), 0.1, 1.0, 0.3)
    assert (d.n_interior, d.n_exterior) == (10, 20)
    assert d.volume == 1.0 and d.cell_weight == pytest.approx(0.1)


def test_node_counts_2d():
    d = build_grid(((0, 1), (0, 1)), 0.25, 0.25, 0.3)
    assert d.n_interior == 16 and d.n_nodes == 36
    assert d.diameter == pytest.approx(np.sqrt(2))


def test_tables_symmetric_and_diagonal_free(grid16):
    for tab in (grid16.dist, grid16.kernel_s, grid16.kernel_mu):
        assert np.array_equal(tab, tab.T)
        assert np.all(np.diag(tab) == 0)


@pytest.mark.parametrize("kwargs", [dict(h=0.3), dict(collar_R=0.01), dict(s=1.2), dict(h=-1)])
def test_bad_geometry(kwargs):
    args = dict(omega=(0, 1), h=0.125, collar_R=0.25, s=0.3)
    args.update(kwargs)
    with pytest.raises(BadGeometry):
        build_grid(**args)


def test_grid_function_arithmetic_and_mismatch(grid16):
    u = grid16.function(lambda x: x)
    v = 2 * u + 1
    np.testing.assert_allclose(v.values, 2 * grid16.nodes[:, 0] + 1)
    other = build_grid((0, 1), 1 / 16, 0.25, 0.3)
    with pytest.raises(DomainMismatch):
        u + other.zeros()
    with pytest.raises(DomainMismatch):
        GridFunction(np.zeros(3), grid16)


def test_restrict_interior(grid16):
    u = grid16.function(np.cos).restrict_interior()
    assert np.all(u.exterior_values == 0)
    np.testing.assert_array_equal(u.interior_values, np.cos(grid16.nodes[grid16.interior, 0]))


def test_holder_quotient(grid16):
    u = grid16.function(lambda x: x)
    i, j = 3, 7
    r = abs(grid16.nodes[i, 0] - grid16.nodes[j, 0])
    assert holder_quotient(u, i, j) == pytest.approx((u.values[i] - u.values[j]) / r ** 0.3)
    with pytest.raises(DiagonalPair):
        holder_quotient(u, 2, 2)
    H = holder_matrix(u)
    assert np.array_equal(H, -H.T)


def test_refine_halves_h(grid16):
    fine = grid16.refine()
    assert fine.h == grid16.h / 2 and fine.n_interior == 2 * grid16.n_interior


def test_tail_bound_1d_exact():
    # direct integral over Omega x (R minus the collar box) in 1D
    from scipy.integrate import quad
    s, R = 0.3, 0.5
    d = build_grid((0, 1), 0.25, R, s)
    inner = lambda x: (x + R) ** (-s) / s + (1 - x + R) ** (-s) / s
    assert d.tail_estimate == pytest.approx(quad(inner, 0, 1)[0], rel=1e-10)


@given(st.integers(2, 12), st.floats(0.05, 0.95))
def test_interior_mask_matches_omega(k, s):
    d = build_grid((0, 1), 1 / k, 1 / k, s)
    x = d.nodes[:, 0]
    assert np.array_equal(d.interior, (x > 0) & (x < 1))
