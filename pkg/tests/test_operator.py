import numpy as np
import pytest
from hypothesis import given, strategies as st

from fracorlicz.grid import build_grid
from fracorlicz.modulars import modular_sG
from fracorlicz.operator import (apply_operator, divergence_defect, ibp_defect, interior_cancellation,
                                 modular_gradient, modular_hessian, normal_derivative, pairing, perimeter)
from fracorlicz.young import make_young

Y2 = make_young("power", p=2)


def dense_oracle(d, kind="full"):
    """Matrix of the quadratic operator assembled from coordinates, row by row."""
    x = d.nodes[:, 0]
    N = d.n_nodes
    A = np.zeros((N, N))
    for i in range(N):
        if not d.interior[i]:
            continue
        for j in range(N):
            if i == j or (kind == "regional" and not d.interior[j]):
                continue
            c = d.h / abs(x[i] - x[j]) ** (1 + 2 * d.s)
            A[i, i] += c
            A[i, j] -= c
    return A


@pytest.mark.parametrize("kind", ["full", "regional"])
def test_dense_oracle_power(kind):
    d = build_grid((0, 1), 1 / 64, 0.25, 0.3)
    rng = np.random.default_rng(3)
    A = dense_oracle(d, kind)
    for _ in range(5):
        u = d.zeros() + rng.normal(size=d.n_nodes)
        np.testing.assert_allclose(apply_operator(Y2, u, kind).values, A @ u.values,
                                   rtol=1e-12, atol=1e-12 * np.abs(A).max())


def test_operator_vanishes_outside_and_factor(grid16):
    u = grid16.function(np.sin)
    L = apply_operator(Y2, u)
    assert np.all(L.exterior_values == 0)
    np.testing.assert_allclose(apply_operator(Y2, u, factor=2.0).values, 2 * L.values)
    assert np.all(normal_derivative(Y2, u).interior_values == 0)


def test_regional_ignores_exterior(grid16):
    u = grid16.function(np.cos)
    w = u.restrict_interior() + np.where(grid16.exterior, 7.0, 0.0)
    np.testing.assert_allclose(apply_operator(Y2, u, "regional").values,
                               apply_operator(Y2, w, "regional").values)


def test_identities(young, grid32, rng):
    for _ in range(10):
        u = grid32.zeros() + rng.normal(size=grid32.n_nodes)
        v = grid32.zeros() + rng.normal(size=grid32.n_nodes)
        assert divergence_defect(young, u) < 1e-12
        assert ibp_defect(young, u, v) < 1e-12
        assert interior_cancellation(young, u) == 0.0


def test_pairing_symmetric_for_power(grid16, rng):
    u = grid16.zeros() + rng.normal(size=grid16.n_nodes)
    v = grid16.zeros() + rng.normal(size=grid16.n_nodes)
    for kind in ("full", "regional", "star"):
        assert pairing(Y2, u, v, kind) == pytest.approx(pairing(Y2, v, u, kind), rel=1e-12)
    assert pairing(Y2, u, u, "star") == pytest.approx(modular_sG(Y2, u, "star"), rel=1e-12)


def test_gradient_and_hessian_fd(young, grid16, rng):
    v = rng.normal(size=grid16.n_nodes)
    e = rng.normal(size=grid16.n_nodes)
    eps = 1e-6
    for region in ("full", "regional", "star"):
        g = modular_gradient(young, v, grid16, region)
        fd = (modular_sG(young, v + eps * e, region, grid16)
              - modular_sG(young, v - eps * e, region, grid16)) / (2 * eps)
        assert g @ e == pytest.approx(fd, rel=1e-6)
        H = modular_hessian(young, v, grid16, region)
        fdH = (modular_gradient(young, v + eps * e, grid16, region)
               - modular_gradient(young, v - eps * e, grid16, region)) / (2 * eps)
        np.testing.assert_allclose(H @ e, fdH, rtol=1e-5, atol=1e-6 * np.abs(fdH).max())


def test_star_gradient_is_twice_pairing(grid16, rng):
    u = grid16.zeros() + rng.normal(size=grid16.n_nodes)
    v = grid16.zeros() + rng.normal(size=grid16.n_nodes)
    Y = make_young("power_log", p=2)
    assert modular_gradient(Y, u.values, grid16, "star") @ v.values == pytest.approx(
        2 * pairing(Y, u, v, "star"), rel=1e-12)


def test_perimeter_brute_force():
    d = build_grid((0, 1), 1 / 16, 0.5, 0.2)
    Y = make_young("power", p=3)
    x = d.nodes[:, 0]
    ref = 0.0
    for i in np.flatnonzero(d.interior):
        for e in np.flatnonzero(d.exterior):
            r = abs(x[i] - x[e])
            ref += Y.g(r ** -0.2) * d.h ** 2 / r ** 1.2
    val, tail = perimeter(Y, d)
    assert val == pytest.approx(ref, rel=1e-12)
    assert 0 < tail < np.inf


@given(st.floats(-5, 5), st.floats(0.1, 3))
def test_affine_invariance(c, a):
    d = build_grid((0, 1), 1 / 8, 0.25, 0.3)
    u = d.function(np.sin)
    base = apply_operator(Y2, u).values
    np.testing.assert_allclose(apply_operator(Y2, a * u + c).values, a * base,
                               rtol=1e-9, atol=1e-9 * np.abs(base).max())
