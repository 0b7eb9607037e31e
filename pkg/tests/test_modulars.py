import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from fracorlicz.grid import build_grid
from fracorlicz.modulars import (NonPositiveBeta, beta_values, luxemburg_norm, modular_G, modular_sG,
                                 norm_G, sandwich_check, seminorm_sG, x_norm)
from fracorlicz.young import make_young

GRID = build_grid((0, 1), 1 / 8, 0.25, 0.3)
Y2 = make_young("power", p=2)


def test_modular_G_constant(grid16):
    u = grid16.zeros() + 2.0
    assert modular_G(Y2, u) == pytest.approx(2.0)          # G(2) |Omega|
    assert modular_G(Y2, u, "exterior", weight=3.0) == pytest.approx(3 * 2.0 * 0.5)


def test_star_modular_brute_force():
    rng = np.random.default_rng(0)
    u = GRID.zeros() + rng.normal(size=GRID.n_nodes)
    x, v = GRID.nodes[:, 0], u.values
    total = 0.0
    for i in range(GRID.n_nodes):
        for j in range(GRID.n_nodes):
            if i != j and (GRID.interior[i] or GRID.interior[j]):
                r = abs(x[i] - x[j])
                total += Y2.G(abs(v[i] - v[j]) / r ** 0.3) * GRID.h ** 2 / r
    assert modular_sG(Y2, u, "star") == pytest.approx(total, rel=1e-12)


def test_constant_has_zero_seminorm(grid16):
    assert modular_sG(Y2, grid16.zeros() + 5.0, "full") == 0.0
    assert seminorm_sG(Y2, grid16.zeros() + 5.0) == 0.0


def test_power_norm_closed_form(grid16):
    # for G = t^2/2 the Luxemburg norm is sqrt(sum u^2 w / 2)
    u = grid16.function(np.sin)
    ref = np.sqrt(np.sum(u.interior_values ** 2) * grid16.h / 2)
    assert norm_G(Y2, u) == pytest.approx(ref, rel=1e-10)


def test_zero_and_exterior_only_norms(grid16):
    assert norm_G(Y2, grid16.zeros()) == 0.0
    u = grid16.function(np.sin).restrict_interior()
    assert norm_G(Y2, u, "exterior", 1.0) == 0.0


@given(arrays(float, GRID.n_nodes, elements=st.floats(-1e3, 1e3)), st.floats(0.01, 100))
def test_norm_homogeneous(v, c):
    if not np.any(np.abs(v) > 1e-6):
        return
    n1 = luxemburg_norm(lambda w: modular_G(Y2, w, "interior", None, GRID), c * v)
    n0 = luxemburg_norm(lambda w: modular_G(Y2, w, "interior", None, GRID), v)
    assert n1 == pytest.approx(c * n0, rel=1e-9, abs=1e-300)


@given(arrays(float, GRID.n_nodes, elements=st.floats(-100, 100)))
def test_x_norm_triangle(v):
    w = np.sin(np.arange(GRID.n_nodes))
    lhs = x_norm(Y2, v + w, 1.0, GRID)
    assert lhs <= (x_norm(Y2, v, 1.0, GRID) + x_norm(Y2, w, 1.0, GRID)) * (1 + 1e-9)


def test_beta_validation(grid16):
    with pytest.raises(NonPositiveBeta):
        beta_values(grid16, 0.0)
    with pytest.raises(NonPositiveBeta):
        beta_values(grid16, lambda x: x - 0.5)
    b = beta_values(grid16, np.arange(1, grid16.n_exterior + 1, dtype=float))
    assert np.all(b[grid16.interior] == 0)


def test_sandwich_small(young, grid16, rng):
    out = sandwich_check(young, grid16, rng, n_samples=100)
    for rec in out.values():
        assert rec["violations"] == 0 and rec["roundtrip_worst"] < 1e-8
