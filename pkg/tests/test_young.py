from types import SimpleNamespace

import numpy as np
import pytest
from hypothesis import given, strategies as st

from fracorlicz.young import (Inconclusive, InvalidParams, NotSubcritical,
                              check_structure, complementary, compute_indices, critical_sobolev,
                              essentially_stronger, g3_exponents, index_ratio, inequality_battery,
                              inverse_G, inverse_g, make_young, tabulated)


def test_power_values():
    Y = make_young("power", p=2)
    assert Y.G(2.0) == 2.0
    assert Y.g(3.0) == 3.0
    assert (Y.p_minus, Y.p_plus) == (2.0, 2.0)
    assert Y.delta2_constant == 4.0


def test_sum_of_powers_values():
    Y = make_young("sum_of_powers", exponents=(2, 4))
    assert Y.G(1.0) == pytest.approx(2.0)
    assert Y.g(1.0) == pytest.approx(6.0)


def test_invalid_params():
    with pytest.raises(InvalidParams):
        make_young("power", p=1.0)
    with pytest.raises(InvalidParams):
        make_young("no_such_family")


def test_sampled_indices_bracket_ratio():
    for Y in (make_young("power_log", p=2), make_young("sum_of_powers", exponents=(2, 4))):
        lo, hi = compute_indices(Y, analytic=False)
        r = index_ratio(Y, np.logspace(-4, 4, 500))
        assert lo <= r.min() + 1e-9 and r.max() <= hi + 1e-9


def test_analytic_indices_power_log():
    Y = make_young("power_log", p=2)
    assert (Y.p_minus, Y.p_plus) == (2.0, 3.0)
    lo, hi = compute_indices(Y, analytic=False)
    assert 2.0 <= lo + 0.1 and hi <= 3.0 + 0.01


def test_inverses_roundtrip(young):
    t = np.logspace(-3, 3, 50)
    np.testing.assert_allclose(young.G(inverse_G(young, young.G(t))), young.G(t), rtol=1e-10)
    np.testing.assert_allclose(inverse_g(young, young.g(t)), t, rtol=1e-8)


def test_complementary_closed_forms():
    # t^2/2 is self-conjugate; (t^3/3)~ = (2/3) b^{3/2}
    assert complementary(make_young("power", p=2)).G(3.0) == pytest.approx(4.5)
    assert complementary(make_young("power", p=3)).G(1.0) == pytest.approx(2 / 3)


@given(st.floats(0.01, 50), st.floats(0.01, 50))
def test_young_inequality_power3(a, b):
    Y = make_young("power", p=3)
    Gc = complementary(Y)
    assert a * b <= (Y.G(a) + Gc.G(b)) * (1 + 1e-10)


def test_critical_function_power_slope():
    # for G = t^2/2 in 1D the critical exponent is n p/(n - s p)
    for s, slope in ((0.25, 4.0), (0.1, 2.5)):
        Gs = critical_sobolev(make_young("power", p=2), 1, s)
        t = np.array([1e3, 1e5])
        est = np.diff(np.log(Gs.G(t))) / np.diff(np.log(t))
        assert est[0] == pytest.approx(slope, rel=1e-3)


def test_critical_function_not_subcritical():
    with pytest.raises(NotSubcritical) as exc:
        critical_sobolev(make_young("power", p=2), 1, 0.5)
    assert exc.value.exponent == pytest.approx(-1.0, abs=1e-6) or exc.value.exponent <= 0


def test_g3_exponents_sign():
    k0, k1 = g3_exponents(make_young("power", p=2), 1, 0.3)
    assert k0 > 0 and k1 >= 0


def test_structure_report():
    rep = check_structure(make_young("power", p=2))
    assert rep.g1_holds and rep.g2_holds and rep.g3_holds
    assert not check_structure(make_young("power", p=1.5)).g2_holds
    rec = rep.as_record()
    assert rec["p_minus"] == 2.0 and rec["delta2_constant"] == 4.0


def test_essentially_stronger_examples():
    t2, t3 = make_young("power", p=2), make_young("power", p=3)
    assert essentially_stronger(t2, t3)
    assert not essentially_stronger(t3, t2)
    double = make_young("custom", G=lambda t: t ** 2, g=lambda t: 2 * t)
    assert not essentially_stronger(t2, double)


def test_essentially_stronger_oscillating_is_inconclusive():
    # only G is consulted; the comparison flips sign along the whole tail
    wobble = SimpleNamespace(G=lambda t: t ** 2 / 2 * (1 + 0.5 * np.sin(3 * np.log(t))))
    with pytest.raises(Inconclusive):
        essentially_stronger(wobble, make_young("power", p=2), a_values=(1.0,))


def test_tabulated_matches_source():
    Y = make_young("power", p=3)
    t = np.logspace(-3, 3, 400)
    T = tabulated(t, Y.G(t))
    s = np.logspace(-2, 2, 37)
    np.testing.assert_allclose(T.G(s), Y.G(s), rtol=1e-6)


def test_battery_counts(young, rng):
    out = inequality_battery(young, rng, n_samples=2000)
    assert {"L1_lower", "L1_upper", "L2_doubling", "young", "complementary_of_g"} <= set(out)
    assert all(v["violations"] == 0 for v in out.values())
    assert all(v["checked"] > 0 for k, v in out.items() if k != "convexity_G2")
