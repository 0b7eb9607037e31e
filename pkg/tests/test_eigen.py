import numpy as np
import pytest
from scipy.linalg import eigh

from fracorlicz.eigen import (BoundaryCondition, EigenResult, NoConvergence, OrderingViolation,
                              SolverOptions, ZeroFunction, lower_bound_constant, mu_sweep,
                              pencil_ground_state, project_to_level, solve_from, solve_min,
                              verify_order, weak_form_defect)
from fracorlicz.grid import build_grid
from fracorlicz.modulars import modular_G
from fracorlicz.young import make_young

Y2 = make_young("power", p=2)
YL = make_young("power_log", p=2)
OPTS = SolverOptions(tol=1e-8, n_starts=4)


@pytest.fixture(scope="module")
def dom():
    return build_grid((0, 1), 1 / 32, 0.25, 0.3)


def dirichlet_oracle(d):
    """Smallest generalized eigenvalue of (Hess Q + w I, w I) on interior nodes,
    with Q the full-pair quadratic form assembled pair by pair."""
    x = d.nodes[:, 0]
    idx = np.flatnonzero(d.interior)
    n = idx.size
    H = np.zeros((n, n))
    for a, i in enumerate(idx):
        for j in range(d.n_nodes):
            if i == j:
                continue
            r = abs(x[i] - x[j])
            c = 2 * d.h ** 2 / r ** (1 + 2 * d.s)   # both ordered pairs
            H[a, a] += c
            b = np.searchsorted(idx, j)
            if b < n and idx[b] == j:
                H[a, b] -= c
    w = d.h
    return eigh(H + w * np.eye(n), w * np.eye(n), eigvals_only=True)[0]


def test_dirichlet_matches_oracle(dom):
    r = solve_min(Y2, BoundaryCondition("dirichlet"), 1.0, dom, SolverOptions(tol=1e-8, n_starts=8))
    assert r.converged
    assert r.capital_lambda == pytest.approx(dirichlet_oracle(dom), rel=1e-8)
    assert pencil_ground_state(dom, BoundaryCondition("dirichlet"))[0] == pytest.approx(
        r.capital_lambda, rel=1e-8)
    assert np.all(r.u.exterior_values == 0)


@pytest.mark.parametrize("kind", ["neumann", "regional_neumann"])
def test_neumann_constants(dom, kind):
    r = solve_min(YL, BoundaryCondition(kind), 0.7, dom, OPTS)
    assert r.capital_lambda == pytest.approx(1.0, abs=1e-10)
    assert r.lambda_ == pytest.approx(1.0, abs=1e-10)


def test_level_set_holds(dom):
    r = solve_min(YL, BoundaryCondition("robin", 1.0), 2.5, dom, OPTS)
    assert modular_G(YL, r.u) == pytest.approx(2.5, rel=1e-10)


def test_ordering_chain_power_log(dom):
    res = {k: solve_min(YL, BoundaryCondition(k, 1.0 if k == "robin" else None), 1.0, dom, OPTS)
           for k in ("regional_neumann", "neumann", "robin", "dirichlet")}
    rep = verify_order(res, YL)
    assert rep.ok
    assert res["robin"].capital_lambda < res["dirichlet"].capital_lambda


def test_manufactured_ordering_violation(dom):
    fake = lambda L: EigenResult("x", L, L, 1.0, dom.zeros(), 0.0, 0, True)
    with pytest.raises(OrderingViolation) as exc:
        verify_order({"neumann": fake(3.0), "robin": fake(2.0)}, Y2)
    assert exc.value.failures
    rep = verify_order({"neumann": fake(3.0), "robin": fake(2.0)}, Y2, raise_on_failure=False)
    assert not rep.ok


@pytest.mark.parametrize("kind", ["dirichlet", "robin", "neumann"])
def test_weak_form(dom, rng, kind):
    bc = BoundaryCondition(kind, 1.0 if kind == "robin" else None)
    r = solve_min(YL, bc, 1.0, dom, OPTS)
    scale = r.capital_lambda * np.sqrt(dom.h)
    for _ in range(5):
        v = dom.zeros() + rng.normal(size=dom.n_nodes)
        assert abs(weak_form_defect(YL, bc, r, v)) < 1e-6 * scale * np.linalg.norm(v.values)


def test_sign_flip_and_monotone_history(dom):
    bc = BoundaryCondition("dirichlet")
    start = np.sin(np.pi * dom.nodes[:, 0]) + 0.3
    a = solve_from(YL, bc, 1.0, dom, start, OPTS)
    b = solve_from(YL, bc, 1.0, dom, -start, OPTS)
    assert a.capital_lambda == pytest.approx(b.capital_lambda, rel=1e-8)
    h = np.array(a.history)
    assert np.all(np.diff(h) <= 1e-12 * h[0])


def test_zero_start_rejected(dom):
    with pytest.raises(ZeroFunction):
        solve_from(Y2, BoundaryCondition("dirichlet"), 1.0, dom, np.zeros(dom.n_nodes))
    with pytest.raises(ZeroFunction):
        project_to_level(Y2, dom.zeros(), 1.0)


def test_no_convergence_flag(dom):
    opts = SolverOptions(tol=1e-14, max_iter=2, n_starts=1, raise_on_failure=True)
    with pytest.raises(NoConvergence) as exc:
        solve_min(YL, BoundaryCondition("dirichlet"), 1.0, dom, opts)
    assert exc.value.result is not None


def test_mu_sweep_power_invariance(dom):
    rows, summ = mu_sweep(Y2, BoundaryCondition("robin", 1.0), [1e-2, 1e-1, 1, 10, 100], dom, OPTS)
    assert summ["relative_spread"] < 1e-6
    assert summ["min_Lambda"] >= 1 >= summ["lower_bound"]
    with pytest.raises(ValueError):
        mu_sweep(Y2, BoundaryCondition("robin", 1.0), [1, 10], dom, OPTS)


def test_lower_bound_below_dirichlet(dom):
    r = solve_min(YL, BoundaryCondition("dirichlet"), 1.0, dom, OPTS)
    assert lower_bound_constant(YL, dom) <= r.capital_lambda
