"""Constrained minimization of the Dirichlet / Neumann / regional Neumann /
Robin quotients on the level set Phi_{G,Omega}(u) = mu.

The objective is E(u) = pair modular + Phi_{G,Omega} (+ beta exterior modular);
the quotient is Lambda = E(u)/mu and the eigenvalue lambda is the multiplier of
grad E = lambda grad Phi_{G,Omega} at the minimizer.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.linalg import eigh

from .grid import DiscreteDomain, GridFunction
from .modulars import beta_values, modular_G, pair_weights
from .operator import modular_gradient, pairing
from .young import YoungFunction

BC_KINDS = ("dirichlet", "neumann", "regional_neumann", "robin")
ORDER = ("regional_neumann", "neumann", "robin", "dirichlet")

# pair region of the seminorm modular for each boundary condition
SEMINORM_REGION = {"dirichlet": "full", "neumann": "star",
                   "regional_neumann": "regional", "robin": "star"}


class ZeroFunction(ValueError):
    pass


class DegenerateGradient(ArithmeticError):
    pass


class NoConvergence(RuntimeError):
    def __init__(self, msg, result=None):
        super().__init__(msg)
        self.result = result


class OrderingViolation(AssertionError):
    def __init__(self, msg, failures):
        super().__init__(msg)
        self.failures = failures


@dataclass(frozen=True)
class BoundaryCondition:
    kind: str
    beta: object = None

    def __post_init__(self):
        if self.kind not in BC_KINDS:
            raise ValueError(f"boundary condition must be one of {BC_KINDS}, got {self.kind!r}")
        if self.kind == "robin" and self.beta is None:
            raise ValueError("robin needs a positive beta")


@dataclass
class SolverOptions:
    tol: float = 1e-6
    max_iter: int = 50_000
    n_starts: int = 8
    seed: int = 0
    c1: float = 1e-4
    backtrack: float = 0.5
    level_rtol: float = 1e-12
    stall_iters: int = 200
    raise_on_failure: bool = False


@dataclass
class EigenResult:
    bc: str
    capital_lambda: float
    lambda_: float
    mu: float
    u: GridFunction
    stationarity_residual: float
    iterations: int
    converged: bool
    lambda_u_pairing: float = np.nan
    sign_stats: dict = field(default_factory=dict)
    start: str = ""
    history: list = field(default_factory=list, repr=False)

    def row(self) -> dict:
        return {"bc": self.bc, "mu": self.mu, "Lambda": self.capital_lambda,
                "lambda": self.lambda_, "residual": self.stationarity_residual,
                "iters": self.iterations}


# ---------------------------------------------------------------------------
# level set


def _level_scale(Y: YoungFunction, a: np.ndarray, w: float, mu: float, rtol: float) -> float:
    """t > 0 with sum G(t |a|) w = mu; safeguarded Newton inside a bisection bracket."""
    a = np.abs(a[a != 0])
    if a.size == 0:
        raise ZeroFunction("u vanishes identically on Omega")
    phi = lambda t: float(np.sum(Y.G(t * a)) * w)
    dphi = lambda t: float(np.sum(Y.g(t * a) * a) * w)
    lo, hi = 0.0, 1.0
    while phi(hi) < mu:
        lo, hi = hi, hi * 2.0
    t = hi
    for _ in range(200):
        f = phi(t) - mu
        if abs(f) <= rtol * mu:
            return t
        if f > 0:
            hi = t
        else:
            lo = t
        df = dphi(t)
        t_new = t - f / df if df > 0 else 0.5 * (lo + hi)
        if not lo < t_new < hi:
            t_new = 0.5 * (lo + hi)
        t = t_new
        if hi - lo <= 1e-16 * hi:
            return t
    return t


def project_to_level(Y: YoungFunction, u: GridFunction, mu: float, rtol: float = 1e-12) -> GridFunction:
    """Rescale u so that Phi_{G,Omega}(t u) = mu."""
    d = u.domain
    t = _level_scale(Y, u.values[d.interior], d.cell_weight, mu, rtol)
    return GridFunction(t * u.values, d)


# ---------------------------------------------------------------------------
# objective


class _Objective:
    """E, C and their gradients restricted to the free nodes of a boundary condition."""

    def __init__(self, Y: YoungFunction, bc: BoundaryCondition, domain: DiscreteDomain):
        self.Y, self.bc, self.d = Y, bc, domain
        self.region = SEMINORM_REGION[bc.kind]
        self.free = (domain.interior.copy() if bc.kind in ("dirichlet", "regional_neumann")
                     else np.ones(domain.n_nodes, dtype=bool))
        self.beta = beta_values(domain, bc.beta) if bc.kind == "robin" else None
        self.w = domain.cell_weight
        self.inside = domain.interior
        self.Wpair = pair_weights(domain, self.region)

    def full(self, x):
        v = np.zeros(self.d.n_nodes)
        v[self.free] = x
        return v

    def energy(self, v):
        Y, d = self.Y, self.d
        D = np.abs(v[:, None] - v[None, :]) * d.kernel_s
        E = float(np.sum(Y.G(D) * self.Wpair))
        E += float(np.sum(Y.G(np.abs(v[self.inside])))) * self.w
        if self.beta is not None:
            E += float(np.sum(self.beta * Y.G(np.abs(v)))) * self.w
        return E

    def grad_energy(self, v):
        Y = self.Y
        gE = modular_gradient(Y, v, self.d, self.region)
        gE += np.where(self.inside, Y.g_signed(v), 0.0) * self.w
        if self.beta is not None:
            gE += self.beta * Y.g_signed(v) * self.w
        return gE[self.free]

    def constraint(self, v):
        return float(np.sum(self.Y.G(np.abs(v[self.inside])))) * self.w

    def grad_constraint(self, v):
        return (np.where(self.inside, self.Y.g_signed(v), 0.0) * self.w)[self.free]


def _multiplier(gE, gC):
    nC = float(gC @ gC)
    if nC == 0:
        raise DegenerateGradient("gradient of the constraint vanishes")
    lam = float(gE @ gC) / nC
    d = gE - lam * gC
    nE = float(np.linalg.norm(gE))
    return lam, d, (float(np.linalg.norm(d)) / nE if nE > 0 else 0.0)


def _descend(obj: _Objective, v0: np.ndarray, mu: float, opts: SolverOptions):
    Y, d = obj.Y, obj.d
    level = lambda v: _level_scale(Y, v[d.interior], obj.w, mu, opts.level_rtol) * v
    v = level(obj.full(v0[obj.free]))
    x = v[obj.free]
    E = obj.energy(v)
    gE, gC = obj.grad_energy(v), obj.grad_constraint(v)
    lam, dirn, res = _multiplier(gE, gC)
    history = [E]
    x_prev = d_prev = None
    it = 0
    best_res, since_best = res, 0
    while res >= opts.tol and it < opts.max_iter and since_best < opts.stall_iters:
        nd2 = float(dirn @ dirn)
        if x_prev is None:
            t = 0.1 * float(np.linalg.norm(x)) / np.sqrt(nd2)
        else:
            sx, sy = x - x_prev, dirn - d_prev
            sxy = float(sx @ sy)
            t = float(sx @ sx) / sxy if sxy > 0 else 0.1 * float(np.linalg.norm(x)) / np.sqrt(nd2)
        while True:
            v_try = level(obj.full(x - t * dirn))
            E_try = obj.energy(v_try)
            if E_try <= E - opts.c1 * t * nd2:
                break
            t *= opts.backtrack
            if t * np.sqrt(nd2) <= 1e-17 * max(float(np.linalg.norm(x)), 1e-300):
                v_try, E_try = None, None
                break
        if v_try is None:
            break  # no descent possible at working precision
        x_prev, d_prev = x, dirn
        v = v_try
        x = v[obj.free]
        E = E_try
        gE, gC = obj.grad_energy(v), obj.grad_constraint(v)
        lam, dirn, res = _multiplier(gE, gC)
        history.append(E)
        it += 1
        # residual floor at working precision: stop instead of spinning
        if res < 0.5 * best_res:
            best_res, since_best = res, 0
        else:
            since_best += 1
    return v, E, lam, res, it, history


# ---------------------------------------------------------------------------
# starts


def dense_pencil(domain: DiscreteDomain, bc: BoundaryCondition):
    """Quadratic (G = t^2/2) problem as a symmetric pencil (A, M) on interior values,
    with free exterior values eliminated by a Schur complement.

    Returns ``(A, M, ext_map)`` where exterior values are ``ext_map @ u_interior``.
    """
    region = SEMINORM_REGION[bc.kind]
    w = domain.cell_weight
    C = pair_weights(domain, region) * domain.kernel_s ** 2
    C = 0.5 * (C + C.T)
    L = 2.0 * (np.diag(C.sum(axis=1)) - C)
    B = np.where(domain.interior, w, 0.0)
    if bc.kind == "robin":
        B = B + beta_values(domain, bc.beta) * w
    A = L + np.diag(B)
    ii, ee = domain.interior, domain.exterior
    Aii = A[np.ix_(ii, ii)]
    M = np.eye(int(ii.sum())) * w
    if bc.kind in ("neumann", "robin"):
        Aee, Aei = A[np.ix_(ee, ee)], A[np.ix_(ee, ii)]
        ext_map = -np.linalg.solve(Aee, Aei)
        Aii = Aii + Aei.T @ ext_map
    else:
        ext_map = np.zeros((int(ee.sum()), int(ii.sum())))
    return 0.5 * (Aii + Aii.T), M, ext_map


def pencil_ground_state(domain: DiscreteDomain, bc: BoundaryCondition):
    A, M, ext_map = dense_pencil(domain, bc)
    vals, vecs = eigh(A, M, subset_by_index=[0, 0])
    ui = vecs[:, 0]
    v = np.zeros(domain.n_nodes)
    v[domain.interior] = ui
    v[domain.exterior] = ext_map @ ui
    if v[domain.interior].sum() < 0:
        v = -v
    return float(vals[0]), v


def initial_guesses(Y: YoungFunction, bc: BoundaryCondition, domain: DiscreteDomain,
                    n_starts: int, seed: int):
    """Deterministic start list: constant, pencil ground state (quadratic G only),
    then random smooth fields."""
    rng = np.random.default_rng(seed)
    x = domain.nodes
    lo, hi = domain.omega[:, 0], domain.omega[:, 1]
    starts = [("constant", np.ones(domain.n_nodes))]
    if Y.family == "power" and Y.params == (2.0,):
        starts.append(("pencil", pencil_ground_state(domain, bc)[1]))
    while len(starts) < n_starts:
        k = len(starts)
        field_ = np.zeros(domain.n_nodes)
        for mode in range(1, 5):
            amp = rng.normal() / mode ** 2
            phase = rng.uniform(0, 2 * np.pi, size=domain.dim)
            arg = np.pi * mode * (x - lo) / (hi - lo)
            field_ += amp * np.prod(np.cos(arg + phase), axis=1)
        field_ += 0.5 * abs(rng.normal())
        starts.append((f"random{k}", field_))
    return starts[:n_starts]


# ---------------------------------------------------------------------------
# public solver


def _sign_stats(u: GridFunction):
    vi = u.interior_values
    return {"positive_fraction": float(np.mean(vi > 0)), "negative_fraction": float(np.mean(vi < 0)),
            "min": float(vi.min()), "max": float(vi.max())}


def solve_from(Y: YoungFunction, bc: BoundaryCondition, mu: float, domain: DiscreteDomain,
               start: np.ndarray, opts: Optional[SolverOptions] = None, label: str = "") -> EigenResult:
    opts = opts or SolverOptions()
    if mu <= 0:
        raise ValueError("mu must be positive")
    obj = _Objective(Y, bc, domain)
    v, E, lam, res, it, hist = _descend(obj, np.asarray(start, dtype=float), mu, opts)
    u = GridFunction(v, domain)
    gE, gC = obj.grad_energy(v), obj.grad_constraint(v)
    x = v[obj.free]
    lam_u = float(gE @ x) / float(gC @ x)
    return EigenResult(bc.kind, E / mu, lam, mu, u, res, it, res < opts.tol,
                       lam_u, _sign_stats(u), label, hist)


def solve_min(Y: YoungFunction, bc: BoundaryCondition, mu: float, domain: DiscreteDomain,
              opts: Optional[SolverOptions] = None) -> EigenResult:
    """Multistart projected gradient descent; returns the best converged result
    (or the best overall, flagged, when none converged)."""
    opts = opts or SolverOptions()
    if isinstance(bc, str):
        bc = BoundaryCondition(bc)
    results = [solve_from(Y, bc, mu, domain, start, opts, label)
               for label, start in initial_guesses(Y, bc, domain, opts.n_starts, opts.seed)]
    ok = [r for r in results if r.converged]
    best = min(ok or results, key=lambda r: r.capital_lambda)
    if not best.converged and opts.raise_on_failure:
        raise NoConvergence(f"{bc.kind}: residual {best.stationarity_residual:.3g} after "
                            f"{best.iterations} iterations", best)
    return best


# ---------------------------------------------------------------------------
# checks on results


def weak_form_defect(Y: YoungFunction, bc: BoundaryCondition, result: EigenResult,
                     v: GridFunction) -> float:
    """Left minus right side of the eigenvalue weak formulation tested with v.

    The pair term is the derivative of the seminorm modular in direction v.
    """
    u = result.u
    d = u.domain
    region = SEMINORM_REGION[bc.kind]
    if bc.kind == "dirichlet":
        v = v.restrict_interior()
    if bc.kind == "regional_neumann":
        pair = pairing(Y, u, v, "regional")
    elif region == "star":
        pair = 2.0 * pairing(Y, u, v, "star")
    else:
        pair = pairing(Y, u, v, "full")
    w = d.cell_weight
    gu = Y.g_signed(u.values)
    rhs = (result.lambda_ - 1.0) * float(np.sum(gu[d.interior] * v.values[d.interior])) * w
    if bc.kind == "robin":
        pair += float(np.sum(beta_values(d, bc.beta) * gu * v.values)) * w
    return pair - rhs


@dataclass
class OrderReport:
    ok: bool
    failures: list
    margins: dict


def verify_order(results: dict, Y: YoungFunction, rtol: float = 1e-4,
                 power_tol: float = 1e-6, raise_on_failure: bool = True) -> OrderReport:
    """Check Lambda_regN <= Lambda_N <= Lambda_R <= Lambda_D, the p-ratio sandwich
    on lambda, and lambda = Lambda for pure powers."""
    failures, margins = [], {}
    present = [k for k in ORDER if k in results]
    for a, b in zip(present, present[1:]):
        La, Lb = results[a].capital_lambda, results[b].capital_lambda
        margin = (Lb - La) / max(abs(Lb), 1e-300)
        margins[f"{a}<={b}"] = margin
        if margin < -rtol:
            failures.append(f"Lambda_{a}={La:.10g} > Lambda_{b}={Lb:.10g}")
    c = Y.p_plus / Y.p_minus
    for k in present:
        r = results[k]
        lo, hi = r.capital_lambda / c, r.capital_lambda * c
        margins[f"sandwich_{k}"] = min(r.lambda_ - lo, hi - r.lambda_) / r.capital_lambda
        if not lo * (1 - rtol) <= r.lambda_ <= hi * (1 + rtol):
            failures.append(f"lambda_{k}={r.lambda_:.10g} outside [{lo:.10g}, {hi:.10g}]")
        if Y.p_minus == Y.p_plus:
            gap = abs(r.lambda_ - r.capital_lambda) / r.capital_lambda
            margins[f"power_equality_{k}"] = gap
            if gap > power_tol:
                failures.append(f"power case: |lambda-Lambda|/Lambda={gap:.3g} for {k}")
    report = OrderReport(not failures, failures, margins)
    if failures and raise_on_failure:
        raise OrderingViolation("; ".join(failures), failures)
    return report


def lower_bound_constant(Y: YoungFunction, domain: DiscreteDomain) -> float:
    """1/c from the Jensen/diameter argument: Lambda >= 1/(C max(c', 1)),
    C = 2^{p+}, c' = max(diam^{s p-}, diam^{s p+}) diam^n / |Omega|."""
    diam, vol, s, n = domain.diameter, domain.volume, domain.s, domain.dim
    cprime = max(diam ** (s * Y.p_minus), diam ** (s * Y.p_plus)) * diam ** n / vol
    return 1.0 / (Y.delta2_constant * max(cprime, 1.0))


def mu_sweep(Y: YoungFunction, bc: BoundaryCondition, mu_list, domain: DiscreteDomain,
             opts: Optional[SolverOptions] = None):
    """One solve per mu; returns ``(rows, summary)``."""
    mu_list = sorted(float(m) for m in mu_list)
    if np.log10(mu_list[-1] / mu_list[0]) < 4 - 1e-12:
        raise ValueError("mu_list must span at least four orders of magnitude")
    rows = []
    for mu in mu_list:
        r = solve_min(Y, bc, mu, domain, opts)
        rows.append({**r.row(), "converged": r.converged,
                     "Lambda_minus_1": r.capital_lambda - 1.0})
    Ls = [row["Lambda"] for row in rows]
    summary = {"min_Lambda": min(Ls), "max_Lambda": max(Ls),
               "lower_bound": lower_bound_constant(Y, domain),
               "relative_spread": (max(Ls) - min(Ls)) / min(Ls)}
    return rows, summary
