"""Young functions: construction, indices, derived functions and the
standard inequalities as checkable predicates.

All evaluators are vectorized over numpy arrays and expect ``t >= 0``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.integrate import cumulative_simpson, trapezoid
from scipy.interpolate import PchipInterpolator

BUILTIN_FAMILIES = ("power", "power_log", "sum_of_powers", "piecewise_power")
FAMILIES = BUILTIN_FAMILIES + ("custom", "tabulated", "complementary")

INDEX_GRID = np.logspace(-6, 6, 2001)


class InvalidParams(ValueError):
    pass


class DegenerateRatio(ArithmeticError):
    pass


class NonInvertible(ArithmeticError):
    pass


class NotSubcritical(ValueError):
    def __init__(self, msg, exponent):
        super().__init__(msg)
        self.exponent = exponent


class Inconclusive(RuntimeError):
    pass


Evaluator = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class YoungFunction:
    family: str
    params: tuple
    p_minus: float
    p_plus: float
    _G: Evaluator = field(repr=False, compare=False)
    _g: Evaluator = field(repr=False, compare=False)
    _dg: Optional[Evaluator] = field(default=None, repr=False, compare=False)

    def G(self, t):
        return self._G(np.asarray(t, dtype=float))

    def g(self, t):
        return self._g(np.asarray(t, dtype=float))

    def dg(self, t):
        """Derivative of g; central differences when no closed form is known."""
        t = np.asarray(t, dtype=float)
        if self._dg is not None:
            return self._dg(t)
        step = 1e-6 * np.maximum(t, 1e-8)
        lo = np.maximum(t - step, 0.0)
        return (self._g(t + step) - self._g(lo)) / (t + step - lo)

    # signed versions used by the operators: g(|t|) sgn(t) and G(|t|)
    def G_abs(self, t):
        return self._G(np.abs(np.asarray(t, dtype=float)))

    def g_signed(self, t):
        t = np.asarray(t, dtype=float)
        return np.sign(t) * self._g(np.abs(t))

    @property
    def delta2_constant(self) -> float:
        return 2.0 ** self.p_plus

    def xi_minus(self, t):
        t = np.asarray(t, dtype=float)
        return np.minimum(t ** self.p_minus, t ** self.p_plus)

    def xi_plus(self, t):
        t = np.asarray(t, dtype=float)
        return np.maximum(t ** self.p_minus, t ** self.p_plus)


# ---------------------------------------------------------------------------
# families


def _power(p):
    if p <= 1:
        raise InvalidParams(f"power exponent must exceed 1, got {p}")
    G = lambda t: t ** p / p
    g = lambda t: t ** (p - 1)
    dg = lambda t: (p - 1) * t ** (p - 2)
    return G, g, dg, (p, p)


def _power_log(p):
    if p <= 1:
        raise InvalidParams(f"power_log exponent must exceed 1, got {p}")

    def G(t):
        return t ** p * np.log1p(t)

    def g(t):
        return p * t ** (p - 1) * np.log1p(t) + t ** p / (1 + t)

    def dg(t):
        return (p * (p - 1) * t ** (p - 2) * np.log1p(t)
                + 2 * p * t ** (p - 1) / (1 + t) - t ** p / (1 + t) ** 2)

    # t g/G = p + t / ((1+t) log(1+t)), which decreases from p+1 to p
    return G, g, dg, (p, p + 1)


def _sum_of_powers(exponents):
    ps = tuple(float(e) for e in exponents)
    if not ps or min(ps) <= 1:
        raise InvalidParams(f"sum_of_powers needs exponents > 1, got {ps}")
    G = lambda t: sum(t ** q for q in ps)
    g = lambda t: sum(q * t ** (q - 1) for q in ps)
    dg = lambda t: sum(q * (q - 1) * t ** (q - 2) for q in ps)
    return G, g, dg, (min(ps), max(ps))


def _piecewise_power(a, b):
    if min(a, b) <= 1:
        raise InvalidParams(f"piecewise_power exponents must exceed 1, got {(a, b)}")

    def G(t):
        return np.where(t <= 1, t ** a / a, 1 / a + (t ** b - 1) / b)

    def g(t):
        return np.where(t <= 1, t ** (a - 1), t ** (b - 1))

    def dg(t):
        return np.where(t <= 1, (a - 1) * t ** (a - 2), (b - 1) * t ** (b - 2))

    return G, g, dg, (min(a, b), max(a, b))


def make_young(family: str, params=None, **kwargs) -> YoungFunction:
    """Build a Young function from a family tag and its parameters.

    ``params`` may be a dict or a sequence; keyword arguments are merged in.

    >>> make_young("power", p=2).G(2.0)
    2.0
    """
    if isinstance(params, dict):
        kw = {**params, **kwargs}
        args = ()
    else:
        kw = dict(kwargs)
        args = tuple(params) if params is not None else ()

    if family == "power":
        p = float(kw.get("p", args[0] if args else np.nan))
        G, g, dg, idx = _power(p)
        stored = (p,)
    elif family == "power_log":
        p = float(kw.get("p", args[0] if args else 2.0))
        G, g, dg, idx = _power_log(p)
        stored = (p,)
    elif family == "sum_of_powers":
        exps = kw.get("exponents", args)
        G, g, dg, idx = _sum_of_powers(exps)
        stored = tuple(float(e) for e in exps)
    elif family == "piecewise_power":
        a = float(kw.get("a", args[0] if args else np.nan))
        b = float(kw.get("b", args[1] if len(args) > 1 else np.nan))
        G, g, dg, idx = _piecewise_power(a, b)
        stored = (a, b)
    elif family == "custom":
        G, g = kw["G"], kw["g"]
        dg = kw.get("dg")
        idx = None
        stored = tuple(sorted(k for k in kw if k not in ("G", "g", "dg")))
    elif family == "tabulated":
        return tabulated(kw.get("t", args[0] if args else None),
                         kw.get("values", args[1] if len(args) > 1 else None))
    else:
        raise InvalidParams(f"unknown family {family!r}")

    Y = YoungFunction(family, stored, np.nan, np.nan, _quiet(G), _quiet(g),
                      _quiet(dg) if dg is not None else None)
    _validate_monotone(Y)
    if idx is None:
        idx = compute_indices(Y)
    p_minus, p_plus = idx
    if not p_minus > 1:
        raise InvalidParams(f"lower index must exceed 1, got {p_minus}")
    return _with_indices(Y, p_minus, p_plus)


def _quiet(fn):
    def wrapped(t):
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            return fn(t)
    return wrapped


def _with_indices(Y, p_minus, p_plus):
    return YoungFunction(Y.family, Y.params, float(p_minus), float(p_plus), Y._G, Y._g, Y._dg)


def _validate_monotone(Y):
    t = np.concatenate([[0.0], INDEX_GRID])
    gv = Y.g(t)
    if gv[0] != 0 or np.any(np.diff(gv) < -1e-12 * np.abs(gv[1:])):
        raise InvalidParams(f"g fails monotonicity for {Y.family}{Y.params}")
    if Y.G(0.0) != 0:
        raise InvalidParams("G(0) must vanish")


# ---------------------------------------------------------------------------
# indices


def index_ratio(Y: YoungFunction, t):
    t = np.asarray(t, dtype=float)
    Gt = Y.G(t)
    if np.any(Gt[t > 0] <= 0):
        bad = t[(t > 0) & (Gt <= 0)]
        raise DegenerateRatio(f"G vanishes at t={bad[0]:g}")
    return t * Y.g(t) / Gt


def compute_indices(Y: YoungFunction, t_grid=None, analytic: bool = True):
    """Return (inf, sup) of t g(t)/G(t) over a log grid.

    Built-in families return their exact limits unless ``analytic`` is False;
    otherwise the sampled extremes are widened by the largest jump between
    neighbouring samples.
    """
    if analytic and Y.family in BUILTIN_FAMILIES and np.isfinite(Y.p_minus):
        return Y.p_minus, Y.p_plus
    t = INDEX_GRID if t_grid is None else np.asarray(t_grid, dtype=float)
    r = index_ratio(Y, t)
    slack = float(np.max(np.abs(np.diff(r)))) if r.size > 1 else 0.0
    return float(r.min() - slack), float(r.max() + slack)


# ---------------------------------------------------------------------------
# inversion, complementary function


def invert_increasing(fn: Evaluator, v, iters: int = 200):
    """Bisection in log t for t with fn(t) = v, fn increasing, fn(0)=0."""
    v = np.asarray(v, dtype=float)
    out = np.zeros_like(v)
    pos = v > 0
    if not np.any(pos):
        return out if out.ndim else float(out)
    target = v[pos]
    lo = np.full(target.shape, -745.0)
    hi = np.full(target.shape, 709.0)
    with np.errstate(over="ignore", invalid="ignore"):
        for _ in range(iters):
            mid = 0.5 * (lo + hi)
            below = fn(np.exp(mid)) < target
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
            if np.all(hi - lo < 1e-16 * np.maximum(1.0, np.abs(hi))):
                break
    out[pos] = np.exp(0.5 * (lo + hi))
    return out if out.ndim else float(out)


def inverse_G(Y: YoungFunction, v):
    return invert_increasing(Y.G, v)


def inverse_g(Y: YoungFunction, v):
    return invert_increasing(Y.g, v)


def _check_strict(Y, tol=1e-12):
    gv = Y.g(INDEX_GRID)
    flat = np.diff(gv) <= tol * np.abs(gv[1:])
    if np.any(flat):
        k = int(np.argmax(flat))
        raise NonInvertible(f"g is flat near t={INDEX_GRID[k]:g}")


def complementary(Y: YoungFunction) -> YoungFunction:
    """Complementary Young function, G~(b) = sup_a (ab - G(a)).

    Evaluated through the maximizer a = g^{-1}(b), i.e. b g^{-1}(b) - G(g^{-1}(b)),
    which is the integral of g^{-1} over [0, b].
    """
    _check_strict(Y)

    def Gc(b):
        a = inverse_g(Y, b)
        return b * a - Y.G(a)

    def gc(b):
        return inverse_g(Y, b)

    def dgc(b):
        return 1.0 / Y.dg(inverse_g(Y, b))

    # conjugate exponents swap the roles of the indices
    pm = Y.p_plus / (Y.p_plus - 1)
    pp = Y.p_minus / (Y.p_minus - 1)
    return YoungFunction("complementary", (Y.family,) + tuple(Y.params), pm, pp,
                         _quiet(Gc), _quiet(gc), _quiet(dgc))


# ---------------------------------------------------------------------------
# tabulated Young functions and the critical Sobolev function


class _LogLogTable:
    """Monotone log-log interpolation with power-law extension at both ends."""

    def __init__(self, t, v):
        lt, lv = np.log(t), np.log(v)
        self.lt, self.lv = lt, lv
        self.spline = PchipInterpolator(lt, lv, extrapolate=False)
        self.dspline = self.spline.derivative()
        self.k0 = (lv[1] - lv[0]) / (lt[1] - lt[0])
        self.k1 = (lv[-1] - lv[-2]) / (lt[-1] - lt[-2])

    def _logv_and_slope(self, t):
        t = np.asarray(t, dtype=float)
        with np.errstate(divide="ignore"):
            x = np.log(t)
        y = np.empty_like(x)
        k = np.empty_like(x)
        lo, hi = x < self.lt[0], x > self.lt[-1]
        mid = ~(lo | hi)
        y[mid] = self.spline(x[mid])
        k[mid] = self.dspline(x[mid])
        y[lo] = self.lv[0] + self.k0 * (x[lo] - self.lt[0])
        k[lo] = self.k0
        y[hi] = self.lv[-1] + self.k1 * (x[hi] - self.lt[-1])
        k[hi] = self.k1
        return y, k

    def value(self, t):
        y, _ = self._logv_and_slope(t)
        return np.where(np.asarray(t) > 0, np.exp(y), 0.0)

    def derivative(self, t):
        t = np.asarray(t, dtype=float)
        y, k = self._logv_and_slope(t)
        with np.errstate(divide="ignore", invalid="ignore"):
            d = k * np.exp(y) / t
        return np.where(t > 0, d, 0.0)


def tabulated(t, values, family="tabulated", params=()) -> YoungFunction:
    t = np.asarray(t, dtype=float)
    values = np.asarray(values, dtype=float)
    if t.ndim != 1 or t.shape != values.shape or np.any(np.diff(t) <= 0) or np.any(np.diff(values) <= 0):
        raise InvalidParams("tabulated Young function needs increasing positive samples")
    table = _LogLogTable(t, values)
    Y = YoungFunction(family, tuple(params), np.nan, np.nan, table.value, table.derivative)
    grid = np.logspace(np.log10(t[0]), np.log10(t[-1]), 2001)
    pm, pp = compute_indices(Y, grid)
    if not pm > 1:
        raise InvalidParams(f"tabulated function has lower index {pm} <= 1")
    return _with_indices(Y, pm, pp)


def _log_slope(fn, x1, x2):
    return float((np.log(fn(x2)) - np.log(fn(x1))) / (np.log(x2) - np.log(x1)))


def g3_exponents(Y: YoungFunction, n: int, s: float):
    """Local power-law exponents of sigma -> G^{-1}(sigma) sigma^{1-(n+s)/n}
    at 0 and at infinity (integration variable log sigma).

    The integral near 0 converges iff the first is positive; the one at
    infinity diverges iff the second is >= 0.
    """
    q = (n + s) / n
    e0 = _log_slope(lambda v: inverse_G(Y, v), 1e-120, 1e-100)
    e1 = _log_slope(lambda v: inverse_G(Y, v), 1e100, 1e120)
    return e0 + 1 - q, e1 + 1 - q


def critical_sobolev(Y: YoungFunction, n: int, s: float, n_table: int = 4096,
                     log10_range=(-60.0, 60.0), n_quad: int = 24001) -> YoungFunction:
    """Critical Sobolev function, from G_*^{-1}(t) = int_0^t G^{-1}(r) r^{-(n+s)/n} dr."""
    k0, _ = g3_exponents(Y, n, s)
    if not k0 > 1e-6:
        raise NotSubcritical(
            f"integral of G^{{-1}}(r) r^{{-(n+s)/n}} diverges at 0 (local exponent {k0 - 1:.4g})",
            exponent=k0 - 1)
    q = (n + s) / n
    x = np.linspace(*(np.log(10.0) * np.asarray(log10_range)), n_quad)
    sig = np.exp(x)
    integrand = inverse_G(Y, sig) * sig ** (1 - q)
    head = integrand[0] / k0
    cum = head + cumulative_simpson(integrand, x=x, initial=0.0)
    pick = np.unique(np.linspace(0, n_quad - 1, n_table).round().astype(int))
    t_tab, v_tab = cum[pick], sig[pick]
    Ystar = tabulated(t_tab, v_tab, family="critical", params=(Y.family,) + tuple(Y.params) + (n, s))
    return Ystar


# ---------------------------------------------------------------------------
# structure report


@dataclass
class StructureReport:
    g1_holds: bool
    g2_holds: bool
    g3_holds: bool
    delta2_constant: float
    p_minus: float
    p_plus: float
    g1_witness: Optional[tuple] = None
    g2_witness: Optional[tuple] = None
    g3_exponents: tuple = (np.nan, np.nan)
    g3_integrals: tuple = (np.nan, np.nan)
    sample_evidence: dict = field(default_factory=dict)

    def as_record(self) -> dict:
        rec = {
            "g1_holds": self.g1_holds,
            "g2_holds": self.g2_holds,
            "g3_holds": self.g3_holds,
            "delta2_constant": self.delta2_constant,
            "p_minus": self.p_minus,
            "p_plus": self.p_plus,
            "g3_exponent_zero": self.g3_exponents[0],
            "g3_exponent_infinity": self.g3_exponents[1],
            "g3_integral_0_1": self.g3_integrals[0],
            "g3_integral_1_T": self.g3_integrals[1],
        }
        if self.g1_witness is not None:
            rec["g1_witness_t"], rec["g1_witness_ratio"] = self.g1_witness
        if self.g2_witness is not None:
            rec["g2_witness_t"], rec["g2_witness_defect"] = self.g2_witness
        rec.update(self.sample_evidence)
        return rec


def _g2_defect(Y, t):
    """Relative decrease of consecutive slopes of t -> G(sqrt t); <= 0 if convex."""
    phi = Y.G(np.sqrt(t))
    slopes = np.diff(phi) / np.diff(t)
    drop = (slopes[:-1] - slopes[1:]) / np.maximum(np.abs(slopes[1:]), 1e-300)
    return drop


def check_structure(Y: YoungFunction, n: int = 1, s: float = 0.3, tol: float = 1e-9) -> StructureReport:
    t = INDEX_GRID
    r = index_ratio(Y, t)
    slack = tol * max(1.0, Y.p_plus)
    low = r < Y.p_minus - slack
    high = r > Y.p_plus + slack
    g1 = bool(Y.p_minus > 1 and not np.any(low | high))
    w1 = None
    if not g1:
        bad = np.flatnonzero(low | high)
        k = bad[0] if bad.size else 0
        w1 = (float(t[k]), float(r[k]))

    drop = _g2_defect(Y, t)
    g2 = bool(np.all(drop <= tol))
    w2 = None
    if not g2:
        k = int(np.argmax(drop))
        w2 = (float(t[k + 1]), float(drop[k]))

    k0, k1 = g3_exponents(Y, n, s)
    g3 = bool(k0 > 1e-6 and k1 >= -1e-6)
    q = (n + s) / n
    x = np.linspace(np.log(1e-30), 0.0, 4001)
    lower = float(trapezoid(inverse_G(Y, np.exp(x)) * np.exp(x * (1 - q)), x))
    x = np.linspace(0.0, np.log(1e30), 4001)
    upper = float(trapezoid(inverse_G(Y, np.exp(x)) * np.exp(x * (1 - q)), x))

    return StructureReport(
        g1_holds=g1, g2_holds=g2, g3_holds=g3,
        delta2_constant=Y.delta2_constant,
        p_minus=Y.p_minus, p_plus=Y.p_plus,
        g1_witness=w1, g2_witness=w2,
        g3_exponents=(k0, k1), g3_integrals=(lower, upper),
        sample_evidence={"ratio_min": float(r.min()), "ratio_max": float(r.max()),
                         "g2_max_defect": float(drop.max())},
    )


# ---------------------------------------------------------------------------
# essentially stronger


@dataclass(frozen=True)
class Dominance:
    holds: bool
    thresholds: dict

    def __bool__(self):
        return self.holds


def essentially_stronger(A: YoungFunction, B: YoungFunction,
                         a_values=(1.0, 0.5, 0.1, 0.01), x_range=(1e-3, 1e12),
                         n_points: int = 3001, tail_fraction: float = 0.1) -> Dominance:
    """Decide A << B (A(x) <= B(a x) eventually, for every sampled a).

    Raises Inconclusive when the comparison changes sign within the sampled tail.
    """
    x = np.logspace(np.log10(x_range[0]), np.log10(x_range[1]), n_points)
    tail = max(2, int(tail_fraction * n_points))
    thresholds = {}
    holds = True
    for a in a_values:
        ok = A.G(x) <= B.G(a * x) * (1 + 1e-12)
        if np.all(ok[-tail:]):
            bad = np.flatnonzero(~ok)
            thresholds[a] = float(x[bad[-1] + 1]) if bad.size else float(x[0])
        elif not np.any(ok[-tail:]):
            thresholds[a] = np.inf
            holds = False
        else:
            raise Inconclusive(f"A(x) <= B({a} x) oscillates near x={x[-1]:g}")
    return Dominance(holds, thresholds)


# ---------------------------------------------------------------------------
# inequality battery


def inequality_battery(Y: YoungFunction, rng: np.random.Generator, n_samples: int = 10_000,
                       rtol: float = 1e-10, g2_holds: Optional[bool] = None) -> dict:
    """Sample the standard Young-function inequalities; returns
    ``{name: {"checked": int, "violations": int, "worst": float}}``.

    ``worst`` is the largest relative excess lhs/rhs - 1 (negative when all hold).
    """
    def draw(size):
        # log-uniform magnitudes over many decades, plus some exact zeros
        v = 10.0 ** rng.uniform(-4, 4, size)
        v[rng.random(size) < 0.01] = 0.0
        return v

    a, b, t = draw(n_samples), draw(n_samples), draw(n_samples)
    Gt = complementary(Y)
    out = {}

    def record(name, lhs, rhs):
        lhs, rhs = np.asarray(lhs), np.asarray(rhs)
        excess = lhs - rhs
        scale = np.maximum(np.abs(rhs), np.abs(lhs))
        viol = excess > rtol * np.maximum(scale, 1e-300)
        with np.errstate(divide="ignore", invalid="ignore"):
            rel = np.where(scale > 0, excess / scale, 0.0)
        out[name] = {"checked": int(lhs.size), "violations": int(viol.sum()),
                     "worst": float(rel.max())}

    Gab, Gb = Y.G(a * b), Y.G(b)
    record("L1_lower", Y.xi_minus(a) * Gb, Gab)
    record("L1_upper", Gab, Y.xi_plus(a) * Gb)
    record("L2_doubling", Y.G(a + b), Y.delta2_constant * (Y.G(a) + Y.G(b)))
    # Young's inequality is tight on the curve b = g(a); include such pairs
    bb = b.copy()
    half = n_samples // 2
    bb[:half] = Y.g(a[:half])
    record("young", a * bb, Y.G(a) + Gt.G(bb))
    record("complementary_of_g", Gt.G(Y.g(t)), (Y.p_plus + 1) * Y.G(t))
    if g2_holds is None:
        g2_holds = bool(np.all(_g2_defect(Y, INDEX_GRID) <= 1e-9))
    if g2_holds:
        sa, sb = a * rng.choice([-1, 1], n_samples), b * rng.choice([-1, 1], n_samples)
        lhs = Y.G(np.abs((sa + sb) / 2)) + Y.G(np.abs((sa - sb) / 2))
        rhs = (Y.G(np.abs(sa)) + Y.G(np.abs(sb))) / 2
        record("convexity_G2", lhs, rhs)
    return out
