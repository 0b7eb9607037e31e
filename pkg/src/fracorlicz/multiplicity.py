"""Energy Psi = J - lam F - mu H on the discrete space X, hypothesis checks,
Ricceri-type quantity estimates and a multistart + deflation search for
critical points.

J(u) = star pair modular + Phi_{G,Omega}(u) + Phi_{G,beta,Omega^c}(u),
F(u) = sum over Omega of F(x_i, u_i) h^n, H likewise.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .grid import DiscreteDomain, GridFunction
from .modulars import beta_values, modular_sG, x_norm
from .nonlinearities import Nonlinearity, zero
from .operator import modular_gradient, modular_hessian
from .young import (Inconclusive, NotSubcritical, YoungFunction, critical_sobolev,
                    essentially_stronger, make_young)


class NoPositiveF(ValueError):
    pass


def _values(u):
    return u.values if isinstance(u, GridFunction) else np.asarray(u, dtype=float)


# ---------------------------------------------------------------------------
# energy


class EnergyPsi:
    """Psi and its first two derivatives with respect to node values."""

    def __init__(self, Y: YoungFunction, domain: DiscreteDomain, beta, lam: float = 0.0,
                 mu: float = 0.0, f_nl: Optional[Nonlinearity] = None,
                 h_nl: Optional[Nonlinearity] = None):
        self.Y, self.d = Y, domain
        self.beta = beta
        self.lam, self.mu = float(lam), float(mu)
        self.f_nl = f_nl or zero()
        self.h_nl = h_nl or zero()
        self.w = domain.cell_weight
        self.ii = domain.interior
        # node weights of the local part of J: 1 inside, beta outside
        self.local = self.ii.astype(float) + beta_values(domain, beta)
        self.x = domain.nodes[self.ii, 0] if domain.dim == 1 else domain.nodes[self.ii]

    # J ---------------------------------------------------------------
    def J(self, v) -> float:
        v = _values(v)
        return (modular_sG(self.Y, v, "star", self.d)
                + float(np.sum(self.Y.G(np.abs(v)) * self.local)) * self.w)

    def grad_J(self, v) -> np.ndarray:
        v = _values(v)
        return (modular_gradient(self.Y, v, self.d, "star")
                + self.Y.g_signed(v) * self.local * self.w)

    def hess_J(self, v) -> np.ndarray:
        v = _values(v)
        H = modular_hessian(self.Y, v, self.d, "star")
        H[np.diag_indices_from(H)] += self.Y.dg(np.abs(v)) * self.local * self.w
        return H

    # F, H ------------------------------------------------------------
    def _integral(self, nl, v) -> float:
        return float(np.sum(nl.F(self.x, _values(v)[self.ii]))) * self.w

    def _grad(self, nl, v) -> np.ndarray:
        out = np.zeros(self.d.n_nodes)
        out[self.ii] = nl.f(self.x, _values(v)[self.ii]) * self.w
        return out

    def _hess_diag(self, nl, v) -> np.ndarray:
        out = np.zeros(self.d.n_nodes)
        out[self.ii] = nl.df(self.x, _values(v)[self.ii]) * self.w
        return out

    def F(self, v) -> float:
        return self._integral(self.f_nl, v)

    def grad_F(self, v) -> np.ndarray:
        return self._grad(self.f_nl, v)

    def H(self, v) -> float:
        return self._integral(self.h_nl, v)

    def grad_H(self, v) -> np.ndarray:
        return self._grad(self.h_nl, v)

    # Psi -------------------------------------------------------------
    def __call__(self, v) -> float:
        return self.J(v) - self.lam * self.F(v) - self.mu * self.H(v)

    def grad(self, v) -> np.ndarray:
        return self.grad_J(v) - self.lam * self.grad_F(v) - self.mu * self.grad_H(v)

    def hess(self, v) -> np.ndarray:
        Hm = self.hess_J(v)
        Hm[np.diag_indices_from(Hm)] -= (self.lam * self._hess_diag(self.f_nl, v)
                                         + self.mu * self._hess_diag(self.h_nl, v))
        return Hm

    def _l2w(self, g) -> float:
        # L^2_w norm of the Riesz representative g / w
        return float(np.linalg.norm(g)) / np.sqrt(self.w)

    def residual(self, v) -> float:
        """|grad Psi| relative to max(1, |grad J|), both in the discrete L^2 metric."""
        return self._l2w(self.grad(v)) / max(1.0, self._l2w(self.grad_J(v)))

    def x_norm(self, v, rtol: float = 1e-12) -> float:
        return x_norm(self.Y, _values(v), self.beta, self.d, rtol)


def energy_psi(Y, u: GridFunction, lam, mu, f_nl, h_nl, beta) -> float:
    return EnergyPsi(Y, u.domain, beta, lam, mu, f_nl, h_nl)(u)


def gradient_psi(Y, u: GridFunction, lam, mu, f_nl, h_nl, beta) -> GridFunction:
    return GridFunction(EnergyPsi(Y, u.domain, beta, lam, mu, f_nl, h_nl).grad(u), u.domain)


def coercivity_constant(Y: YoungFunction, domain: DiscreteDomain, beta, samples) -> float:
    """min J(u) / xi_minus(|u|_X) over a calibration set of node vectors."""
    E = EnergyPsi(Y, domain, beta)
    ratios = [E.J(v) / float(Y.xi_minus(E.x_norm(v))) for v in samples]
    return float(min(ratios))


# ---------------------------------------------------------------------------
# class A and hypotheses


T_CERT = np.unique(np.concatenate([np.linspace(0, 20, 2001), np.logspace(-8, 8, 801)]))
X_CERT = np.linspace(0.0, 1.0, 5)


@dataclass
class ClassAReport:
    certified: bool
    growth_ok: bool
    worst_margin: float
    witness_t: Optional[float]
    envelope_dominated: Optional[bool]
    note: str = ""

    def as_record(self) -> dict:
        return dict(self.__dict__)


def check_class_A(nl: Nonlinearity, Y: YoungFunction, n: int = 1, s: float = 0.3,
                  t_grid=None, x_grid=None) -> ClassAReport:
    """|f(x,t)| <= w (1 + m(|t|)) on a certification grid and M << G_*."""
    t = T_CERT if t_grid is None else np.asarray(t_grid, dtype=float)
    t = np.concatenate([-t[::-1], t])
    xs = X_CERT if x_grid is None else x_grid
    M = nl.envelope_M
    if M is None:
        return ClassAReport(False, False, -np.inf, None, None, "no envelope")
    worst, witness = np.inf, None
    with np.errstate(over="ignore", invalid="ignore"):
        for x in xs:
            bound = nl.weight_w * (1.0 + M.g(np.abs(t)))
            margin = bound * (1 + 1e-12) - np.abs(nl.f(x, t))
            margin = np.where(np.isnan(margin), -np.inf, margin)
            bad = np.flatnonzero(margin < 0)
            if bad.size and witness is None:
                # smallest |t| that breaks the bound
                witness = float(t[bad[np.argmin(np.abs(t[bad]))]])
            worst = min(worst, float(margin.min()))
    growth_ok = worst >= 0
    note = ""
    try:
        # G_* extrapolates as a power law, so a long tail is cheap and settles a = 0.01
        dom = bool(essentially_stronger(M, critical_sobolev(Y, n, s), x_range=(1e-3, 1e40)))
    except NotSubcritical as exc:
        dom, note = None, str(exc)
    except Inconclusive as exc:
        dom, note = None, str(exc)
    return ClassAReport(bool(growth_ok and dom), bool(growth_ok), worst,
                        None if growth_ok else witness, dom, note)


def _sup_ratio(nl, Y, t, xs):
    t = np.concatenate([-t, t])
    return max(float(np.max(nl.F(x, t) / Y.G(np.abs(t)))) for x in xs)


def _plateau_height(nl: Nonlinearity, xs, t_max=20.0):
    """Largest grid tau > 0 with F(x,.) >= 0 on [0, tau] and F(x,tau) > 0 for all x."""
    t = np.linspace(0, t_max, 4001)[1:]
    Fmin = np.min([nl.F(x, t) for x in xs], axis=0)
    nonneg = np.cumprod(Fmin >= 0).astype(bool)
    good = np.flatnonzero(nonneg & (Fmin > 0))
    if good.size == 0:
        return None
    if nl.plateau_height is not None and nonneg[min(np.searchsorted(t, nl.plateau_height), t.size - 1)]:
        return float(nl.plateau_height)
    return float(t[good[np.argmax(Fmin[good])]])


def _decade_slopes(fn, lo, hi, per_decade=400):
    """Log-log slopes between maxima of fn over consecutive decades in [10^lo, 10^hi]."""
    peaks = []
    for k in range(lo, hi):
        t = np.logspace(k, k + 1, per_decade)
        peaks.append(float(np.max(fn(t))))
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.diff(np.log(np.maximum(peaks, 1e-300)))


def check_hypotheses(nl: Nonlinearity, Y: YoungFunction, theorem: str = "three_solution",
                     tol: float = 1e-3, x_grid=None) -> dict:
    """Report on (F1)/(F2) ('three_solution') or conditions (i)-(iii) ('growth_envelope').

    Limits are finite-grid estimates, not exact values.
    """
    xs = X_CERT if x_grid is None else x_grid
    if theorem == "three_solution":
        at_zero = _sup_ratio(nl, Y, np.logspace(-8, -7, 11), xs)
        at_inf = _sup_ratio(nl, Y, np.logspace(7, 8, 11), xs)
        profile_zero = {f"1e{k}": _sup_ratio(nl, Y, np.array([10.0 ** k]), xs) for k in range(-8, 0)}
        profile_inf = {f"1e{k}": _sup_ratio(nl, Y, np.array([10.0 ** k]), xs) for k in range(1, 9)}
        tau = _plateau_height(nl, xs)
        F_tau = None if tau is None else min(float(nl.F(x, tau)) for x in xs)
        return {"theorem": theorem,
                "limsup_zero_estimate": at_zero, "limsup_inf_estimate": at_inf,
                "profile_zero": profile_zero, "profile_inf": profile_inf,
                "F1": bool(max(at_zero, at_inf) <= tol),
                "plateau_height": tau, "F_at_plateau": F_tau,
                "F2": bool(tau is not None and F_tau > 0)}
    if theorem != "growth_envelope":
        raise ValueError(f"unknown theorem {theorem!r}")

    Fpos = lambda t: np.min([nl.F(x, t) for x in xs] + [nl.F(x, -t) for x in xs], axis=0)
    Fmax = lambda t: np.max([nl.F(x, t) for x in xs] + [nl.F(x, -t) for x in xs], axis=0)
    out = {"theorem": theorem}

    # (i): F <= c1 (1 + B) with B a power below p-, B << G
    slope_inf = float(np.nanmax(_decade_slopes(Fmax, 5, 8))) / np.log(10)
    b = max(slope_inf, 1.0) * (1 + 1e-3)
    if b <= 1.0 + 1e-9:
        b = 1.0 + 0.5 * (Y.p_minus - 1.0)
    B = make_young("power", p=b)
    t = np.concatenate([np.logspace(-8, 8, 1601)])
    c1 = float(np.max(Fmax(t) / (1.0 + B.G(t))))
    try:
        B_dom = bool(essentially_stronger(B, Y))
    except Inconclusive:
        B_dom = False
    out.update(b_exponent=b, c1=c1, B_dominated=B_dom,
               condition_i=bool(b < Y.p_minus and np.isfinite(c1) and B_dom))

    # (ii): F <= c2 D near 0 with D a power above p+, G << D
    tau1 = 0.5
    slope_zero = float(np.nanmin(_decade_slopes(Fmax, -8, -5))) / np.log(10)
    d = slope_zero * (1 - 1e-3)
    ok_ii = d > Y.p_plus
    c2 = np.inf
    D_dom = False
    if d > 1:
        D = make_young("power", p=d)
        tn = np.logspace(-8, np.log10(tau1), 801)
        c2 = float(np.max(Fmax(tn) / D.G(tn)))
        try:
            D_dom = bool(essentially_stronger(Y, D))
        except Inconclusive:
            D_dom = False
    out.update(d_exponent=d, c2=c2, tau1=tau1, D_dominating=D_dom,
               condition_ii=bool(ok_ii and np.isfinite(c2) and D_dom))

    # (iii): F >= 0 on [0, tau2] with F(tau2) > 0
    tau2 = _plateau_height(nl, xs)
    out.update(tau2=tau2, condition_iii=tau2 is not None)
    out["all"] = bool(out["condition_i"] and out["condition_ii"] and out["condition_iii"])
    # keep the lower bound of F on the sampled range for reference
    out["min_F_sampled"] = float(np.min(Fpos(t)))
    return out


# ---------------------------------------------------------------------------
# Ricceri quantities


def smooth_fields(domain: DiscreteDomain, rng: np.random.Generator, count: int,
                  modes: int = 5) -> list:
    """Random low-frequency cosine fields over the collar box."""
    x = domain.nodes
    lo, hi = x.min(axis=0), x.max(axis=0)
    fields = []
    for _ in range(count):
        v = np.zeros(domain.n_nodes)
        for mode in range(modes):
            phase = rng.uniform(0, 2 * np.pi, size=domain.dim)
            arg = np.pi * mode * (x - lo) / (hi - lo)
            v += rng.normal() / (1 + mode) ** 2 * np.prod(np.cos(arg + phase), axis=1)
        fields.append(v)
    return fields


def plateau_witness(domain: DiscreteDomain, height: float, fraction: float = 0.5) -> GridFunction:
    """Equal to ``height`` on the central box C of relative size ``fraction`` and
    linearly interpolated to 0 on the boundary of Omega; zero outside Omega."""
    lo, hi = domain.omega[:, 0], domain.omega[:, 1]
    c, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
    r = np.max(np.abs(domain.nodes - c) / half, axis=1)      # 0 at centre, 1 on the boundary
    prof = np.clip((1.0 - r) / max(1.0 - fraction, 1e-12), 0.0, 1.0)
    return GridFunction(np.where(domain.interior, height * prof, 0.0), domain)


@dataclass
class RicceriEstimate:
    alpha_hat: float
    beta_hat: float
    delta_hat: float
    limsup_zero: float
    limsup_inf: float
    band_zero: dict
    band_inf: dict
    witness: np.ndarray = field(repr=False)
    label: str = "heuristic estimate"

    def __iter__(self):
        return iter((self.alpha_hat, self.beta_hat, self.delta_hat))


def _ascend_ratio(E: EnergyPsi, v, iters=300):
    """BB gradient ascent on F/J (kept when F > 0)."""
    def ratio(v):
        J = E.J(v)
        return E.F(v) / J if J > 0 else -np.inf

    def grad(v):
        J, F = E.J(v), E.F(v)
        return (E.grad_F(v) * J - F * E.grad_J(v)) / J ** 2

    r, g = ratio(v), grad(v)
    prev = None
    for _ in range(iters):
        gn = float(np.linalg.norm(g))
        if gn == 0:
            break
        if prev is None:
            t = 1e-2 * max(float(np.linalg.norm(v)), 1.0) / gn
        else:
            sx, sy = v - prev[0], g - prev[1]
            sxy = float(sx @ sy)
            t = abs(float(sx @ sx) / sxy) if sxy != 0 else 1e-2 / gn
        for _ in range(40):
            v_try = v + t * g
            r_try = ratio(v_try)
            if r_try >= r + 1e-4 * t * gn ** 2:
                break
            t *= 0.5
        else:
            break
        prev = (v, g)
        v, r = v_try, r_try
        g = grad(v)
    return v, r


def estimate_ricceri(Y: YoungFunction, nl: Nonlinearity, domain: DiscreteDomain, beta,
                     seed: int = 0, n_directions: int = 16, ascent_iters: int = 300) -> RicceriEstimate:
    """Sampled alpha, beta = sup F/J and delta = 1/beta (heuristic estimates)."""
    rng = np.random.default_rng(seed)
    E = EnergyPsi(Y, domain, beta, f_nl=nl)
    dirs = []
    for v in smooth_fields(domain, rng, n_directions):
        nv = E.x_norm(v)
        if nv > 0:
            dirs.append(v / nv)

    def band(levels):
        return {float(r): max(E.F(r * v) / E.J(r * v) for v in dirs) for r in levels}

    band_zero = band([1e-2, 1e-3, 1e-4])
    band_inf = band([1e2, 1e3, 1e4])
    limsup_zero, limsup_inf = band_zero[1e-4], band_inf[1e4]
    alpha_hat = max(0.0, limsup_zero, limsup_inf)

    candidates = []
    tau = _plateau_height(nl, X_CERT)
    if tau is not None:
        for frac in (0.25, 0.5, 0.75, 0.9):
            for scale in (0.25, 0.5, 1.0):
                candidates.append(plateau_witness(domain, scale * tau, frac).values)
    for v in dirs:
        for r in np.logspace(-2, 2, 9):
            candidates.append(r * v)
            candidates.append(-r * v)
    scored = [(E.F(v) / E.J(v), v) for v in candidates if E.F(v) > 0 and E.J(v) > 0]
    if not scored:
        raise NoPositiveF("no sampled u has F(u) > 0")
    scored.sort(key=lambda p: -p[0])
    best_r, best_v = scored[0]
    for r0, v0 in scored[:3]:
        v1, r1 = _ascend_ratio(E, v0.copy(), ascent_iters)
        if r1 > best_r:
            best_r, best_v = r1, v1
    return RicceriEstimate(alpha_hat, float(best_r), 1.0 / float(best_r),
                           limsup_zero, limsup_inf, band_zero, band_inf, best_v)


# ---------------------------------------------------------------------------
# critical points


@dataclass
class CriticalPoint:
    u: GridFunction
    psi_value: float
    gradient_residual: float
    x_norm: float
    origin: str = ""
    morse_index: int = 0

    def row(self) -> dict:
        return {"psi": self.psi_value, "residual": self.gradient_residual,
                "x_norm": self.x_norm, "origin": self.origin, "morse_index": self.morse_index}


@dataclass
class SearchOptions:
    n_starts: int = 16
    separation: float = 1e-3
    tol: float = 1e-8
    seed: int = 0
    batch_size: int = 4
    descent_tol: float = 1e-6
    descent_iters: int = 5000
    newton_iters: int = 60
    amplitude_range: tuple = (0.1, 10.0)


def _descend_psi(E: EnergyPsi, v, tol, max_iter, blowup=1e8):
    """Gradient descent with BB steps and Armijo backtracking."""
    P, g = E(v), E.grad(v)
    prev = None
    for _ in range(max_iter):
        if E.residual(v) < tol:
            break
        gn2 = float(g @ g)
        if prev is None:
            t = 1e-2 * max(float(np.linalg.norm(v)), 1.0) / np.sqrt(gn2)
        else:
            sx, sy = v - prev[0], g - prev[1]
            sxy = float(sx @ sy)
            t = float(sx @ sx) / sxy if sxy > 0 else 1e-2 * max(float(np.linalg.norm(v)), 1.0) / np.sqrt(gn2)
        for _ in range(60):
            v_try = v - t * g
            P_try = E(v_try)
            if P_try <= P - 1e-4 * t * gn2:
                break
            t *= 0.5
        else:
            break
        prev = (v, g)
        v, P = v_try, P_try
        g = E.grad(v)
        if not np.isfinite(P) or np.max(np.abs(v)) > blowup:
            return v, False
    return v, True


class _Deflation:
    """M(u) = prod_i (1/d(u, u_i)^p + 1) with d the X-norm distance."""

    def __init__(self, E: EnergyPsi, roots, power):
        self.E, self.roots, self.power = E, [np.asarray(r) for r in roots], power

    def log_M(self, v) -> float:
        total = 0.0
        for r in self.roots:
            dist = self.E.x_norm(v - r, 1e-9)
            if dist == 0:
                return np.inf
            total += np.log1p(dist ** (-self.power))
        return total

    def factor(self, v, step) -> float:
        """Step multiplier 1/(1 - <grad M, step>/M) for the deflated Newton update."""
        if not self.roots:
            return 1.0
        eps = 1e-4
        eta = (self.log_M(v + eps * step) - self.log_M(v - eps * step)) / (2 * eps)
        if not np.isfinite(eta) or abs(1 - eta) < 1e-8:
            return 1.0
        return 1.0 / (1.0 - eta)


def _newton(E: EnergyPsi, v, tol, max_iter, deflation: Optional[_Deflation] = None):
    """(Deflated) Newton iteration with backtracking on the residual."""
    res = E.residual(v)
    best, stalled = res, 0
    for _ in range(max_iter):
        if res < tol:
            return v, res
        if stalled >= 10:
            break
        g = E.grad(v)
        Hm = E.hess(v)
        try:
            step = -np.linalg.solve(Hm, g)
        except np.linalg.LinAlgError:
            step = -np.linalg.lstsq(Hm, g, rcond=None)[0]
        if not np.all(np.isfinite(step)):
            break
        if deflation is not None:
            step = deflation.factor(v, step) * step
        t = 1.0
        for _ in range(30):
            v_try = v + t * step
            r_try = E.residual(v_try)
            if np.isfinite(r_try) and r_try < res * (1 - 1e-4 * t):
                break
            t *= 0.5
        else:
            # accept the full step once when no decrease is found (escapes plateaus)
            v_try = v + step
            r_try = E.residual(v_try)
            if not np.isfinite(r_try):
                break
        v, res = v_try, r_try
        stalled = 0 if res < 0.5 * best else stalled + 1
        best = min(best, res)
    return v, res


def _morse_index(E: EnergyPsi, v) -> int:
    Hm = E.hess(v)
    return int(np.sum(np.linalg.eigvalsh(Hm) < -1e-10 * max(1.0, np.abs(Hm).max())))


def find_critical_points(Y: YoungFunction, lam: float, mu: float, f_nl: Nonlinearity,
                         h_nl: Optional[Nonlinearity], domain: DiscreteDomain, beta,
                         n_starts: int = 16, separation: float = 1e-3,
                         opts: Optional[SearchOptions] = None, stats: Optional[dict] = None) -> list:
    """Multistart descent + Newton polish; restarts that land on a known point are
    repeated with deflated Newton. Returns the accepted critical points."""
    if lam <= 0 or mu < 0:
        raise ValueError("need lam > 0 and mu >= 0")
    opts = opts or SearchOptions(n_starts=n_starts, separation=separation)
    opts.n_starts, opts.separation = n_starts, separation
    h_nl = h_nl or zero()
    E = EnergyPsi(Y, domain, beta, lam, mu, f_nl, h_nl)
    rng = np.random.default_rng(opts.seed)
    accepted: list[CriticalPoint] = []
    counters = {"starts": 0, "reconverged": 0, "deflated_found": 0, "deflation_exhausted": 0,
                "diverged": 0, "unconverged": 0}

    def make_point(v, origin):
        return CriticalPoint(GridFunction(v.copy(), domain), E(v), E.residual(v), E.x_norm(v),
                             origin, _morse_index(E, v))

    def distinct(v, pool):
        return all(E.x_norm(v - p.u.values, 1e-9) > opts.separation for p in pool)

    if f_nl.vanishes_at_zero() and h_nl.vanishes_at_zero():
        accepted.append(make_point(np.zeros(domain.n_nodes), "zero"))

    lo, hi = np.log(opts.amplitude_range[0]), np.log(opts.amplitude_range[1])
    starts = []
    for k, v in enumerate(smooth_fields(domain, rng, opts.n_starts)):
        v = v / max(float(np.max(np.abs(v))), 1e-300)
        amp = np.exp(rng.uniform(lo, hi)) * (1 if k % 2 == 0 else -1)
        starts.append((f"start{k}", amp * v))

    for b0 in range(0, len(starts), opts.batch_size):
        snapshot = list(accepted)     # deflate against the batch-start snapshot
        for label, v0 in starts[b0:b0 + opts.batch_size]:
            counters["starts"] += 1
            v, ok = _descend_psi(E, v0.copy(), opts.descent_tol, opts.descent_iters)
            if not ok:
                counters["diverged"] += 1
                continue
            v, res = _newton(E, v, opts.tol * 1e-2, opts.newton_iters)
            if res < opts.tol and distinct(v, accepted):
                accepted.append(make_point(v, label))
                continue
            if res >= opts.tol:
                counters["unconverged"] += 1
            else:
                counters["reconverged"] += 1
            if not snapshot:
                continue
            defl = _Deflation(E, [p.u.values for p in snapshot], Y.p_minus)
            v, res = _newton(E, v0.copy(), opts.tol * 1e-2, opts.newton_iters, defl)
            if res < opts.tol and distinct(v, accepted):
                accepted.append(make_point(v, label + "+deflated"))
                counters["deflated_found"] += 1
            else:
                counters["deflation_exhausted"] += 1
    if stats is not None:
        stats.update(counters)
    return accepted


def multiplicity_sweep(Y: YoungFunction, f_nl: Nonlinearity, domain: DiscreteDomain, beta,
                       lam_values, mu: float = 0.0, h_nl: Optional[Nonlinearity] = None,
                       n_starts: int = 16, separation: float = 1e-3, seed: int = 0,
                       tol: float = 1e-8):
    """Run find_critical_points for each lambda; returns (point rows, summary rows)."""
    rows, summary = [], []
    for lam in lam_values:
        stats = {}
        opts = SearchOptions(n_starts=n_starts, separation=separation, seed=seed, tol=tol)
        pts = find_critical_points(Y, float(lam), mu, f_nl, h_nl, domain, beta,
                                   n_starts, separation, opts, stats)
        for p in pts:
            rows.append({"lambda": float(lam), "mu": mu, **p.row()})
        nonzero = [p for p in pts if p.origin != "zero"]
        summary.append({"lambda": float(lam), "mu": mu, "count": len(pts),
                        "count_nonzero": len(nonzero),
                        "max_x_norm": max((p.x_norm for p in pts), default=0.0),
                        "max_residual": max((p.gradient_residual for p in pts), default=0.0),
                        **stats})
    return rows, summary
