"""Discrete modulars, Luxemburg norms and the X-norm."""
from __future__ import annotations

from functools import lru_cache
from typing import Callable, Optional

import numpy as np
from scipy.optimize import brentq

from .grid import DiscreteDomain, GridFunction
from .young import YoungFunction

PAIR_REGIONS = ("full", "regional", "star")


class NonPositiveBeta(ValueError):
    pass


@lru_cache(maxsize=32)
def pair_mask(domain: DiscreteDomain, pair_region: str) -> np.ndarray:
    """Boolean (N, N) mask of ordered node pairs in the region (diagonal excluded)."""
    inside = domain.interior
    if pair_region == "full":
        mask = np.ones((domain.n_nodes, domain.n_nodes), dtype=bool)
    elif pair_region == "regional":
        mask = inside[:, None] & inside[None, :]
    elif pair_region == "star":
        mask = inside[:, None] | inside[None, :]
    else:
        raise ValueError(f"unknown pair region {pair_region!r}")
    mask = mask.copy()
    np.fill_diagonal(mask, False)
    return mask


@lru_cache(maxsize=32)
def pair_weights(domain: DiscreteDomain, pair_region: str) -> np.ndarray:
    """dmu weights h^{2n}/|x-y|^n restricted to the pair region."""
    return np.where(pair_mask(domain, pair_region), domain.kernel_mu, 0.0)


def _values(u):
    return u.values if isinstance(u, GridFunction) else np.asarray(u, dtype=float)


def beta_values(domain: DiscreteDomain, beta) -> np.ndarray:
    """Per-node beta array (zero on the interior); accepts a scalar, a callable
    of the coordinates, or an array over all/exterior nodes."""
    if callable(beta):
        x = domain.nodes[:, 0] if domain.dim == 1 else domain.nodes
        b = np.asarray(beta(x), dtype=float) * np.ones(domain.n_nodes)
    else:
        b = np.asarray(beta, dtype=float)
        if b.ndim == 0:
            b = np.full(domain.n_nodes, float(b))
        elif b.shape == (domain.n_exterior,):
            full = np.zeros(domain.n_nodes)
            full[domain.exterior] = b
            b = full
    if b.shape != (domain.n_nodes,):
        raise ValueError("beta has the wrong shape")
    ext = domain.exterior
    if np.any(~(b[ext] > 0)) or not np.all(np.isfinite(b[ext])):
        raise NonPositiveBeta("beta must be strictly positive and bounded on exterior nodes")
    return np.where(ext, b, 0.0)


def modular_G(Y: YoungFunction, u, region: str = "interior", weight=None,
              domain: Optional[DiscreteDomain] = None) -> float:
    """Sum over the region of G(|u_i|) h^n (times beta_i when weighted)."""
    domain = domain or u.domain
    v = _values(u)
    mask = domain.interior if region == "interior" else domain.exterior
    w = domain.cell_weight
    terms = Y.G(np.abs(v[mask])) * w
    if weight is not None:
        terms = terms * beta_values(domain, weight)[mask]
    return float(terms.sum())


def modular_sG(Y: YoungFunction, u, pair_region: str = "star",
               domain: Optional[DiscreteDomain] = None) -> float:
    """Sum over ordered pairs of G(|D_s u|) dmu."""
    domain = domain or u.domain
    v = _values(u)
    D = np.abs(v[:, None] - v[None, :]) * domain.kernel_s
    return float(np.sum(Y.G(D) * pair_weights(domain, pair_region)))


def luxemburg_norm(modular: Callable[[np.ndarray], float], u, rtol: float = 1e-12) -> float:
    """inf{lam > 0 : modular(u/lam) <= 1}, solved with Brent's method in log(lam)."""
    v = _values(u)
    if not np.any(v):
        return 0.0
    phi = lambda lam: modular(v / lam)
    if phi(1.0) == 0.0:
        return 0.0
    # bracket the root geometrically around max|v|
    lo = hi = max(float(np.max(np.abs(v))), 1e-300)
    while phi(hi) > 1:
        lo, hi = hi, hi * 4.0
    while phi(lo) <= 1:
        hi, lo = lo, lo / 4.0
        if lo == 0.0:
            return 0.0
    # phi is continuous and decreasing in lam, so the root of phi - 1 is the norm
    f = lambda x: phi(np.exp(x)) - 1.0
    a, b = np.log(lo), np.log(hi)
    if f(b) >= 0:       # phi(hi) == 1 up to the rounding of exp(log(hi))
        return float(hi)
    return float(np.exp(brentq(f, a, b, xtol=rtol, rtol=1e-15)))


def norm_G(Y: YoungFunction, u, region: str = "interior", weight=None, domain=None,
           rtol: float = 1e-12) -> float:
    domain = domain or u.domain
    return luxemburg_norm(lambda v: modular_G(Y, v, region, weight, domain), u, rtol)


def seminorm_sG(Y: YoungFunction, u, pair_region: str = "star", domain=None,
                rtol: float = 1e-12) -> float:
    domain = domain or u.domain
    return luxemburg_norm(lambda v: modular_sG(Y, v, pair_region, domain), u, rtol)


def x_norm(Y: YoungFunction, u, beta, domain=None, rtol: float = 1e-12) -> float:
    """Star seminorm + interior L^G norm + beta-weighted exterior L^G norm."""
    domain = domain or u.domain
    beta_values(domain, beta)
    return (seminorm_sG(Y, u, "star", domain, rtol)
            + norm_G(Y, u, "interior", None, domain, rtol)
            + norm_G(Y, u, "exterior", beta, domain, rtol))


def sandwich_check(Y: YoungFunction, domain: DiscreteDomain, rng: np.random.Generator,
                   n_samples: int = 1000, slack: float = 1e-8) -> dict:
    """xi_-(|u|) <= Phi(u) <= xi_+(|u|) and Phi(u/|u|) = 1 on random grid functions,
    for the interior modular and the star seminorm modular."""
    out = {}
    mods = {"interior": lambda v: modular_G(Y, v, "interior", None, domain),
            "star": lambda v: modular_sG(Y, v, "star", domain)}
    for name, mod in mods.items():
        viol, worst_rt = 0, 0.0
        for _ in range(n_samples):
            v = rng.normal(size=domain.n_nodes) * 10.0 ** rng.uniform(-3, 3)
            nv = luxemburg_norm(mod, v)
            phi = mod(v)
            lo, hi = float(Y.xi_minus(nv)), float(Y.xi_plus(nv))
            if phi < lo * (1 - slack) or phi > hi * (1 + slack):
                viol += 1
            worst_rt = max(worst_rt, abs(mod(v / nv) - 1.0))
        out[name] = {"checked": n_samples, "violations": viol, "roundtrip_worst": worst_rt}
    return out
