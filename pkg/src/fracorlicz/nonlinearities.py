"""Nonlinearities f(x, t) with primitives F, derivatives and growth envelopes."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .young import YoungFunction, make_young

NONLINEARITY_IDS = ("sine_power", "sine_young", "concave_convex", "piecewise_power", "custom", "zero")


@dataclass(frozen=True)
class Nonlinearity:
    id: str
    params: dict
    _f: Callable = field(repr=False)
    _F: Callable = field(repr=False)
    _df: Optional[Callable] = field(default=None, repr=False)
    weight_w: float = 1.0
    envelope_M: Optional[YoungFunction] = None
    plateau_height: Optional[float] = None

    def f(self, x, t):
        t = np.asarray(t, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            return self._f(x, t) * np.ones_like(t)

    def F(self, x, t):
        t = np.asarray(t, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            return self._F(x, t) * np.ones_like(t)

    def df(self, x, t):
        t = np.asarray(t, dtype=float)
        if self._df is not None:
            with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
                return self._df(x, t) * np.ones_like(t)
        eps = 1e-6 * np.maximum(np.abs(t), 1e-3)
        return (self.f(x, t + eps) - self.f(x, t - eps)) / (2 * eps)

    def vanishes_at_zero(self) -> bool:
        return bool(np.all(self.f(0.0, np.zeros(1)) == 0))


def _spow(t, q):
    """|t|^q sgn(t)."""
    return np.sign(t) * np.abs(t) ** q


def sine_power(p: float) -> Nonlinearity:
    """f = p |sin t|^{p-2} sin t cos t, F = |sin t|^p; bounded by p."""
    def f(x, t):
        return p * _spow(np.sin(t), p - 1) * np.cos(t)

    def F(x, t):
        return np.abs(np.sin(t)) ** p

    def df(x, t):
        st = np.abs(np.sin(t))
        return p * (p - 1) * st ** (p - 2) * np.cos(t) ** 2 - p * st ** p

    return Nonlinearity("sine_power", {"p": p}, f, F, df, weight_w=float(p),
                        envelope_M=make_young("power", p=p), plateau_height=np.pi / 2)


def sine_young(M: YoungFunction) -> Nonlinearity:
    """F = M(|sin t|) (even), f = m(|sin t|) sgn(sin t) cos t."""
    def f(x, t):
        return M.g(np.abs(np.sin(t))) * np.sign(np.sin(t)) * np.cos(t)

    def F(x, t):
        return M.G(np.abs(np.sin(t)))

    def df(x, t):
        st = np.abs(np.sin(t))
        return M.dg(st) * np.cos(t) ** 2 - M.g(st) * st

    w = max(float(M.g(1.0)), 1.0)
    return Nonlinearity("sine_young", {"M": (M.family,) + tuple(M.params)}, f, F, df,
                        weight_w=w, envelope_M=M, plateau_height=np.pi / 2)


def concave_convex(p: float, q: float) -> Nonlinearity:
    """f = |t|^{p-2} t - |t|^{q-2} t, F = |t|^p/p - |t|^q/q (odd extension)."""
    if not q > p:
        raise ValueError("concave_convex needs q > p")

    def f(x, t):
        return _spow(t, p - 1) - _spow(t, q - 1)

    def F(x, t):
        a = np.abs(t)
        return a ** p / p - a ** q / q

    def df(x, t):
        a = np.abs(t)
        return (p - 1) * a ** (p - 2) - (q - 1) * a ** (q - 2)

    # F(tau) > 0 on (0, (q/p)^{1/(q-p)}); the maximum of F sits at tau = 1
    return Nonlinearity("concave_convex", {"p": p, "q": q}, f, F, df, weight_w=1.0,
                        envelope_M=make_young("power", p=q), plateau_height=1.0)


def piecewise_power(alpha: float, beta: float, literal: bool = False) -> Nonlinearity:
    """Power |t|^{beta-2} t on |t| <= 1 and |t|^{alpha-2} t beyond (alpha < p- <= p+ < beta),
    so F is of order |t|^beta near 0 and of order |t|^alpha at infinity.

    ``literal=True`` swaps the branches (order alpha near 0, beta at infinity).
    """
    near, far = (alpha, beta) if literal else (beta, alpha)

    def f(x, t):
        a = np.abs(t)
        return np.where(a <= 1, _spow(t, near - 1), _spow(t, far - 1))

    def F(x, t):
        a = np.abs(t)
        return np.where(a <= 1, a ** near / near, 1 / near - 1 / far + a ** far / far)

    def df(x, t):
        a = np.abs(t)
        return np.where(a <= 1, (near - 1) * a ** (near - 2), (far - 1) * a ** (far - 2))

    env = make_young("power", p=max(far, 1.0 + 1e-9)) if far > 1 else None
    return Nonlinearity("piecewise_power", {"alpha": alpha, "beta": beta, "literal": literal},
                        f, F, df, weight_w=1.0, envelope_M=env, plateau_height=1.0)


def custom(f, F, df=None, weight_w=1.0, envelope_M=None, plateau_height=None, **params) -> Nonlinearity:
    return Nonlinearity("custom", params, f, F, df, weight_w, envelope_M, plateau_height)


def zero() -> Nonlinearity:
    z = lambda x, t: np.zeros_like(np.asarray(t, dtype=float))
    return Nonlinearity("zero", {}, z, z, z, 1.0, None, None)


def make_nonlinearity(nl_id: str, **params) -> Nonlinearity:
    if nl_id == "sine_power":
        return sine_power(float(params["p"]))
    if nl_id == "sine_young":
        M = params["M"]
        if not isinstance(M, YoungFunction):
            M = make_young(params.get("M_family", "power"), p=float(M))
        return sine_young(M)
    if nl_id == "concave_convex":
        return concave_convex(float(params["p"]), float(params["q"]))
    if nl_id == "piecewise_power":
        return piecewise_power(float(params["alpha"]), float(params["beta"]),
                               bool(params.get("literal", False)))
    if nl_id == "zero":
        return zero()
    raise ValueError(f"unknown nonlinearity {nl_id!r}")
