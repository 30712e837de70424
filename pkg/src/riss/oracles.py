"""Ground truth for validation: analytic power-function derivatives and a
direct O(N^2) discretization sharing no machinery with the fast scheme."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import gamma

from .core import FractionalOrder
from .errors import ConfigError
from .evaluator import SampledFunction


@dataclass(frozen=True)
class PowerFunction:
    """y(t) = scale * t**p with p > 0 (so y(0) = 0 and the Caputo
    derivative exists classically)."""

    p: float
    scale: float = 1.0

    def __post_init__(self):
        if not self.p > 0:
            raise ConfigError(f"power exponent must be > 0, got {self.p}")

    def __call__(self, t):
        return self.scale * np.asarray(t, dtype=float) ** self.p

    def derivative(self, t):
        t = np.asarray(t, dtype=float)
        with np.errstate(divide="ignore"):
            return self.scale * self.p * t ** (self.p - 1.0)


def caputo_power(order: FractionalOrder, pf: PowerFunction, t) -> float | np.ndarray:
    """Exact Caputo derivative of scale*t^p:
    scale * Gamma(p+1)/Gamma(p+1-alpha) * t^(p-alpha)."""
    a = order.alpha
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0):
        raise ConfigError("t must be >= 0")
    coef = pf.scale * gamma(pf.p + 1.0) / gamma(pf.p + 1.0 - a)
    with np.errstate(divide="ignore"):
        val = coef * t_arr ** (pf.p - a)
    val = np.where(t_arr == 0.0, 0.0 if pf.p > a else np.nan, val)
    return float(val) if np.isscalar(t) else val


def naive_caputo(order: FractionalOrder, y: SampledFunction, n: int) -> float:
    """Direct piecewise-linear (L1-type) discretization at t_n; O(n) cost.

    D(t_n) ~ h^(-alpha)/Gamma(2-alpha) * sum_{m=1..n} b_m * (ytil_{n-m+1} -
    ytil_{n-m}) with b_m = m^(1-alpha) - (m-1)^(1-alpha), ytil = y - y(0).
    """
    if n < 1:
        raise ConfigError("naive_caputo needs n >= 1")
    if n > y.N:
        raise ConfigError(f"n = {n} beyond the sampled range N = {y.N}")
    a = order.alpha
    h = y.h
    ytil = y.y - y.y[0]
    m = np.arange(1, n + 1, dtype=float)
    b = m ** (1.0 - a) - (m - 1.0) ** (1.0 - a)
    diffs = ytil[1 : n + 1] - ytil[:n]
    return float(h ** (-a) / gamma(2.0 - a) * np.dot(b, diffs[::-1]))


def naive_caputo_series(order: FractionalOrder, y: SampledFunction) -> np.ndarray:
    """naive_caputo at every level 1..N (O(N^2) total)."""
    a = order.alpha
    h = y.h
    ytil = y.y - y.y[0]
    N = y.N
    m = np.arange(1, N + 1, dtype=float)
    b = m ** (1.0 - a) - (m - 1.0) ** (1.0 - a)
    diffs = ytil[1:] - ytil[:-1]
    coef = h ** (-a) / gamma(2.0 - a)
    out = np.empty(N)
    for n in range(1, N + 1):
        out[n - 1] = coef * np.dot(b[:n], diffs[n - 1 :: -1])
    return out
