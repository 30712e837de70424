"""Whole-grid evaluation of the Caputo derivative approximation.

For each time level the compound-quadrature nodes carry one z and one Z
state; after advancing them the derivative value is

    D(t_n) = c_s * s_n - sum_i W_i * (s_n - lam_i z_i)
           + c_y * ytil_n - omega^2 * sum_i W_i Z_i

where ytil = y - y(0) drives everything (the Caputo operator differentiates
y - y(0), so constants are annihilated exactly), s_n is the y'(t_n) value in
exact mode or its finite-difference surrogate in the derivative-free modes,
and W_i = w_i * K(lam_i) (with the de-weighted kernel where the rule has
absorbed lam^alpha).  Node sums use a fixed ascending-node reduction, so
repeated runs are bit-identical.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .core import (
    DerivMode,
    SchemeConfig,
    StepperKind,
    deweighted_kernel,
    explicit_coefficients,
    kernel,
    omega,
)
from .errors import ConfigError, DerivativeUnavailableError
from .quadrature import CompoundRule, assemble_compound
from .steppers import backward_surrogate_series


@dataclass(frozen=True)
class SampledFunction:
    """Uniform-grid samples of y on [0, T] (and optionally of y')."""

    y: np.ndarray
    h: float
    yp: Optional[np.ndarray] = None

    def __post_init__(self):
        object.__setattr__(self, "y", np.asarray(self.y, dtype=float))
        if self.yp is not None:
            yp = np.asarray(self.yp, dtype=float)
            if yp.shape != self.y.shape:
                raise ConfigError("y and y' sample arrays must have equal length")
            object.__setattr__(self, "yp", yp)
        if self.h <= 0:
            raise ConfigError("h must be positive")
        if len(self.y) < 2:
            raise ConfigError("need at least two samples")

    @property
    def y0(self) -> float:
        return float(self.y[0])

    @property
    def N(self) -> int:
        return len(self.y) - 1

    @classmethod
    def from_callable(cls, fn, h: float, T: float, fn_prime=None) -> "SampledFunction":
        n = round(T / h)
        t = np.arange(n + 1) * h
        y = np.asarray([fn(ti) for ti in t], dtype=float)
        yp = None
        if fn_prime is not None:
            with np.errstate(divide="ignore", invalid="ignore"):
                yp = np.asarray([fn_prime(ti) for ti in t], dtype=float)
        return cls(y=y, h=h, yp=yp)


@dataclass(frozen=True)
class DerivativeSeries:
    """Approximations of the order-alpha derivative at t_1 .. t_N."""

    values: np.ndarray
    config: SchemeConfig

    @property
    def times(self) -> np.ndarray:
        return (1 + np.arange(len(self.values))) * self.config.h

    def __len__(self) -> int:
        return len(self.values)


def node_weights(config: SchemeConfig, rule: CompoundRule) -> np.ndarray:
    """Per-node factors W_i = w_i * K(lam_i), using the de-weighted kernel
    on nodes whose rule absorbed lam^alpha (smooth at lam = 0, where the
    weighted first panel places its lowest abscissa)."""
    mask = rule.weighted_mask
    W = np.empty(len(rule))
    if np.any(~mask):
        W[~mask] = rule.weights[~mask] * kernel(config.order, rule.nodes[~mask])
    if np.any(mask):
        W[mask] = rule.weights[mask] * deweighted_kernel(config.order, rule.nodes[mask])
    return W


def _z_increments(config: SchemeConfig, ytil: np.ndarray, yp) -> np.ndarray:
    """Per-step scalar increments of the z update, precomputed for n=1..N."""
    h = config.h
    N = config.N
    incr = np.zeros(N + 1)
    mode = config.deriv_mode
    if config.stepper_kind is StepperKind.BACKWARD_EULER:
        if mode is DerivMode.EXACT:
            incr[1:] = h * yp[1:]
        elif mode is DerivMode.MOD1:
            incr[1:] = ytil[1:] - ytil[:-1]
        else:  # mod2: centered, second-order backward stencil at the last level
            incr[1:N] = (ytil[2:] - ytil[: N - 1]) / 2.0
            incr[N] = (3.0 * ytil[N] - 4.0 * ytil[N - 1] + ytil[N - 2]) / 2.0
    else:
        if mode is DerivMode.EXACT:
            incr[1:] = 0.5 * h * (yp[1:] + yp[:-1])
        elif mode is DerivMode.MOD2:
            incr[1:] = ytil[1:] - ytil[:-1]
        else:  # mod1 case list
            incr[1] = ytil[1] - ytil[0]
            incr[N] = ytil[N] - ytil[N - 1]
            if N > 2:
                n = np.arange(2, N)
                incr[n] = (ytil[n + 1] + ytil[n] - ytil[n - 1] - ytil[n - 2]) / 4.0
    return incr


def eval_derivative_series(config: SchemeConfig, y: SampledFunction) -> DerivativeSeries:
    """Run the scheme over the full grid and return D(t_1..t_N)."""
    if y.N != config.N:
        raise ConfigError(
            f"sample count {y.N + 1} does not match config grid N+1 = {config.N + 1}"
        )
    if abs(y.h - config.h) > 1e-12 * max(1.0, config.h):
        raise ConfigError("sample spacing differs from config.h")
    mode = config.deriv_mode
    if mode is DerivMode.EXACT:
        if y.yp is None:
            raise DerivativeUnavailableError(
                "exact-derivative mode needs y' samples; provide them or use mod1/mod2"
            )
        if config.stepper_kind is StepperKind.TRAPEZOIDAL and not np.isfinite(y.yp[0]):
            raise DerivativeUnavailableError(
                "trapezoidal stepper in exact mode evaluates y'(0), which is not "
                "finite here; use mod1 or mod2"
            )
        used = y.yp[1:] if config.stepper_kind is StepperKind.BACKWARD_EULER else y.yp
        if not np.all(np.isfinite(used)):
            raise DerivativeUnavailableError("non-finite y' sample inside (0, T]")

    rule = assemble_compound(config)
    W = node_weights(config, rule)
    lam = rule.nodes
    c_s, c_y = explicit_coefficients(config.order)
    om2 = omega(config.order) ** 2
    sW = float(np.sum(W))
    WL = W * lam

    h = config.h
    N = config.N
    ytil = y.y - y.y[0]
    incr_z = _z_increments(config, ytil, y.yp)
    if mode is DerivMode.EXACT:
        surrogate = y.yp
    else:
        surrogate = backward_surrogate_series(ytil, h)

    if config.stepper_kind is StepperKind.BACKWARD_EULER:
        damp = None
        scale = 1.0 / (1.0 + h * lam)
        incr_Z = np.concatenate(([0.0], h * ytil[1:]))
    else:
        damp = (1.0 - 0.5 * h * lam) / (1.0 + 0.5 * h * lam)
        scale = 1.0 / (1.0 + 0.5 * h * lam)
        incr_Z = np.concatenate(([0.0], 0.5 * h * (ytil[1:] + ytil[:-1])))

    z = np.zeros_like(lam)
    Z = np.zeros_like(lam)
    buf = np.empty_like(lam)
    out = np.zeros(N)
    for n in range(1, N + 1):
        if damp is None:
            z += incr_z[n]
            z *= scale
            Z += incr_Z[n]
            Z *= scale
        else:
            z *= damp
            np.multiply(scale, incr_z[n], out=buf)
            z += buf
            Z *= damp
            np.multiply(scale, incr_Z[n], out=buf)
            Z += buf
        s = surrogate[n]
        out[n - 1] = (c_s - sW) * s + WL @ z + c_y * ytil[n] - om2 * (W @ Z)
    return DerivativeSeries(values=out, config=config)


def eval_derivative_callable(
    config: SchemeConfig,
    y_fn: Callable[[float], float],
    yprime_fn: Optional[Callable[[float], float]] = None,
) -> DerivativeSeries:
    """Sample a callable onto the grid and delegate to eval_derivative_series."""
    sampled = SampledFunction.from_callable(y_fn, config.h, config.T, yprime_fn)
    return eval_derivative_series(config, sampled)
