"""Implicit solver for D^alpha y = f(t, y), y(0) = y0.

At level n every quantity entering the derivative approximation is affine in
the unknown y_n (the state updates, the backward derivative surrogate and
the explicit terms are all linear), so the scheme is written as

    D(t_n) = A * (y_n - y0) + B_n

with A fixed and B_n collecting the history, and A*(y_n - y0) + B_n =
f(t_n, y_n) is solved by safeguarded Newton iteration (one iteration for f
affine in y, since the difference quotient of an affine f is exact).  Only
backward-looking stepper/mode pairs are allowed: backward Euler with mod1,
or trapezoidal with mod2; the other pairs need samples beyond t_n.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .core import (
    DerivMode,
    FractionalOrder,
    SchemeConfig,
    StepperKind,
    explicit_coefficients,
    omega,
)
from .errors import ConfigError, ConvergenceFailureError
from .evaluator import eval_derivative_callable, node_weights
from .quadrature import assemble_compound

_ALLOWED_MODES = {
    (StepperKind.BACKWARD_EULER, DerivMode.MOD1),
    (StepperKind.TRAPEZOIDAL, DerivMode.MOD2),
}

_MAX_ITER = 50
_ATOL = 1e-12


@dataclass(frozen=True)
class Trajectory:
    """Solution samples y(t_0..t_N) plus per-step implicit residuals."""

    samples: np.ndarray
    residuals: np.ndarray
    config: SchemeConfig
    newton_iterations: np.ndarray

    @property
    def times(self) -> np.ndarray:
        return np.arange(len(self.samples)) * self.config.h


def solve_fde(f: Callable[[float, float], float], y0: float, config: SchemeConfig) -> Trajectory:
    """March the implicit scheme over [0, T]; see module docstring."""
    pair = (config.stepper_kind, config.deriv_mode)
    if pair not in _ALLOWED_MODES:
        raise ConfigError(
            "solver needs a backward-looking scheme: backward Euler + mod1 or "
            f"trapezoidal + mod2, got {pair[0].value} + {pair[1].value}"
        )
    rule = assemble_compound(config)
    lam = rule.nodes
    W = node_weights(config, rule)
    WL = W * lam
    sW = float(np.sum(W))
    c_s, c_y = explicit_coefficients(config.order)
    om2 = omega(config.order) ** 2

    h = config.h
    N = config.N
    trap = config.stepper_kind is StepperKind.TRAPEZOIDAL
    if trap:
        scale = 1.0 / (1.0 + 0.5 * h * lam)
        damp = (1.0 - 0.5 * h * lam) * scale
        bZ_coef = 0.5 * h * scale
    else:
        scale = 1.0 / (1.0 + h * lam)
        damp = None
        bZ_coef = h * scale
    bz = scale  # d z_n / d ytil_n for both allowed pairs
    wl_bz = float(WL @ bz)
    w_bZ = float(W @ bZ_coef)

    z = np.zeros_like(lam)
    Z = np.zeros_like(lam)
    ytil = np.zeros(N + 1)
    resid = np.zeros(N)
    iters = np.zeros(N, dtype=int)

    for n in range(1, N + 1):
        t_n = n * h
        # surrogate s = g1 * ytil_n + g0 (backward, second order for n >= 2)
        if n == 1:
            g1 = 1.0 / h
            g0 = -ytil[0] / h
        else:
            g1 = 1.5 / h
            g0 = (-4.0 * ytil[n - 1] + ytil[n - 2]) / (2.0 * h)
        if trap:
            az = (z * damp - ytil[n - 1] * scale)
            aZ = Z * damp + (0.5 * h * ytil[n - 1]) * scale
        else:
            az = (z - ytil[n - 1]) * scale
            aZ = Z * scale
        A = (c_s - sW) * g1 + wl_bz + c_y - om2 * w_bZ
        B = (c_s - sW) * g0 + float(WL @ az) - om2 * float(W @ aZ)

        u, r, it = _solve_level(f, t_n, y0, A, B, y0 + ytil[n - 1], n)
        ytil[n] = u - y0
        resid[n - 1] = r
        iters[n - 1] = it
        z = az + bz * ytil[n]
        Z = aZ + bZ_coef * ytil[n]

    return Trajectory(
        samples=y0 + ytil, residuals=resid, config=config, newton_iterations=iters
    )


def _solve_level(f, t_n, y0, A, B, guess, n):
    """Solve A*(v - y0) + B = f(t_n, v) for v; safeguarded Newton with a
    fixed-point fallback.  Returns (v, |residual|, iterations)."""

    def g(v):
        return A * (v - y0) + B - f(t_n, v)

    v = guess
    r = g(v)
    floor = 128.0 * np.finfo(float).eps * (abs(A) * (1.0 + abs(v - y0)) + abs(B) + 1.0)
    tol = max(_ATOL, floor)
    it = 0
    while abs(r) > tol:
        if it >= _MAX_ITER:
            raise ConvergenceFailureError(n, abs(r))
        delta = np.finfo(float).eps ** (1.0 / 3.0) * max(1.0, abs(v))
        fp = (f(t_n, v + delta) - f(t_n, v - delta)) / (2.0 * delta)
        gp = A - fp
        if gp != 0.0 and math.isfinite(gp):
            v_new = v - r / gp
        else:
            v_new = y0 + (f(t_n, v) - B) / A
        r_new = g(v_new)
        k = 0
        while abs(r_new) > abs(r) and k < 8:
            v_new = 0.5 * (v_new + v)
            r_new = g(v_new)
            k += 1
        if abs(r_new) >= abs(r) and abs(r) <= 8.0 * tol:
            # stagnated at the rounding floor; accept the better iterate
            break
        v, r = v_new, r_new
        it += 1
        tol = max(
            _ATOL,
            128.0 * np.finfo(float).eps * (abs(A) * (1.0 + abs(v - y0)) + abs(B) + 1.0),
        )
    return v, abs(r), it


class SolveFor(enum.Enum):
    STRESS = "stress"
    STRAIN = "strain"


@dataclass(frozen=True)
class ZenerParams:
    """Coefficients of the stress-strain law
    a0*sigma + a1*D^alpha(sigma) = m*eps + b1*D^alpha(eps)."""

    a0: float
    a1: float
    m: float
    b1: float
    order: FractionalOrder = field(default_factory=lambda: FractionalOrder(0.5))


def zener_rhs(
    params: ZenerParams,
    forcing: Callable[[float], float],
    solve_for: SolveFor,
    config: SchemeConfig,
) -> Callable[[float, float], float]:
    """Rearrange the material law into D^alpha(unknown) = f(t, unknown).

    ``forcing`` is the prescribed counterpart function (stress when solving
    for strain, and vice versa); its order-alpha derivative is evaluated on
    the grid with the same scheme configuration.
    """
    if solve_for is SolveFor.STRAIN and params.b1 == 0:
        raise ConfigError("solving for strain needs b1 != 0")
    if solve_for is SolveFor.STRESS and params.a1 == 0:
        raise ConfigError("solving for stress needs a1 != 0")

    d_forcing = eval_derivative_callable(config, forcing).values
    h = config.h

    def lookup(t: float) -> float:
        n = round(t / h)
        if abs(t - n * h) > 1e-9 * max(1.0, abs(t)):
            raise ConfigError(f"t = {t} is not on the solver grid")
        return 0.0 if n == 0 else float(d_forcing[n - 1])

    if solve_for is SolveFor.STRAIN:

        def f(t, eps):
            return (params.a0 * forcing(t) + params.a1 * lookup(t) - params.m * eps) / params.b1

    else:

        def f(t, sigma):
            return (params.m * forcing(t) + params.b1 * lookup(t) - params.a0 * sigma) / params.a1

    return f
