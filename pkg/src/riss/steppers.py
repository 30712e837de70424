"""One-level updates of the auxiliary states z(lam, .) and Z(lam, .).

Both states obey scalar linear ODEs (z' = y' - lam z, Z' = y - lam Z, zero
initial data) and are advanced by A-stable implicit one-step methods:
backward Euler or the trapezoidal rule.  In the derivative-free modes the
y'-increment of the z update is replaced by finite differences of y:

  mod1:  backward Euler   h*y'(t_n)            -> y_n - y_{n-1}
         trapezoidal      (h/2)(y'_n+y'_{n-1}) -> y_1 - y_0          (n = 1)
                                                  y_N - y_{N-1}      (n = N)
                                                  (y_{n+1}+y_n-y_{n-1}-y_{n-2})/4
  mod2:  backward Euler   h*y'(t_n)            -> (y_{n+1} - y_{n-1})/2
         trapezoidal      (h/2)(y'_n+y'_{n-1}) -> y_n - y_{n-1}

All functions accept scalar or ndarray ``lam``/state arguments and are pure;
the evaluator keeps exactly one state vector per family (the O(1)-in-N
memory footprint).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .core import DerivMode, StepperKind
from .errors import ConfigError, DerivativeUnavailableError


@dataclass
class InfiniteState:
    """Current-level state vectors, one entry per quadrature node."""

    z: np.ndarray
    Zc: np.ndarray
    t: int = 0

    @classmethod
    def zeros(cls, n_nodes: int) -> "InfiniteState":
        return cls(z=np.zeros(n_nodes), Zc=np.zeros(n_nodes), t=0)


@dataclass(frozen=True)
class DriveWindow:
    """Samples of y (and optionally y') around step n.

    Entries that would fall outside [t_0, t_N] are left as None; the step
    functions raise if the selected mode needs a missing entry.
    """

    n: int
    N: int
    y_n: Optional[float] = None
    y_prev: Optional[float] = None
    y_prev2: Optional[float] = None
    y_next: Optional[float] = None
    yp_n: Optional[float] = None
    yp_prev: Optional[float] = None


def _need(window: DriveWindow, **entries):
    missing = [name for name, value in entries.items() if value is None]
    if missing:
        raise DerivativeUnavailableError(
            f"step {window.n}: drive samples missing for this mode: {missing}"
        )
    return [entries[k] for k in entries]


def z_increment_backward_euler(drive: DriveWindow, h: float, mode: DerivMode) -> float:
    """The term replacing h*y'(t_n) in the backward Euler z update."""
    if mode is DerivMode.EXACT:
        (yp,) = _need(drive, yp_n=drive.yp_n)
        return h * yp
    if mode is DerivMode.MOD1:
        yn, yp_ = _need(drive, y_n=drive.y_n, y_prev=drive.y_prev)
        return yn - yp_
    # mod2: centered difference; at the final level fall back to the
    # second-order backward stencil (no sample beyond t_N exists)
    if drive.y_next is not None:
        yn1, ym1 = _need(drive, y_next=drive.y_next, y_prev=drive.y_prev)
        return (yn1 - ym1) / 2.0
    if drive.n == drive.N:
        yn, ym1, ym2 = _need(
            drive, y_n=drive.y_n, y_prev=drive.y_prev, y_prev2=drive.y_prev2
        )
        return (3.0 * yn - 4.0 * ym1 + ym2) / 2.0
    raise DerivativeUnavailableError(
        f"step {drive.n}: mod2 backward Euler needs y at t_(n+1)"
    )


def z_increment_trapezoidal(drive: DriveWindow, h: float, mode: DerivMode) -> float:
    """The term replacing (h/2)[y'(t_n) + y'(t_{n-1})] in the trapezoidal z update."""
    if mode is DerivMode.EXACT:
        ypn, ypp = _need(drive, yp_n=drive.yp_n, yp_prev=drive.yp_prev)
        return 0.5 * h * (ypn + ypp)
    if mode is DerivMode.MOD2:
        yn, ym1 = _need(drive, y_n=drive.y_n, y_prev=drive.y_prev)
        return yn - ym1
    # mod1 case list
    if drive.n == 1 or drive.n == drive.N:
        yn, ym1 = _need(drive, y_n=drive.y_n, y_prev=drive.y_prev)
        return yn - ym1
    yn1, yn, ym1, ym2 = _need(
        drive,
        y_next=drive.y_next,
        y_n=drive.y_n,
        y_prev=drive.y_prev,
        y_prev2=drive.y_prev2,
    )
    return (yn1 + yn - ym1 - ym2) / 4.0


def step_z_backward_euler(lam, z_prev, h: float, drive: DriveWindow, mode: DerivMode):
    """z_n = (z_{n-1} + increment) / (1 + h*lam)."""
    if h <= 0:
        raise ConfigError("h must be positive")
    incr = z_increment_backward_euler(drive, h, mode)
    return (z_prev + incr) / (1.0 + h * np.asarray(lam))


def step_z_trapezoidal(lam, z_prev, h: float, drive: DriveWindow, mode: DerivMode):
    """z_n = (z_{n-1}(1 - h*lam/2) + increment) / (1 + h*lam/2)."""
    if h <= 0:
        raise ConfigError("h must be positive")
    lam = np.asarray(lam)
    incr = z_increment_trapezoidal(drive, h, mode)
    return (z_prev * (1.0 - 0.5 * h * lam) + incr) / (1.0 + 0.5 * h * lam)


def step_Z(kind: StepperKind, lam, Z_prev, h: float, y_n: float, y_prev: float = None):
    """Advance the y-driven state; shared by all derivative modes."""
    if h <= 0:
        raise ConfigError("h must be positive")
    lam = np.asarray(lam)
    if kind is StepperKind.BACKWARD_EULER:
        return (Z_prev + h * y_n) / (1.0 + h * lam)
    if y_prev is None:
        raise DerivativeUnavailableError("trapezoidal Z update needs y at t_{n-1}")
    return (Z_prev * (1.0 - 0.5 * h * lam) + 0.5 * h * (y_n + y_prev)) / (
        1.0 + 0.5 * h * lam
    )


def zdot(lam, z_n, yprime_surrogate):
    """Time derivative of z at the current level: y'-surrogate - lam*z_n."""
    return yprime_surrogate - np.asarray(lam) * z_n


def three_point_derivative(y: np.ndarray, n: int, h: float) -> float:
    """Second-order stencil family for y'(t_n) on a uniform grid:
    forward at n = 0, backward at n = len(y)-1, centered inside."""
    last = len(y) - 1
    if n == 0:
        return (-y[2] + 4.0 * y[1] - 3.0 * y[0]) / (2.0 * h)
    if n == last:
        return (3.0 * y[last] - 4.0 * y[last - 1] + y[last - 2]) / (2.0 * h)
    return (y[n + 1] - y[n - 1]) / (2.0 * h)


def backward_derivative(y: np.ndarray, n: int, h: float) -> float:
    """Backward-looking y'(t_n) estimate used by the derivative-free modes
    for the explicit terms of the representation: first-order difference at
    n = 1, second-order backward stencil for n >= 2.

    Shared verbatim by the evaluator and the implicit FDE step so that both
    apply the identical discrete operator.
    """
    if n < 1:
        raise ConfigError("backward_derivative needs n >= 1")
    if n == 1:
        return (y[1] - y[0]) / h
    return (3.0 * y[n] - 4.0 * y[n - 1] + y[n - 2]) / (2.0 * h)


def backward_surrogate_series(y: np.ndarray, h: float) -> np.ndarray:
    """Vectorized backward_derivative for n = 1..N (index 0 unused, NaN)."""
    s = np.full(len(y), np.nan)
    s[1] = (y[1] - y[0]) / h
    if len(y) > 2:
        s[2:] = (3.0 * y[2:] - 4.0 * y[1:-1] + y[:-2]) / (2.0 * h)
    return s


def amplification_factor(kind: StepperKind, hlam) -> np.ndarray:
    """Factor multiplying the previous state in one update; |.| <= 1 for
    every h*lam > 0 (A-stability)."""
    hlam = np.asarray(hlam, dtype=float)
    if kind is StepperKind.BACKWARD_EULER:
        return 1.0 / (1.0 + hlam)
    return (1.0 - 0.5 * hlam) / (1.0 + 0.5 * hlam)
