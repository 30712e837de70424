"""Scalar ingredients of the infinite-state representation.

The representation rewrites the Caputo derivative of order ``alpha`` as a
combination of y', y and two families of auxiliary states integrated against
the kernel ``K(lam) = sin(alpha*pi)/pi * lam**alpha / (lam**2 + omega**2)``
over (0, inf), with ``omega = sqrt((2 - alpha)/alpha)``.  This module holds
the order/grid/config types and the scalar formulas; quadrature and stepping
live in their own modules.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError


class QuadKind(enum.Enum):
    COMPOUND_GAUSS = "gauss"
    COMPOUND_CC = "cc"


class StepperKind(enum.Enum):
    BACKWARD_EULER = "be"
    TRAPEZOIDAL = "trap"


class DerivMode(enum.Enum):
    EXACT = "exact"
    MOD1 = "mod1"
    MOD2 = "mod2"


@dataclass(frozen=True)
class FractionalOrder:
    """Order alpha of the Caputo derivative, restricted to (0, 1)."""

    alpha: float

    def __post_init__(self):
        a = self.alpha
        if not (isinstance(a, (int, float)) and math.isfinite(a)):
            raise ConfigError(f"alpha must be a finite real, got {a!r}")
        if not 0.0 < a < 1.0:
            raise ConfigError(f"alpha must lie strictly in (0, 1), got {a}")


def omega(order: FractionalOrder) -> float:
    """Frequency parameter sqrt((2 - alpha)/alpha); decreasing in alpha."""
    a = order.alpha
    return math.sqrt((2.0 - a) / a)


def kernel(order: FractionalOrder, lam) -> float | np.ndarray:
    """Kernel sin(alpha*pi)/pi * lam^alpha / (lam^2 + omega^2) for lam > 0.

    lam^alpha is computed as exp(alpha*log(lam)) so subnormal arguments do
    not trip pow-domain corner cases.  Accepts scalars or arrays.
    """
    lam_arr = np.asarray(lam, dtype=float)
    if np.any(lam_arr <= 0.0):
        raise ConfigError("kernel requires lambda > 0")
    a = order.alpha
    w = omega(order)
    val = (math.sin(a * math.pi) / math.pi) * np.exp(a * np.log(lam_arr)) / (
        lam_arr * lam_arr + w * w
    )
    return float(val) if np.isscalar(lam) else val


def deweighted_kernel(order: FractionalOrder, lam) -> float | np.ndarray:
    """kernel(lam) / lam^alpha, i.e. sin(alpha*pi)/pi / (lam^2 + omega^2).

    Used with quadrature rules that absorb the weight lam^alpha; smooth at 0.
    """
    lam_arr = np.asarray(lam, dtype=float)
    a = order.alpha
    w = omega(order)
    val = (math.sin(a * math.pi) / math.pi) / (lam_arr * lam_arr + w * w)
    return float(val) if np.isscalar(lam) else val


@dataclass(frozen=True)
class EtaGrid:
    """Graded subdivision 0 = eta_0 < eta_1 < ... < eta_K of the frequency axis.

    For k >= 1 the points are log-equispaced between 10**min_exp and
    10**max_exp; eta_0 = 0 is stored explicitly because the first
    subinterval needs both endpoints.
    """

    K: int
    min_exp: float = -5.0
    max_exp: float = 5.0
    points: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.K < 2:
            raise ConfigError(f"K must be >= 2 (grading divides by K-1), got {self.K}")
        if not self.min_exp < self.max_exp:
            raise ConfigError("min_exp must be < max_exp")
        exps = self.min_exp + (self.max_exp - self.min_exp) * np.arange(self.K) / (
            self.K - 1
        )
        pts = np.concatenate(([0.0], 10.0 ** exps))
        object.__setattr__(self, "points", pts)

    @property
    def eta_max(self) -> float:
        return float(self.points[-1])


def eta_grid(K: int, min_exp: float = -5.0, max_exp: float = 5.0) -> EtaGrid:
    """Build the K-subinterval graded grid (see EtaGrid)."""
    return EtaGrid(K=K, min_exp=min_exp, max_exp=max_exp)


@dataclass(frozen=True)
class SchemeConfig:
    """Full parameter set of one scheme instance.

    h and T must define an integer step count N = T/h (relative tolerance
    1e-9, N >= 2); mod1 additionally needs N >= 4 because its interior
    stencil reaches t_{n-2} and t_{n+1}.
    """

    order: FractionalOrder
    J: int
    eta: EtaGrid
    quad_kind: QuadKind = QuadKind.COMPOUND_GAUSS
    stepper_kind: StepperKind = StepperKind.BACKWARD_EULER
    deriv_mode: DerivMode = DerivMode.EXACT
    h: float = 1e-2
    T: float = 1.0

    def __post_init__(self):
        if self.J < 1:
            raise ConfigError(f"J must be a positive integer, got {self.J}")
        if self.quad_kind is QuadKind.COMPOUND_CC and self.J < 2:
            raise ConfigError("Clenshaw-Curtis subinterval rules need J >= 2")
        if not (self.h > 0 and self.T > 0):
            raise ConfigError("h and T must be positive")
        ratio = self.T / self.h
        n = round(ratio)
        if n < 2 or abs(ratio - n) > 1e-9 * max(1.0, ratio):
            raise ConfigError(
                f"T/h = {ratio} must round to an integer N >= 2 within 1e-9"
            )
        if self.deriv_mode is DerivMode.MOD1 and n < 4:
            raise ConfigError("mod1 needs N >= 4 (interior stencil uses t_{n-2}, t_{n+1})")

    @property
    def N(self) -> int:
        return round(self.T / self.h)

    @property
    def alpha(self) -> float:
        return self.order.alpha


def explicit_coefficients(order: FractionalOrder) -> tuple[float, float]:
    """Coefficients (sin(a*pi/2)*omega^(a-1), cos(a*pi/2)*omega^a) of the
    explicit y' and y terms of the representation."""
    a = order.alpha
    w = omega(order)
    return (
        math.sin(a * math.pi / 2.0) * w ** (a - 1.0),
        math.cos(a * math.pi / 2.0) * w ** a,
    )
