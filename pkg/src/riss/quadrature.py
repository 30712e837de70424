"""Per-subinterval quadrature rules and their compound assembly.

Three subinterval rules are provided: Gauss-Legendre, the standard
Clenshaw-Curtis rule on Chebyshev-Lobatto abscissae, and a weighted
Clenshaw-Curtis rule whose weights absorb the factor lam**alpha (so the
remaining integrand is smooth at lam = 0).  ``assemble_compound`` glues
J-point rules over the graded subintervals [eta_{k-1}, eta_k] into one flat
rule over (0, eta_K].
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .core import FractionalOrder, QuadKind, SchemeConfig
from .errors import ConfigError


@dataclass(frozen=True)
class SubintervalRule:
    """Nodes/weights on one interval [a, b]; ``weighted`` marks rules whose
    weights absorb lam**alpha."""

    nodes: np.ndarray
    weights: np.ndarray
    a: float
    b: float
    weighted: bool = False


@dataclass(frozen=True)
class CompoundRule:
    """Flat strictly-increasing node/weight arrays over (0, eta_K].

    ``weighted_mask[i]`` is True where weights[i] already contains the
    factor lam_i**alpha; ``absorbs_weight`` is True iff any node is marked.
    ``subinterval`` records which graded panel (1-based) each node belongs
    to, for the debug CSV dump.

    Every panel contributes exactly J entries, so len == J*K; rules with
    Lobatto abscissae (both CC variants) duplicate the shared panel
    endpoints, one entry per neighbouring panel, which leaves the sums
    unchanged.
    """

    nodes: np.ndarray
    weights: np.ndarray
    weighted_mask: np.ndarray
    subinterval: np.ndarray

    @property
    def absorbs_weight(self) -> bool:
        return bool(self.weighted_mask.any())

    def __len__(self) -> int:
        return len(self.nodes)


def _legendre_and_derivative(j: int, x: np.ndarray):
    """P_j(x) and P_j'(x) by the three-term recurrence."""
    p_prev = np.ones_like(x)
    p = x.copy()
    if j == 0:
        return p_prev, np.zeros_like(x)
    for k in range(2, j + 1):
        p_prev, p = p, ((2 * k - 1) * x * p - (k - 1) * p_prev) / k
    dp = j * (x * p - p_prev) / (x * x - 1.0)
    return p, dp


def gauss_legendre(J: int, a: float, b: float) -> SubintervalRule:
    """J-point Gauss-Legendre rule on [a, b]; exact for degree <= 2J-1.

    Nodes come from the symmetric tridiagonal Jacobi matrix and are then
    polished with two Newton sweeps on P_J; weights use the classical
    2 / ((1-x^2) P_J'(x)^2) formula.
    """
    if J < 1:
        raise ConfigError(f"gauss_legendre needs J >= 1, got {J}")
    if not a < b:
        raise ConfigError(f"empty interval [{a}, {b}]")
    if J == 1:
        x = np.array([0.0])
        w = np.array([2.0])
    else:
        k = np.arange(1, J)
        off = k / np.sqrt(4.0 * k * k - 1.0)
        x, _ = eigh_tridiagonal(np.zeros(J), off, select="a")
        for _ in range(2):
            p, dp = _legendre_and_derivative(J, x)
            x = x - p / dp
        _, dp = _legendre_and_derivative(J, x)
        w = 2.0 / ((1.0 - x * x) * dp * dp)
    nodes = 0.5 * (b - a) * x + 0.5 * (b + a)
    weights = 0.5 * (b - a) * w
    return SubintervalRule(nodes=nodes, weights=weights, a=a, b=b)


def _lobatto_angles(J: int) -> np.ndarray:
    """Angles theta_i of the ascending Chebyshev-Lobatto points cos(theta)."""
    M = J - 1
    return (M - np.arange(J)) * np.pi / M


def clenshaw_curtis(J: int, a: float, b: float) -> SubintervalRule:
    """J-point Clenshaw-Curtis rule on [a, b]; exact for degree <= J-1.

    Weights come from the closed-form cosine sums; all are positive.
    """
    if J < 2:
        raise ConfigError(f"clenshaw_curtis needs J >= 2, got {J}")
    if not a < b:
        raise ConfigError(f"empty interval [{a}, {b}]")
    M = J - 1
    theta = _lobatto_angles(J)
    x = np.cos(theta)
    w = np.zeros(J)
    ii = np.arange(1, M // 2 + 1)
    coef = np.where(2 * ii == M, 1.0, 2.0) / (4.0 * ii * ii - 1.0)
    for j in range(J):
        w[j] = (1.0 - np.sum(coef * np.cos(2.0 * ii * theta[j]))) / M
    w[1:-1] *= 2.0
    nodes = 0.5 * (b - a) * x + 0.5 * (b + a)
    nodes[0], nodes[-1] = a, b  # exact interface ties between panels
    weights = 0.5 * (b - a) * w
    return SubintervalRule(nodes=nodes, weights=weights, a=a, b=b)


def _chebyshev_jacobi_moments(alpha: float, nmax: int) -> np.ndarray:
    """M_m = int_{-1}^{1} (1+x)^alpha T_m(x) dx for m = 0..nmax.

    Three-term recurrence derived from d/dx[(1+x)^{alpha+1} (T_{m+1}/(m+1)
    - T_{m-1}/(m-1))/2]; only algebraically unstable (error growth ~ m^2),
    fine for the m <= ~40 used here.
    """
    M = np.zeros(nmax + 1)
    M[0] = 2.0 ** (alpha + 1) / (alpha + 1)
    if nmax >= 1:
        M[1] = 2.0 ** (alpha + 2) / (alpha + 2) - 2.0 ** (alpha + 1) / (alpha + 1)
    if nmax >= 2:
        M[2] = (
            2.0 ** (alpha + 4) / (alpha + 3)
            - 2.0 ** (alpha + 4) / (alpha + 2)
            + 2.0 ** (alpha + 1) / (alpha + 1)
        )
    for m in range(2, nmax):
        M[m + 1] = (
            -(2.0 ** (alpha + 2))
            - 2.0 * (m * m - 1.0) * M[m]
            - (m + 1.0) * (m - alpha - 2.0) * M[m - 1]
        ) / ((m - 1.0) * (m + alpha + 2.0))
    return M


def _smooth_modified_moments(alpha: float, a: float, b: float, J: int) -> np.ndarray:
    """mu_m = int_a^b t^alpha T_m(xi(t)) dt for a > 0, m = 0..J-1.

    The integrand is analytic on [a, b]; panelled 60-point Gauss-Legendre
    with per-panel endpoint ratio <= 4 evaluates it to machine precision
    for any 0 < a < b.
    """
    edges = [a]
    while edges[-1] * 4.0 < b:
        edges.append(edges[-1] * 4.0)
    edges.append(b)
    xs, ws = [], []
    for lo, hi in zip(edges[:-1], edges[1:]):
        r = gauss_legendre(60, lo, hi)
        xs.append(r.nodes)
        ws.append(r.weights)
    xg = np.concatenate(xs)
    wg = np.concatenate(ws)
    xi = np.clip((2.0 * xg - a - b) / (b - a), -1.0, 1.0)
    ang = np.arccos(xi)
    wfac = wg * xg ** alpha
    m = np.arange(J)
    return np.cos(np.outer(m, ang)) @ wfac


def weighted_cc(J: int, a: float, b: float, order: FractionalOrder) -> SubintervalRule:
    """Clenshaw-Curtis abscissae with weights absorbing lam**alpha.

    The weights solve sum_i w_i p(lam_i) = int_a^b lam^alpha p(lam) dlam for
    every polynomial p of degree <= J-1, via modified Chebyshev moments and
    the cosine Vandermonde system (a DCT-like, well-conditioned solve).
    """
    if J < 2:
        raise ConfigError(f"weighted_cc needs J >= 2, got {J}")
    if a < 0:
        raise ConfigError("weighted_cc needs a >= 0 (weight lam**alpha)")
    if not a < b:
        raise ConfigError(f"empty interval [{a}, {b}]")
    alpha = order.alpha
    theta = _lobatto_angles(J)
    x = np.cos(theta)
    if a == 0.0:
        mu = (b / 2.0) ** (1.0 + alpha) * _chebyshev_jacobi_moments(alpha, J - 1)
    else:
        mu = _smooth_modified_moments(alpha, a, b, J)
    V = np.cos(np.outer(np.arange(J), theta))
    w = np.linalg.solve(V, mu)
    nodes = 0.5 * (b - a) * x + 0.5 * (b + a)
    nodes[0], nodes[-1] = a, b  # exact interface ties; a = 0 is a valid node
    return SubintervalRule(nodes=nodes, weights=w, a=a, b=b, weighted=True)


def assemble_compound(config: SchemeConfig) -> CompoundRule:
    """Compound rule over (0, eta_K] per the configured quadrature kind.

    Gauss: J-point Gauss-Legendre on every panel.  CC: the weighted rule
    (weight lam**alpha) on panels starting at eta_{k-1} <= 1, the standard
    rule on panels entirely beyond 1.  Downstream evaluation must pair
    weight-absorbed nodes with the de-weighted kernel.
    """
    eta = config.eta.points
    nodes, weights, wmask, sub = [], [], [], []
    for k in range(1, len(eta)):
        a, b = float(eta[k - 1]), float(eta[k])
        if config.quad_kind is QuadKind.COMPOUND_GAUSS:
            rule = gauss_legendre(config.J, a, b)
        elif a > 1.0:
            rule = clenshaw_curtis(config.J, a, b)
        else:
            rule = weighted_cc(config.J, a, b, config.order)
        nodes.append(rule.nodes)
        weights.append(rule.weights)
        wmask.append(np.full(len(rule.nodes), rule.weighted))
        sub.append(np.full(len(rule.nodes), k, dtype=int))
    rule = CompoundRule(
        nodes=np.concatenate(nodes),
        weights=np.concatenate(weights),
        weighted_mask=np.concatenate(wmask),
        subinterval=np.concatenate(sub),
    )
    if np.any(np.diff(rule.nodes) < 0):
        raise ConfigError("compound nodes are not ordered")
    return rule


def dump_rule_csv(rule: CompoundRule, path_or_file) -> None:
    """Debug dump: columns k,j,lambda,weight,weighted_flag."""
    own = isinstance(path_or_file, (str, bytes))
    fh = open(path_or_file, "w") if own else path_or_file
    try:
        fh.write("k,j,lambda,weight,weighted_flag\n")
        j = 0
        prev_k = None
        for i in range(len(rule)):
            k = int(rule.subinterval[i])
            j = j + 1 if k == prev_k else 1
            prev_k = k
            fh.write(
                f"{k},{j},{rule.nodes[i]:.17g},{rule.weights[i]:.17g},"
                f"{int(rule.weighted_mask[i])}\n"
            )
    finally:
        if own:
            fh.close()
