"""Gaussian rules from three-term recurrence coefficients.

The orthogonal family behind each rule obeys the difference equation

    p_{j+1}(u) = (u - a_j) p_j(u) - b_j p_{j-1}(u)

Nodes are the eigenvalues of the symmetric tridiagonal Jacobi matrix with
diagonal ``a_j`` and off-diagonal ``sqrt(b_j)``; weights are ``mu0`` times the
squared first component of the normalized eigenvectors.

Rule kinds:

* ``laguerre`` -- weight ``exp(-u)`` on (0, inf) (the ``gamma_param`` is kept
  so that ``u^g exp(-u)`` rules can also be requested under this name),
* ``mgi`` -- the modified rule, weight ``u^g exp(-u)`` on (0, inf),
* ``legendre`` -- weight 1 on (-1, 1).
"""

from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import specfun
from .errors import BreakdownError, ConvergenceError, DomainError, NonFiniteError, NumericalError


class RuleKind(str, enum.Enum):
    LAGUERRE = "laguerre"
    MGI = "mgi"
    LEGENDRE = "legendre"


def _as_kind(kind: RuleKind | str) -> RuleKind:
    try:
        return RuleKind(kind)
    except ValueError:
        raise DomainError(f"unknown rule kind {kind!r}") from None


def _frozen(values: Sequence[float]) -> np.ndarray:
    arr = np.array(values, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class RecurrenceCoefficients:
    """Coefficients ``a_0..a_{n-1}``, ``b_1..b_{n-1}`` and the zeroth moment."""

    alpha_seq: np.ndarray
    beta_seq: np.ndarray
    mu0: float

    def __post_init__(self):
        a = _frozen(self.alpha_seq)
        b = _frozen(self.beta_seq)
        object.__setattr__(self, "alpha_seq", a)
        object.__setattr__(self, "beta_seq", b)
        if len(a) < 1 or len(b) != len(a) - 1:
            raise DomainError(
                f"inconsistent recurrence lengths: {len(a)} alphas, {len(b)} betas"
            )
        if not self.mu0 > 0:
            raise DomainError(f"mu0 must be positive, got {self.mu0}")
        if np.any(b <= 0):
            raise DomainError("beta coefficients must be strictly positive")

    @property
    def n(self) -> int:
        return len(self.alpha_seq)


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    kind: RuleKind
    order: int
    gamma_param: float
    nodes: np.ndarray
    weights: np.ndarray
    # log of the weights, accurate even where the weights themselves underflow
    log_weights: np.ndarray | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", _as_kind(self.kind))
        object.__setattr__(self, "nodes", _frozen(self.nodes))
        object.__setattr__(self, "weights", _frozen(self.weights))
        if self.log_weights is None:
            with np.errstate(divide="ignore"):
                object.__setattr__(self, "log_weights", _frozen(np.log(self.weights)))
        else:
            object.__setattr__(self, "log_weights", _frozen(self.log_weights))

    @property
    def mu0(self) -> float:
        if self.kind is RuleKind.LEGENDRE:
            return 2.0
        return specfun.gamma(self.gamma_param + 1.0)

    @property
    def support(self) -> tuple[float, float]:
        if self.kind is RuleKind.LEGENDRE:
            return (-1.0, 1.0)
        return (0.0, math.inf)


def _check_gamma(kind: RuleKind, gamma_param: float) -> float:
    if kind is RuleKind.LEGENDRE:
        return 0.0
    gamma_param = float(gamma_param)
    if not (math.isfinite(gamma_param) and gamma_param > -1.0):
        raise DomainError(f"gamma_param must be > -1, got {gamma_param}")
    return gamma_param


def recurrence_coefficients(
    kind: RuleKind | str, n: int, gamma_param: float = 0.0
) -> RecurrenceCoefficients:
    """Closed-form recurrence coefficients of the orthogonal family."""
    kind = _as_kind(kind)
    if n < 1:
        raise DomainError(f"order must be >= 1, got {n}")
    gamma_param = _check_gamma(kind, gamma_param)
    j = np.arange(n, dtype=float)
    jb = j[1:]
    if kind is RuleKind.LEGENDRE:
        return RecurrenceCoefficients(np.zeros(n), jb**2 / (4.0 * jb**2 - 1.0), 2.0)
    return RecurrenceCoefficients(
        2.0 * j + gamma_param + 1.0,
        jb * (jb + gamma_param),
        specfun.gamma(gamma_param + 1.0),
    )


def laguerre_moments(gamma_param: float, count: int) -> np.ndarray:
    """Moments ``Gamma(g + j + 1)``, j < count, of the weight ``u^g exp(-u)``.

    Built by the product recurrence from ``Gamma(g + 1)`` so that each moment
    carries only a few roundings; the moment map is ill-conditioned.
    """
    gamma_param = _check_gamma(RuleKind.MGI, gamma_param)
    out = np.empty(count)
    acc = specfun.gamma(gamma_param + 1.0)
    for j in range(count):
        out[j] = acc
        acc *= gamma_param + j + 1.0
    return out


def moments_to_recurrence(moments: Sequence[float]) -> RecurrenceCoefficients:
    """Recurrence coefficients from ``2n`` ordinary moments (Chebyshev algorithm).

    Exact in exact arithmetic, but the map from moments to coefficients is
    badly conditioned: in double precision expect trouble beyond n ~ 12.
    Raises :class:`BreakdownError` when an intermediate beta is not positive.
    """
    mom = np.asarray(moments, dtype=float)
    if mom.ndim != 1 or len(mom) < 2 or len(mom) % 2:
        raise DomainError(f"need an even number (>= 2) of moments, got {len(mom)}")
    if not np.all(np.isfinite(mom)):
        raise DomainError("moments must be finite")
    n = len(mom) // 2
    if not mom[0] > 0:
        raise BreakdownError(f"zeroth moment must be positive, got {mom[0]}")
    alpha = np.zeros(n)
    beta = np.zeros(n)
    alpha[0] = mom[1] / mom[0]
    beta[0] = mom[0]
    sig_prev = np.zeros(2 * n)
    sig = mom.copy()
    for k in range(1, n):
        sig_new = np.zeros(2 * n)
        for l in range(k, 2 * n - k):
            sig_new[l] = sig[l + 1] - alpha[k - 1] * sig[l] - beta[k - 1] * sig_prev[l]
        if not sig_new[k] > 0:
            raise BreakdownError(
                f"non-positive beta at k={k}: moments are not positive definite "
                "or are numerically degenerate"
            )
        alpha[k] = sig_new[k + 1] / sig_new[k] - sig[k] / sig[k - 1]
        beta[k] = sig_new[k] / sig[k - 1]
        sig_prev, sig = sig, sig_new
    return RecurrenceCoefficients(alpha, beta[1:], float(mom[0]))


def tridiagonal_eigenvalues(
    diag: Sequence[float],
    offdiag: Sequence[float],
    tol: float = 1e-14,
    max_sweeps: int = 50,
) -> np.ndarray:
    """Eigenvalues of a symmetric tridiagonal matrix, ascending.

    Implicit QL with Wilkinson shifts. An off-diagonal entry is treated as
    zero once it is below ``tol`` times the sum of its neighbouring diagonal
    magnitudes. Raises :class:`ConvergenceError` (with ``index``) when an
    eigenvalue needs more than ``max_sweeps`` QL sweeps.
    """
    d = [float(x) for x in diag]
    n = len(d)
    e = [float(x) for x in offdiag] + [0.0]
    if len(e) != n:
        raise DomainError("offdiag must have exactly len(diag) - 1 entries")
    for l in range(n):
        sweeps = 0
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= tol * dd:
                    break
                m += 1
            if m == l:
                break
            if sweeps >= max_sweeps:
                raise ConvergenceError(
                    f"eigenvalue {l} did not converge in {max_sweeps} sweeps", index=l
                )
            sweeps += 1
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + math.copysign(r, g))
            s = c = 1.0
            p = 0.0
            underflow = False
            for i in range(m - 1, l - 1, -1):
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    underflow = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
            if underflow:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    return np.sort(np.array(d))


def _log_first_component_sq(a: np.ndarray, sb: np.ndarray, x: float) -> float:
    # The eigenvector of the Jacobi matrix at eigenvalue x has components
    # proportional to the orthonormal polynomials at x; build them with the
    # difference equation and normalize. Rescaled to stay in range, so the
    # result is returned as a logarithm.
    v_prev, v = 0.0, 1.0
    total = 1.0
    log_scale = 0.0
    for j in range(len(a) - 1):
        v_next = ((x - a[j]) * v - (sb[j - 1] * v_prev if j > 0 else 0.0)) / sb[j]
        v_prev, v = v, v_next
        total += v * v
        if total > 1e200:
            v_prev *= 1e-100
            v *= 1e-100
            total *= 1e-200
            log_scale += 200.0 * math.log(10.0)
    return -(math.log(total) + log_scale)


def golub_welsch(coeffs: RecurrenceCoefficients, order: int | None = None) -> QuadratureRule:
    """Nodes and weights of the ``order``-point Gaussian rule for ``coeffs``.

    The returned rule has ``kind`` LEGENDRE when the coefficients are
    symmetric (all ``a_j`` zero) and MGI otherwise; use :func:`make_rule` to
    get a rule tagged with the requested kind.
    """
    order = coeffs.n if order is None else int(order)
    if order < 1 or order > coeffs.n:
        raise DomainError(f"order {order} not available from {coeffs.n} coefficients")
    a = coeffs.alpha_seq[:order]
    b = coeffs.beta_seq[: order - 1]
    sb = np.sqrt(b)
    nodes = tridiagonal_eigenvalues(a, sb)
    log_weights = math.log(coeffs.mu0) + np.array(
        [_log_first_component_sq(a, sb, x) for x in nodes]
    )
    weights = np.exp(log_weights)
    if order > 1:
        span = nodes[-1] - nodes[0]
        if np.min(np.diff(nodes)) <= 1e-12 * span:
            raise NumericalError("coincident quadrature nodes; recurrence betas not positive?")
    # for very high orders (n > ~180 on the Laguerre family) the smallest
    # weights underflow to zero; log_weights stays exact
    if not np.all(np.isfinite(log_weights)):
        raise NumericalError("non-positive quadrature weight")
    if np.all(a == 0):
        kind, gamma_param = RuleKind.LEGENDRE, 0.0
    else:
        kind, gamma_param = RuleKind.MGI, math.nan
    return QuadratureRule(kind, order, gamma_param, nodes, weights, log_weights)


@functools.lru_cache(maxsize=256)
def make_rule(kind: RuleKind | str, n: int, gamma_param: float = 0.0) -> QuadratureRule:
    """Build the ``n``-point rule of the given kind (cached; rules are immutable)."""
    kind = _as_kind(kind)
    gamma_param = _check_gamma(kind, gamma_param)
    gw = golub_welsch(recurrence_coefficients(kind, n, gamma_param), n)
    rule = QuadratureRule(kind, n, gamma_param, gw.nodes, gw.weights, gw.log_weights)
    lo, hi = rule.support
    if rule.nodes[0] <= lo or rule.nodes[-1] >= hi:
        raise NumericalError(f"{kind.value} nodes fall outside the support ({lo}, {hi})")
    return rule


def integrate(rule: QuadratureRule, g: Callable[[float], float]) -> float:
    """``sum_k w_k g(x_k)``: approximates the weighted integral of ``g``."""
    values = np.array([g(float(x)) for x in rule.nodes], dtype=float)
    if not np.all(np.isfinite(values)):
        bad = int(np.flatnonzero(~np.isfinite(values))[0])
        raise NonFiniteError(f"integrand not finite at node {rule.nodes[bad]!r}")
    return float(np.dot(rule.weights, values))


def exact_moment(rule: QuadratureRule, j: int) -> float:
    """Exact integral of ``u^j`` against the rule's weight function."""
    if rule.kind is RuleKind.LEGENDRE:
        return 0.0 if j % 2 else 2.0 / (j + 1)
    return specfun.gamma(rule.gamma_param + j + 1.0)


def _moment_scale(rule: QuadratureRule, j: int) -> float:
    # magnitude against which the error is measured; odd Legendre moments
    # vanish, so use the integral of |x|^j instead
    if rule.kind is RuleKind.LEGENDRE:
        return 2.0 / (j + 1)
    return exact_moment(rule, j)


def monomial_error(rule: QuadratureRule, j: int) -> float:
    """Relative quadrature error on ``u^j``."""
    if rule.kind is RuleKind.LEGENDRE:
        approx = float(np.dot(rule.weights, rule.nodes**j))
        return abs(approx - exact_moment(rule, j)) / _moment_scale(rule, j)
    # ratio to the exact moment in log space; moments overflow past j ~ 170
    log_exact = specfun.gamma(rule.gamma_param + j + 1.0, log=True)
    terms = np.exp(rule.log_weights + j * np.log(rule.nodes) - log_exact)
    return abs(math.fsum(terms) - 1.0)


def exactness_degree(rule: QuadratureRule, tol: float = 1e-8) -> int:
    """Largest d such that every monomial of degree <= d is integrated to ``tol``.

    For odd Legendre moments (exactly zero) the error is measured relative
    to the integral of ``|x|^j``. Returns -1 if even the constant fails.
    """
    if not tol > 0:
        raise DomainError(f"tol must be positive, got {tol}")
    cap = 4 * rule.order + 8
    j = 0
    while j <= cap and monomial_error(rule, j) <= tol:
        j += 1
    return j - 1


def estimate_error(
    rule_lo: QuadratureRule, rule_hi: QuadratureRule, g: Callable[[float], float]
) -> float:
    """``|I_hi - I_lo|``, the error estimate attached to the low-order result."""
    if rule_lo.kind is not rule_hi.kind or (
        rule_lo.kind is not RuleKind.LEGENDRE and rule_lo.gamma_param != rule_hi.gamma_param
    ):
        raise DomainError("estimate_error needs rules of the same kind and gamma_param")
    if not rule_hi.order > rule_lo.order:
        raise DomainError("rule_hi must have a higher order than rule_lo")
    return abs(integrate(rule_hi, g) - integrate(rule_lo, g))
