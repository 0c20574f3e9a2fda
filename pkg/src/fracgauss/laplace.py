"""Numerical inverse Laplace transform.

For real-valued ``f`` and a contour ``Re(s) = c`` right of every singularity,

    f(t) = (2 e^{ct} / pi) * int_0^inf Re[F(c + iy)] cos(ty) dy.

Substituting ``y = u / t`` and writing the integrand against the Laguerre
weight ``e^{-u}`` (or ``u^g e^{-u}`` for the modified rule) gives

    f(t) ~ (2 e^{ct} / (pi t)) * sum_k w_k e^{x_k} x_k^{-g} Re[F(c + i x_k / t)] cos(x_k)

which is what :func:`invert` evaluates for the ``gli`` and ``mgi`` methods.
The Gaver-Stehfest method works on the real axis and serves as the tight
reference.
"""

from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import expr, specfun
from .errors import ContourError, DomainError, NonFiniteError
from .expr import Ast, BinOp, Call, Neg, Num, Var
from .quadrature import QuadratureRule, RuleKind, make_rule

STEHFEST_MAX = 18


class Method(str, enum.Enum):
    GLI = "gli"
    MGI = "mgi"
    STEHFEST = "stehfest"


@dataclass(frozen=True)
class TransformSpec:
    """An s-domain transform ``expression(s) - sum(coef * s^power)``.

    ``c0`` bounds the singularities: all satisfy ``Re(s) < c0``. The
    correction terms are kept separately so callers can see them, but they
    are subtracted from the expression before any quadrature or summation.
    """

    expression: Ast
    c0: float = 0.0
    corrections: tuple[tuple[float, float], ...] = ()

    def __post_init__(self):
        corr = tuple((float(c), float(p)) for c, p in self.corrections)
        for c, p in corr:
            if not (math.isfinite(c) and math.isfinite(p)):
                raise DomainError(f"correction term {c}*s^{p} is not finite")
        object.__setattr__(self, "corrections", corr)

    @classmethod
    def from_text(cls, text: str, c0: float = 0.0) -> "TransformSpec":
        return cls(expr.parse(text, "s"), c0)

    def evaluate(self, s, complex_mode: bool = True):
        """Transform value at ``s`` (scalar or array)."""
        ev = expr.eval_complex if complex_mode else expr.eval_real
        val = ev(self.expression, s)
        for coef, power in self.corrections:
            if complex_mode:
                val = val - coef * np.power(np.asarray(s, dtype=complex), power)
            else:
                val = val - coef * np.power(np.asarray(s, dtype=float), power)
        if np.ndim(val) == 0:
            return complex(val) if complex_mode else float(val)
        return val

    def text(self) -> str:
        out = expr.unparse(self.expression)
        for coef, power in self.corrections:
            out += f" - {coef!r}*s^{power!r}"
        return out


@dataclass(frozen=True)
class InversionConfig:
    """Inversion settings.

    ``n`` is the node count for gli/mgi and the (even) term count for
    stehfest. ``c=None`` means ``c0 + 1``. ``gamma_param`` is the exponent of
    the modified weight and is only used by mgi.
    """

    method: Method = Method.GLI
    n: int = 32
    c: float | None = None
    gamma_param: float = 0.5

    def __post_init__(self):
        try:
            object.__setattr__(self, "method", Method(self.method))
        except ValueError:
            raise DomainError(f"unknown inversion method {self.method!r}") from None
        if self.n < 1:
            raise DomainError(f"n must be >= 1, got {self.n}")
        if self.method is Method.STEHFEST:
            _check_stehfest_n(self.n)

    def abscissa(self, F: TransformSpec) -> float:
        return F.c0 + 1.0 if self.c is None else float(self.c)


def _check_stehfest_n(N: int) -> None:
    if N % 2 or not 2 <= N <= STEHFEST_MAX:
        raise DomainError(f"Stehfest N must be even and in [2, {STEHFEST_MAX}], got {N}")


@functools.lru_cache(maxsize=None)
def _stehfest_exact(N: int) -> tuple[Fraction, ...]:
    half = N // 2
    f = math.factorial
    out = []
    for k in range(1, N + 1):
        acc = Fraction(0)
        for j in range((k + 1) // 2, min(k, half) + 1):
            acc += Fraction(
                j**half * f(2 * j),
                f(half - j) * f(j) * f(j - 1) * f(k - j) * f(2 * j - k),
            )
        out.append(acc if (k + half) % 2 == 0 else -acc)
    return tuple(out)


def stehfest_coefficients(N: int) -> np.ndarray:
    """Gaver-Stehfest weights ``V_1..V_N`` (exact rationals rounded once)."""
    _check_stehfest_n(N)
    return np.array([float(v) for v in _stehfest_exact(N)])


def _check_t(t: float) -> float:
    t = float(t)
    if not (math.isfinite(t) and t > 0):
        raise DomainError(f"t must be positive and finite, got {t}")
    return t


def _finite(values, what: str):
    if not np.all(np.isfinite(values)):
        raise NonFiniteError(f"non-finite transform value during {what}")
    return values


def _stehfest(F: TransformSpec, t: float, N: int) -> float:
    ln2t = math.log(2.0) / t
    s = ln2t * np.arange(1, N + 1)
    vals = _finite(np.asarray(F.evaluate(s, complex_mode=False), dtype=float), "Stehfest")
    return ln2t * float(np.dot(stehfest_coefficients(N), vals))


def _bromwich(F: TransformSpec, t: float, c: float, rule: QuadratureRule) -> float:
    x = rule.nodes
    # w_k e^{x_k} formed in log space: tiny weights times huge exponentials
    log_w = rule.log_weights + x
    if rule.kind is RuleKind.MGI and rule.gamma_param != 0.0:
        log_w = log_w - rule.gamma_param * np.log(x)
    vals = F.evaluate(c + 1j * x / t)
    g = _finite(np.real(vals) * np.cos(x), "Bromwich quadrature")
    return 2.0 * math.exp(c * t) / (math.pi * t) * float(np.dot(np.exp(log_w), g))


def _rule_for(config: InversionConfig, n: int) -> QuadratureRule:
    if config.method is Method.GLI:
        return make_rule(RuleKind.LAGUERRE, n, 0.0)
    return make_rule(RuleKind.MGI, n, float(config.gamma_param))


def invert(F: TransformSpec, t: float, config: InversionConfig = InversionConfig()) -> float:
    """Approximate ``f(t)`` from its transform ``F``."""
    t = _check_t(t)
    if config.method is Method.STEHFEST:
        return _stehfest(F, t, config.n)
    c = config.abscissa(F)
    if not c > F.c0:
        raise ContourError(f"contour abscissa c={c} must exceed c0={F.c0}")
    return _bromwich(F, t, c, _rule_for(config, config.n))


def invert_with_error(
    F: TransformSpec, t: float, config: InversionConfig = InversionConfig()
) -> tuple[float, float]:
    """``invert`` plus an error estimate.

    For gli/mgi the estimate is the change when the node count is doubled;
    for stehfest it is the change from ``N - 2`` to ``N`` terms (zero for N=2).
    """
    value = invert(F, t, config)
    if config.method is Method.STEHFEST:
        if config.n == 2:
            return value, 0.0
        return value, abs(value - _stehfest(F, float(t), config.n - 2))
    hi = _bromwich(F, float(t), config.abscissa(F), _rule_for(config, 2 * config.n))
    return value, abs(hi - value)


# -- transform algebra and the pair table -------------------------------------


def _fold(node: Ast) -> Ast:
    if not expr.contains_var(node) and not isinstance(node, Num):
        return Num(float(expr.eval_real(node, 0.0)))
    return node


def scale(F: TransformSpec, k: float) -> TransformSpec:
    if k == 1.0:
        return F
    return TransformSpec(
        BinOp("*", Num(float(k)), F.expression) if k >= 0 else Neg(BinOp("*", Num(-float(k)), F.expression)),
        F.c0,
        tuple((k * c, p) for c, p in F.corrections),
    )


def add(F: TransformSpec, G: TransformSpec) -> TransformSpec:
    return TransformSpec(
        BinOp("+", F.expression, G.expression),
        max(F.c0, G.c0),
        F.corrections + G.corrections,
    )


def linear_combination(terms: Sequence[tuple[float, TransformSpec]]) -> TransformSpec:
    out = None
    for k, F in terms:
        part = scale(F, k)
        out = part if out is None else add(out, part)
    if out is None:
        raise DomainError("empty linear combination")
    return out


def rescale(F: TransformSpec, a: float) -> TransformSpec:
    """Transform of ``f(a t)``, i.e. ``F(s / a) / a`` for ``a > 0``."""
    if not a > 0:
        raise DomainError(f"rescale factor must be positive, got {a}")
    node = expr.substitute(F.expression, BinOp("/", Var("s"), Num(float(a))))
    # corrections c (s/a)^p / a = (c a^{-p-1}) s^p
    corr = tuple((c * a ** (-p - 1.0), p) for c, p in F.corrections)
    return TransformSpec(BinOp("/", node, Num(float(a))), F.c0 * a, corr)


@dataclass(frozen=True)
class TransformPair:
    name: str
    f: Ast
    F: TransformSpec
    params: dict = field(default_factory=dict, compare=False)

    def f_text(self) -> str:
        return expr.unparse(self.f)


def _pair(name: str, f_text: str, F_text: str, c0: float, **params) -> TransformPair:
    return TransformPair(name, expr.parse(f_text, "t"), TransformSpec.from_text(F_text, c0), params)


def make_pair(name: str, **params: float) -> TransformPair:
    """One table entry, optionally with non-default parameters.

    ========  ===============  ======================  ======
    name      f(t)             F(s)                    c0
    ========  ===============  ======================  ======
    one       1                1/s                     0
    t         t                1/s^2                   0
    power     t^p (p > -1)     Gamma(p+1)/s^(p+1)      0
    exp       e^(-a t)         1/(s+a)                 -a
    sin       sin(w t)         w/(s^2+w^2)             0
    cos       cos(w t)         s/(s^2+w^2)             0
    ========  ===============  ======================  ======
    """
    if name == "one":
        return _pair("one", "1", "1/s", 0.0)
    if name == "t":
        return _pair("t", "t", "1/s^2", 0.0)
    if name == "power":
        p = float(params.get("p", 0.5))
        if not p > -1:
            raise DomainError(f"power pair needs p > -1, got {p}")
        # the constant gamma is folded so the transform is complex-evaluable
        g = specfun.gamma(p + 1.0)
        return _pair("power", f"t^({p!r})", f"{g!r}/s^({p + 1.0!r})", 0.0, p=p)
    if name == "exp":
        a = float(params.get("a", 1.0))
        return _pair("exp", f"exp(-({a!r})*t)", f"1/(s+({a!r}))", -a, a=a)
    if name in ("sin", "cos"):
        w = float(params.get("w", 1.0))
        num = f"({w!r})" if name == "sin" else "s"
        return _pair(name, f"{name}(({w!r})*t)", f"{num}/(s^2+({w!r})^2)", 0.0, w=w)
    raise DomainError(f"unknown transform pair {name!r}")


PAIR_NAMES = ("one", "t", "power", "exp", "sin", "cos")


def builtin_pairs() -> dict[str, TransformPair]:
    """The pair table with default parameters (p=0.5, a=1, w=1)."""
    return {name: make_pair(name) for name in PAIR_NAMES}


def _linear_coef(node: Ast) -> float | None:
    # k if node is k*t (k constant), else None
    if isinstance(node, Var):
        return 1.0
    if isinstance(node, Neg):
        k = _linear_coef(node.operand)
        return None if k is None else -k
    if isinstance(node, BinOp) and node.op in ("*", "/"):
        left_const = not expr.contains_var(node.left)
        right_const = not expr.contains_var(node.right)
        if node.op == "*" and left_const and not right_const:
            k = _linear_coef(node.right)
            return None if k is None else float(expr.eval_real(node.left, 0.0)) * k
        if right_const and not left_const:
            k = _linear_coef(node.left)
            c = float(expr.eval_real(node.right, 0.0))
            if k is None or (node.op == "/" and c == 0):
                return None
            return k * c if node.op == "*" else k / c
    return None


def forward_transform(f: Ast) -> TransformSpec | None:
    """Transform of ``f`` when it is a linear combination of table entries.

    Returns None for anything outside the table (no general symbolic
    transform is attempted).
    """
    f = _fold(f)
    if isinstance(f, Num):
        return scale(make_pair("one").F, f.value)
    if isinstance(f, Var):
        return make_pair("t").F
    if isinstance(f, Neg):
        inner = forward_transform(f.operand)
        return None if inner is None else scale(inner, -1.0)
    if isinstance(f, BinOp):
        if f.op in ("+", "-"):
            a, b = forward_transform(f.left), forward_transform(f.right)
            if a is None or b is None:
                return None
            return add(a, b if f.op == "+" else scale(b, -1.0))
        if f.op == "^" and isinstance(f.left, Var) and not expr.contains_var(f.right):
            p = float(expr.eval_real(f.right, 0.0))
            if p == 0:
                return make_pair("one").F
            if p == 1:
                return make_pair("t").F
            return make_pair("power", p=p).F if p > -1 else None
        if f.op in ("*", "/"):
            left_const = not expr.contains_var(f.left)
            right_const = not expr.contains_var(f.right)
            if f.op == "*" and left_const:
                inner = forward_transform(f.right)
                return None if inner is None else scale(inner, float(expr.eval_real(f.left, 0.0)))
            if right_const:
                c = float(expr.eval_real(f.right, 0.0))
                inner = forward_transform(f.left)
                if inner is None or (f.op == "/" and c == 0):
                    return None
                return scale(inner, c if f.op == "*" else 1.0 / c)
        return None
    if isinstance(f, Call):
        k = _linear_coef(f.arg)
        if k is None:
            return None
        if f.func == "exp":
            return make_pair("exp", a=-k).F
        if f.func in ("sin", "cos"):
            if f.func == "sin" and k < 0:
                return scale(make_pair("sin", w=-k).F, -1.0)
            return make_pair(f.func, w=abs(k)).F
    return None
