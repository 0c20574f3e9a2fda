"""Riemann-Liouville, Caputo and Grünwald-Letnikov fractional derivatives.

Three routes are available:

* Laplace inversion (``gli``, ``mgi``, ``stehfest``) of the operational
  formula ``s^a F(s) - sum_k s^(a-k-1) f^(k)(0)``,
* the Grünwald-Letnikov sum (``gl_sum``), first order in the step ``h``,
* direct quadrature of the Caputo integral on a Legendre rule (``direct``).

Initial values ``f^(k)(0)`` default to zero, in which case all three
classes share the multiplier ``s^a F(s)``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Sequence, Union

import numpy as np

from . import expr, laplace, specfun
from .errors import DomainError, NonFiniteError, UnsupportedError
from .expr import Ast, BinOp, Num, Var
from .laplace import InversionConfig, TransformSpec
from .quadrature import QuadratureRule, RuleKind, make_rule

_INT_TOL = 1e-12

TimeFunction = Union[Ast, Callable[[float], float]]


@dataclass(frozen=True)
class FractionalOrder:
    alpha: float

    def __post_init__(self):
        a = float(self.alpha)
        if not (math.isfinite(a) and a > 0):
            raise DomainError(f"order must be positive and finite, got {self.alpha}")
        if abs(a - round(a)) <= _INT_TOL:
            a = float(round(a))
        object.__setattr__(self, "alpha", a)

    @property
    def is_integer(self) -> bool:
        return self.alpha == round(self.alpha)

    @property
    def n_ceil(self) -> int:
        return math.ceil(self.alpha)

    @property
    def frac(self) -> float:
        return self.alpha - math.floor(self.alpha)


class DerivativeClass(str, enum.Enum):
    RIEMANN_LIOUVILLE = "riemann_liouville"
    CAPUTO = "caputo"
    GRUNWALD_LETNIKOV = "grunwald_letnikov"

    @classmethod
    def parse(cls, name: str) -> "DerivativeClass":
        aliases = {"rl": cls.RIEMANN_LIOUVILLE, "gl": cls.GRUNWALD_LETNIKOV}
        if name in aliases:
            return aliases[name]
        try:
            return cls(name)
        except ValueError:
            raise DomainError(f"unknown derivative class {name!r}") from None


class FdMethod(str, enum.Enum):
    GLI = "gli"
    MGI = "mgi"
    STEHFEST = "stehfest"
    GL_SUM = "gl_sum"
    DIRECT = "direct"

    @property
    def is_inversion(self) -> bool:
        return self in (FdMethod.GLI, FdMethod.MGI, FdMethod.STEHFEST)


@dataclass(frozen=True)
class FunctionSpec:
    """A time-domain function, its transform (optional) and initial values.

    ``initial_values`` holds ``f(0), f'(0), ...``; missing entries are zero.
    Without ``F_expr`` the inversion routes fall back to the builtin pair
    table (linear combinations of its entries are recognized).
    """

    f_expr: Ast | None = None
    F_expr: Ast | None = None
    initial_values: tuple[float, ...] = ()
    c0: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "initial_values", tuple(float(v) for v in self.initial_values))

    @classmethod
    def from_text(
        cls,
        f: str | None = None,
        F: str | None = None,
        initial_values: Sequence[float] = (),
        c0: float = 0.0,
    ) -> "FunctionSpec":
        return cls(
            expr.parse(f, "t") if f is not None else None,
            expr.parse(F, "s") if F is not None else None,
            tuple(initial_values),
            c0,
        )

    def init(self, n: int) -> tuple[float, ...]:
        """First ``n`` initial values, zero-padded."""
        vals = self.initial_values[:n]
        return vals + (0.0,) * (n - len(vals))

    def transform(self) -> TransformSpec:
        if self.F_expr is not None:
            return TransformSpec(self.F_expr, self.c0)
        if self.f_expr is not None:
            F = laplace.forward_transform(self.f_expr)
            if F is not None:
                return F
        raise UnsupportedError(
            "inversion methods need a transform: pass one explicitly or use a "
            "function built from the pair table"
        )


@dataclass(frozen=True)
class FdParams:
    """Numerical knobs; ``None`` selects the per-method default."""

    n: int | None = None  # gli/mgi nodes (32), stehfest terms (14), legendre order (32)
    h: float = 1e-4
    c: float | None = None
    gamma_param: float | None = None


def _as_callable(f: TimeFunction) -> Callable:
    if callable(f):
        return f
    return lambda x: expr.eval_real(f, x)


def _sample(f: TimeFunction, points: np.ndarray) -> np.ndarray:
    fn = _as_callable(f)
    try:
        vals = np.asarray(fn(points), dtype=float)
    except (TypeError, ValueError):
        vals = None
    if vals is None or vals.shape != points.shape:
        # scalar-only callables, or constant expressions
        vals = np.array([float(fn(float(x))) for x in points])
    if not np.all(np.isfinite(vals)):
        raise NonFiniteError("non-finite sample of f")
    return vals


# -- operational formulas -------------------------------------------------------


def laplace_multiplier(
    cls: DerivativeClass,
    order: FractionalOrder,
    F: TransformSpec,
    init: Sequence[float] = (),
) -> TransformSpec:
    """Transform of the fractional derivative of the function with transform ``F``.

    Caputo: ``s^a F(s) - sum_{k<n} s^(a-k-1) f^(k)(0)``, the sum recorded as
    correction terms. Riemann-Liouville and Grünwald-Letnikov: ``s^a F(s)``;
    they would need fractional-order initial data, so nonzero ``init`` is
    rejected for them (see :func:`rl_from_caputo`).
    """
    cls = DerivativeClass.parse(cls)
    init = tuple(float(v) for v in init)
    nonzero = any(v != 0 for v in init)
    if nonzero and len(init) < order.n_ceil:
        raise DomainError(
            f"need {order.n_ceil} initial values for order {order.alpha}, got {len(init)}"
        )
    if nonzero and cls is not DerivativeClass.CAPUTO:
        raise UnsupportedError(
            f"{cls.value} operational formula needs fractional initial terms; "
            "use the Caputo transform with rl_from_caputo instead"
        )
    a = order.alpha
    body = BinOp("*", BinOp("^", Var("s"), Num(a)), F.expression)
    corrections = tuple((c, p + a) for c, p in F.corrections)
    if cls is DerivativeClass.CAPUTO:
        corrections += tuple(
            (init[k], a - k - 1.0) for k in range(order.n_ceil) if k < len(init) and init[k] != 0
        )
    c0 = F.c0
    if not order.is_integer or corrections:
        c0 = max(c0, 0.0)
    return TransformSpec(body, c0, corrections)


def rl_from_caputo(
    f: FunctionSpec, order: FractionalOrder, t: float, caputo_value: float
) -> float:
    """Riemann-Liouville value from the Caputo value and ``f^(k)(0)``."""
    vals = f.initial_values
    n = order.n_ceil
    if any(v != 0 for v in vals) and len(vals) < n:
        raise DomainError(f"need {n} initial values for order {order.alpha}, got {len(vals)}")
    a = order.alpha
    corr = math.fsum(v * t ** (k - a) * specfun.rgamma(k + 1.0 - a) for k, v in enumerate(f.init(n)))
    return caputo_value + corr


def _caputo_from_rl(f: FunctionSpec, order: FractionalOrder, t: float, rl_value: float) -> float:
    return rl_value - (rl_from_caputo(f, order, t, 0.0))


def closed_form_power(
    cls: DerivativeClass, order: FractionalOrder, p: float, t: float
) -> float:
    """Derivative of ``t^p`` in closed form: ``Gamma(p+1)/Gamma(p+1-a) t^(p-a)``.

    Caputo annihilates ``t^k`` for integers ``0 <= k < n``. The reciprocal
    gamma makes the result exactly zero when ``p + 1 - a`` is a pole.
    """
    cls = DerivativeClass.parse(cls)
    if not p > -1:
        raise DomainError(f"closed_form_power needs p > -1, got {p}")
    if not t > 0:
        raise DomainError(f"t must be positive, got {t}")
    n = order.n_ceil
    if cls is DerivativeClass.CAPUTO:
        is_int = abs(p - round(p)) <= _INT_TOL
        if is_int and 0 <= round(p) < n:
            return 0.0
        if p <= n - 1:
            raise DomainError(
                f"Caputo closed form needs p > {n - 1} or an integer below {n}, got {p}"
            )
    a = order.alpha
    return specfun.gamma(p + 1.0) * specfun.rgamma(p + 1.0 - a) * t ** (p - a)


# -- time-domain evaluations ------------------------------------------------------


def numeric_derivative(f: TimeFunction, k: int, t: float, h: float | None = None) -> float:
    """k-th derivative (k = 1 or 2) by finite differences plus one Richardson step.

    Central stencils, except for ``t < 2h`` where forward one-sided stencils
    keep every sample at ``>= t``. Default step: ``max(1e-5, 1e-7|t|)`` for
    k=1 and ``max(1e-3, 1e-5|t|)`` for k=2 (the second difference loses
    ``eps/h^2``, so it needs the larger step).
    """
    if k not in (1, 2):
        raise DomainError(f"numeric_derivative supports k = 1 or 2, got {k}")
    if h is None:
        h = max(1e-5, 1e-7 * abs(t)) if k == 1 else max(1e-3, 1e-5 * abs(t))
    if not h > 0:
        raise DomainError(f"step must be positive, got {h}")
    if t >= 2 * h:
        if k == 1:
            offsets, coefs, power = (-1, 1), (-0.5, 0.5), 1
        else:
            offsets, coefs, power = (-1, 0, 1), (1.0, -2.0, 1.0), 2
    else:
        if k == 1:
            offsets, coefs, power = (0, 1, 2), (-1.5, 2.0, -0.5), 1
        else:
            offsets, coefs, power = (0, 1, 2, 3), (2.0, -5.0, 4.0, -1.0), 2

    def stencil(step: float) -> float:
        vals = _sample(f, t + step * np.array(offsets, dtype=float))
        return float(np.dot(coefs, vals)) / step**power

    return (4.0 * stencil(h / 2) - stencil(h)) / 3.0


def fd_gl_sum(f: TimeFunction, order: FractionalOrder, t: float, h: float) -> float:
    """Grünwald-Letnikov sum ``h^-a sum_{j<=t/h} w_j f(t - j h)``."""
    if not (h > 0 and h <= t * (1 + 1e-12)):
        raise DomainError(f"need 0 < h <= t, got h={h}, t={t}")
    m = int(math.floor(t / h + 1e-9))
    tau = t - h * np.arange(m + 1, dtype=float)
    tau[tau < 0] = 0.0  # rounding at the far end of the grid
    samples = _sample(f, tau)
    w = specfun.gl_weights(order.alpha, m + 1)
    return float(np.dot(w[::-1], samples[::-1])) * h ** (-order.alpha)


def fd_caputo_direct(
    f: TimeFunction, order: FractionalOrder, t: float, rule: QuadratureRule
) -> float:
    """Caputo derivative by quadrature of its integral definition.

    With ``m = n - a`` and ``u = (t - tau)^m`` the weakly singular kernel
    disappears:

        D^a f(t) = 1/Gamma(m + 1) * int_0^{t^m} f^(n)(t - u^(1/m)) du

    which is mapped onto the Legendre rule. ``f^(n)`` comes from
    :func:`numeric_derivative`.
    """
    if order.is_integer:
        raise UnsupportedError("direct Caputo needs a non-integer order; use classical derivatives")
    n = order.n_ceil
    if n > 2:
        raise UnsupportedError(f"direct Caputo supports 0 < alpha < 2, got {order.alpha}")
    if rule.kind is not RuleKind.LEGENDRE or rule.order < 8:
        raise DomainError("direct Caputo needs a Legendre rule of order >= 8")
    if not t > 0:
        raise DomainError(f"t must be positive, got {t}")
    m = n - order.alpha
    upper = t**m
    u = 0.5 * upper * (rule.nodes + 1.0)
    tau = t - u ** (1.0 / m)
    tau[tau < 0] = 0.0
    derivs = np.array([numeric_derivative(f, n, float(x)) for x in tau])
    return 0.5 * upper * float(np.dot(rule.weights, derivs)) * specfun.rgamma(m + 1.0)


# -- dispatch --------------------------------------------------------------------------


def _inversion(
    f: FunctionSpec, order: FractionalOrder, cls: DerivativeClass, method: FdMethod, t: float, params: FdParams
) -> tuple[float, float]:
    F = f.transform()
    if method is FdMethod.STEHFEST:
        config = InversionConfig("stehfest", params.n or 14)
    else:
        gamma_param = order.frac if params.gamma_param is None else params.gamma_param
        config = InversionConfig(method.value, params.n or 32, params.c, gamma_param)
    init = f.init(order.n_ceil)
    has_init = any(v != 0 for v in init)
    if cls is DerivativeClass.CAPUTO or not has_init:
        G = laplace_multiplier(cls, order, F, init if cls is DerivativeClass.CAPUTO else ())
        return laplace.invert_with_error(G, t, config)
    G = laplace_multiplier(DerivativeClass.CAPUTO, order, F, init)
    value, err = laplace.invert_with_error(G, t, config)
    return rl_from_caputo(f, order, t, value), err


def fd_compute(
    f: FunctionSpec,
    order: FractionalOrder,
    cls: DerivativeClass,
    method: FdMethod | str,
    t: float,
    params: FdParams = FdParams(),
) -> tuple[float, float]:
    """Fractional derivative of ``f`` at ``t`` with an error estimate.

    The estimate is the rule-doubling difference for the quadrature routes,
    the ``N-2`` vs ``N`` difference for Stehfest, and the step-halving
    difference for the Grünwald-Letnikov sum.
    """
    cls = DerivativeClass.parse(cls)
    method = FdMethod(method)
    if not (math.isfinite(t) and t > 0):
        raise DomainError(f"t must be positive, got {t}")
    if method.is_inversion:
        return _inversion(f, order, cls, method, t, params)
    if f.f_expr is None:
        raise UnsupportedError(f"method {method.value} needs a time-domain expression")
    if method is FdMethod.GL_SUM:
        value = fd_gl_sum(f.f_expr, order, t, params.h)
        err = abs(fd_gl_sum(f.f_expr, order, t, params.h / 2) - value)
        if cls is DerivativeClass.CAPUTO:
            value = _caputo_from_rl(f, order, t, value)
        return value, err
    n = params.n or 32
    value = fd_caputo_direct(f.f_expr, order, t, make_rule(RuleKind.LEGENDRE, n))
    err = abs(fd_caputo_direct(f.f_expr, order, t, make_rule(RuleKind.LEGENDRE, 2 * n)) - value)
    if cls is not DerivativeClass.CAPUTO:
        value = rl_from_caputo(f, order, t, value)
    return value, err
