"""Fractional derivatives through Gauss-Laguerre and modified Gauss inversion
of Laplace transforms, with time-domain cross-checks."""

from .errors import (
    BreakdownError,
    ContourError,
    ConvergenceError,
    DomainError,
    FracGaussError,
    NumericalError,
    UnsupportedError,
)
from .expr import ParseError, eval_complex, eval_real, parse
from .fracderiv import (
    DerivativeClass,
    FdMethod,
    FdParams,
    FractionalOrder,
    FunctionSpec,
    closed_form_power,
    fd_caputo_direct,
    fd_compute,
    fd_gl_sum,
    laplace_multiplier,
    numeric_derivative,
    rl_from_caputo,
)
from .laplace import InversionConfig, TransformSpec, builtin_pairs, invert, stehfest_coefficients
from .quadrature import (
    QuadratureRule,
    RecurrenceCoefficients,
    RuleKind,
    estimate_error,
    exactness_degree,
    golub_welsch,
    integrate,
    make_rule,
    moments_to_recurrence,
    recurrence_coefficients,
)
from .specfun import gamma, gl_weights, mittag_leffler

__version__ = "0.1.0"
