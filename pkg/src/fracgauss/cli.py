"""Command-line front end.

Exit codes: 0 success, 2 bad arguments or expressions, 3 numerical failure.
Nothing is written to stdout unless every row was computed.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import io
import json
import math
import sys
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import expr, laplace
from .errors import ContourError, DomainError, NumericalError, UnsupportedError
from .expr import ParseError
from .fracderiv import (
    DerivativeClass,
    FdMethod,
    FdParams,
    FractionalOrder,
    FunctionSpec,
    closed_form_power,
    fd_compute,
)
from .laplace import InversionConfig, TransformSpec
from .quadrature import make_rule

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERIC = 3

GRAMMAR_HELP = """\
expression grammar (variable t for --f, s for --transform):
  expr    := term (('+'|'-') term)*
  term    := factor (('*'|'/') factor)*
  factor  := '-' factor | power
  power   := primary ('^' factor)?          (right-associative)
  primary := number | var | pi | e | func '(' expr ')' | '(' expr ')'
  func    := exp | ln | sqrt | sin | cos | gamma | abs
unary minus binds looser than '^' (-t^2 == -(t^2)); numbers are decimal or
scientific; no implicit multiplication.

--t LIST accepts comma-separated values and a:b:step ranges, e.g. 0.5,1:3:0.5
"""

_CLASS_NAMES = {"rl": DerivativeClass.RIEMANN_LIOUVILLE, "caputo": DerivativeClass.CAPUTO,
                "gl": DerivativeClass.GRUNWALD_LETNIKOV}
_METHOD_NAMES = {"gli": FdMethod.GLI, "mgi": FdMethod.MGI, "stehfest": FdMethod.STEHFEST,
                 "glsum": FdMethod.GL_SUM, "direct": FdMethod.DIRECT}
_CLASS_LABEL = {v: k for k, v in _CLASS_NAMES.items()}
_METHOD_LABEL = {v: k for k, v in _METHOD_NAMES.items()}


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class OutputRow:
    t: float
    value: float
    est_error: float | None = None
    method: str = ""
    cls: str | None = None
    deviation: float | None = None

    def as_dict(self) -> dict:
        out = {"t": self.t, "value": self.value}
        if self.est_error is not None:
            out["est_error"] = self.est_error
        out["method"] = self.method
        if self.cls is not None:
            out["class"] = self.cls
        if self.deviation is not None:
            out["deviation"] = self.deviation
        return out


def format_number(x: float) -> str:
    """Fixed point with 9 decimals; scientific (10 significant digits) outside [1e-3, 1e10)."""
    if x == 0 or 1e-3 <= abs(x) < 1e10:
        return f"{x:.9f}"
    return f"{x:.9e}"


def _format_records(records: Sequence[dict], fmt: str) -> str:
    if not records:
        raise ValueError("no rows to format")
    if fmt == "json":
        return json.dumps(list(records), allow_nan=False) + "\n"
    keys = list(records[0])
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(keys)
    for rec in records:
        writer.writerow(
            format_number(v) if isinstance(v, float) else v for v in (rec[k] for k in keys)
        )
    return buf.getvalue()


def format_output(rows: Sequence[OutputRow], fmt: str = "csv") -> str:
    """Render rows as CSV (header ``t,value,est_error,method[,class]``) or JSON."""
    if not rows:
        raise ValueError("format_output needs at least one row")
    return _format_records([r.as_dict() for r in rows], fmt)


# -- argument helpers --------------------------------------------------------------


def parse_t_list(text: str) -> list[float]:
    out = []
    for item in text.split(","):
        item = item.strip()
        if not item:
            raise UsageError("--t: empty entry")
        if ":" in item:
            parts = item.split(":")
            if len(parts) != 3:
                raise UsageError(f"--t: range must be a:b:step, got {item!r}")
            try:
                a, b, step = (float(p) for p in parts)
            except ValueError:
                raise UsageError(f"--t: bad number in {item!r}") from None
            if not step > 0 or b < a:
                raise UsageError(f"--t: range {item!r} needs step > 0 and b >= a")
            count = int(math.floor((b - a) / step + 1e-9)) + 1
            out.extend(a + i * step for i in range(count))
        else:
            try:
                out.append(float(item))
            except ValueError:
                raise UsageError(f"--t: not a number: {item!r}") from None
    for t in out:
        if not (math.isfinite(t) and t > 0):
            raise UsageError(f"--t: values must be positive, got {t:g}")
    return out


def parse_float_list(text: str, flag: str) -> list[float]:
    try:
        vals = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"{flag}: expected comma-separated numbers, got {text!r}") from None
    if not all(math.isfinite(v) for v in vals):
        raise UsageError(f"{flag}: values must be finite")
    return vals


def _parse_expr(text: str, var: str, flag: str):
    try:
        return expr.parse(text, var)
    except ParseError as exc:
        caret = " " * len(text.encode("utf-8")[: exc.position].decode("utf-8", "ignore")) + "^"
        raise UsageError(f"{flag}: {exc}\n  {text}\n  {caret}") from None


def _named_param(text: str, flag: str) -> tuple[str, float | None]:
    name, _, val = text.partition(":")
    if not val:
        return name, None
    try:
        return name, float(val)
    except ValueError:
        raise UsageError(f"{flag}: bad parameter in {text!r}") from None


def _pair_from_arg(text: str) -> laplace.TransformPair:
    name, val = _named_param(text, "--pair")
    if name not in laplace.PAIR_NAMES:
        raise UsageError(f"--pair: unknown pair {name!r}; choose from {', '.join(laplace.PAIR_NAMES)}")
    key = {"power": "p", "exp": "a", "sin": "w", "cos": "w"}.get(name)
    if val is not None and key is None:
        raise UsageError(f"--pair: {name!r} takes no parameter")
    try:
        return laplace.make_pair(name, **({key: val} if val is not None else {}))
    except DomainError as exc:
        raise UsageError(f"--pair: {exc}") from None


def _positive(name: str, value, integer: bool = False):
    if value is None:
        return None
    if not (math.isfinite(value) and value > 0):
        raise UsageError(f"{name}: must be positive, got {value:g}")
    if integer and value != int(value):
        raise UsageError(f"{name}: must be an integer, got {value:g}")
    return value


# -- subcommands ---------------------------------------------------------------------


def _cmd_rule(args) -> tuple[list[dict], list[str]]:
    _positive("--n", args.n, integer=True)
    if args.kind != "legendre" and not args.gamma > -1:
        raise UsageError(f"--gamma: must be > -1, got {args.gamma:g}")
    pre = [f"kind={args.kind} n={args.n} gamma={args.gamma:g}"]
    rule = make_rule(args.kind, args.n, args.gamma)
    rows = [{"index": i, "node": float(x), "weight": float(w)}
            for i, (x, w) in enumerate(zip(rule.nodes, rule.weights))]
    return rows, pre


def _check_method_n(method: str, n: int | None) -> None:
    _positive("--n", n, integer=True)
    if method == "stehfest" and n is not None and (n % 2 or not 2 <= n <= laplace.STEHFEST_MAX):
        raise UsageError(f"--n: Stehfest needs an even N in [2, {laplace.STEHFEST_MAX}], got {n}")


def _cmd_invlap(args) -> tuple[list[dict], list[str]]:
    ts = parse_t_list(args.t)
    _check_method_n(args.method, args.n)
    if (args.transform is None) == (args.pair is None):
        raise UsageError("invlap: give exactly one of --transform or --pair")
    if args.transform is not None:
        F = TransformSpec(_parse_expr(args.transform, "s", "--transform"), args.c0)
    else:
        F = _pair_from_arg(args.pair).F
    n = args.n or (14 if args.method == "stehfest" else 32)
    config = InversionConfig(args.method, n, args.c, args.gamma)
    if args.method == "stehfest":
        pre = [f"method=stehfest N={n}"]
    else:
        if not config.abscissa(F) > F.c0:
            raise ContourError(f"contour abscissa c={config.abscissa(F):g} must exceed c0={F.c0:g}")
        pre = [f"method={args.method} n={n} c={config.abscissa(F):g} c0={F.c0:g}"]
        if args.method == "mgi":
            pre[0] += f" gamma={args.gamma:g}"
    rows = []
    for t in ts:
        value, err = laplace.invert_with_error(F, t, config)
        rows.append(OutputRow(t, value, err, args.method).as_dict())
    return rows, pre


def _deriv_inputs(args):
    f_ast = _parse_expr(args.f, "t", "--f") if args.f is not None else None
    F_ast = _parse_expr(args.transform, "s", "--transform") if args.transform is not None else None
    init = parse_float_list(args.init, "--init") if args.init else []
    if not (math.isfinite(args.alpha) and args.alpha > 0):
        raise UsageError(f"--alpha: must be positive, got {args.alpha:g}")
    _positive("--h", args.h)
    return FunctionSpec(f_ast, F_ast, tuple(init), args.c0), FractionalOrder(args.alpha)


def _check_deriv_method(method: FdMethod, f: FunctionSpec, order: FractionalOrder, n) -> None:
    if method.is_inversion:
        try:
            f.transform()
        except UnsupportedError as exc:
            raise UsageError(f"--method {_METHOD_LABEL[method]}: {exc}") from None
    elif f.f_expr is None:
        raise UsageError(f"--method {_METHOD_LABEL[method]}: needs --f")
    if method is FdMethod.DIRECT:
        if order.is_integer or order.n_ceil > 2:
            raise UsageError("--method direct: needs a non-integer --alpha below 2")
        if n is not None and n < 8:
            raise UsageError("--n: direct needs a Legendre order >= 8")


def _cmd_deriv(args) -> tuple[list[dict], list[str]]:
    ts = parse_t_list(args.t)
    f, order = _deriv_inputs(args)
    method = _METHOD_NAMES[args.method]
    cls = _CLASS_NAMES[args.cls]
    _check_method_n(args.method, args.n)
    _check_deriv_method(method, f, order, args.n)
    if method is FdMethod.GL_SUM:
        for t in ts:
            if args.h > t:
                raise UsageError(f"--h: step {args.h:g} exceeds t={t:g}")
    params = FdParams(args.n, args.h, args.c, args.gamma)
    pre = [_defaults_line(method, params, order)]
    rows = []
    for t in ts:
        value, err = fd_compute(f, order, cls, method, t, params)
        rows.append(OutputRow(t, value, err, args.method, args.cls).as_dict())
    return rows, pre


def _defaults_line(method: FdMethod, params: FdParams, order: FractionalOrder) -> str:
    if method is FdMethod.STEHFEST:
        return f"method=stehfest N={params.n or 14}"
    if method is FdMethod.GL_SUM:
        return f"method=glsum h={params.h:g}"
    if method is FdMethod.DIRECT:
        return f"method=direct legendre_order={params.n or 32}"
    gamma = order.frac if params.gamma_param is None else params.gamma_param
    c = "c0+1" if params.c is None else f"{params.c:g}"
    line = f"method={method.value} n={params.n or 32} c={c}"
    return line + (f" gamma={gamma:g}" if method is FdMethod.MGI else "")


def _cmd_compare(args) -> tuple[list[dict], list[str]]:
    ts = parse_t_list(args.t)
    f, order = _deriv_inputs(args)
    cls = _CLASS_NAMES[args.cls]
    oracle_p = None
    if args.oracle is not None:
        kind, p = _named_param(args.oracle, "--oracle")
        if kind != "power" or p is None:
            raise UsageError(f"--oracle: expected power:P, got {args.oracle!r}")
        try:
            closed_form_power(cls, order, p, 1.0)
        except DomainError as exc:
            raise UsageError(f"--oracle: {exc}") from None
        oracle_p = p
    if args.h > min(ts):
        raise UsageError(f"--h: step {args.h:g} exceeds t={min(ts):g}")
    methods = []
    for label, method in _METHOD_NAMES.items():
        try:
            _check_deriv_method(method, f, order, None)
        except UsageError:
            continue
        methods.append((label, method))
    if not methods:
        raise UsageError("compare: no method applies to these inputs")
    params = FdParams(None, args.h, None, None)
    pre = [_defaults_line(m, params, order) for _, m in methods]
    rows = []
    for label, method in methods:
        for t in ts:
            value, err = fd_compute(f, order, cls, method, t, params)
            dev = None if oracle_p is None else value - closed_form_power(cls, order, oracle_p, t)
            rows.append(OutputRow(t, value, err, label, args.cls, dev).as_dict())
    return rows, pre


def _cmd_pairs(args) -> tuple[list[dict], list[str]]:
    rows = [{"name": p.name, "f": p.f_text(), "F": p.F.text(), "c0": float(p.F.c0)}
            for p in laplace.builtin_pairs().values()]
    return rows, []


# -- parser ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--verbose", action="store_true",
                        help="print the numeric settings as a leading '#' line")
    parser = argparse.ArgumentParser(
        prog="fracgauss",
        description="Fractional derivatives via Gauss-Laguerre / modified Gauss Laplace inversion.",
        epilog=GRAMMAR_HELP,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)
    fmt = argparse.RawDescriptionHelpFormatter

    p = sub.add_parser("rule", parents=[common], help="print quadrature nodes and weights")
    p.add_argument("--kind", choices=("laguerre", "mgi", "legendre"), required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--gamma", type=float, default=0.0, help="weight exponent (laguerre/mgi)")
    p.set_defaults(func=_cmd_rule)

    p = sub.add_parser("invlap", parents=[common], help="numerical inverse Laplace transform",
                       epilog=GRAMMAR_HELP, formatter_class=fmt)
    p.add_argument("--transform", help="F(s) expression")
    p.add_argument("--pair", help="builtin pair NAME[:PARAM], see 'pairs'")
    p.add_argument("--c0", type=float, default=0.0, help="abscissa of convergence of --transform")
    p.add_argument("--t", required=True)
    p.add_argument("--method", choices=("gli", "mgi", "stehfest"), default="gli")
    p.add_argument("--n", type=int, default=None, help="nodes (default 32) or Stehfest N (default 14)")
    p.add_argument("--c", type=float, default=None, help="contour abscissa (default c0 + 1)")
    p.add_argument("--gamma", type=float, default=0.5, help="mgi weight exponent")
    p.set_defaults(func=_cmd_invlap)

    for name, func, helptext in (
        ("deriv", _cmd_deriv, "fractional derivative by one method"),
        ("compare", _cmd_compare, "fractional derivative by every applicable method"),
    ):
        p = sub.add_parser(name, parents=[common], help=helptext, epilog=GRAMMAR_HELP, formatter_class=fmt)
        p.add_argument("--f", required=(name == "compare"), help="f(t) expression")
        p.add_argument("--transform", help="F(s) expression (else the pair table is used)")
        p.add_argument("--c0", type=float, default=0.0)
        p.add_argument("--init", help="f(0),f'(0),... (default zeros)")
        p.add_argument("--alpha", type=float, required=True)
        p.add_argument("--class", dest="cls", choices=tuple(_CLASS_NAMES),
                       required=(name == "deriv"), default="caputo")
        p.add_argument("--t", required=True)
        p.add_argument("--h", type=float, default=1e-4, help="glsum step (default 1e-4)")
        if name == "deriv":
            p.add_argument("--method", choices=tuple(_METHOD_NAMES), required=True)
            p.add_argument("--n", type=int, default=None,
                           help="gli/mgi nodes (32), Stehfest N (14), Legendre order for direct (32)")
            p.add_argument("--c", type=float, default=None)
            p.add_argument("--gamma", type=float, default=None, help="mgi exponent (default frac(alpha))")
        else:
            p.add_argument("--oracle", help="closed-form reference, power:P for f = t^P")
        p.set_defaults(func=func)

    p = sub.add_parser("pairs", parents=[common], help="list the builtin transform pairs")
    p.set_defaults(func=_cmd_pairs)
    return parser


def run(argv: Sequence[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    parser = build_parser()
    try:
        # argparse prints usage errors and --help itself; keep them on our streams
        with contextlib.redirect_stdout(stdout), contextlib.redirect_stderr(stderr):
            args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        records, preamble = args.func(args)
    except (UsageError, ParseError, UnsupportedError) as exc:
        print(f"fracgauss {args.command}: error: {exc}", file=stderr)
        return EXIT_USAGE
    except (NumericalError, DomainError, ArithmeticError) as exc:
        print(f"fracgauss {args.command}: numerical failure: {exc}", file=stderr)
        return EXIT_NUMERIC
    if not all(np.isfinite(v) for rec in records for v in rec.values() if isinstance(v, float)):
        print(f"fracgauss {args.command}: numerical failure: non-finite result", file=stderr)
        return EXIT_NUMERIC
    text = _format_records(records, args.format)
    if args.verbose:
        text = "".join(f"# {line}\n" for line in preamble) + text
    stdout.write(text)
    return EXIT_OK


def main() -> None:
    sys.exit(run())
