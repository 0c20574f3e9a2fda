"""Arithmetic expressions in one free variable (``t`` or ``s``).

Grammar, lowest precedence first::

    expr    := term (('+' | '-') term)*
    term    := factor (('*' | '/') factor)*
    factor  := '-' factor | power
    power   := primary ('^' factor)?
    primary := number | var | pi | e | func '(' expr ')' | '(' expr ')'

``^`` is right-associative and binds tighter than unary minus, so ``-t^2`` is
``-(t^2)`` and ``2^-1`` is ``0.5``. Functions: exp, ln, sqrt, sin, cos,
gamma, abs. Numbers are decimal or scientific (``1.5e-3``); there is no
implicit multiplication.

Both evaluators accept a scalar or a numpy array for the variable.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Union

import numpy as np

from . import specfun
from .errors import DomainError, FracGaussError, UnsupportedError

FUNCTIONS = ("exp", "ln", "sqrt", "sin", "cos", "gamma", "abs")
CONSTANTS = {"pi": math.pi, "e": math.e}
VARIABLES = ("t", "s")


class ParseError(FracGaussError, ValueError):
    """Syntax error; ``position`` is a byte offset into the input."""

    def __init__(self, position: int, message: str):
        super().__init__(f"{message} (at position {position})")
        self.position = position
        self.message = message


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Neg:
    operand: "Ast"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Ast"
    right: "Ast"


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Ast"


Ast = Union[Num, Var, Neg, BinOp, Call]


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^()−])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Token:
    kind: str  # "num", "ident", "op", "end"
    text: str
    pos: int


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    i = 0
    while i < len(text):
        m = _TOKEN_RE.match(text, i)
        if m is None:
            raise ParseError(_byte_pos(text, i), f"unexpected character {text[i]!r}")
        kind = m.lastgroup
        if kind != "ws":
            tok = m.group()
            if tok == "−":
                tok = "-"
            tokens.append(_Token(kind, tok, _byte_pos(text, i)))
        i = m.end()
    tokens.append(_Token("end", "", _byte_pos(text, len(text))))
    return tokens


def _byte_pos(text: str, index: int) -> int:
    return len(text[:index].encode("utf-8"))


class _Parser:
    def __init__(self, text: str, var_name: str):
        self.tokens = _tokenize(text)
        self.i = 0
        self.var_name = var_name

    @property
    def tok(self) -> _Token:
        return self.tokens[self.i]

    def _accept(self, *ops: str) -> str | None:
        if self.tok.kind == "op" and self.tok.text in ops:
            self.i += 1
            return self.tokens[self.i - 1].text
        return None

    def _expect(self, op: str) -> None:
        if self._accept(op) is None:
            found = self.tok.text or "end of input"
            raise ParseError(self.tok.pos, f"expected {op!r}, found {found!r}")

    def parse(self) -> Ast:
        node = self.expr()
        if self.tok.kind != "end":
            raise ParseError(self.tok.pos, f"unexpected trailing input {self.tok.text!r}")
        return node

    def expr(self) -> Ast:
        node = self.term()
        while (op := self._accept("+", "-")) is not None:
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Ast:
        node = self.factor()
        while (op := self._accept("*", "/")) is not None:
            node = BinOp(op, node, self.factor())
        return node

    def factor(self) -> Ast:
        if self._accept("-") is not None:
            return Neg(self.factor())
        base = self.primary()
        if self._accept("^") is not None:
            return BinOp("^", base, self.factor())
        return base

    def primary(self) -> Ast:
        tok = self.tok
        if tok.kind == "num":
            self.i += 1
            return Num(float(tok.text))
        if tok.kind == "ident":
            self.i += 1
            if tok.text == self.var_name:
                return Var(tok.text)
            if tok.text in CONSTANTS:
                return Num(CONSTANTS[tok.text])
            if tok.text in FUNCTIONS:
                self._expect("(")
                arg = self.expr()
                self._expect(")")
                return Call(tok.text, arg)
            raise ParseError(tok.pos, f"unknown identifier {tok.text!r}")
        if self._accept("(") is not None:
            node = self.expr()
            self._expect(")")
            return node
        found = tok.text or "end of input"
        raise ParseError(tok.pos, f"expected a number, variable, function or '(', found {found!r}")


def parse(text: str, var_name: str = "t") -> Ast:
    """Parse ``text`` into an expression tree over the variable ``var_name``."""
    if var_name not in VARIABLES:
        raise ValueError(f"var_name must be one of {VARIABLES}, got {var_name!r}")
    if not text or not text.strip():
        raise ParseError(0, "empty expression")
    return _Parser(text, var_name).parse()


def contains_var(node: Ast) -> bool:
    if isinstance(node, Var):
        return True
    if isinstance(node, Num):
        return False
    if isinstance(node, Neg):
        return contains_var(node.operand)
    if isinstance(node, Call):
        return contains_var(node.arg)
    return contains_var(node.left) or contains_var(node.right)


_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "^": 4}


def unparse(node: Ast) -> str:
    """Render a tree as text that :func:`parse` reads back to the same tree."""
    return _unparse(node, 0)


def _unparse(node: Ast, ctx: int) -> str:
    if isinstance(node, Num):
        text = repr(node.value)
        if node.value < 0 or text in ("inf", "nan"):
            return f"({text})"
        return text
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Call):
        return f"{node.func}({_unparse(node.arg, 0)})"
    if isinstance(node, Neg):
        text = "-" + _unparse(node.operand, 3)
        return f"({text})" if ctx > 3 else text
    prec = _PREC[node.op]
    if node.op == "^":
        text = f"{_unparse(node.left, 5)}^{_unparse(node.right, 3)}"
    else:
        text = f"{_unparse(node.left, prec)}{node.op}{_unparse(node.right, prec + 1)}"
    return f"({text})" if prec < ctx else text


# -- evaluation --------------------------------------------------------------


def _first_bad(x, mask):
    arr = np.asarray(x)
    m = np.asarray(mask)
    if arr.ndim == 0:
        return arr.item()
    return arr[np.broadcast_to(m, arr.shape)][0].item()


def _domain_check(mask, func: str, arg) -> None:
    if np.any(mask):
        raise DomainError(f"{func}: argument {_first_bad(arg, mask)!r} outside its domain")


def _is_integer_exponent(y) -> bool:
    return np.ndim(y) == 0 and float(np.real(y)) == round(float(np.real(y))) and np.imag(y) == 0


def _eval(node: Ast, x, complex_mode: bool):
    if isinstance(node, Num):
        return complex(node.value) if complex_mode else node.value
    if isinstance(node, Var):
        return x
    if isinstance(node, Neg):
        return -_eval(node.operand, x, complex_mode)
    if isinstance(node, Call):
        return _call(node, x, complex_mode)
    a = _eval(node.left, x, complex_mode)
    b = _eval(node.right, x, complex_mode)
    op = node.op
    if op == "+":
        return a + b
    if op == "-":
        return a - b
    if op == "*":
        return a * b
    if op == "/":
        _domain_check(np.asarray(b) == 0, "division", b)
        return a / b
    # power
    if _is_integer_exponent(b):
        k = int(round(float(np.real(b))))
        if k < 0:
            _domain_check(np.asarray(a) == 0, "power", a)
        if np.ndim(a) == 0:
            return complex(a) ** k if complex_mode else float(a) ** k
        return np.power(a, k) if k >= 0 else 1.0 / np.power(a, -k)
    if complex_mode:
        _domain_check(np.asarray(a) == 0, "power", a)
        out = np.power(np.asarray(a, dtype=complex), b)
        return complex(out) if np.ndim(out) == 0 else out
    _domain_check(np.asarray(a) < 0, "power", a)
    _domain_check((np.asarray(a) == 0) & (np.asarray(b) < 0), "power", a)
    out = np.power(np.asarray(a, dtype=float), b)
    return float(out) if np.ndim(out) == 0 else out


def _call(node: Call, x, complex_mode: bool):
    f = node.func
    if f == "gamma":
        if complex_mode:
            if contains_var(node.arg):
                raise UnsupportedError("gamma is not supported in complex mode")
            return complex(_gamma_real(_eval(node.arg, x, False)))
        return _gamma_real(_eval(node.arg, x, False))
    a = _eval(node.arg, x, complex_mode)
    scalar = np.ndim(a) == 0
    if complex_mode:
        arr = np.asarray(a, dtype=complex)
        if f == "ln":
            _domain_check(arr == 0, "ln", a)
            out = np.log(arr)
        elif f == "abs":
            out = np.abs(arr).astype(complex)
        else:
            out = getattr(np, f)(arr)
        return complex(out) if scalar else out
    arr = np.asarray(a, dtype=float)
    if f == "ln":
        _domain_check(arr <= 0, "ln", a)
        out = np.log(arr)
    elif f == "sqrt":
        _domain_check(arr < 0, "sqrt", a)
        out = np.sqrt(arr)
    else:
        out = getattr(np, f)(arr)
    return float(out) if scalar else out


def _gamma_real(a):
    if np.ndim(a) == 0:
        try:
            return specfun.gamma(float(a))
        except DomainError as exc:
            raise DomainError(f"gamma: argument {float(a)!r} outside its domain") from exc
    return np.array([_gamma_real(v) for v in np.ravel(a)]).reshape(np.shape(a))


def eval_real(node: Ast, value):
    """Evaluate in IEEE double arithmetic; raises :class:`DomainError`."""
    with np.errstate(all="ignore"):
        out = _eval(node, value if np.ndim(value) else float(value), False)
    if np.ndim(value) and np.ndim(out) == 0:
        out = np.full(np.shape(value), out)
    return out


def eval_complex(node: Ast, value):
    """Evaluate with principal-branch powers and logs.

    ``gamma`` is only accepted on arguments that do not involve the variable.
    """
    with np.errstate(all="ignore"):
        out = _eval(node, value if np.ndim(value) else complex(value), True)
    if np.ndim(value) and np.ndim(out) == 0:
        out = np.full(np.shape(value), out, dtype=complex)
    return out


def substitute(node: Ast, replacement: Ast) -> Ast:
    """Replace every occurrence of the variable by ``replacement``."""
    if isinstance(node, Var):
        return replacement
    if isinstance(node, Num):
        return node
    if isinstance(node, Neg):
        return Neg(substitute(node.operand, replacement))
    if isinstance(node, Call):
        return Call(node.func, substitute(node.arg, replacement))
    return BinOp(node.op, substitute(node.left, replacement), substitute(node.right, replacement))
