"""A small expression language for step polynomials on tori.

Grammar::

    expr   := term (('+' | '-') term)*
    term   := unary ('*' unary)*
    unary  := '-' unary | atom
    atom   := RATIONAL | 'frac' '(' affine ')' | '{' affine '}'
            | 'floor' '(' expr ')' | '(' expr ')'
    affine := ['-'] (INT '*')? IDENT (('+' | '-') ((INT '*')? IDENT | RATIONAL))*

``frac`` arguments are affine in the declared variables with integer
coefficients; products, sums and floors are formed on the compiled step
polynomials.  There is no division and no ``mod``: circle-valued
identities are checked with :func:`stepcalc.steppoly.ae_equal_mod1`.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .geometry import as_point
from .poly import Polynomial
from .steppoly import StepPoly, floor_piecewise_affine
from .torus import AffineTorusMap, frac_of_affine


class ExprSyntaxError(SyntaxError):
    """Parse failure; ``lineno`` and ``offset`` give the 1-based position."""

    def __init__(self, msg: str, line: int, col: int, source: str = ""):
        super().__init__(f"{msg} (line {line}, column {col})")
        self.lineno = line
        self.offset = col
        self.line = line
        self.col = col
        self.text = source


class UnknownVariable(ExprSyntaxError):
    pass


# -- syntax tree ------------------------------------------------------------


class Expr:
    __slots__ = ()


@dataclass(frozen=True)
class Const(Expr):
    value: Fraction


@dataclass(frozen=True)
class Frac(Expr):
    """``{coeffs . vars + const}``."""

    coeffs: tuple
    const: Fraction = Fraction(0)


@dataclass(frozen=True)
class Floor(Expr):
    arg: Expr


@dataclass(frozen=True)
class Add(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Sub(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Mul(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Neg(Expr):
    arg: Expr


@dataclass(frozen=True)
class ScalarMul(Expr):
    scalar: Fraction
    arg: Expr


# -- lexer ------------------------------------------------------------------

_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<num>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/(){}])
    """,
    re.VERBOSE,
)


@dataclass
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _lex(source: str) -> list:
    toks = []
    pos = 0
    line, line_start = 1, 0
    while pos < len(source):
        m = _TOKEN.match(source, pos)
        if not m:
            raise ExprSyntaxError(f"unexpected character {source[pos]!r}", line, pos - line_start + 1, source)
        kind = m.lastgroup
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind != "ws":
            toks.append(_Tok(kind, m.group(), line, m.start() - line_start + 1))
        pos = m.end()
    toks.append(_Tok("eof", "", line, pos - line_start + 1))
    return toks


class _Parser:
    def __init__(self, source: str, variables: Sequence[str]):
        self.source = source
        self.vars = list(variables)
        self.toks = _lex(source)
        self.i = 0

    def peek(self, k=0) -> _Tok:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def next(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def error(self, msg, tok=None):
        tok = tok or self.peek()
        raise ExprSyntaxError(msg, tok.line, tok.col, self.source)

    def expect(self, text, opener=None):
        t = self.peek()
        if t.text != text:
            if opener is not None and t.kind == "eof":
                raise ExprSyntaxError(f"unclosed {opener.text!r}", opener.line, opener.col, self.source)
            self.error(f"expected {text!r}, found {t.text or 'end of input'!r}")
        return self.next()

    def parse(self) -> Expr:
        e = self.expr()
        if self.peek().kind != "eof":
            self.error(f"unexpected {self.peek().text!r}")
        return e

    def expr(self) -> Expr:
        e = self.term()
        while self.peek().text in ("+", "-"):
            op = self.next().text
            r = self.term()
            e = Add(e, r) if op == "+" else Sub(e, r)
        return e

    def term(self) -> Expr:
        e = self.unary()
        while self.peek().text == "*":
            self.next()
            r = self.unary()
            e = ScalarMul(e.value, r) if isinstance(e, Const) else Mul(e, r)
        return e

    def unary(self) -> Expr:
        if self.peek().text == "-":
            self.next()
            return Neg(self.unary())
        return self.atom()

    def rational(self) -> Fraction:
        t = self.next()
        if t.kind != "num":
            self.error("expected a number", t)
        if self.peek().text == "/":
            self.next()
            d = self.next()
            if d.kind != "num":
                self.error("expected a denominator", d)
            if int(d.text) == 0:
                self.error("zero denominator", d)
            return Fraction(int(t.text), int(d.text))
        return Fraction(int(t.text))

    def atom(self) -> Expr:
        t = self.peek()
        if t.kind == "num":
            return Const(self.rational())
        if t.kind == "ident" and t.text in ("frac", "floor"):
            self.next()
            opener = self.expect("(")
            if t.text == "frac":
                inner = self.affine()
            else:
                inner = Floor(self.expr())
            self.expect(")", opener)
            return inner
        if t.text == "{":
            opener = self.next()
            inner = self.affine()
            self.expect("}", opener)
            return inner
        if t.text == "(":
            opener = self.next()
            e = self.expr()
            self.expect(")", opener)
            return e
        if t.kind == "ident":
            self.error(f"variable {t.text!r} must appear inside frac(...)")
        if t.kind == "eof":
            self.error("unexpected end of input")
        self.error(f"unexpected {t.text!r}")

    def _ident(self) -> int:
        t = self.next()
        if t.kind != "ident" or t.text in ("frac", "floor"):
            self.error("expected a variable", t)
        if t.text not in self.vars:
            raise UnknownVariable(f"unknown variable {t.text!r}", t.line, t.col, self.source)
        return self.vars.index(t.text)

    def _monomial(self, coeffs, sign):
        # (INT '*')? IDENT
        k = 1
        if self.peek().kind == "num" and self.peek(1).text == "*":
            k = int(self.next().text)
            self.next()
        coeffs[self._ident()] += sign * k

    def affine(self) -> Frac:
        coeffs = [0] * len(self.vars)
        const = Fraction(0)
        sign = 1
        if self.peek().text == "-":
            self.next()
            sign = -1
        self._monomial(coeffs, sign)
        while self.peek().text in ("+", "-"):
            sign = 1 if self.next().text == "+" else -1
            if self.peek().kind == "num" and self.peek(1).text != "*":
                const += sign * self.rational()
            else:
                self._monomial(coeffs, sign)
        if not any(coeffs):
            self.error("frac argument has no variable part")
        return Frac(tuple(coeffs), const)


def parse(source: str, variables: Sequence[str]) -> Expr:
    """Parse ``source`` over the ordered variable list."""
    return _Parser(source, variables).parse()


# -- printing ---------------------------------------------------------------


def _level(e: Expr) -> int:
    if isinstance(e, (Add, Sub)):
        return 1
    if isinstance(e, (Mul, ScalarMul)):
        return 2
    if isinstance(e, Neg):
        return 3
    return 4


def _rat(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def to_source(e: Expr, variables: Sequence[str]) -> str:
    """Deterministic printer; ``parse(to_source(e)) == e`` for trees the
    parser can produce."""

    def wrap(sub, min_level):
        s = go(sub)
        return f"({s})" if _level(sub) < min_level else s

    def go(e):
        if isinstance(e, Const):
            if e.value < 0:
                raise ValueError("negative constants are written with unary minus")
            return _rat(e.value)
        if isinstance(e, Frac):
            parts = []
            for name, k in zip(variables, e.coeffs):
                if not k:
                    continue
                mono = name if abs(k) == 1 else f"{abs(k)}*{name}"
                if not parts:
                    parts.append(mono if k > 0 else f"-{mono}")
                else:
                    parts.append(f"+ {mono}" if k > 0 else f"- {mono}")
            if e.const:
                parts.append(f"+ {_rat(e.const)}" if e.const > 0 else f"- {_rat(-e.const)}")
            return "frac(" + " ".join(parts) + ")"
        if isinstance(e, Floor):
            return f"floor({go(e.arg)})"
        if isinstance(e, Add):
            return f"{wrap(e.left, 1)} + {wrap(e.right, 2)}"
        if isinstance(e, Sub):
            return f"{wrap(e.left, 1)} - {wrap(e.right, 2)}"
        if isinstance(e, Mul):
            return f"{wrap(e.left, 2)} * {wrap(e.right, 3)}"
        if isinstance(e, ScalarMul):
            if e.scalar < 0:
                raise ValueError("negative scalars are written with unary minus")
            return f"{_rat(e.scalar)} * {wrap(e.arg, 3)}"
        if isinstance(e, Neg):
            return f"-{wrap(e.arg, 3)}"
        raise TypeError(f"not an expression: {e!r}")

    return go(e)


# -- semantics --------------------------------------------------------------


def interpret(e: Expr, point) -> Fraction:
    """Direct exact evaluation of the expression at a point."""
    point = as_point(point)
    if isinstance(e, Const):
        return e.value
    if isinstance(e, Frac):
        v = e.const + sum(k * x for k, x in zip(e.coeffs, point))
        return v - math.floor(v)
    if isinstance(e, Floor):
        return Fraction(math.floor(interpret(e.arg, point)))
    if isinstance(e, Add):
        return interpret(e.left, point) + interpret(e.right, point)
    if isinstance(e, Sub):
        return interpret(e.left, point) - interpret(e.right, point)
    if isinstance(e, Mul):
        return interpret(e.left, point) * interpret(e.right, point)
    if isinstance(e, Neg):
        return -interpret(e.arg, point)
    if isinstance(e, ScalarMul):
        return e.scalar * interpret(e.arg, point)
    raise TypeError(f"not an expression: {e!r}")


def compile_expr(e: Expr, variables: Sequence[str] | int) -> StepPoly:
    """Real lift of ``e`` as a step polynomial on ``[0,1)^len(variables)``.

    Raises :class:`~stepcalc.steppoly.NotPiecewiseAffine` for a floor of
    something that is not piecewise affine.
    """
    d = variables if isinstance(variables, int) else len(variables)

    def go(e):
        if isinstance(e, Const):
            return StepPoly.constant(d, e.value)
        if isinstance(e, Frac):
            if len(e.coeffs) != d:
                raise ValueError("frac coefficients do not match the variable list")
            xi = frac_of_affine(AffineTorusMap((e.coeffs,), (e.const,)))
            return StepPoly(d, [(A.as_polynomials()[0], P) for P, A in xi.cells])
        if isinstance(e, Floor):
            return floor_piecewise_affine(go(e.arg))
        if isinstance(e, Add):
            return go(e.left) + go(e.right)
        if isinstance(e, Sub):
            return go(e.left) - go(e.right)
        if isinstance(e, Mul):
            return go(e.left) * go(e.right)
        if isinstance(e, Neg):
            return -go(e.arg)
        if isinstance(e, ScalarMul):
            return go(e.arg).scale(e.scalar)
        raise TypeError(f"not an expression: {e!r}")

    return go(e)


def compile_source(source: str, variables: Sequence[str]) -> StepPoly:
    return compile_expr(parse(source, variables), variables)
