"""Expression language for the univariate transformation ``g(x)``.

Grammar (whitespace insignificant)::

    expr   := term (("+" | "-") term)*
    term   := unary (("*" | "/") unary)*
    unary  := "-" unary | factor
    factor := atom ("^" ["-"] integer)?
    atom   := number | "x" | "(" expr ")" | func "(" expr ")"
    func   := "exp" | "ln" | "sin" | "cos" | "sqrt"

Unary minus is sugar: ``-u`` parses to ``Sub(Const(0), u)`` so the node set
stays closed. Exponents are integer literals only; general powers are written
``exp(a*ln(x))``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

import numpy as np

from .errors import DomainError, ExpressionSyntaxError, NonIntegerExponent

FUNCTIONS = ("exp", "ln", "sin", "cos", "sqrt")


class Expr:
    """Base class of all expression nodes. Nodes are immutable."""

    __slots__ = ()

    def __str__(self) -> str:
        return to_text(self)

    # Builder sugar, mostly for tests and for composing h = (g - a)^2.
    def __add__(self, other):
        return Add(self, _lift(other))

    def __radd__(self, other):
        return Add(_lift(other), self)

    def __sub__(self, other):
        return Sub(self, _lift(other))

    def __rsub__(self, other):
        return Sub(_lift(other), self)

    def __mul__(self, other):
        return Mul(self, _lift(other))

    def __rmul__(self, other):
        return Mul(_lift(other), self)

    def __truediv__(self, other):
        return Div(self, _lift(other))

    def __rtruediv__(self, other):
        return Div(_lift(other), self)

    def __pow__(self, exponent: int):
        return Pow(self, exponent)


def _lift(value) -> Expr:
    if isinstance(value, Expr):
        return value
    return Const(float(value))


@dataclass(frozen=True, eq=True, repr=True)
class Const(Expr):
    value: float


@dataclass(frozen=True, eq=True, repr=True)
class Var(Expr):
    pass


@dataclass(frozen=True, eq=True, repr=True)
class Add(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True, eq=True, repr=True)
class Sub(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True, eq=True, repr=True)
class Mul(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True, eq=True, repr=True)
class Div(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True, eq=True, repr=True)
class Pow(Expr):
    base: Expr
    exponent: int

    def __post_init__(self) -> None:
        if isinstance(self.exponent, bool) or not isinstance(self.exponent, (int, np.integer)):
            raise TypeError(f"Pow exponent must be an int, got {self.exponent!r}")


@dataclass(frozen=True, eq=True, repr=True)
class Exp(Expr):
    arg: Expr


@dataclass(frozen=True, eq=True, repr=True)
class Ln(Expr):
    arg: Expr


@dataclass(frozen=True, eq=True, repr=True)
class Sin(Expr):
    arg: Expr


@dataclass(frozen=True, eq=True, repr=True)
class Cos(Expr):
    arg: Expr


@dataclass(frozen=True, eq=True, repr=True)
class Sqrt(Expr):
    arg: Expr


X = Var()
BINARY = (Add, Sub, Mul, Div)
UNARY = (Exp, Ln, Sin, Cos, Sqrt)
_FUNC_NODE = {"exp": Exp, "ln": Ln, "sin": Sin, "cos": Cos, "sqrt": Sqrt}
_NODE_FUNC = {v: k for k, v in _FUNC_NODE.items()}


# ---------------------------------------------------------------------------
# Parsing

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^()])
    """,
    re.VERBOSE,
)
_INT_RE = re.compile(r"\d+")


@dataclass(frozen=True)
class _Token:
    kind: str  # "num", "name", "op", "end"
    text: str
    offset: int  # byte offset


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ExpressionSyntaxError(
                f"unexpected character {text[pos]!r}", _byte_offset(text, pos), text
            )
        if m.lastgroup != "ws":
            tokens.append(_Token(m.lastgroup, m.group(), _byte_offset(text, pos)))
        pos = m.end()
    tokens.append(_Token("end", "", _byte_offset(text, len(text))))
    return tokens


def _byte_offset(text: str, pos: int) -> int:
    return len(text[:pos].encode("utf-8"))


class _Parser:
    def __init__(self, text: str) -> None:
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    @property
    def tok(self) -> _Token:
        return self.tokens[self.i]

    def error(self, message: str, tok: _Token | None = None) -> ExpressionSyntaxError:
        tok = tok or self.tok
        return ExpressionSyntaxError(message, tok.offset, self.text)

    def take(self) -> _Token:
        tok = self.tok
        self.i += 1
        return tok

    def accept(self, op: str) -> bool:
        if self.tok.kind == "op" and self.tok.text == op:
            self.i += 1
            return True
        return False

    def expect(self, op: str) -> None:
        if not self.accept(op):
            found = self.tok.text or "end of input"
            raise self.error(f"expected {op!r}, found {found!r}")

    def parse(self) -> Expr:
        node = self.expr()
        if self.tok.kind != "end":
            raise self.error(f"unexpected {self.tok.text!r}")
        return node

    def expr(self) -> Expr:
        node = self.term()
        while self.tok.kind == "op" and self.tok.text in "+-":
            op = self.take().text
            rhs = self.term()
            node = Add(node, rhs) if op == "+" else Sub(node, rhs)
        return node

    def term(self) -> Expr:
        node = self.unary()
        while self.tok.kind == "op" and self.tok.text in "*/":
            op = self.take().text
            rhs = self.unary()
            node = Mul(node, rhs) if op == "*" else Div(node, rhs)
        return node

    def unary(self) -> Expr:
        if self.accept("-"):
            return Sub(Const(0.0), self.unary())
        return self.factor()

    def factor(self) -> Expr:
        base = self.atom()
        if self.accept("^"):
            negative = self.accept("-")
            tok = self.tok
            if tok.kind != "num":
                raise self.error("expected an integer exponent")
            if not _INT_RE.fullmatch(tok.text):
                raise NonIntegerExponent(
                    f"non-integer exponent {tok.text!r}", tok.offset, self.text
                )
            self.take()
            n = int(tok.text)
            return Pow(base, -n if negative else n)
        return base

    def atom(self) -> Expr:
        tok = self.tok
        if tok.kind == "num":
            self.take()
            return Const(float(tok.text))
        if tok.kind == "name":
            self.take()
            if tok.text == "x":
                return X
            if tok.text in _FUNC_NODE:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return _FUNC_NODE[tok.text](arg)
            raise self.error(f"unknown name {tok.text!r}", tok)
        if self.accept("("):
            node = self.expr()
            self.expect(")")
            return node
        if tok.kind == "end":
            raise self.error("unexpected end of input")
        raise self.error(f"unexpected {tok.text!r}")


def parse(text: str) -> Expr:
    """Parse expression source text into an AST.

    >>> parse("x^2 + 1")
    Add(left=Pow(base=Var(), exponent=2), right=Const(value=1.0))
    """
    return _Parser(text).parse()


# ---------------------------------------------------------------------------
# Printing

_PREC = {Add: 1, Sub: 1, Mul: 2, Div: 2}
_SYMBOL = {Add: "+", Sub: "-", Mul: "*", Div: "/"}


def _prec(node: Expr) -> int:
    if isinstance(node, Pow):
        return 3
    return _PREC.get(type(node), 4)


def _format_number(value: float) -> str:
    if value.is_integer() and abs(value) < 1e16:
        return str(int(value))
    return repr(value)


def to_text(node: Expr) -> str:
    """Render ``node`` in canonical form; ``parse(to_text(e)) == e`` for parsed ``e``."""
    if isinstance(node, Const):
        if not math.isfinite(node.value):
            raise ValueError(f"cannot print non-finite constant {node.value!r}")
        if math.copysign(1.0, node.value) < 0:
            return f"(0 - {_format_number(-node.value)})"
        return _format_number(node.value)
    if isinstance(node, Var):
        return "x"
    if isinstance(node, UNARY):
        return f"{_NODE_FUNC[type(node)]}({to_text(node.arg)})"
    if isinstance(node, Pow):
        base = to_text(node.base)
        if _prec(node.base) < 4:
            base = f"({base})"
        return f"{base}^{node.exponent}"
    prec = _PREC[type(node)]
    left = to_text(node.left)
    right = to_text(node.right)
    if _prec(node.left) < prec:
        left = f"({left})"
    # Left-associative grammar: a right operand of equal precedence needs parens.
    if _prec(node.right) <= prec:
        right = f"({right})"
    return f"{left} {_SYMBOL[type(node)]} {right}"


# ---------------------------------------------------------------------------
# Evaluation


def evaluate(g: Expr, x):
    """Evaluate ``g`` at a scalar or array ``x``.

    Raises:
      DomainError: ``ln`` of a nonpositive value, ``sqrt`` of a negative
        value, or division by zero anywhere in ``x``.
    """
    arr = np.asarray(x, dtype=float)
    with np.errstate(over="ignore", invalid="ignore"):
        out = _eval(g, arr)
    out = np.broadcast_to(out, arr.shape)
    if out.ndim == 0:
        return float(out)
    return np.array(out)


def _eval(node: Expr, x: np.ndarray):
    if isinstance(node, Const):
        return np.float64(node.value)
    if isinstance(node, Var):
        return x
    if isinstance(node, Add):
        return _eval(node.left, x) + _eval(node.right, x)
    if isinstance(node, Sub):
        return _eval(node.left, x) - _eval(node.right, x)
    if isinstance(node, Mul):
        return _eval(node.left, x) * _eval(node.right, x)
    if isinstance(node, Div):
        den = _eval(node.right, x)
        if np.any(den == 0):
            raise DomainError("division by zero")
        return _eval(node.left, x) / den
    if isinstance(node, Pow):
        base = _eval(node.base, x)
        if node.exponent < 0:
            if np.any(base == 0):
                raise DomainError("zero raised to a negative power")
            return 1.0 / base ** (-node.exponent)
        return base ** node.exponent
    arg = _eval(node.arg, x)
    if isinstance(node, Exp):
        return np.exp(arg)
    if isinstance(node, Ln):
        if np.any(~(arg > 0)):
            raise DomainError("ln of a nonpositive value")
        return np.log(arg)
    if isinstance(node, Sin):
        return np.sin(arg)
    if isinstance(node, Cos):
        return np.cos(arg)
    if isinstance(node, Sqrt):
        if np.any(~(arg >= 0)):
            raise DomainError("sqrt of a negative value")
        return np.sqrt(arg)
    raise TypeError(f"unknown expression node {node!r}")


# ---------------------------------------------------------------------------
# Polynomial structure

Poly = dict[int, Fraction]


def poly_coefficients(g: Expr) -> Poly | None:
    """Exact coefficient map ``{power: coefficient}`` if ``g`` is a polynomial.

    Expansion is symbolic over :class:`fractions.Fraction`, so cancellation
    such as ``(x+1)^2 - x^2 - 2*x`` is detected exactly. Returns ``None`` as
    soon as a non-polynomial construct (division by a non-constant, an
    elementary function of a non-constant) is met.
    """
    return _poly(g)


def poly_degree(g: Expr) -> int | None:
    """Degree of ``g`` as a polynomial in x, or ``None``. The zero polynomial has degree 0."""
    coeffs = _poly(g)
    if coeffs is None:
        return None
    return max(coeffs, default=0)


def _clean(p: dict[int, Fraction]) -> Poly:
    return {k: v for k, v in p.items() if v != 0}


def _const_value(p: Poly) -> Fraction | None:
    if not p:
        return Fraction(0)
    if set(p) == {0}:
        return p[0]
    return None


def _pmul(a: Poly, b: Poly) -> Poly:
    out: dict[int, Fraction] = {}
    for i, ai in a.items():
        for j, bj in b.items():
            out[i + j] = out.get(i + j, Fraction(0)) + ai * bj
    return _clean(out)


def _as_fraction(value: float) -> Fraction | None:
    if not math.isfinite(value):
        return None
    return Fraction(value)


def _poly(node: Expr) -> Poly | None:
    if isinstance(node, Const):
        f = _as_fraction(node.value)
        return None if f is None else _clean({0: f})
    if isinstance(node, Var):
        return {1: Fraction(1)}
    if isinstance(node, (Add, Sub)):
        a, b = _poly(node.left), _poly(node.right)
        if a is None or b is None:
            return None
        sign = 1 if isinstance(node, Add) else -1
        out = dict(a)
        for k, v in b.items():
            out[k] = out.get(k, Fraction(0)) + sign * v
        return _clean(out)
    if isinstance(node, Mul):
        a, b = _poly(node.left), _poly(node.right)
        if a is None or b is None:
            return None
        return _pmul(a, b)
    if isinstance(node, Div):
        a, b = _poly(node.left), _poly(node.right)
        if a is None or b is None:
            return None
        c = _const_value(b)
        if c is None or c == 0:
            return None
        return _clean({k: v / c for k, v in a.items()})
    if isinstance(node, Pow):
        a = _poly(node.base)
        if a is None:
            return None
        n = node.exponent
        if n < 0:
            c = _const_value(a)
            if c is None or c == 0:
                return None
            return _clean({0: c**n})
        result: Poly = {0: Fraction(1)}
        base = a
        while n:
            if n & 1:
                result = _pmul(result, base)
            n >>= 1
            if n:
                base = _pmul(base, base)
        return result
    # Elementary function: polynomial only when its argument is constant.
    a = _poly(node.arg)
    if a is None:
        return None
    c = _const_value(a)
    if c is None:
        return None
    try:
        value = evaluate(type(node)(Const(float(c))), 0.0)
    except DomainError:
        return None
    f = _as_fraction(value)
    return None if f is None else _clean({0: f})


ExprLike = Union[Expr, str]


def as_expr(g: ExprLike) -> Expr:
    """Accept either an AST or expression text."""
    return parse(g) if isinstance(g, str) else g
