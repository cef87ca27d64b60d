"""Expression language for fixture coefficient functions.

Grammar (see ``docs/expressions.md`` for the full EBNF)::

    expr     := term (("+" | "-") term)*
    term     := unary (("*" | "/") unary)*
    unary    := "-" unary | power
    power    := atom ["^" ["-"] INTEGER]
    atom     := NUMBER | NAME | "sqrt" "(" expr ")" | "(" expr ")"

Names are the coordinates of the enclosing chart or named fixture
parameters.  Expressions evaluate on floats or on :class:`DualScalar`
values, the latter carrying exact first derivatives.
"""

from __future__ import annotations

import math
import re
from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import ExprDomainError, ExprSyntaxError, UnknownSymbolError

__all__ = [
    "BinOp",
    "Const",
    "DualScalar",
    "Expr",
    "Neg",
    "Param",
    "Pow",
    "Sqrt",
    "Var",
    "constant",
    "evaluate",
    "evaluate_dual",
    "parse",
    "pretty",
]

# ---------------------------------------------------------------------------
# Dual numbers
# ---------------------------------------------------------------------------


class DualScalar:
    """A value with its gradient over the active coordinates."""

    __slots__ = ("value", "partials")

    def __init__(self, value: float, partials: np.ndarray) -> None:
        self.value = float(value)
        self.partials = partials

    @classmethod
    def seeded(cls, value: float, seed: np.ndarray) -> DualScalar:
        return cls(value, np.asarray(seed, dtype=float))

    def __repr__(self) -> str:
        return f"DualScalar({self.value!r}, {self.partials.tolist()!r})"

    def __add__(self, other: Scalar) -> DualScalar:
        if isinstance(other, DualScalar):
            return DualScalar(self.value + other.value, self.partials + other.partials)
        return DualScalar(self.value + other, self.partials)

    __radd__ = __add__

    def __sub__(self, other: Scalar) -> DualScalar:
        if isinstance(other, DualScalar):
            return DualScalar(self.value - other.value, self.partials - other.partials)
        return DualScalar(self.value - other, self.partials)

    def __rsub__(self, other: float) -> DualScalar:
        return DualScalar(other - self.value, -self.partials)

    def __mul__(self, other: Scalar) -> DualScalar:
        if isinstance(other, DualScalar):
            return DualScalar(
                self.value * other.value,
                self.value * other.partials + other.value * self.partials,
            )
        return DualScalar(self.value * other, self.partials * other)

    __rmul__ = __mul__

    def __truediv__(self, other: Scalar) -> DualScalar:
        if isinstance(other, DualScalar):
            inv = 1.0 / other.value
            quotient = self.value * inv
            return DualScalar(quotient, (self.partials - quotient * other.partials) * inv)
        return DualScalar(self.value / other, self.partials / other)

    def __rtruediv__(self, other: float) -> DualScalar:
        inv = 1.0 / self.value
        return DualScalar(other * inv, -other * inv * inv * self.partials)

    def __neg__(self) -> DualScalar:
        return DualScalar(-self.value, -self.partials)

    def __pow__(self, exponent: int) -> DualScalar:
        if exponent == 0:
            return DualScalar(1.0, np.zeros_like(self.partials))
        factor = exponent * self.value ** (exponent - 1)
        return DualScalar(self.value**exponent, factor * self.partials)

    def sqrt(self) -> DualScalar:
        root = math.sqrt(self.value)
        return DualScalar(root, self.partials / (2.0 * root))


Scalar = Union[float, DualScalar]


def _primal(x: Scalar) -> float:
    return x.value if isinstance(x, DualScalar) else x


def _sqrt(x: Scalar) -> Scalar:
    return x.sqrt() if isinstance(x, DualScalar) else math.sqrt(x)


# ---------------------------------------------------------------------------
# AST
# ---------------------------------------------------------------------------

_PREC_SUM = 1
_PREC_PRODUCT = 2
_PREC_UNARY = 3
_PREC_POWER = 4
_PREC_ATOM = 5


class Expr:
    """Immutable expression node."""

    precedence = _PREC_ATOM

    def evaluate(self, point: Sequence[Scalar]) -> Scalar:
        raise NotImplementedError

    def format(self) -> str:
        raise NotImplementedError

    @property
    def is_constant(self) -> bool:
        return False

    def __str__(self) -> str:
        return self.format()


def _wrap(node: Expr, min_prec: int) -> str:
    text = node.format()
    return f"({text})" if node.precedence < min_prec else text


def _format_number(value: float) -> str:
    if value.is_integer() and abs(value) < 1e16:
        return str(int(value))
    return repr(value)


@dataclass(frozen=True)
class Const(Expr):
    value: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.value):
            raise ValueError(f"non-finite constant {self.value!r}")

    @property
    def precedence(self) -> int:  # type: ignore[override]
        return _PREC_UNARY if self.value < 0 else _PREC_ATOM

    @property
    def is_constant(self) -> bool:
        return True

    def evaluate(self, point: Sequence[Scalar]) -> Scalar:
        return self.value

    def format(self) -> str:
        return _format_number(float(self.value))


@dataclass(frozen=True)
class Param(Expr):
    """Named fixture parameter bound to a value at parse time."""

    name: str
    value: float

    @property
    def is_constant(self) -> bool:
        return True

    def evaluate(self, point: Sequence[Scalar]) -> Scalar:
        return self.value

    def format(self) -> str:
        return self.name


@dataclass(frozen=True)
class Var(Expr):
    name: str
    index: int

    def evaluate(self, point: Sequence[Scalar]) -> Scalar:
        return point[self.index]

    def format(self) -> str:
        return self.name


@dataclass(frozen=True)
class Neg(Expr):
    operand: Expr
    precedence = _PREC_UNARY

    def evaluate(self, point: Sequence[Scalar]) -> Scalar:
        return -self.operand.evaluate(point)

    def format(self) -> str:
        return "-" + _wrap(self.operand, _PREC_UNARY)


_BINARY_PREC = {"+": _PREC_SUM, "-": _PREC_SUM, "*": _PREC_PRODUCT, "/": _PREC_PRODUCT}


@dataclass(frozen=True)
class BinOp(Expr):
    op: str
    left: Expr
    right: Expr

    @property
    def precedence(self) -> int:  # type: ignore[override]
        return _BINARY_PREC[self.op]

    def evaluate(self, point: Sequence[Scalar]) -> Scalar:
        a = self.left.evaluate(point)
        b = self.right.evaluate(point)
        if self.op == "+":
            return a + b
        if self.op == "-":
            return a - b
        if self.op == "*":
            return a * b
        if _primal(b) == 0.0:
            raise ExprDomainError("division by zero", self.right.format())
        return a / b

    def format(self) -> str:
        prec = self.precedence
        left = _wrap(self.left, prec)
        right = _wrap(self.right, prec + 1)
        if self.op in "+-":
            return f"{left} {self.op} {right}"
        return f"{left}{self.op}{right}"


@dataclass(frozen=True)
class Pow(Expr):
    base: Expr
    exponent: int
    precedence = _PREC_POWER

    def evaluate(self, point: Sequence[Scalar]) -> Scalar:
        base = self.base.evaluate(point)
        if self.exponent < 0 and _primal(base) == 0.0:
            raise ExprDomainError("division by zero", self.format())
        return base**self.exponent

    def format(self) -> str:
        return f"{_wrap(self.base, _PREC_ATOM)}^{self.exponent}"


@dataclass(frozen=True)
class Sqrt(Expr):
    operand: Expr

    def evaluate(self, point: Sequence[Scalar]) -> Scalar:
        arg = self.operand.evaluate(point)
        if _primal(arg) <= 0.0:
            raise ExprDomainError("sqrt of non-positive value", self.format())
        return _sqrt(arg)

    def format(self) -> str:
        return f"sqrt({self.operand.format()})"


def constant(value: float) -> Expr:
    """Return the constant node for *value*, negated when negative."""
    if value < 0:
        return Neg(Const(-float(value)))
    return Const(float(value))


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

_TOKEN_RX = re.compile(
    r"(?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^()])"
)
_INTEGER_RX = re.compile(r"\d+")
_FUNCTIONS = frozenset({"sqrt"})


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    offset: int


def _byte_offset(text: str, index: int) -> int:
    return len(text[:index].encode("utf-8"))


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    pos = 0
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        match = _TOKEN_RX.match(text, pos)
        if match is None:
            raise ExprSyntaxError(
                f"unexpected character {text[pos]!r}", _byte_offset(text, pos)
            )
        kind = match.lastgroup or "op"
        tokens.append(_Token(kind, match.group(), _byte_offset(text, pos)))
        pos = match.end()
    tokens.append(_Token("end", "", _byte_offset(text, len(text))))
    return tokens


class _Parser:
    def __init__(
        self,
        text: str,
        coordinates: Sequence[str],
        parameters: Mapping[str, float],
    ) -> None:
        self.tokens = _tokenize(text)
        self.pos = 0
        self.coordinates = {name: i for i, name in enumerate(coordinates)}
        self.parameters = dict(parameters)

    @property
    def current(self) -> _Token:
        return self.tokens[self.pos]

    def _advance(self) -> _Token:
        token = self.tokens[self.pos]
        self.pos += 1
        return token

    def _accept(self, text: str) -> bool:
        if self.current.kind == "op" and self.current.text == text:
            self.pos += 1
            return True
        return False

    def _expect(self, text: str) -> None:
        if not self._accept(text):
            found = self.current.text or "end of input"
            raise ExprSyntaxError(f"expected {text!r}, found {found!r}", self.current.offset)

    def parse(self) -> Expr:
        node = self._expr()
        if self.current.kind != "end":
            raise ExprSyntaxError(
                f"unexpected token {self.current.text!r}", self.current.offset
            )
        return node

    def _expr(self) -> Expr:
        node = self._term()
        while self.current.kind == "op" and self.current.text in "+-":
            op = self._advance().text
            node = BinOp(op, node, self._term())
        return node

    def _term(self) -> Expr:
        node = self._unary()
        while self.current.kind == "op" and self.current.text in "*/":
            op = self._advance().text
            node = BinOp(op, node, self._unary())
        return node

    def _unary(self) -> Expr:
        if self._accept("-"):
            return Neg(self._unary())
        return self._power()

    def _power(self) -> Expr:
        base = self._atom()
        if not self._accept("^"):
            return base
        sign = -1 if self._accept("-") else 1
        token = self.current
        if token.kind != "number" or not _INTEGER_RX.fullmatch(token.text):
            raise ExprSyntaxError("integer exponent expected", token.offset)
        self._advance()
        return Pow(base, sign * int(token.text))

    def _atom(self) -> Expr:
        token = self.current
        if token.kind == "number":
            value = float(token.text)
            if not math.isfinite(value):
                raise ExprSyntaxError(f"number {token.text!r} is out of range", token.offset)
            self._advance()
            return Const(value)
        if token.kind == "name":
            self._advance()
            if token.text in _FUNCTIONS:
                self._expect("(")
                inner = self._expr()
                self._expect(")")
                return Sqrt(inner)
            if token.text in self.coordinates:
                return Var(token.text, self.coordinates[token.text])
            if token.text in self.parameters:
                return Param(token.text, float(self.parameters[token.text]))
            raise UnknownSymbolError(token.text, token.offset)
        if self._accept("("):
            inner = self._expr()
            self._expect(")")
            return inner
        found = token.text or "end of input"
        raise ExprSyntaxError(f"unexpected {found!r}", token.offset)


def parse(
    text: str,
    coordinates: Sequence[str],
    parameters: Mapping[str, float] | None = None,
) -> Expr:
    """Parse *text* over the given coordinate names."""
    return _Parser(text, coordinates, parameters or {}).parse()


def pretty(e: Expr) -> str:
    """Canonical text of *e*; ``pretty(parse(pretty(e))) == pretty(e)``."""
    return e.format()


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------


def evaluate(e: Expr, point: Sequence[float]) -> float:
    """Evaluate *e* at *point*; raises :class:`ExprDomainError` off-domain."""
    return float(e.evaluate([float(c) for c in point]))


def evaluate_dual(
    e: Expr,
    point: Sequence[Scalar],
    seeds: np.ndarray | None = None,
) -> DualScalar:
    """Evaluate *e* on dual numbers.

    *point* may already hold :class:`DualScalar` coordinates (for example the
    image of a hypersurface point); otherwise coordinate ``i`` is seeded with
    row ``i`` of *seeds*, the identity when omitted.  A single seed direction
    is passed as a column, ``seeds=v[:, None]``.
    """
    if point and isinstance(point[0], DualScalar):
        duals = list(point)
        width = duals[0].partials.shape[0]
    else:
        coords = np.asarray(point, dtype=float)
        rows = np.eye(len(coords)) if seeds is None else np.asarray(seeds, dtype=float)
        duals = [DualScalar(c, rows[i]) for i, c in enumerate(coords)]
        width = rows.shape[1] if rows.ndim == 2 else 0
    result = e.evaluate(duals)
    if isinstance(result, DualScalar):
        return result
    return DualScalar(float(result), np.zeros(width))
