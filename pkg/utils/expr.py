# utils/expr.py
"""
Closed-form scalar expressions in named chart coordinates.

Grammar (precedence high to low, ``^`` right-associative, the rest
left-associative):

    atom    := NUMBER | COORD | FUNC '(' expr [',' expr] ')' | '(' expr ')'
    power   := atom ['^' unary]
    unary   := ('-' | '+') unary | power
    term    := unary (('*' | '/') unary)*
    expr    := term (('+' | '-') term)*

Functions: sin, cos, exp, log, sqrt (one argument), pow (two arguments).

Usage:
    e = parse_expr("t^2 * sin(x)", ["x", "t"])
    f = e * 2 + ScalarExpr.constant(1.0, e.coords)
    f.to_source()
"""

import logging
import math
import re
from dataclasses import dataclass
from typing import FrozenSet, Iterator, List, Optional, Sequence, Tuple, Union

from utils.error_handler import ArityError, ExprSyntaxError, UnknownIdentifierError

logger = logging.getLogger(__name__)

FUNCTION_ARITY = {
    "sin": 1,
    "cos": 1,
    "exp": 1,
    "log": 1,
    "sqrt": 1,
    "pow": 2,
}


# ----------------------------------------------------------------------------
# AST nodes (immutable)
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class Const:
    value: float


@dataclass(frozen=True)
class Coord:
    name: str


@dataclass(frozen=True)
class Neg:
    arg: "Node"


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * /
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Pow:
    base: "Node"
    exponent: "Node"


@dataclass(frozen=True)
class Call:
    func: str  # one of sin cos exp log sqrt
    arg: "Node"


Node = Union[Const, Coord, Neg, BinOp, Pow, Call]


def node_coordinates(node: Node) -> FrozenSet[str]:
    """Names of all coordinates referenced by a subtree."""
    if isinstance(node, Coord):
        return frozenset((node.name,))
    if isinstance(node, Const):
        return frozenset()
    if isinstance(node, Neg):
        return node_coordinates(node.arg)
    if isinstance(node, Call):
        return node_coordinates(node.arg)
    if isinstance(node, Pow):
        return node_coordinates(node.base) | node_coordinates(node.exponent)
    return node_coordinates(node.left) | node_coordinates(node.right)


def constant_value(node: Node) -> Optional[float]:
    """Value of a coordinate-free subtree, or None when it depends on a coordinate."""
    if isinstance(node, Const):
        return node.value
    if node_coordinates(node):
        return None
    try:
        if isinstance(node, Neg):
            return -constant_value(node.arg)
        if isinstance(node, Call):
            x = constant_value(node.arg)
            return getattr(math, node.func)(x)
        if isinstance(node, Pow):
            return math.pow(constant_value(node.base), constant_value(node.exponent))
        a, b = constant_value(node.left), constant_value(node.right)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        return a / b
    except (ValueError, ZeroDivisionError, OverflowError):
        return None


# ----------------------------------------------------------------------------
# Construction with literal folding
# ----------------------------------------------------------------------------

def _is_const(node: Node, value: Optional[float] = None) -> bool:
    return isinstance(node, Const) and (value is None or node.value == value)


def make_neg(a: Node) -> Node:
    if isinstance(a, Const):
        return Const(-a.value)
    if isinstance(a, Neg):
        return a.arg
    return Neg(a)


def make_add(a: Node, b: Node) -> Node:
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value + b.value)
    if _is_const(a, 0.0):
        return b
    if _is_const(b, 0.0):
        return a
    return BinOp("+", a, b)


def make_sub(a: Node, b: Node) -> Node:
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value - b.value)
    if _is_const(b, 0.0):
        return a
    if _is_const(a, 0.0):
        return make_neg(b)
    return BinOp("-", a, b)


def make_mul(a: Node, b: Node) -> Node:
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value * b.value)
    if _is_const(a, 0.0) or _is_const(b, 0.0):
        return Const(0.0)
    if _is_const(a, 1.0):
        return b
    if _is_const(b, 1.0):
        return a
    if _is_const(a, -1.0):
        return make_neg(b)
    if _is_const(b, -1.0):
        return make_neg(a)
    return BinOp("*", a, b)


def make_div(a: Node, b: Node) -> Node:
    if isinstance(a, Const) and isinstance(b, Const) and b.value != 0.0:
        return Const(a.value / b.value)
    if _is_const(b, 1.0):
        return a
    if _is_const(a, 0.0) and not _is_const(b, 0.0):
        return Const(0.0)
    return BinOp("/", a, b)


def make_pow(a: Node, b: Node) -> Node:
    if _is_const(b, 1.0):
        return a
    if _is_const(b, 0.0):
        return Const(1.0)
    if isinstance(a, Const) and isinstance(b, Const):
        try:
            return Const(math.pow(a.value, b.value))
        except (ValueError, OverflowError, ZeroDivisionError):
            pass
    return Pow(a, b)


def make_call(func: str, a: Node) -> Node:
    if func not in FUNCTION_ARITY or func == "pow":
        raise ValueError(f"unknown unary function '{func}'")
    if isinstance(a, Const):
        try:
            return Const(getattr(math, func)(a.value))
        except (ValueError, OverflowError):
            pass
    return Call(func, a)


# ----------------------------------------------------------------------------
# Rendering
# ----------------------------------------------------------------------------

_PREC_ADD, _PREC_MUL, _PREC_UNARY, _PREC_POW, _PREC_ATOM = 1, 2, 3, 4, 5


def format_number(value: float) -> str:
    """Shortest round-trip text of a finite float."""
    if not math.isfinite(value):
        raise ValueError(f"cannot render non-finite constant {value}")
    if value.is_integer() and abs(value) < 1e15:
        return str(int(value))
    return repr(float(value))


def render_node(node: Node) -> str:
    return _render(node)[0]


def _render(node: Node) -> Tuple[str, int]:
    if isinstance(node, Const):
        text = format_number(node.value)
        return text, (_PREC_UNARY if node.value < 0 else _PREC_ATOM)
    if isinstance(node, Coord):
        return node.name, _PREC_ATOM
    if isinstance(node, Call):
        return f"{node.func}({_render(node.arg)[0]})", _PREC_ATOM
    if isinstance(node, Neg):
        text, prec = _render(node.arg)
        if prec < _PREC_UNARY or text.startswith("-"):
            text = f"({text})"
        return f"-{text}", _PREC_UNARY
    if isinstance(node, Pow):
        base, base_prec = _render(node.base)
        exponent, exp_prec = _render(node.exponent)
        if base_prec < _PREC_ATOM:
            base = f"({base})"
        if exp_prec < _PREC_UNARY:
            exponent = f"({exponent})"
        return f"{base}^{exponent}", _PREC_POW
    prec = _PREC_ADD if node.op in "+-" else _PREC_MUL
    left, left_prec = _render(node.left)
    right, right_prec = _render(node.right)
    if left_prec < prec:
        left = f"({left})"
    if right_prec <= prec:
        right = f"({right})"
    return f"{left} {node.op} {right}", prec


# ----------------------------------------------------------------------------
# ScalarExpr
# ----------------------------------------------------------------------------

Operand = Union["ScalarExpr", float, int]


@dataclass(frozen=True)
class ScalarExpr:
    """An immutable expression tree bound to a chart's coordinate list."""
    node: Node
    coords: Tuple[str, ...]
    source: Optional[str] = None

    def __post_init__(self):
        missing = node_coordinates(self.node) - set(self.coords)
        if missing:
            raise ValueError(f"expression references undeclared coordinates {sorted(missing)}")

    @classmethod
    def constant(cls, value: float, coords: Sequence[str]) -> "ScalarExpr":
        return cls(Const(float(value)), tuple(coords))

    @classmethod
    def coordinate(cls, name: str, coords: Sequence[str]) -> "ScalarExpr":
        return cls(Coord(name), tuple(coords))

    @property
    def dim(self) -> int:
        return len(self.coords)

    def is_constant(self) -> bool:
        return not node_coordinates(self.node)

    def is_zero(self) -> bool:
        return _is_const(self.node, 0.0)

    def constant_value(self) -> Optional[float]:
        return constant_value(self.node)

    def coordinates_used(self) -> FrozenSet[str]:
        return node_coordinates(self.node)

    def rebind(self, coords: Sequence[str]) -> "ScalarExpr":
        """The same tree on another chart (e.g. from M to M x R>0)."""
        return ScalarExpr(self.node, tuple(coords), self.source)

    def to_source(self) -> str:
        return _render(self.node)[0]

    def __str__(self) -> str:
        return self.source if self.source is not None else self.to_source()

    def _lift(self, other: Operand) -> Node:
        if isinstance(other, ScalarExpr):
            if other.coords != self.coords:
                raise ValueError(f"coordinate mismatch: {self.coords} vs {other.coords}")
            return other.node
        return Const(float(other))

    def _wrap(self, node: Node) -> "ScalarExpr":
        return ScalarExpr(node, self.coords)

    def __add__(self, other: Operand) -> "ScalarExpr":
        return self._wrap(make_add(self.node, self._lift(other)))

    def __radd__(self, other: Operand) -> "ScalarExpr":
        return self._wrap(make_add(self._lift(other), self.node))

    def __sub__(self, other: Operand) -> "ScalarExpr":
        return self._wrap(make_sub(self.node, self._lift(other)))

    def __rsub__(self, other: Operand) -> "ScalarExpr":
        return self._wrap(make_sub(self._lift(other), self.node))

    def __mul__(self, other: Operand) -> "ScalarExpr":
        return self._wrap(make_mul(self.node, self._lift(other)))

    def __rmul__(self, other: Operand) -> "ScalarExpr":
        return self._wrap(make_mul(self._lift(other), self.node))

    def __truediv__(self, other: Operand) -> "ScalarExpr":
        return self._wrap(make_div(self.node, self._lift(other)))

    def __rtruediv__(self, other: Operand) -> "ScalarExpr":
        return self._wrap(make_div(self._lift(other), self.node))

    def __pow__(self, other: Operand) -> "ScalarExpr":
        return self._wrap(make_pow(self.node, self._lift(other)))

    def __neg__(self) -> "ScalarExpr":
        return self._wrap(make_neg(self.node))

    def apply(self, func: str) -> "ScalarExpr":
        """Wrap in one of the unary functions (sin, cos, exp, log, sqrt)."""
        return self._wrap(make_call(func, self.node))


def expr_sum(terms: Sequence[ScalarExpr], coords: Sequence[str]) -> ScalarExpr:
    total = ScalarExpr.constant(0.0, coords)
    for term in terms:
        total = total + term
    return total


# ----------------------------------------------------------------------------
# Tokenizer and parser
# ----------------------------------------------------------------------------

_TOKEN_PATTERN = re.compile(
    r"\s*(?:"
    r"(?P<number>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>\*\*|[-+*/^(),])"
    r"|(?P<bad>\S)"
    r")"
)


@dataclass(frozen=True)
class Token:
    kind: str  # number, ident, op, end
    text: str
    offset: int


def _byte_offset(source: str, index: int) -> int:
    return len(source[:index].encode("utf-8"))


def tokenize(source: str) -> Iterator[Token]:
    """Tokens with UTF-8 byte offsets into `source`."""
    position = 0
    while position < len(source):
        match = _TOKEN_PATTERN.match(source, position)
        if match is None or match.end() == position:
            break
        position = match.end()
        kind = match.lastgroup
        if kind is None:
            break
        text = match.group(kind)
        offset = _byte_offset(source, match.start(kind))
        if kind == "bad":
            raise ExprSyntaxError(f"unexpected character '{text}'", offset, source)
        if text == "**":
            text = "^"
        yield Token(kind, text, offset)
    yield Token("end", "", _byte_offset(source, len(source)))


class _Parser:
    """Recursive-descent parser over the token stream."""

    def __init__(self, source: str, coords: Sequence[str]):
        self.source = source
        self.coords = set(coords)
        self.tokens: List[Token] = list(tokenize(source))
        self.index = 0

    @property
    def current(self) -> Token:
        return self.tokens[self.index]

    def advance(self) -> Token:
        token = self.tokens[self.index]
        if token.kind != "end":
            self.index += 1
        return token

    def error(self, message: str, token: Optional[Token] = None) -> ExprSyntaxError:
        token = token or self.current
        if token.kind == "end":
            message = f"{message}: unexpected end of input"
        else:
            message = f"{message}: unexpected '{token.text}'"
        return ExprSyntaxError(message, token.offset, self.source)

    def expect(self, text: str) -> Token:
        if self.current.kind == "op" and self.current.text == text:
            return self.advance()
        raise self.error(f"expected '{text}'")

    def parse(self) -> Node:
        node = self.expression()
        if self.current.kind != "end":
            raise self.error("expected operator")
        return node

    def expression(self) -> Node:
        node = self.term()
        while self.current.kind == "op" and self.current.text in "+-":
            op = self.advance().text
            right = self.term()
            node = BinOp(op, node, right)
        return node

    def term(self) -> Node:
        node = self.unary()
        while self.current.kind == "op" and self.current.text in "*/":
            op = self.advance().text
            right = self.unary()
            node = BinOp(op, node, right)
        return node

    def unary(self) -> Node:
        if self.current.kind == "op" and self.current.text == "-":
            self.advance()
            return Neg(self.unary())
        if self.current.kind == "op" and self.current.text == "+":
            self.advance()
            return self.unary()
        return self.power()

    def power(self) -> Node:
        base = self.atom()
        if self.current.kind == "op" and self.current.text == "^":
            self.advance()
            # right-associative: the exponent may itself be a power
            return Pow(base, self.unary())
        return base

    def atom(self) -> Node:
        token = self.current
        if token.kind == "number":
            self.advance()
            return Const(float(token.text))
        if token.kind == "ident":
            self.advance()
            is_call = self.current.kind == "op" and self.current.text == "("
            if is_call:
                return self.call(token)
            if token.text in self.coords:
                return Coord(token.text)
            if token.text in FUNCTION_ARITY:
                raise ExprSyntaxError(f"function '{token.text}' requires arguments", token.offset, self.source)
            raise UnknownIdentifierError(token.text, token.offset, self.source)
        if token.kind == "op" and token.text == "(":
            self.advance()
            node = self.expression()
            self.expect(")")
            return node
        raise self.error("expected a number, coordinate, function or '('")

    def call(self, name: Token) -> Node:
        if name.text not in FUNCTION_ARITY:
            if name.text in self.coords:
                raise ExprSyntaxError(f"coordinate '{name.text}' is not callable", name.offset, self.source)
            raise UnknownIdentifierError(name.text, name.offset, self.source)
        self.expect("(")
        args = [self.expression()]
        while self.current.kind == "op" and self.current.text == ",":
            self.advance()
            args.append(self.expression())
        self.expect(")")
        expected = FUNCTION_ARITY[name.text]
        if len(args) != expected:
            raise ArityError(name.text, expected, len(args), name.offset, self.source)
        if name.text == "pow":
            return Pow(args[0], args[1])
        return Call(name.text, args[0])


def parse_expr(source: str, coords: Sequence[str]) -> ScalarExpr:
    """
    Parse expression text over the given chart coordinates.

    Args:
        source: Expression text
        coords: Coordinate names of the owning chart

    Returns:
        Immutable ScalarExpr

    Raises:
        ExprSyntaxError: Malformed text (with byte offset)
        UnknownIdentifierError: Name that is neither a coordinate nor a function
        ArityError: Function called with the wrong number of arguments
    """
    if not isinstance(source, str) or not source.strip():
        raise ExprSyntaxError("empty expression", 0, source if isinstance(source, str) else "")
    node = _Parser(source, coords).parse()
    logger.debug(f"Parsed expression '{source}' over {list(coords)}")
    return ScalarExpr(node, tuple(coords), source)
