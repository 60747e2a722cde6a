# utils/jet.py
"""
Truncated Taylor jets (order <= 3) and forward-mode evaluation of ScalarExpr.

A Jet stores the value and the dense partial-derivative tensors
(first: d, second: d x d, third: d x d x d) of a scalar at a point. Products
follow the Leibniz rule and unary functions the chain rule up to third order,
so derivatives are exact to rounding.
"""

import itertools
import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from config import FD_STEP
from utils.error_handler import ChartDomainError, ExprDomainError
from utils.expr import BinOp, Call, Const, Coord, Neg, Node, Pow, ScalarExpr, constant_value, render_node

logger = logging.getLogger(__name__)

MAX_ORDER = 3


def _sym3(x: np.ndarray) -> np.ndarray:
    """x[i,j,k] + x[i,k,j] + x[j,k,i] for x symmetric in its first two slots."""
    return x + x.transpose(0, 2, 1) + x.transpose(2, 0, 1)


def _frozen(array: Optional[np.ndarray]) -> Optional[np.ndarray]:
    if array is not None:
        array.setflags(write=False)
    return array


@dataclass(frozen=True)
class Jet:
    """Value and partial derivatives up to `order` of a scalar at a point."""
    order: int
    value: float
    first: Optional[np.ndarray] = None
    second: Optional[np.ndarray] = None
    third: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.order not in range(MAX_ORDER + 1):
            raise ValueError(f"jet order must be in 0..{MAX_ORDER}, got {self.order}")
        for array in (self.first, self.second, self.third):
            _frozen(array)

    @property
    def dim(self) -> int:
        return 0 if self.first is None else self.first.shape[0]

    @classmethod
    def constant(cls, value: float, dim: int, order: int) -> "Jet":
        return cls(
            order,
            float(value),
            np.zeros(dim) if order >= 1 else None,
            np.zeros((dim, dim)) if order >= 2 else None,
            np.zeros((dim, dim, dim)) if order >= 3 else None,
        )

    @classmethod
    def variable(cls, value: float, index: int, dim: int, order: int) -> "Jet":
        jet = cls.constant(value, dim, order)
        if order >= 1:
            first = np.zeros(dim)
            first[index] = 1.0
            jet = cls(order, float(value), first, jet.second, jet.third)
        return jet

    def truncate(self, order: int) -> "Jet":
        order = min(order, self.order)
        return Jet(
            order,
            self.value,
            self.first if order >= 1 else None,
            self.second if order >= 2 else None,
            self.third if order >= 3 else None,
        )

    def derivative(self, multi_index: Sequence[int]) -> float:
        """Partial derivative for a multi-index given as coordinate positions."""
        k = len(multi_index)
        if k > self.order:
            raise ValueError(f"derivative of order {k} requested from a jet of order {self.order}")
        if k == 0:
            return self.value
        if k == 1:
            return float(self.first[multi_index[0]])
        if k == 2:
            return float(self.second[tuple(multi_index)])
        return float(self.third[tuple(multi_index)])

    # -- arithmetic ---------------------------------------------------------

    def _common(self, other: "Jet") -> Tuple["Jet", "Jet", int]:
        order = min(self.order, other.order)
        return self.truncate(order), other.truncate(order), order

    def __add__(self, other: "Jet") -> "Jet":
        a, b, order = self._common(other)
        return Jet(
            order,
            a.value + b.value,
            a.first + b.first if order >= 1 else None,
            a.second + b.second if order >= 2 else None,
            a.third + b.third if order >= 3 else None,
        )

    def __neg__(self) -> "Jet":
        return Jet(
            self.order,
            -self.value,
            -self.first if self.first is not None else None,
            -self.second if self.second is not None else None,
            -self.third if self.third is not None else None,
        )

    def __sub__(self, other: "Jet") -> "Jet":
        return self + (-other)

    def scale(self, c: float) -> "Jet":
        return Jet(
            self.order,
            c * self.value,
            c * self.first if self.first is not None else None,
            c * self.second if self.second is not None else None,
            c * self.third if self.third is not None else None,
        )

    def __mul__(self, other: "Jet") -> "Jet":
        a, b, order = self._common(other)
        first = second = third = None
        if order >= 1:
            first = a.first * b.value + a.value * b.first
        if order >= 2:
            cross = np.outer(a.first, b.first)
            second = a.second * b.value + cross + cross.T + a.value * b.second
        if order >= 3:
            third = (
                a.third * b.value
                + a.value * b.third
                + _sym3(np.multiply.outer(a.second, b.first))
                + _sym3(np.multiply.outer(b.second, a.first))
            )
        return Jet(order, a.value * b.value, first, second, third)

    def compose(self, f0: float, f1: float, f2: float, f3: float) -> "Jet":
        """Chain rule: jet of f(u) given f and its first three derivatives at u."""
        u = self
        first = second = third = None
        if u.order >= 1:
            first = f1 * u.first
        if u.order >= 2:
            second = f2 * np.outer(u.first, u.first) + f1 * u.second
        if u.order >= 3:
            g = u.first
            third = (
                f3 * np.einsum("i,j,k->ijk", g, g, g)
                + f2 * _sym3(np.multiply.outer(u.second, g))
                + f1 * u.third
            )
        return Jet(u.order, f0, first, second, third)

    def reciprocal(self) -> "Jet":
        u = self.value
        return self.compose(1.0 / u, -1.0 / u**2, 2.0 / u**3, -6.0 / u**4)

    def int_power(self, n: int) -> "Jet":
        """Exact integer power by repeated multiplication."""
        if n < 0:
            return self.int_power(-n).reciprocal()
        result = Jet.constant(1.0, self.dim, self.order)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def real_power(self, p: float) -> "Jet":
        u = self.value
        return self.compose(
            u**p,
            p * u ** (p - 1),
            p * (p - 1) * u ** (p - 2),
            p * (p - 1) * (p - 2) * u ** (p - 3),
        )


# ----------------------------------------------------------------------------
# Evaluation
# ----------------------------------------------------------------------------

class _JetEvaluator:
    """Walks an expression tree bottom-up producing jets."""

    def __init__(self, expr: ScalarExpr, point: Sequence[float], order: int):
        self.expr = expr
        self.point = tuple(float(x) for x in point)
        self.order = order
        self.dim = len(expr.coords)
        self.index = {name: i for i, name in enumerate(expr.coords)}

    def fail(self, message: str, node: Node) -> ExprDomainError:
        return ExprDomainError(message, render_node(node), self.point)

    def eval(self, node: Node) -> Jet:
        if isinstance(node, Const):
            return Jet.constant(node.value, self.dim, self.order)
        if isinstance(node, Coord):
            i = self.index[node.name]
            return Jet.variable(self.point[i], i, self.dim, self.order)
        if isinstance(node, Neg):
            return -self.eval(node.arg)
        if isinstance(node, BinOp):
            return self.binop(node)
        if isinstance(node, Pow):
            return self.power(node)
        return self.call(node)

    def binop(self, node: BinOp) -> Jet:
        a = self.eval(node.left)
        b = self.eval(node.right)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        if b.value == 0.0:
            raise self.fail("division by zero", node)
        return a * b.reciprocal()

    def power(self, node: Pow) -> Jet:
        base = self.eval(node.base)
        exponent = constant_value(node.exponent)
        if exponent is not None and float(exponent).is_integer():
            n = int(exponent)
            if n < 0 and base.value == 0.0:
                raise self.fail("division by zero (negative power of zero)", node)
            return base.int_power(n)
        if base.value <= 0.0:
            raise self.fail("non-integer power of a nonpositive base", node)
        if exponent is not None:
            return base.real_power(exponent)
        # variable exponent: b^e = exp(e log b)
        u = base.value
        log_base = base.compose(math.log(u), 1.0 / u, -1.0 / u**2, 2.0 / u**3)
        w = self.eval(node.exponent) * log_base
        ew = math.exp(w.value)
        return w.compose(ew, ew, ew, ew)

    def call(self, node: Call) -> Jet:
        u = self.eval(node.arg)
        x = u.value
        if node.func == "sin":
            s, c = math.sin(x), math.cos(x)
            return u.compose(s, c, -s, -c)
        if node.func == "cos":
            s, c = math.sin(x), math.cos(x)
            return u.compose(c, -s, -c, s)
        if node.func == "exp":
            e = math.exp(x)
            return u.compose(e, e, e, e)
        if node.func == "log":
            if x <= 0.0:
                raise self.fail("log of a nonpositive value", node)
            return u.compose(math.log(x), 1.0 / x, -1.0 / x**2, 2.0 / x**3)
        if node.func == "sqrt":
            if x <= 0.0:
                if x == 0.0 and self.order == 0:
                    return Jet.constant(0.0, self.dim, 0)
                raise self.fail("sqrt of a nonpositive value", node)
            r = math.sqrt(x)
            return u.compose(r, 0.5 / r, -0.25 / (r * x), 0.375 / (r * x * x))
        raise self.fail(f"unknown function '{node.func}'", node)


def eval_jet(expr: ScalarExpr, point: Sequence[float], order: int) -> Jet:
    """
    Value and partial derivatives of an expression at a point.

    Args:
        expr: Expression to evaluate
        point: Coordinates, in the order of expr.coords
        order: Highest derivative order (0..3)

    Returns:
        Jet of the requested order

    Raises:
        ExprDomainError: A partial function is undefined at the point
    """
    if order not in range(MAX_ORDER + 1):
        raise ValueError(f"jet order must be in 0..{MAX_ORDER}, got {order}")
    if len(point) != len(expr.coords):
        raise ValueError(f"point has {len(point)} coordinates, chart has {len(expr.coords)}")
    return _JetEvaluator(expr, point, order).eval(expr.node)


def evaluate(expr: ScalarExpr, point: Sequence[float]) -> float:
    return eval_jet(expr, point, 0).value


def finite_diff(
    expr: ScalarExpr,
    point: Sequence[float],
    multi_index: Sequence[int],
    h: float = FD_STEP,
    chart=None,
) -> float:
    """
    Central finite-difference approximation of a partial derivative.

    The stencil is the tensor product of one central difference per entry of
    the multi-index, i.e. sum over signs s of prod(s) f(p + h sum s_m e_{i_m}) / (2h)^k.

    Args:
        expr: Expression to differentiate
        point: Base point
        multi_index: Coordinate positions, e.g. (0,) or (0, 1)
        h: Step size
        chart: Optional ChartDomain every stencil point must lie in

    Raises:
        ChartDomainError: A stencil point leaves the chart
    """
    base = np.asarray(point, dtype=float)
    k = len(multi_index)
    if k == 0:
        return evaluate(expr, base)
    total = 0.0
    for signs in itertools.product((1.0, -1.0), repeat=k):
        shifted = base.copy()
        for sign, i in zip(signs, multi_index):
            shifted[i] += sign * h
        if chart is not None and not chart.contains(shifted):
            raise ChartDomainError("finite-difference stencil leaves the chart", shifted)
        total += math.prod(signs) * evaluate(expr, shifted)
    return total / (2.0 * h) ** k
