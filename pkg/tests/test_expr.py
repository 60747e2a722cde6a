import math

import pytest
from hypothesis import given, settings, strategies as st

from utils.error_handler import ArityError, ExprSyntaxError, UnknownIdentifierError
from utils.expr import ScalarExpr, expr_sum, parse_expr
from utils.jet import evaluate

XY = ("x", "y")


class TestParsing:
    def test_evaluates_mixed_expression(self):
        e = parse_expr("t^2 * sin(x)", ["x", "t"])
        assert evaluate(e, (0.5, 2.0)) == pytest.approx(4.0 * math.sin(0.5))

    @pytest.mark.parametrize(
        "source, expected",
        [
            ("-2^2", -4.0),
            ("2^3^2", 512.0),
            ("2**3", 8.0),
            ("pow(2, 5)", 32.0),
            ("1 - 2 - 3", -4.0),
            ("8 / 4 / 2", 1.0),
            ("2 * (3 + 4)", 14.0),
            ("+3", 3.0),
            ("1.5e1", 15.0),
            (".5", 0.5),
        ],
    )
    def test_precedence_and_associativity(self, source, expected):
        assert evaluate(parse_expr(source, XY), (0.0, 0.0)) == pytest.approx(expected)

    def test_functions(self):
        e = parse_expr("exp(x) + log(y) + sqrt(y) + cos(x)", XY)
        assert evaluate(e, (0.3, 4.0)) == pytest.approx(math.exp(0.3) + math.log(4.0) + 2.0 + math.cos(0.3))

    def test_dangling_operator_reports_offset(self):
        with pytest.raises(ExprSyntaxError) as exc:
            parse_expr("x + ", XY)
        assert exc.value.offset == 4

    def test_unknown_identifier(self):
        with pytest.raises(UnknownIdentifierError) as exc:
            parse_expr("x + q", XY)
        assert exc.value.offset == 4

    @pytest.mark.parametrize("source, offset", [("x +\u00a0q", 5), ("x + y + \u00e9", 8), ("\u00a0\u00a0x +", 7)])
    def test_offsets_count_utf8_bytes(self, source, offset):
        with pytest.raises(ExprSyntaxError) as exc:
            parse_expr(source, XY)
        assert exc.value.offset == offset

    @pytest.mark.parametrize("source", ["sin(x, y)", "pow(x)"])
    def test_arity(self, source):
        with pytest.raises(ArityError):
            parse_expr(source, XY)

    @pytest.mark.parametrize("source", ["", "   ", "sin", "x(1)", "(x", "x y", "x $ y"])
    def test_malformed(self, source):
        with pytest.raises(ExprSyntaxError):
            parse_expr(source, XY)


class TestConstruction:
    def test_literal_folding(self):
        x = ScalarExpr.coordinate("x", XY)
        assert (x * 0).is_zero()
        assert (x + 0).node == x.node
        assert (x * 1).node == x.node
        assert (ScalarExpr.constant(2.0, XY) * 3).constant_value() == 6.0

    def test_constant_value_of_parsed_tree(self):
        assert parse_expr("2 * 3 + 1", XY).constant_value() == 7.0
        assert parse_expr("2 * x", XY).constant_value() is None

    def test_mismatched_charts(self):
        with pytest.raises(ValueError):
            ScalarExpr.coordinate("x", XY) + ScalarExpr.coordinate("x", ("x",))

    def test_rebind_to_product_chart(self):
        e = parse_expr("x^2", ("x",)).rebind(("x", "t"))
        assert evaluate(e, (3.0, 7.0)) == pytest.approx(9.0)

    def test_undeclared_coordinate(self):
        with pytest.raises(ValueError):
            parse_expr("x", XY).rebind(("t",))

    def test_expr_sum_of_nothing_is_zero(self):
        assert expr_sum([], XY).is_zero()


SOURCES = [
    "x^2 * y - 3 * x",
    "-(x - y) / (2 + y^2)",
    "sin(x) * exp(-y) + cos(x * y)",
    "pow(1 + x^2, 0.5) - sqrt(1 + y^2)",
    "-x^-2 + 1 / (1 + x^2)",
    "0.1 * x - 1e-3 * y",
]


class TestRendering:
    @pytest.mark.parametrize("source", SOURCES)
    @settings(max_examples=25, derandomize=True, deadline=None)
    @given(
        x=st.floats(min_value=0.2, max_value=3.0),
        y=st.floats(min_value=-2.0, max_value=2.0),
    )
    def test_rendered_text_parses_to_same_function(self, source, x, y):
        e = parse_expr(source, XY)
        again = parse_expr(e.to_source(), XY)
        assert evaluate(again, (x, y)) == pytest.approx(evaluate(e, (x, y)), rel=1e-14, abs=1e-14)

    def test_constants_render_shortest(self):
        assert ScalarExpr.constant(1.0, XY).to_source() == "1"
        assert ScalarExpr.constant(0.1, XY).to_source() == "0.1"
