import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tools.tensor import (
    POSITIVE_SEMIDEFINITE,
    Connection,
    MetricField,
    OneFormField,
    Tensor02,
    VectorField,
    check_definiteness,
    check_flat_torsion_free,
    check_metric_compatibility,
    christoffel,
    covariant_derivative_oneform,
    covariant_derivative_vector,
    dual_norm_squared,
    expression_inverse,
    exterior_derivative_oneform,
    flat_hessian,
    interior_product,
    inverse_metric,
    lie_bracket,
    lie_derivative_metric,
    lie_derivative_metric_frame,
    metric_at,
    riemann_tensor,
    torsion,
)
from utils.chart import ChartDomain
from utils.error_handler import ChartDomainError, SingularMetricError
from utils.expr import parse_expr
from utils.jet import eval_jet, evaluate


@pytest.fixture
def polar_plane():
    return ChartDomain(("r", "theta"), {"r": (0.0, None)}, {"r": (0.5, 2.0)})


@pytest.fixture
def sphere():
    chart = ChartDomain(("theta", "phi"), {"theta": (0.0, math.pi)}, {"theta": (0.3, 2.8)})
    return MetricField.parse(chart, [["1", "0"], ["0", "sin(theta)^2"]])


class TestMetricField:
    def test_inverse_of_constant_metric(self):
        inverse = inverse_metric(Tensor02(np.array([[2.0, 1.0], [1.0, 1.0]])))
        np.testing.assert_allclose(inverse.values, [[1.0, -1.0], [-1.0, 2.0]])

    def test_singular_metric(self):
        with pytest.raises(SingularMetricError):
            inverse_metric(Tensor02(np.array([[1.0, 1.0], [1.0, 1.0]])))

    def test_near_singular_indefinite_metric(self):
        with pytest.raises(SingularMetricError):
            inverse_metric(Tensor02(np.diag([-1.0, 1e-15, 1.0])))

    def test_components_must_be_symmetric(self, plane):
        with pytest.raises(ValueError):
            MetricField.parse(plane, [["1", "x"], ["y", "1"]])

    def test_from_upper_mirrors(self, plane):
        g = MetricField.from_upper(plane, {(0, 0): parse_expr("2", plane.coords), (0, 1): parse_expr("x", plane.coords),
                                           (1, 1): parse_expr("3", plane.coords)})
        np.testing.assert_allclose(metric_at(g, (0.5, 0.0)).values, [[2.0, 0.5], [0.5, 3.0]])

    def test_metric_outside_chart(self, polar_plane):
        g = MetricField.parse(polar_plane, [["1", "0"], ["0", "r^2"]])
        with pytest.raises(ChartDomainError):
            metric_at(g, (-1.0, 0.0))

    def test_expression_inverse(self, plane):
        g = MetricField.parse(plane, [["2", "1"], ["1", "1 + x^2"]])
        inverse = expression_inverse(g.comp)
        point = (0.7, 0.0)
        expected = np.linalg.inv(metric_at(g, point).values)
        actual = [[evaluate(e, point) for e in row] for row in inverse]
        np.testing.assert_allclose(actual, expected)

    def test_dual_norm(self, plane):
        g = MetricField.parse(plane, [["4", "0"], ["0", "1"]])
        assert evaluate(dual_norm_squared(g, OneFormField.parse(plane, ["2", "3"])), (0.0, 0.0)) == pytest.approx(10.0)
        assert dual_norm_squared(g, OneFormField.zero(plane)).is_zero()

    def test_definiteness_check(self, plane):
        samples = plane.sample_points(8, 1)
        assert check_definiteness(MetricField.euclidean(plane), samples).verdict
        indefinite = MetricField.parse(plane, [["1", "0"], ["0", "-1"]])
        assert not check_definiteness(indefinite, samples).verdict
        degenerate = MetricField.parse(plane, [["1", "0"], ["0", "0"]], POSITIVE_SEMIDEFINITE)
        report = check_definiteness(degenerate, samples)
        assert report.name == "positive_semidefinite" and report.verdict


class TestChristoffel:
    def test_polar_plane(self, polar_plane):
        g = MetricField.parse(polar_plane, [["1", "0"], ["0", "r^2"]])
        gamma = christoffel(g, (2.0, 0.3))
        assert gamma[0, 1, 1] == pytest.approx(-2.0, abs=1e-10)
        assert gamma[1, 0, 1] == pytest.approx(0.5, abs=1e-10)
        assert gamma[1, 1, 0] == pytest.approx(0.5, abs=1e-10)
        for index in [(0, 0, 0), (0, 0, 1), (1, 0, 0), (1, 1, 1)]:
            assert gamma[index] == pytest.approx(0.0, abs=1e-10)

    def test_conformal_metric(self, plane):
        g = MetricField.diagonal(plane, [parse_expr("exp(2 * x)", plane.coords)] * 2)
        gamma = christoffel(g, (0.3, -0.4))
        expected = np.zeros((2, 2, 2))
        expected[0, 0, 0] = 1.0
        expected[0, 1, 1] = -1.0
        expected[1, 0, 1] = expected[1, 1, 0] = 1.0
        np.testing.assert_allclose(gamma, expected, atol=1e-10)

    def test_levi_civita_is_compatible_and_torsion_free(self, sphere):
        c = Connection.levi_civita(sphere)
        samples = sphere.chart.sample_points(16, 42)
        assert check_metric_compatibility(c, sphere, samples, 1e-8).verdict
        assert max(np.max(np.abs(torsion(c, p))) for p in samples) <= 1e-12


class TestCurvature:
    def test_round_sphere(self, sphere):
        riemann = riemann_tensor(Connection.levi_civita(sphere), (1.0, 0.2))
        assert riemann[0, 1, 0, 1] == pytest.approx(math.sin(1.0) ** 2, abs=1e-10)
        assert riemann[0, 1, 1, 0] == pytest.approx(-math.sin(1.0) ** 2, abs=1e-10)

    def test_flat_connections(self, right_half_plane, polar_plane):
        samples = right_half_plane.sample_points(8, 42)
        torsion_free, flat = check_flat_torsion_free(Connection.cartesian_flat(right_half_plane), samples, 1e-8)
        assert torsion_free.verdict and flat.verdict

        polar = Connection.levi_civita(MetricField.parse(polar_plane, [["1", "0"], ["0", "r^2"]]))
        torsion_free, flat = check_flat_torsion_free(polar, polar_plane.sample_points(8, 42), 1e-8)
        assert torsion_free.verdict and flat.verdict

    def test_sphere_is_curved(self, sphere):
        _, flat = check_flat_torsion_free(Connection.levi_civita(sphere), sphere.chart.sample_points(8, 42), 1e-8)
        assert not flat.verdict
        assert flat.max_residual > 0.1

    def test_torsion_of_asymmetric_table(self, plane):
        c = Connection.explicit(plane, {(0, 0, 1): parse_expr("1", plane.coords)}, mirror=False, symmetric_claim=False)
        t = torsion(c, (0.0, 0.0))
        assert t[0, 0, 1] == pytest.approx(1.0)
        assert t[0, 1, 0] == pytest.approx(-1.0)


class TestLieDerivatives:
    def test_lie_bracket(self, plane):
        x_dy = VectorField.parse(plane, ["0", "x"])
        y_dx = VectorField.parse(plane, ["y", "0"])
        np.testing.assert_allclose(lie_bracket(x_dy, y_dx, (1.0, 1.0)), [1.0, -1.0])

    def test_euler_field_scales_flat_metric(self, plane):
        g = MetricField.euclidean(plane)
        lie = lie_derivative_metric(VectorField.euler(plane), g, (0.3, -0.8))
        np.testing.assert_allclose(lie.values, 2.0 * np.eye(2))

    @settings(max_examples=25, derandomize=True, deadline=None)
    @given(
        x=st.floats(min_value=-1.0, max_value=1.0),
        y=st.floats(min_value=-1.0, max_value=1.0),
    )
    def test_frame_formula_matches_coordinate_formula(self, x, y):
        chart = ChartDomain(("x", "y"))
        g = MetricField.parse(chart, [["2 + sin(x)", "x * y"], ["x * y", "3 + y^2"]])
        v = VectorField.parse(chart, ["x^2 - y", "cos(x * y)"])
        coordinate = lie_derivative_metric(v, g, (x, y)).values
        frame = lie_derivative_metric_frame(v, g, (x, y)).values
        np.testing.assert_allclose(frame, coordinate, atol=1e-10)

    def test_exterior_derivative(self, plane):
        w = OneFormField.parse(plane, ["-y", "0"])
        dw = exterior_derivative_oneform(w, (0.2, 0.4)).values
        assert dw[0, 1] == pytest.approx(1.0)
        assert dw[1, 0] == pytest.approx(-1.0)


class TestCovariantDerivatives:
    @pytest.fixture
    def polar(self, polar_plane):
        return MetricField.parse(polar_plane, [["1", "0"], ["0", "r^2"]])

    def test_radial_field_is_parallel_identity(self, polar):
        c = Connection.levi_civita(polar)
        radial = VectorField.parse(polar.chart, ["r", "0"])
        np.testing.assert_allclose(covariant_derivative_vector(c, radial, (1.3, 0.4)), np.eye(2), atol=1e-12)

    def test_hessian_of_half_squared_radius(self, polar):
        c = Connection.levi_civita(polar)
        point = (1.3, 0.4)
        phi = parse_expr("r^2 / 2", polar.chart.coords)
        expected = metric_at(polar, point).values
        np.testing.assert_allclose(flat_hessian(c, phi, point).values, expected, atol=1e-12)

        w = OneFormField.parse(polar.chart, ["r", "0"])
        np.testing.assert_allclose(covariant_derivative_oneform(c, w, point).values, expected, atol=1e-12)

    def test_interior_product(self, polar):
        theta = interior_product(VectorField.parse(polar.chart, ["r", "1"]), polar)
        assert [evaluate(e, (2.0, 0.3)) for e in theta.comp] == pytest.approx([2.0, 4.0])

    def test_flat_hessian_of_radius(self, plane):
        phi = parse_expr("sqrt(x^2 + y^2)", plane.coords)
        hess = flat_hessian(Connection.cartesian_flat(plane), phi, (1.0, 0.0)).values
        np.testing.assert_allclose(hess, [[0.0, 0.0], [0.0, 1.0]], atol=1e-12)


EXACT_FORMS = [
    ("sin(x) * y^2 + exp(x * y)", ["cos(x) * y^2 + y * exp(x * y)", "2 * y * sin(x) + x * exp(x * y)"]),
    ("log(2 + x^2) * cos(y)", ["2 * x / (2 + x^2) * cos(y)", "-log(2 + x^2) * sin(y)"]),
    ("x^3 * y - y / (1 + x^2)", ["3 * x^2 * y + 2 * x * y / (1 + x^2)^2", "x^3 - 1 / (1 + x^2)"]),
]


class TestExteriorCalculus:
    @pytest.mark.parametrize("potential, differential", EXACT_FORMS)
    @settings(max_examples=15, derandomize=True, deadline=None)
    @given(
        x=st.floats(min_value=-1.0, max_value=1.0),
        y=st.floats(min_value=-1.0, max_value=1.0),
    )
    def test_exterior_derivative_of_exact_form_vanishes(self, potential, differential, x, y):
        chart = ChartDomain(("x", "y"))
        df = OneFormField.parse(chart, differential)
        gradient = eval_jet(parse_expr(potential, chart.coords), (x, y), 1).first
        np.testing.assert_allclose([evaluate(e, (x, y)) for e in df.comp], gradient, atol=1e-10)
        assert np.max(np.abs(exterior_derivative_oneform(df, (x, y)).values)) <= 1e-8

    @settings(max_examples=30, derandomize=True, deadline=None)
    @given(
        coefficients=st.lists(st.floats(min_value=-2.0, max_value=2.0), min_size=4, max_size=4),
        theta=st.floats(min_value=0.3, max_value=2.8),
        phi=st.floats(min_value=-3.0, max_value=3.0),
    )
    def test_alternated_covariant_derivative_is_exterior_derivative(self, coefficients, theta, phi):
        chart = ChartDomain(("theta", "phi"), {"theta": (0.0, math.pi)}, {"theta": (0.3, 2.8)})
        sphere = MetricField.parse(chart, [["1", "0"], ["0", "sin(theta)^2"]])
        a, b, c, d = (f"({v:.6f})" for v in coefficients)
        w = OneFormField.parse(chart, [f"{a} * sin(phi) + {b} * theta^2", f"{c} * cos(theta) * phi + {d} * theta * phi"])
        nabla_w = covariant_derivative_oneform(Connection.levi_civita(sphere), w, (theta, phi)).values
        dw = exterior_derivative_oneform(w, (theta, phi)).values
        np.testing.assert_allclose(nabla_w - nabla_w.T, dw, atol=1e-8)
