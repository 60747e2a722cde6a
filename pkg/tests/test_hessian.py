import numpy as np
import pytest

from catalog.entries import angle_cone, exact_alpha_cone, polar_connection, round_cone_polar
from tools.hessian import (
    ExtensiveMetric,
    HessianData,
    RadiantStructure,
    check_closed_theta_hessian,
    check_cone_potential,
    check_extensive,
    check_hessian_potential,
    check_radiant,
    check_radiant_hessian_identity,
    extensive_from_cone,
    extensive_from_conical,
    riemannian_cone_metric,
)
from tools.cone import cone_vector_field
from tools.tensor import POSITIVE_SEMIDEFINITE, Connection, MetricField, VectorField, metric_at
from utils.error_handler import ConstructionError, ExprDomainError
from utils.expr import ScalarExpr, parse_expr

TOL = 1e-8


class TestRadiant:
    def test_euler_field_on_flat_plane(self, right_half_plane):
        structure = RadiantStructure(Connection.cartesian_flat(right_half_plane), VectorField.euler(right_half_plane))
        reports = structure.check(right_half_plane.sample_points(12, 42), TOL)
        assert [r.name for r in reports] == ["torsion_free", "flat", "radiant"]
        assert all(r.verdict for r in reports)

    def test_radial_field_in_polar_coordinates(self, polar_chart):
        structure = RadiantStructure(polar_connection(polar_chart), cone_vector_field(polar_chart))
        assert all(r.verdict for r in structure.check(polar_chart.sample_points(12, 42), TOL))

    def test_shear_field_is_not_radiant(self, plane):
        report = check_radiant(Connection.cartesian_flat(plane), VectorField.parse(plane, ["y", "0"]), plane.sample_points(8, 42), TOL)
        assert not report.verdict
        assert report.max_residual == pytest.approx(1.0)


class TestHessianMetrics:
    def test_flat_potential(self, right_half_plane):
        data = HessianData(
            Connection.cartesian_flat(right_half_plane),
            parse_expr("(x^2 + y^2) / 2", right_half_plane.coords),
            MetricField.euclidean(right_half_plane),
        )
        assert data.check(right_half_plane.sample_points(12, 42), TOL).verdict

    def test_wrong_potential(self, right_half_plane):
        report = check_hessian_potential(
            Connection.cartesian_flat(right_half_plane),
            parse_expr("x^2 + y^2", right_half_plane.coords),
            MetricField.euclidean(right_half_plane),
            right_half_plane.sample_points(12, 42),
            TOL,
        )
        assert report.max_residual == pytest.approx(1.0)

    def test_closed_theta_fails_off_radiant(self, plane):
        report = check_closed_theta_hessian(
            Connection.cartesian_flat(plane),
            parse_expr("x^2", plane.coords),
            VectorField.parse(plane, ["y", "0"]),
            plane.sample_points(8, 42),
            TOL,
        )
        assert report.max_residual == pytest.approx(2.0)

    @pytest.mark.parametrize("source", ["x^3 * y - y^4 + x * y^2", "exp(x) * cos(y)", "log(x) + x * y^3"])
    def test_radiant_identities_hold_for_any_potential(self, right_half_plane, source):
        c = Connection.cartesian_flat(right_half_plane)
        xi = VectorField.euler(right_half_plane)
        phi = parse_expr(source, right_half_plane.coords)
        samples = right_half_plane.sample_points(12, 42)
        assert check_closed_theta_hessian(c, phi, xi, samples, TOL).verdict
        assert check_radiant_hessian_identity(c, phi, xi, samples, TOL).verdict

    def test_radiant_identities_in_polar_coordinates(self, polar_chart):
        c = polar_connection(polar_chart)
        xi = cone_vector_field(polar_chart)
        phi = parse_expr("t^3 * sin(theta) + t * theta^2", polar_chart.coords)
        samples = polar_chart.sample_points(12, 42)
        assert check_closed_theta_hessian(c, phi, xi, samples, TOL).verdict
        assert check_radiant_hessian_identity(c, phi, xi, samples, TOL).verdict


class TestHessianCones:
    @pytest.mark.parametrize("entry", [round_cone_polar(), angle_cone(0.5), angle_cone(2.0)], ids=lambda e: e.id)
    def test_cone_potential(self, entry, fast_config):
        spec = entry.spec
        report = check_cone_potential(spec.cone.g_m, spec.connection, spec.samples(fast_config), TOL)
        assert report.verdict

    def test_riemannian_cone_metric(self):
        spec = round_cone_polar().spec
        g = riemannian_cone_metric(spec.cone.g_m, spec.connection)
        np.testing.assert_allclose(metric_at(g, (0.4, 1.5)).values, metric_at(spec.metric, (0.4, 1.5)).values)

    def test_cone_potential_needs_product_chart(self, fast_config):
        spec = round_cone_polar().spec
        with pytest.raises(ValueError):
            check_cone_potential(spec.cone.g_m, spec.connection, spec.samples(fast_config), TOL, t_name="s")


class TestExtensive:
    def test_from_cone_is_t_times_base_metric(self, fast_config):
        spec = round_cone_polar().spec
        samples = spec.samples(fast_config)
        extensive, reports = extensive_from_cone(spec.cone.g_m, spec.connection, samples, TOL)
        assert all(r.verdict for r in reports)
        assert {r.name for r in reports} >= {"extensive_hessian_match", "extensive_kernel", "extensive_corank_one"}
        np.testing.assert_allclose(metric_at(extensive.metric, (0.4, 1.5)).values, [[1.5, 0.0], [0.0, 0.0]])

    def test_from_conical_matches_from_cone(self, fast_config):
        spec = angle_cone(2.0).spec
        samples = spec.samples(fast_config)
        from_cone, _ = extensive_from_cone(spec.cone.g_m, spec.connection, samples, TOL)
        projected = extensive_from_conical(spec.metric, spec.xi, samples, TOL)
        for p in samples:
            np.testing.assert_allclose(
                metric_at(projected.metric, p).values, metric_at(from_cone.metric, p).values, atol=1e-8
            )

    def test_check_extensive_with_linear_potential(self, fast_config):
        spec = round_cone_polar().spec
        samples = spec.samples(fast_config)
        extensive, _ = extensive_from_cone(spec.cone.g_m, spec.connection, samples, TOL)
        t = ScalarExpr.coordinate("t", spec.chart.coords)
        result = check_extensive(extensive, spec.connection, t, samples, TOL)
        assert result.passed
        assert [r.name for r in result.reports][-1] == "extensive_potential_homogeneous"

    def test_from_cone_rejects_non_hessian_connection(self, fast_config):
        spec = round_cone_polar().spec
        with pytest.raises(ConstructionError) as exc:
            extensive_from_cone(spec.cone.g_m, Connection.cartesian_flat(spec.chart), spec.samples(fast_config), TOL)
        assert exc.value.check == "extensive_hessian_match"

    def test_from_conical_requires_conical_input(self, fast_config):
        spec = exact_alpha_cone().spec
        extensive_from_conical(spec.metric, spec.xi, spec.samples(fast_config), TOL)

        warped = MetricField.parse(spec.chart, [
            ["t^2", "0", "0", "0"],
            ["0", "t^2", "0", "0"],
            ["0", "0", "t^2", "0"],
            ["0", "0", "0", "2 + sin(x)"],
        ])
        with pytest.raises(ConstructionError):
            extensive_from_conical(warped, spec.xi, spec.samples(fast_config), TOL)

    def test_vanishing_field(self, plane):
        zero = VectorField.parse(plane, ["0", "0"])
        with pytest.raises(ExprDomainError):
            extensive_from_conical(MetricField.euclidean(plane), zero, plane.sample_points(4, 42), TOL, require_conical=False)

    def test_extensive_metric_must_be_semidefinite(self, plane):
        with pytest.raises(ValueError):
            ExtensiveMetric(MetricField.euclidean(plane), VectorField.euler(plane))

    def test_kernel_violation(self, plane):
        e = ExtensiveMetric(MetricField.parse(plane, [["1", "0"], ["0", "0"]], POSITIVE_SEMIDEFINITE), VectorField.euler(plane))
        result = check_extensive(e, Connection.cartesian_flat(plane), None, plane.sample_points(8, 42), TOL)
        assert not result.kernel.verdict
        assert result.semidefinite.verdict
