import numpy as np
import pytest

from catalog.entries import contact_cone, exact_alpha_cone, product_nonselfsimilar, round_cone_polar, warped_noncone
from config import CheckConfig
from tools.cone import (
    ConeMetricSpec,
    assemble_selfsimilar_metric,
    check_cone_criterion,
    check_conical,
    check_dilation_equivariance,
    check_selfsimilar,
    cone_chart,
    cone_vector_field,
    contact_selfsimilar_example,
    contact_volume,
    lemma_2_12_f,
    positivity_bound_f,
)
from tools.tensor import MetricField, OneFormField, metric_at
from utils.chart import ChartDomain
from utils.error_handler import ContactError, PositivityError
from utils.expr import ScalarExpr, parse_expr
from utils.jet import evaluate


def _samples(spec, config):
    return spec.samples(config)


class TestAssembly:
    def test_round_cone_components(self):
        spec = round_cone_polar().spec
        np.testing.assert_allclose(metric_at(spec.metric, (0.7, 1.5)).values, [[2.25, 0.0], [0.0, 1.0]])

    def test_off_diagonal_block_is_t_alpha(self, fast_config):
        base = ChartDomain(("x",))
        cone = ConeMetricSpec(base, MetricField.euclidean(base), OneFormField.parse(base, ["0.5"]), parse_expr("2", base.coords))
        g = assemble_selfsimilar_metric(cone, fast_config)
        np.testing.assert_allclose(metric_at(g, (0.2, 1.2)).values, [[1.44, 0.6], [0.6, 2.0]])

    def test_base_placement(self, fast_config):
        base = ChartDomain(("x",))
        cone = ConeMetricSpec(
            base, MetricField.euclidean(base), OneFormField.zero(base), parse_expr("3", base.coords), f_on_base=True
        )
        g = assemble_selfsimilar_metric(cone, fast_config)
        np.testing.assert_allclose(metric_at(g, (0.0, 2.0)).values, [[12.0, 0.0], [0.0, 1.0]])

    def test_positivity_violation(self, fast_config):
        base = ChartDomain(("x",))
        cone = ConeMetricSpec(base, MetricField.euclidean(base), OneFormField.parse(base, ["1"]), parse_expr("0.5", base.coords))
        with pytest.raises(PositivityError):
            assemble_selfsimilar_metric(cone, fast_config)

    def test_nonpositive_f(self, fast_config):
        base = ChartDomain(("x",))
        cone = ConeMetricSpec(base, MetricField.euclidean(base), OneFormField.zero(base), parse_expr("x", base.coords))
        with pytest.raises(PositivityError) as exc:
            assemble_selfsimilar_metric(cone, fast_config)
        assert exc.value.point is not None

    def test_cone_coordinate_clash(self):
        base = ChartDomain(("t",))
        with pytest.raises(ValueError):
            ConeMetricSpec(base, MetricField.euclidean(base), OneFormField.zero(base), ScalarExpr.constant(1.0, base.coords))


class TestSelfsimilarAndConical:
    def test_round_cone(self, fast_config):
        spec = round_cone_polar().spec
        samples = _samples(spec, fast_config)
        selfsimilar = check_selfsimilar(spec.metric, spec.xi, samples, fast_config.tol)
        assert selfsimilar.verdict
        conical = check_conical(spec.metric, spec.xi, samples, fast_config.tol, selfsimilar=selfsimilar)
        assert conical.passed and conical.consistent is True
        assert all(r.max_residual <= 1e-8 for r in conical.reports)

    def test_contact_cone_fails_all_four(self, fast_config):
        spec = contact_cone(fast_config).spec
        samples = _samples(spec, fast_config)
        assert check_selfsimilar(spec.metric, spec.xi, samples, fast_config.tol).verdict
        conical = check_conical(spec.metric, spec.xi, samples, fast_config.tol)
        assert not any(r.verdict for r in conical.reports)
        assert conical.consistent is True
        assert min(r.max_residual for r in conical.reports) >= 1e-2

    def test_product_is_not_selfsimilar(self, fast_config):
        spec = product_nonselfsimilar().spec
        samples = _samples(spec, fast_config)
        assert not check_selfsimilar(spec.metric, spec.xi, samples, fast_config.tol).verdict
        assert check_conical(spec.metric, spec.xi, samples, fast_config.tol).consistent is None

    @pytest.mark.parametrize("q", [0.5, 2.0, 7.0])
    def test_dilation(self, fast_config, q):
        cone = round_cone_polar().spec
        assert check_dilation_equivariance(cone.metric, q, _samples(cone, fast_config), fast_config.tol).verdict
        product = product_nonselfsimilar().spec
        assert not check_dilation_equivariance(product.metric, q, _samples(product, fast_config), fast_config.tol).verdict

    def test_dilation_factor_must_be_positive(self, fast_config):
        spec = round_cone_polar().spec
        with pytest.raises(ValueError):
            check_dilation_equivariance(spec.metric, 0.0, _samples(spec, fast_config), fast_config.tol)

    def test_vector_field(self, polar_chart):
        xi = cone_vector_field(polar_chart)
        assert [e.to_source() for e in xi.comp] == ["0", "t"]


class TestConeCriterion:
    def test_exact_alpha_passes(self, fast_config):
        cone = exact_alpha_cone().spec.cone
        base_samples = cone.base_chart.sample_points(fast_config.samples, fast_config.seed)
        assert check_cone_criterion(cone, base_samples, fast_config.tol).verdict

    def test_warped_fails(self, fast_config):
        cone = warped_noncone().spec.cone
        base_samples = cone.base_chart.sample_points(fast_config.samples, fast_config.seed)
        report = check_cone_criterion(cone, base_samples, fast_config.tol)
        assert not report.verdict

    def test_agrees_with_conical_conditions(self, fast_config):
        for entry in (exact_alpha_cone(), warped_noncone()):
            spec = entry.spec
            base_samples = spec.cone.base_chart.sample_points(fast_config.samples, fast_config.seed)
            criterion = check_cone_criterion(spec.cone, base_samples, fast_config.tol)
            conical = check_conical(spec.metric, spec.xi, _samples(spec, fast_config), fast_config.tol)
            assert criterion.verdict == conical.passed

    @pytest.mark.parametrize("alpha, conical", [("0.5 * cos(z)", True), ("-0.5 * cos(z)", False)])
    def test_criterion_sign_matches_conical_conditions(self, fast_config, alpha, conical):
        base = ChartDomain(("x", "y", "z"))
        cone = ConeMetricSpec(
            base, MetricField.euclidean(base), OneFormField.parse(base, ["0", "0", alpha]),
            parse_expr("2 + sin(z)", base.coords),
        )
        chart = cone_chart(cone)
        g = assemble_selfsimilar_metric(cone, fast_config)
        base_samples = base.sample_points(fast_config.samples, fast_config.seed)
        samples = chart.sample_points(fast_config.samples, fast_config.seed)
        criterion = check_cone_criterion(cone, base_samples, fast_config.tol)
        result = check_conical(g, cone_vector_field(chart), samples, fast_config.tol)
        assert criterion.verdict == conical
        assert result.passed == conical
        if not conical:
            assert criterion.max_residual > 1.0


class TestContact:
    def test_volume_of_standard_form(self, space):
        alpha = OneFormField.parse(space, ["-y", "0", "1"])
        for point in [(0.0, 0.0, 0.0), (0.3, -0.7, 2.0)]:
            assert contact_volume(alpha, point) == pytest.approx(1.0)

    def test_closed_form_has_zero_volume(self, space):
        assert contact_volume(OneFormField.parse(space, ["0", "0", "1"]), (0.1, 0.2, 0.3)) == 0.0

    def test_even_dimension(self, plane):
        with pytest.raises(ContactError):
            contact_volume(OneFormField.parse(plane, ["-y", "0"]), (0.0, 0.0))

    def test_example_rejects_non_contact_form(self, space, fast_config):
        with pytest.raises(ContactError) as exc:
            contact_selfsimilar_example(OneFormField.parse(space, ["0", "0", "1"]), MetricField.euclidean(space), 1.0, fast_config)
        assert exc.value.point is not None

    def test_example_is_selfsimilar_not_conical(self, space, fast_config):
        cone = contact_selfsimilar_example(
            OneFormField.parse(space, ["-y", "0", "1"]), MetricField.euclidean(space), 1.0, fast_config
        )
        assert cone.f_on_base
        g = assemble_selfsimilar_metric(cone, fast_config)
        chart = cone_chart(cone)
        xi = cone_vector_field(chart)
        samples = chart.sample_points(fast_config.samples, fast_config.seed)
        assert check_selfsimilar(g, xi, samples, fast_config.tol).verdict
        assert not check_conical(g, xi, samples, fast_config.tol).passed


class TestPositivityBound:
    def test_zero_alpha_gives_margin(self, space):
        f = lemma_2_12_f(MetricField.euclidean(space), OneFormField.zero(space), 1.0)
        assert f.constant_value() == 1.0

    def test_bound_exceeds_dual_norm(self, space):
        alpha = OneFormField.parse(space, ["-y", "0", "1"])
        f = positivity_bound_f(MetricField.euclidean(space), alpha, 0.25)
        assert evaluate(f, (0.0, 2.0, 0.0)) == pytest.approx(5.25)

    def test_margin_must_be_positive(self, space):
        with pytest.raises(ValueError):
            positivity_bound_f(MetricField.euclidean(space), OneFormField.zero(space), 0.0)

    def test_assembled_metric_is_positive(self, space):
        alpha = OneFormField.parse(space, ["-y", "0", "1"])
        f = positivity_bound_f(MetricField.euclidean(space), alpha, 0.5)
        cone = ConeMetricSpec(space, MetricField.euclidean(space), alpha, f)
        config = CheckConfig(samples=32, seed=5)
        g = assemble_selfsimilar_metric(cone, config)
        for point in cone_chart(cone).sample_points(32, 5):
            assert np.linalg.eigvalsh(metric_at(g, point).values)[0] > 0.0
