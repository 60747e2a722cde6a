# catalog/classifier.py
"""
Full classification of a manifold declaration.

Checks run in dependency order; each emits a StructureReport and the six
flags are derived from them:

    selfsimilar         Lie_xi g = 2g
    conical_riemannian  selfsimilar and the four conical conditions
    radiant             flat, torsion-free, nabla xi = Id
    conical_hessian     selfsimilar, radiant and g = Hess phi
    hessian_cone        conical_hessian with g = Hess(g(xi, xi) / 2)
    extensive_exists    the projected metric is a degenerate Hessian metric
                        with potential sqrt(g(xi, xi)), linear along xi
"""

import logging
from typing import Sequence, Tuple

from analytics.report import FLAG_NAMES, ClassificationReport
from catalog.manifold import ManifoldSpec
from config import DILATION_FACTORS, CheckConfig
from tools.cone import check_cone_criterion, check_conical, check_dilation_equivariance, check_selfsimilar
from tools.hessian import (
    ExtensiveMetric,
    check_closed_theta_hessian,
    check_cone_potential,
    check_extensive,
    check_hessian_potential,
    check_radiant,
    check_radiant_hessian_identity,
    extensive_from_conical,
)
from tools.tensor import check_definiteness, check_flat_torsion_free, interior_product
from utils.error_handler import ChartDomainError, CheckEvaluationError, ConstructionError, ExprDomainError
from utils.expr import ScalarExpr, expr_sum

logger = logging.getLogger(__name__)

Points = Sequence[Tuple[float, ...]]


def squared_norm(spec: ManifoldSpec) -> ScalarExpr:
    """g(xi, xi) as an expression."""
    theta = interior_product(spec.xi, spec.metric)
    return expr_sum([spec.xi.comp[i] * theta.comp[i] for i in range(spec.chart.dim)], spec.chart.coords)


def is_plain_cone(spec: ManifoldSpec) -> bool:
    """Assembled from (g_M, 0, 1) in the normal form, i.e. t^2 g_M + dt^2."""
    cone = spec.cone
    return (
        cone is not None
        and not cone.f_on_base
        and cone.alpha.is_zero()
        and cone.f.constant_value() == 1.0
    )


def _radiant_reports(spec: ManifoldSpec, report: ClassificationReport, samples: Points, config: CheckConfig) -> bool:
    c = spec.connection
    torsion, flat = check_flat_torsion_free(c, samples, config.tol, config.workers)
    radiant = check_radiant(c, spec.xi, samples, config.tol, config.workers)
    for r in (torsion, flat, radiant):
        report.add(r)
    return torsion.verdict and flat.verdict and radiant.verdict


def _dilation_reports(spec: ManifoldSpec, report: ClassificationReport, samples: Points, config: CheckConfig) -> None:
    for q in DILATION_FACTORS:
        try:
            report.add(
                check_dilation_equivariance(
                    spec.metric, q, samples, config.tol, spec.scaled_coordinates, config.workers
                )
            )
        except CheckEvaluationError as exc:
            if not isinstance(exc.cause, ChartDomainError):
                raise
            report.notes.append(f"dilation by {q:g} skipped: {exc.cause}")


def _classify_degenerate(
    spec: ManifoldSpec, report: ClassificationReport, samples: Points, config: CheckConfig, flags: dict
) -> None:
    report.notes.append("degenerate metric: checks that need an inverse metric were skipped")
    radiant = False
    if spec.connection is not None:
        radiant = _radiant_reports(spec, report, samples, config)
    flags["radiant"] = radiant
    if spec.connection is None:
        report.notes.append("no connection declared: extensive structure cannot be confirmed")
    potential = spec.potential if spec.connection is not None else None
    extensive = check_extensive(
        ExtensiveMetric(spec.metric, spec.xi), spec.connection, potential, samples, config.tol, config.workers
    )
    for r in extensive.reports:
        report.add(r)
    flags["extensive_exists"] = radiant and extensive.passed


def _classify_hessian(
    spec: ManifoldSpec,
    report: ClassificationReport,
    samples: Points,
    config: CheckConfig,
    flags: dict,
) -> None:
    c = spec.connection
    tol, workers = config.tol, config.workers
    radiant = _radiant_reports(spec, report, samples, config)
    flags["radiant"] = radiant

    norm = squared_norm(spec)
    half_norm = norm * 0.5
    phi = spec.potential if spec.potential is not None else half_norm
    hessian = report.add(check_hessian_potential(c, phi, spec.metric, samples, tol, workers))
    cone_potential = report.add(
        check_hessian_potential(c, half_norm, spec.metric, samples, tol, workers, name="cone_potential_half_norm")
    )
    cone_checks = [cone_potential]
    if is_plain_cone(spec):
        cone_checks.append(
            report.add(check_cone_potential(spec.cone.g_m, c, samples, tol, spec.cone.t_name, workers))
        )

    if radiant:
        report.add(check_closed_theta_hessian(c, phi, spec.xi, samples, tol, workers))
        report.add(check_radiant_hessian_identity(c, phi, spec.xi, samples, tol, workers))

    conical_hessian = flags["selfsimilar"] and radiant and hessian.verdict
    flags["conical_hessian"] = conical_hessian
    flags["hessian_cone"] = conical_hessian and all(r.verdict for r in cone_checks)
    if not conical_hessian:
        return

    try:
        extensive = extensive_from_conical(spec.metric, spec.xi, samples, tol, require_conical=False, workers=workers)
    except (ConstructionError, ExprDomainError) as exc:
        report.notes.append(f"extensive projection failed: {exc}")
        return
    result = check_extensive(extensive, c, norm.apply("sqrt"), samples, tol, workers)
    for r in result.reports:
        report.add(r)
    flags["extensive_exists"] = result.passed


def classify(spec: ManifoldSpec, config: CheckConfig = CheckConfig()) -> ClassificationReport:
    """
    Run every applicable check on a manifold declaration.

    Args:
        spec: Manifold declaration
        config: Sample count, seed, tolerances and workers

    Returns:
        ClassificationReport with one record per check and the derived flags

    Raises:
        CheckEvaluationError: Evaluation or singularity error, attributed to
            the check that hit it
    """
    report = ClassificationReport(spec.id, config=config.echo(), expected=spec.expected)
    flags = {name: False for name in FLAG_NAMES}
    samples = spec.samples(config)
    tol, workers = config.tol, config.workers
    logger.info(f"🔍 Classifying '{spec.id}' on {len(samples)} samples (seed={config.seed}, tol={tol:g})")

    positivity = report.add(check_definiteness(spec.metric, samples, workers))
    if spec.metric.is_degenerate:
        _classify_degenerate(spec, report, samples, config, flags)
        report.flags = flags
        return report
    if not positivity.verdict:
        report.notes.append("metric is not positive definite on the samples; remaining checks skipped")
        report.flags = flags
        return report

    selfsimilar = report.add(check_selfsimilar(spec.metric, spec.xi, samples, tol, workers))
    flags["selfsimilar"] = selfsimilar.verdict

    conical = check_conical(spec.metric, spec.xi, samples, tol, workers, selfsimilar)
    for r in conical.reports:
        report.add(r)
    report.conical_consistency = conical.consistent
    flags["conical_riemannian"] = selfsimilar.verdict and conical.passed
    if conical.consistent is None:
        report.notes.append("not selfsimilar: agreement of the conical conditions is not asserted")

    if spec.cone is not None:
        base_samples = spec.cone.base_chart.sample_points(config.samples, config.seed)
        criterion = report.add(check_cone_criterion(spec.cone, base_samples, tol, workers))
        if criterion.verdict != conical.passed:
            report.notes.append("cone criterion and conical conditions disagree")

    _dilation_reports(spec, report, samples, config)

    if spec.connection is not None:
        _classify_hessian(spec, report, samples, config, flags)
    else:
        report.notes.append("no connection declared: radiant and Hessian checks skipped")

    report.flags = flags
    summary = ", ".join(f"{k}={'pass' if v else 'fail'}" for k, v in flags.items())
    logger.info(f"✅ '{spec.id}' classified: {summary}")
    return report

