# analytics/suite.py
"""
Theorem suite: every structural property the engine relies on, run over the
catalog and over seeded random families. One TheoremRow per
(property, example) pair.
"""

import itertools
import logging
from dataclasses import replace
from typing import Dict, List, Sequence

import numpy as np

from analytics.report import StructureReport, SuiteReport, TheoremRow
from catalog.classifier import classify
from catalog.entries import catalog_entries, polar_connection
from catalog.manifold import NamedExample
from config import (
    DILATION_FACTORS,
    FAILING_RESIDUAL_FLOOR,
    KERNEL_TOLERANCE,
    POTENTIAL_DEGREE,
    POTENTIAL_SAMPLES,
    POTENTIAL_SEEDS,
    RANDOM_SPEC_COUNT,
    CheckConfig,
)
from tools.cone import (
    SELFSIMILAR,
    THETA_CLOSED,
    THETA_EQUALS_METRIC,
    THETA_SYMMETRIC,
    XI_IDENTITY,
    ConeMetricSpec,
    assemble_selfsimilar_metric,
    check_cone_criterion,
    check_conical,
    cone_chart,
    cone_vector_field,
    positivity_bound_f,
)
from tools.hessian import (
    check_closed_theta_hessian,
    check_cone_potential,
    check_extensive_kernel,
    check_radiant_hessian_identity,
    extensive_from_conical,
    extensive_from_cone,
)
from tools.tensor import Connection, MetricField, OneFormField, VectorField, check_metric_compatibility, metric_at, torsion
from utils.chart import ChartDomain
from utils.error_handler import ConstructionError
from utils.expr import ScalarExpr, expr_sum
from utils.linalg import max_abs, smallest_eigenvalue

logger = logging.getLogger(__name__)

CONICAL_CHECKS = (XI_IDENTITY, THETA_EQUALS_METRIC, THETA_SYMMETRIC, THETA_CLOSED)
CONSISTENCY_TOLERANCES = (1e-10, 1e-8, 1e-6)
HESSIAN_CONES = ("round_cone_polar", "angle_cone_c0.5", "angle_cone_c2")


def random_polynomial(coords: Sequence[str], rng: np.random.Generator, degree: int = POTENTIAL_DEGREE) -> ScalarExpr:
    """Dense polynomial of total degree <= `degree` with coefficients in [-1, 1]."""
    variables = [ScalarExpr.coordinate(name, coords) for name in coords]
    terms = []
    for powers in itertools.product(range(degree + 1), repeat=len(coords)):
        if sum(powers) > degree:
            continue
        term = ScalarExpr.constant(float(rng.uniform(-1.0, 1.0)), coords)
        for var, k in zip(variables, powers):
            term = term * var**k
        terms.append(term)
    return expr_sum(terms, coords)


def family_config(config: CheckConfig) -> CheckConfig:
    """Sample count for the random families: POTENTIAL_SAMPLES, raised by --samples."""
    return replace(config, samples=max(POTENTIAL_SAMPLES, config.samples // 4))


# ----------------------------------------------------------------------------
# Catalog rows
# ----------------------------------------------------------------------------

def _equivalence_row(entry: NamedExample, checks: Dict[str, StructureReport], tol: float) -> TheoremRow:
    residuals = [checks[name].max_residual for name in CONICAL_CHECKS]
    agree = all(len({r <= tau for r in residuals}) == 1 for tau in CONSISTENCY_TOLERANCES + (tol,))
    if all(r <= tol for r in residuals):
        detail, gap = "all four pass", True
    else:
        gap = min(residuals) >= FAILING_RESIDUAL_FLOOR
        detail = f"all four fail (smallest residual {min(residuals):.3e})"
    return TheoremRow("conical_equivalence", entry.id, agree and gap, max(residuals), detail)


def _catalog_rows(suite: SuiteReport, entries: List[NamedExample], config: CheckConfig) -> None:
    reports = {}
    for entry in entries:
        report = reports[entry.id] = classify(entry.spec, config)
        checks = {r.name: r for r in report.checks}
        flags = report.flags

        mismatched = sorted(k for k, v in entry.expected.items() if flags.get(k) != v)
        suite.add(TheoremRow(
            "catalog_classification", entry.id, not mismatched, 0.0,
            f"mismatched: {', '.join(mismatched)}" if mismatched else "flags reproduced",
        ))

        monotone = (not flags["conical_riemannian"] or flags["selfsimilar"]) and (
            not flags["conical_hessian"] or flags["conical_riemannian"]
        )
        suite.add(TheoremRow("flag_monotonicity", entry.id, monotone, 0.0))

        selfsimilar = checks.get(SELFSIMILAR)
        if selfsimilar is not None and selfsimilar.verdict:
            suite.add(_equivalence_row(entry, checks, config.tol))

        dilations = [checks[f"dilation_q{q:g}"] for q in DILATION_FACTORS if f"dilation_q{q:g}" in checks]
        if selfsimilar is not None and len(dilations) == len(DILATION_FACTORS):
            all_pass = all(r.verdict for r in dilations)
            suite.add(TheoremRow(
                "dilation_equivariance", entry.id, all_pass == selfsimilar.verdict,
                max(r.max_residual for r in dilations),
                "integrated and infinitesimal forms agree",
            ))

        samples = entry.spec.samples(config)
        levi_civita = Connection.levi_civita(entry.spec.metric)
        compatibility = check_metric_compatibility(levi_civita, entry.spec.metric, samples, config.tol, config.workers)
        torsion_max = max(max_abs(torsion(levi_civita, p)) for p in samples)
        suite.add(TheoremRow(
            "levi_civita_compatibility", entry.id,
            compatibility.verdict and torsion_max <= 1e-12,
            compatibility.max_residual, f"torsion {torsion_max:.1e}",
        ))

    contact = next(e for e in entries if e.id == "contact_cone")
    report = reports[contact.id]
    suite.add(TheoremRow(
        "contact_selfsimilar_not_conical", contact.id,
        report.flags["selfsimilar"] and not report.flags["conical_riemannian"],
        report.check(THETA_CLOSED).max_residual,
        "selfsimilar pass, conical fail",
    ))
    lowest = min(
        smallest_eigenvalue(metric_at(contact.spec.metric, p).values) for p in contact.spec.samples(config)
    )
    suite.add(TheoremRow(
        "positivity_bound", contact.id, lowest > 0.0, max(0.0, -lowest), f"min eigenvalue {lowest:.3e}"
    ))


def _hessian_cone_rows(suite: SuiteReport, entries: List[NamedExample], config: CheckConfig) -> None:
    by_id = {e.id: e for e in entries}
    for entry_id in HESSIAN_CONES:
        spec = by_id[entry_id].spec
        g_m, c = spec.cone.g_m, spec.connection
        samples = spec.samples(config)

        potential = check_cone_potential(g_m, c, samples, config.tol, workers=config.workers)
        suite.add(TheoremRow("cone_potential", entry_id, potential.verdict, potential.max_residual))

        try:
            from_cone, reports = extensive_from_cone(g_m, c, samples, config.tol, workers=config.workers)
        except ConstructionError as exc:
            suite.add(TheoremRow("extensive_from_cone", entry_id, False, exc.residual, str(exc)))
            continue
        suite.add(TheoremRow(
            "extensive_from_cone", entry_id, True, max(r.max_residual for r in reports),
            "Hess(t) = t g_M, dt^2 + t Hess(t) = g",
        ))

        projected = extensive_from_conical(spec.metric, spec.xi, samples, config.tol, workers=config.workers)
        difference = max(
            max_abs(metric_at(projected.metric, p).values - metric_at(from_cone.metric, p).values) for p in samples
        )
        kernel = check_extensive_kernel(projected, samples, KERNEL_TOLERANCE, config.workers)
        suite.add(TheoremRow(
            "extensive_from_conical", entry_id, difference <= config.tol and kernel.verdict, difference,
            f"kernel residual {kernel.max_residual:.1e}",
        ))


# ----------------------------------------------------------------------------
# Random families
# ----------------------------------------------------------------------------

def _radiant_structures() -> List[tuple]:
    cartesian = ChartDomain(("x", "y"), {"x": (0.0, None)}, {"x": (0.5, 2.0), "y": (-1.0, 1.0)})
    polar = ChartDomain(("theta", "t"), {"theta": (0.1, 1.5), "t": (0.0, None)}, {"t": (0.5, 2.0)})
    return [
        ("cartesian_euler", Connection.cartesian_flat(cartesian), VectorField.euler(cartesian)),
        ("polar_radial", polar_connection(polar), cone_vector_field(polar)),
    ]


def _potential_rows(suite: SuiteReport, config: CheckConfig) -> None:
    fconfig = family_config(config)
    for name, c, xi in _radiant_structures():
        samples = c.chart.sample_points(fconfig.samples, fconfig.seed)
        closed: List[StructureReport] = []
        identity: List[StructureReport] = []
        for k in range(POTENTIAL_SEEDS):
            phi = random_polynomial(c.chart.coords, np.random.default_rng([config.seed, k]))
            closed.append(check_closed_theta_hessian(c, phi, xi, samples, config.tol, config.workers))
            identity.append(check_radiant_hessian_identity(c, phi, xi, samples, config.tol, config.workers))
        for theorem, reports in (("closed_theta_hessian", closed), ("radiant_hessian_identity", identity)):
            worst = StructureReport.combine(theorem, reports, config.tol)
            suite.add(TheoremRow(
                theorem, name, all(r.verdict for r in reports), worst.max_residual,
                f"{sum(r.verdict for r in reports)}/{len(reports)} potentials",
            ))


def _base_chart() -> ChartDomain:
    return ChartDomain(("x", "y", "z"))


def conical_family_spec(rng: np.random.Generator) -> ConeMetricSpec:
    """f = c + a sin z + b cos x with alpha = df/2."""
    base = _base_chart()
    x, y, z = (ScalarExpr.coordinate(n, base.coords) for n in base.coords)
    a, b, c = (float(v) for v in (rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), rng.uniform(3.0, 4.0)))
    f = c + a * z.apply("sin") + b * x.apply("cos")
    alpha = OneFormField(base, (-0.5 * b * x.apply("sin"), ScalarExpr.constant(0.0, base.coords), 0.5 * a * z.apply("cos")))
    return ConeMetricSpec(base, MetricField.euclidean(base), alpha, f)


def contact_family_spec(rng: np.random.Generator) -> ConeMetricSpec:
    """alpha = s (dz - y dx) + d(b sin x), f = g^-1(alpha, alpha) + margin on dt^2."""
    base = _base_chart()
    x, y, z = (ScalarExpr.coordinate(n, base.coords) for n in base.coords)
    s, b, margin = (float(v) for v in (rng.uniform(0.5, 2.0), rng.uniform(-1.0, 1.0), rng.uniform(0.5, 1.5)))
    alpha = OneFormField(base, (-s * y + b * x.apply("cos"), ScalarExpr.constant(0.0, base.coords), ScalarExpr.constant(s, base.coords)))
    g_m = MetricField.euclidean(base)
    return ConeMetricSpec(base, g_m, alpha, positivity_bound_f(g_m, alpha, margin))


def _criterion_rows(suite: SuiteReport, config: CheckConfig) -> None:
    fconfig = family_config(config)
    families = (("conical_family", conical_family_spec, True), ("contact_family", contact_family_spec, False))
    for family, build, expected in families:
        agree, matches, worst, lowest = 0, 0, 0.0, float("inf")
        for k in range(RANDOM_SPEC_COUNT):
            cone = build(np.random.default_rng([config.seed, 1000 + k]))
            metric = assemble_selfsimilar_metric(cone, fconfig)
            chart = cone_chart(cone)
            samples = chart.sample_points(fconfig.samples, fconfig.seed)
            base_samples = cone.base_chart.sample_points(fconfig.samples, fconfig.seed)
            criterion = check_cone_criterion(cone, base_samples, config.tol, config.workers)
            conical = check_conical(metric, cone_vector_field(chart, cone.t_name), samples, config.tol, config.workers)
            agree += criterion.verdict == conical.passed
            matches += criterion.verdict == expected
            worst = max(worst, criterion.max_residual)
            lowest = min(lowest, min(smallest_eigenvalue(metric_at(metric, p).values) for p in samples))
        suite.add(TheoremRow(
            "cone_criterion_equivalence", family, agree == matches == RANDOM_SPEC_COUNT, worst,
            f"{agree}/{RANDOM_SPEC_COUNT} agree",
        ))
        if family == "contact_family":
            suite.add(TheoremRow(
                "positivity_bound", family, lowest > 0.0, max(0.0, -lowest), f"min eigenvalue {lowest:.3e}"
            ))


def run_theorem_suite(config: CheckConfig = CheckConfig()) -> SuiteReport:
    """
    Run every property row.

    Args:
        config: Seed, samples, tolerances; random families are seeded from
            config.seed so identical configs give identical reports
    """
    suite = SuiteReport(config=config.echo())
    entries = catalog_entries(config)
    logger.info(f"🧪 Running theorem suite over {len(entries)} catalog entries (seed={config.seed})")
    _catalog_rows(suite, entries, config)
    _criterion_rows(suite, config)
    _potential_rows(suite, config)
    _hessian_cone_rows(suite, entries, config)
    logger.info(f"{'✅' if suite.passed else '❌'} {sum(r.passed for r in suite.rows)}/{len(suite.rows)} rows pass")
    return suite
