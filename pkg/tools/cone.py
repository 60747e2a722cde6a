# tools/cone.py
"""
Selfsimilar metrics on M x R>0 and the cone classification checks.

A ConeMetricSpec (g_M, alpha, f) on a base chart M assembles to

    g = t^2 g_M + t Sym(dt (x) alpha) + f dt^2          (normal form)
    g = t^2 f g_M + t Sym(dt (x) alpha) + dt^2          (base placement)

with Sym(a (x) b) = a (x) b + b (x) a, so g_it = t alpha_i. Both forms are
positive definite iff f > g_M^-1(alpha, alpha) pointwise.
"""

import itertools
import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Sequence, Tuple

import numpy as np

from analytics.report import StructureReport
from config import CONE_T_RANGE, DEFAULT_SAMPLES, DEFAULT_SEED, MAX_WORKERS, POSITIVITY_FLOOR, CheckConfig
from tools.tensor import (
    Connection,
    MetricField,
    OneFormField,
    VectorField,
    covariant_derivative_vector,
    covariant_oneform_components,
    dual_norm_squared,
    exterior_components,
    interior_product,
    lie_derivative_metric,
    metric_at,
)
from utils.chart import Bound, ChartDomain
from utils.error_handler import ContactError, PositivityError
from utils.expr import ScalarExpr
from utils.jet import eval_jet, evaluate
from utils.linalg import max_abs, smallest_eigenvalue, symmetric_inverse

logger = logging.getLogger(__name__)

CONE_COORDINATE = "t"

# check names, in reporting order
SELFSIMILAR = "selfsimilar"
XI_IDENTITY = "conical_levi_civita_xi_identity"
THETA_EQUALS_METRIC = "conical_covariant_theta_equals_metric"
THETA_SYMMETRIC = "conical_covariant_theta_symmetric"
THETA_CLOSED = "conical_theta_closed"
CONE_CRITERION = "cone_criterion"


@dataclass(frozen=True)
class ConeMetricSpec:
    """
    The triple (g_M, alpha, f) on a base chart.

    Args:
        base_chart: Chart of M
        g_m: Positive definite metric on M
        alpha: One-form on M
        f: Strictly positive function on M
        f_on_base: Put f on the g_M block (dt^2 coefficient 1) instead of dt^2
        t_name: Name of the cone coordinate, appended last
        t_bound: Open interval of t (lower end >= 0)
        t_range: Sample range of t
    """
    base_chart: ChartDomain
    g_m: MetricField
    alpha: OneFormField
    f: ScalarExpr
    f_on_base: bool = False
    t_name: str = CONE_COORDINATE
    t_bound: Bound = (0.0, None)
    t_range: Tuple[float, float] = CONE_T_RANGE

    def __post_init__(self):
        if self.g_m.chart.coords != self.base_chart.coords or self.alpha.chart.coords != self.base_chart.coords:
            raise ValueError("g_M and alpha must live on the base chart")
        if self.f.coords != self.base_chart.coords:
            raise ValueError(f"f is bound to {list(self.f.coords)}, base chart has {list(self.base_chart.coords)}")
        if self.t_name in self.base_chart.coords:
            raise ValueError(f"cone coordinate '{self.t_name}' clashes with a base coordinate")
        if self.g_m.is_degenerate:
            raise ValueError("g_M must be positive definite")

    @property
    def placement(self) -> str:
        return "base" if self.f_on_base else "dt2"


def cone_chart(spec: ConeMetricSpec) -> ChartDomain:
    """M x R>0 with t sampled from t_range."""
    return spec.base_chart.extend(spec.t_name, spec.t_bound, spec.t_range)


def cone_vector_field(chart: ChartDomain, t_name: str = CONE_COORDINATE) -> VectorField:
    """xi = t d/dt"""
    zero = ScalarExpr.constant(0.0, chart.coords)
    t = ScalarExpr.coordinate(t_name, chart.coords)
    return VectorField(chart, tuple(t if name == t_name else zero for name in chart.coords))


def _positivity_gap(spec: ConeMetricSpec, point: Sequence[float]) -> float:
    """f - g_M^-1(alpha, alpha) at a base point."""
    g_inv = symmetric_inverse(metric_at(spec.g_m, point).values)
    a = np.array([evaluate(e, point) for e in spec.alpha.comp])
    return evaluate(spec.f, point) - float(a @ g_inv @ a)


def validate_cone_spec(spec: ConeMetricSpec, config: CheckConfig = CheckConfig()) -> None:
    """
    g_M positive definite, f > 0 and f > g_M^-1(alpha, alpha) on base samples.

    Raises:
        PositivityError: First violating base point
    """
    for point in spec.base_chart.sample_points(config.samples, config.seed):
        if smallest_eigenvalue(metric_at(spec.g_m, point).values) <= POSITIVITY_FLOOR:
            raise PositivityError("g_M is not positive definite", point)
        if evaluate(spec.f, point) <= 0.0:
            raise PositivityError("f is not strictly positive", point)
        if _positivity_gap(spec, point) <= POSITIVITY_FLOOR:
            raise PositivityError("f <= g_M^-1(alpha, alpha): assembled metric is not positive definite", point)


def assemble_selfsimilar_metric(spec: ConeMetricSpec, config: CheckConfig = CheckConfig()) -> MetricField:
    """
    Selfsimilar metric of a spec on M x R>0 (t last).

    Positivity is tested twice: the pointwise criterion on base samples and
    smallest-eigenvalue sampling of the assembled matrix.

    Raises:
        PositivityError: Either test fails at a sampled point
    """
    validate_cone_spec(spec, config)
    chart = cone_chart(spec)
    coords = chart.coords
    t = ScalarExpr.coordinate(spec.t_name, coords)
    f = spec.f.rebind(coords)
    n = spec.base_chart.dim

    upper = {}
    for i, j in itertools.combinations_with_replacement(range(n), 2):
        block = t * t * spec.g_m.comp[i][j].rebind(coords)
        upper[(i, j)] = f * block if spec.f_on_base else block
    for i in range(n):
        upper[(i, n)] = t * spec.alpha.comp[i].rebind(coords)
    upper[(n, n)] = ScalarExpr.constant(1.0, coords) if spec.f_on_base else f
    metric = MetricField.from_upper(chart, upper)

    for point in chart.sample_points(config.samples, config.seed):
        if smallest_eigenvalue(metric_at(metric, point).values) <= POSITIVITY_FLOOR:
            raise PositivityError("assembled metric has a nonpositive eigenvalue", point)
    logger.debug(f"Assembled selfsimilar metric on {list(coords)} ({spec.placement} placement)")
    return metric


# ----------------------------------------------------------------------------
# Checks on (g, xi)
# ----------------------------------------------------------------------------

def check_selfsimilar(
    g: MetricField, xi: VectorField, samples: Sequence[Sequence[float]], tol: float, workers: int = MAX_WORKERS
) -> StructureReport:
    """Residual max |Lie_xi g - 2g|."""
    def residual(p):
        lie = lie_derivative_metric(xi, g, p).values
        return max_abs(lie - 2.0 * metric_at(g, p).values)

    return StructureReport.from_residuals(SELFSIMILAR, samples, residual, tol, workers)


@dataclass(frozen=True)
class ConicalReport:
    """The four conical conditions and whether their verdicts agree."""
    xi_identity: StructureReport
    theta_equals_metric: StructureReport
    theta_symmetric: StructureReport
    theta_closed: StructureReport
    gated: bool

    @property
    def reports(self) -> Tuple[StructureReport, ...]:
        return (self.xi_identity, self.theta_equals_metric, self.theta_symmetric, self.theta_closed)

    @property
    def passed(self) -> bool:
        return all(r.verdict for r in self.reports)

    @property
    def consistent(self) -> Optional[bool]:
        """All four verdicts equal; None when selfsimilarity did not hold."""
        if not self.gated:
            return None
        return len({r.verdict for r in self.reports}) == 1


def check_conical(
    g: MetricField,
    xi: VectorField,
    samples: Sequence[Sequence[float]],
    tol: float,
    workers: int = MAX_WORKERS,
    selfsimilar: Optional[StructureReport] = None,
) -> ConicalReport:
    """
    The four conical conditions, each computed independently:
    D xi = Id, D theta = g, D theta symmetric, d theta = 0 (theta = iota_xi g).

    Args:
        selfsimilar: Report of check_selfsimilar; computed when omitted. The
            consistency verdict only applies when it passes.

    Raises:
        CheckEvaluationError: Singular metric or evaluation error, attributed
            to the condition being evaluated
    """
    if selfsimilar is None:
        selfsimilar = check_selfsimilar(g, xi, samples, tol, workers)
    levi_civita = Connection.levi_civita(g)
    theta = interior_product(xi, g)
    identity = np.eye(g.dim)

    @lru_cache(maxsize=None)
    def theta_jets(p):
        return theta.jets(p, 1)

    @lru_cache(maxsize=None)
    def covariant_theta(p):
        gamma, _ = levi_civita.coefficients(p)
        w, jw = theta_jets(p)
        return covariant_oneform_components(gamma, w, jw)

    def xi_identity(p):
        return max_abs(covariant_derivative_vector(levi_civita, xi, p) - identity)

    def theta_equals_metric(p):
        return max_abs(covariant_theta(p) - metric_at(g, p).values)

    def theta_symmetric(p):
        d_theta = covariant_theta(p)
        return max_abs(d_theta - d_theta.T)

    def theta_closed(p):
        _, jw = theta_jets(p)
        return max_abs(exterior_components(jw))

    report = ConicalReport(
        StructureReport.from_residuals(XI_IDENTITY, samples, xi_identity, tol, workers),
        StructureReport.from_residuals(THETA_EQUALS_METRIC, samples, theta_equals_metric, tol, workers),
        StructureReport.from_residuals(THETA_SYMMETRIC, samples, theta_symmetric, tol, workers),
        StructureReport.from_residuals(THETA_CLOSED, samples, theta_closed, tol, workers),
        gated=selfsimilar.verdict,
    )
    if report.consistent is False:
        logger.warning(f"⚠️ conical conditions disagree on a selfsimilar metric: {[r.verdict for r in report.reports]}")
    return report


def check_dilation_equivariance(
    g: MetricField,
    q: float,
    samples: Sequence[Sequence[float]],
    tol: float,
    scaled: Optional[Sequence[str]] = None,
    workers: int = MAX_WORKERS,
) -> StructureReport:
    """
    Residual max |(lambda_q* g)(p) - q^2 g(p)| where lambda_q multiplies the
    `scaled` coordinates (default: the last one) by q.

    Raises:
        CheckEvaluationError: lambda_q p leaves the chart (ChartDomainError cause)
    """
    if not q > 0:
        raise ValueError(f"dilation factor must be positive, got {q}")
    names = tuple(scaled) if scaled else (g.chart.coords[-1],)
    factors = np.array([q if name in names else 1.0 for name in g.chart.coords])

    def residual(p):
        dilated = tuple(np.asarray(p) * factors)
        pulled = metric_at(g, dilated).values * np.outer(factors, factors)
        return max_abs(pulled - q * q * metric_at(g, p).values)

    return StructureReport.from_residuals(f"dilation_q{q:g}", samples, residual, tol, workers)


# ----------------------------------------------------------------------------
# Checks and constructions on the triple
# ----------------------------------------------------------------------------

def check_cone_criterion(
    spec: ConeMetricSpec, samples: Sequence[Sequence[float]], tol: float, workers: int = MAX_WORKERS
) -> StructureReport:
    """
    Residual max |d(g_tt) - 2 alpha| over base samples. The dt^2 coefficient
    is f in the normal form and 1 in the base placement.
    """
    def residual(p):
        a = np.array([evaluate(e, p) for e in spec.alpha.comp])
        if spec.f_on_base:
            return max_abs(2.0 * a)
        df = eval_jet(spec.f, p, 1).first
        return max_abs(df - 2.0 * a)

    return StructureReport.from_residuals(CONE_CRITERION, samples, residual, tol, workers)


def positivity_bound_f(
    g_m: MetricField,
    alpha: OneFormField,
    margin: float,
    samples: Optional[Sequence[Sequence[float]]] = None,
) -> ScalarExpr:
    """
    f = g_M^-1(alpha, alpha) + margin, the smallest positivity-preserving
    function shifted by `margin`.

    Args:
        g_m: Base metric
        alpha: Base one-form
        margin: Strictly positive shift
        samples: Base points where g_M must be invertible (default: chart samples)

    Raises:
        SingularMetricError: g_M is singular at a sample
    """
    if not margin > 0:
        raise ValueError(f"margin must be positive, got {margin}")
    if samples is None:
        samples = g_m.chart.sample_points(DEFAULT_SAMPLES, DEFAULT_SEED)
    for point in samples:
        symmetric_inverse(metric_at(g_m, point).values)
    return dual_norm_squared(g_m, alpha) + margin


lemma_2_12_f = positivity_bound_f


def _permutation_sign(perm: Sequence[int]) -> int:
    inversions = sum(1 for i, j in itertools.combinations(range(len(perm)), 2) if perm[i] > perm[j])
    return -1 if inversions % 2 else 1


def contact_volume(alpha: OneFormField, point: Sequence[float]) -> float:
    """
    Coefficient of alpha ^ (d alpha)^k on dx^1 ^ ... ^ dx^(2k+1):
    (1/2)^k sum_sigma sgn(sigma) alpha_s0 prod_m (d alpha)_{s(2m-1) s(2m)}.

    Raises:
        ContactError: Even-dimensional chart
    """
    n = alpha.chart.dim
    if n % 2 == 0:
        raise ContactError(f"contact forms need an odd-dimensional base, got dimension {n}")
    k = (n - 1) // 2
    a, ja = alpha.jets(point, 1)
    d_alpha = exterior_components(ja)
    total = 0.0
    for perm in itertools.permutations(range(n)):
        term = a[perm[0]]
        if term == 0.0:
            continue
        for m in range(k):
            term *= d_alpha[perm[2 * m + 1], perm[2 * m + 2]]
        total += _permutation_sign(perm) * term
    return total / 2**k


def contact_selfsimilar_example(
    alpha: OneFormField,
    g_m: MetricField,
    margin: float,
    config: CheckConfig = CheckConfig(),
) -> ConeMetricSpec:
    """
    Selfsimilar but not conical spec from a contact form: base placement
    with f = g_M^-1(alpha, alpha) + margin.

    Raises:
        ContactError: Even-dimensional base, or alpha ^ (d alpha)^k vanishes
            at a sampled point
    """
    chart = alpha.chart
    if chart.dim % 2 == 0:
        raise ContactError(f"contact forms need an odd-dimensional base, got dimension {chart.dim}")
    samples = chart.sample_points(config.samples, config.seed)
    for point in samples:
        volume = contact_volume(alpha, point)
        if not abs(volume) > POSITIVITY_FLOOR or not math.isfinite(volume):
            raise ContactError("alpha ^ (d alpha)^k vanishes", point)
    f = positivity_bound_f(g_m, alpha, margin, samples)
    logger.info(f"✓ contact form verified on {len(samples)} base points; f = {f.to_source()}")
    return ConeMetricSpec(chart, g_m, alpha, f, f_on_base=True)

