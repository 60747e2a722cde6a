# tools/hessian.py
"""
Radiant and Hessian structure checks, and the extensive (degenerate Hessian)
constructions.

theta below is always iota_xi g; with g = Hess phi its derivatives come from
order-3 jets of phi and the first derivatives of the Christoffel symbols.
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from analytics.report import StructureReport
from config import JET_TOLERANCE, KERNEL_TOLERANCE, MAX_WORKERS, SEMIDEFINITE_TOLERANCE
from tools.cone import check_conical, check_selfsimilar
from tools.tensor import (
    POSITIVE_SEMIDEFINITE,
    Connection,
    MetricField,
    VectorField,
    check_flat_torsion_free,
    covariant_derivative_vector,
    covariant_oneform_components,
    exterior_components,
    flat_hessian,
    flat_hessian_jet,
    interior_product,
    lie_derivative_components,
    metric_at,
)
from utils.error_handler import ConstructionError, ExprDomainError
from utils.expr import ScalarExpr, expr_sum
from utils.jet import eval_jet, evaluate
from utils.linalg import kernel_dimension, max_abs, smallest_eigenvalue

logger = logging.getLogger(__name__)

RADIANT = "radiant"
HESSIAN_POTENTIAL = "hessian_potential"
CLOSED_THETA_HESSIAN = "closed_theta_hessian"
RADIANT_HESSIAN_IDENTITY = "radiant_hessian_identity"
CONE_POTENTIAL = "cone_potential"


@dataclass(frozen=True)
class RadiantStructure:
    """A flat torsion-free connection with a field xi satisfying nabla xi = Id."""
    connection: Connection
    xi: VectorField

    def check(self, samples: Sequence[Sequence[float]], tol: float, workers: int = MAX_WORKERS) -> List[StructureReport]:
        torsion, flat = check_flat_torsion_free(self.connection, samples, tol, workers)
        return [torsion, flat, check_radiant(self.connection, self.xi, samples, tol, workers)]


@dataclass(frozen=True)
class HessianData:
    connection: Connection
    potential: ScalarExpr
    metric: MetricField

    def check(self, samples: Sequence[Sequence[float]], tol: float, workers: int = MAX_WORKERS) -> StructureReport:
        return check_hessian_potential(self.connection, self.potential, self.metric, samples, tol, workers)


@dataclass(frozen=True)
class ExtensiveMetric:
    """Positive semidefinite metric with xi in its kernel."""
    metric: MetricField
    xi: VectorField

    def __post_init__(self):
        if self.metric.definiteness != POSITIVE_SEMIDEFINITE:
            raise ValueError("an extensive metric must be declared positive_semidefinite")
        if self.metric.chart.coords != self.xi.chart.coords:
            raise ValueError("extensive metric and xi live on different charts")


def _theta_jets(c: Connection, phi: ScalarExpr, xi: VectorField, point: Sequence[float]):
    """Hess phi, dHess phi, xi, J xi, theta, J theta (J theta[j, m] = d_m theta_j)."""
    hess, d_hess = flat_hessian_jet(c, phi, point)
    x, jx = xi.jets(point, 1)
    theta = x @ hess
    j_theta = np.einsum("im,ij->jm", jx, hess) + np.einsum("i,ijm->jm", x, d_hess)
    return hess, d_hess, x, jx, theta, j_theta


# ----------------------------------------------------------------------------
# Checks
# ----------------------------------------------------------------------------

def check_radiant(
    c: Connection, xi: VectorField, samples: Sequence[Sequence[float]], tol: float, workers: int = MAX_WORKERS
) -> StructureReport:
    """Residual max |nabla xi - Id|."""
    identity = np.eye(c.dim)
    return StructureReport.from_residuals(
        RADIANT, samples, lambda p: max_abs(covariant_derivative_vector(c, xi, p) - identity), tol, workers
    )


def check_hessian_potential(
    c: Connection,
    phi: ScalarExpr,
    g: MetricField,
    samples: Sequence[Sequence[float]],
    tol: float,
    workers: int = MAX_WORKERS,
    name: str = HESSIAN_POTENTIAL,
) -> StructureReport:
    """Residual max |Hess phi - g| for the connection's Hessian."""
    return StructureReport.from_residuals(
        name, samples, lambda p: max_abs(flat_hessian(c, phi, p).values - metric_at(g, p).values), tol, workers
    )


def check_closed_theta_hessian(
    c: Connection,
    phi: ScalarExpr,
    xi: VectorField,
    samples: Sequence[Sequence[float]],
    tol: float,
    workers: int = MAX_WORKERS,
) -> StructureReport:
    """Residual max |d iota_xi Hess phi|; vanishes for every phi on a radiant structure."""
    def residual(p):
        j_theta = _theta_jets(c, phi, xi, p)[5]
        return max_abs(exterior_components(j_theta))

    return StructureReport.from_residuals(CLOSED_THETA_HESSIAN, samples, residual, tol, workers)


def check_radiant_hessian_identity(
    c: Connection,
    phi: ScalarExpr,
    xi: VectorField,
    samples: Sequence[Sequence[float]],
    tol: float,
    workers: int = MAX_WORKERS,
) -> StructureReport:
    """Residual max |Lie_xi g - g - nabla(iota_xi g)| with g = Hess phi."""
    def residual(p):
        hess, d_hess, x, jx, theta, j_theta = _theta_jets(c, phi, xi, p)
        gamma, _ = c.coefficients(p)
        lie = lie_derivative_components(x, jx, hess, d_hess)
        nabla_theta = covariant_oneform_components(gamma, theta, j_theta)
        return max_abs(lie - hess - nabla_theta)

    return StructureReport.from_residuals(RADIANT_HESSIAN_IDENTITY, samples, residual, tol, workers)


def _split_cone_chart(g_m: MetricField, c: Connection, t_name: str) -> Tuple[Tuple[str, ...], int]:
    coords = c.chart.coords
    base = tuple(name for name in coords if name != t_name)
    if t_name not in coords or base != g_m.chart.coords:
        raise ValueError(f"connection chart {list(coords)} is not {list(g_m.chart.coords)} x {t_name}")
    return coords, coords.index(t_name)


def riemannian_cone_metric(g_m: MetricField, c: Connection, t_name: str = "t") -> MetricField:
    """t^2 g_M + dt^2 on the connection's chart."""
    coords, t_index = _split_cone_chart(g_m, c, t_name)
    t = ScalarExpr.coordinate(t_name, coords)
    base_index = [i for i in range(len(coords)) if i != t_index]
    upper = {}
    for a, i in enumerate(base_index):
        for b, j in enumerate(base_index):
            if i <= j:
                upper[(i, j)] = t * t * g_m.comp[a][b].rebind(coords)
    upper[(t_index, t_index)] = ScalarExpr.constant(1.0, coords)
    return MetricField.from_upper(c.chart, upper)


def check_cone_potential(
    g_m: MetricField,
    c: Connection,
    samples: Sequence[Sequence[float]],
    tol: float,
    t_name: str = "t",
    workers: int = MAX_WORKERS,
) -> StructureReport:
    """Residual max |t^2 g_M + dt^2 - Hess(t^2/2)|."""
    g = riemannian_cone_metric(g_m, c, t_name)
    t = ScalarExpr.coordinate(t_name, c.chart.coords)
    return check_hessian_potential(c, t * t * 0.5, g, samples, tol, workers, name=CONE_POTENTIAL)


# ----------------------------------------------------------------------------
# Extensive metrics
# ----------------------------------------------------------------------------

def _require(report: StructureReport) -> StructureReport:
    if not report.verdict:
        raise ConstructionError(report.name, report.max_residual, report.tolerance, report.worst_point)
    return report


def extensive_from_cone(
    g_m: MetricField,
    c: Connection,
    samples: Sequence[Sequence[float]],
    tol: float,
    t_name: str = "t",
    workers: int = MAX_WORKERS,
) -> Tuple[ExtensiveMetric, List[StructureReport]]:
    """
    The degenerate metric t g_M (zero t row and column) of a Hessian cone.

    Verifies on the samples that it equals Hess(t), that iota_{t d/dt} of it
    vanishes, that it is semidefinite of corank one, and that
    dt (x) dt + t Hess(t) recovers t^2 g_M + dt^2.

    Raises:
        ConstructionError: A verification failed (the input was not a Hessian cone)
    """
    coords, t_index = _split_cone_chart(g_m, c, t_name)
    t = ScalarExpr.coordinate(t_name, coords)
    base_index = [i for i in range(len(coords)) if i != t_index]
    upper = {}
    for a, i in enumerate(base_index):
        for b, j in enumerate(base_index):
            if i <= j:
                upper[(i, j)] = t * g_m.comp[a][b].rebind(coords)
    metric = MetricField.from_upper(c.chart, upper, POSITIVE_SEMIDEFINITE)
    xi = VectorField(
        c.chart, tuple(t if k == t_index else ScalarExpr.constant(0.0, coords) for k in range(len(coords)))
    )
    extensive = ExtensiveMetric(metric, xi)
    cone = riemannian_cone_metric(g_m, c, t_name)

    def cone_identity(p):
        hess_t = flat_hessian(c, t, p).values
        dt = np.zeros(len(coords))
        dt[t_index] = 1.0
        return max_abs(np.outer(dt, dt) + p[t_index] * hess_t - metric_at(cone, p).values)

    reports = [
        _require(check_hessian_potential(c, t, metric, samples, tol, workers, name="extensive_hessian_match")),
        _require(check_extensive_kernel(extensive, samples, max(tol, KERNEL_TOLERANCE), workers)),
        _require(check_semidefinite(metric, samples, workers)),
        _require(check_corank_one(metric, samples, workers)),
        _require(StructureReport.from_residuals("cone_metric_from_linear_potential", samples, cone_identity, tol, workers)),
    ]
    logger.info(f"✓ extensive metric t g_M built on {list(coords)}")
    return extensive, reports


def extensive_from_conical(
    g: MetricField,
    xi: VectorField,
    samples: Sequence[Sequence[float]],
    tol: float = JET_TOLERANCE,
    require_conical: bool = True,
    workers: int = MAX_WORKERS,
) -> ExtensiveMetric:
    """
    g_hat = g(xi, xi)^(-1/2) (g - theta (x) theta / g(xi, xi)), theta = iota_xi g.

    Args:
        require_conical: Verify selfsimilarity and the conical conditions first

    Raises:
        ExprDomainError: xi vanishes at a sample
        ConstructionError: (g, xi) is not conical, or iota_xi g_hat != 0
    """
    if require_conical:
        selfsimilar = _require(check_selfsimilar(g, xi, samples, tol, workers))
        for report in check_conical(g, xi, samples, tol, workers, selfsimilar).reports:
            _require(report)

    coords = g.chart.coords
    theta = interior_product(xi, g)
    norm = expr_sum([xi.comp[i] * theta.comp[i] for i in range(g.dim)], coords)
    for point in samples:
        if not evaluate(norm, point) > 0.0:
            raise ExprDomainError("division by zero: xi vanishes", norm.to_source(), point)

    scale = norm ** -0.5
    upper = {}
    for i in range(g.dim):
        for j in range(i, g.dim):
            upper[(i, j)] = (g.comp[i][j] - theta.comp[i] * theta.comp[j] / norm) * scale
    extensive = ExtensiveMetric(MetricField.from_upper(g.chart, upper, POSITIVE_SEMIDEFINITE), xi)
    _require(check_extensive_kernel(extensive, samples, max(tol, KERNEL_TOLERANCE), workers))
    logger.info(f"✓ extensive metric projected from conical metric on {list(coords)}")
    return extensive


def check_extensive_kernel(
    e: ExtensiveMetric, samples: Sequence[Sequence[float]], tol: float = KERNEL_TOLERANCE, workers: int = MAX_WORKERS
) -> StructureReport:
    """Residual max |iota_xi e|."""
    def residual(p):
        x = e.xi.jets(p, 0)[0]
        return max_abs(x @ metric_at(e.metric, p).values)

    return StructureReport.from_residuals("extensive_kernel", samples, residual, tol, workers)


def check_semidefinite(g: MetricField, samples: Sequence[Sequence[float]], workers: int = MAX_WORKERS) -> StructureReport:
    return StructureReport.from_residuals(
        "extensive_semidefinite",
        samples,
        lambda p: max(0.0, -smallest_eigenvalue(metric_at(g, p).values)),
        SEMIDEFINITE_TOLERANCE,
        workers,
    )


def check_corank_one(g: MetricField, samples: Sequence[Sequence[float]], workers: int = MAX_WORKERS) -> StructureReport:
    """Residual |dim ker g - 1|, tolerance 0."""
    return StructureReport.from_residuals(
        "extensive_corank_one",
        samples,
        lambda p: float(abs(kernel_dimension(metric_at(g, p).values) - 1)),
        0.0,
        workers,
    )


@dataclass(frozen=True)
class ExtensiveReport:
    kernel: StructureReport
    semidefinite: StructureReport
    hessian_match: Optional[StructureReport] = None
    homogeneous: Optional[StructureReport] = None

    @property
    def reports(self) -> List[StructureReport]:
        return [r for r in (self.kernel, self.semidefinite, self.hessian_match, self.homogeneous) if r is not None]

    @property
    def passed(self) -> bool:
        return all(r.verdict for r in self.reports)


def check_extensive(
    e: ExtensiveMetric,
    c: Connection,
    phi: Optional[ScalarExpr],
    samples: Sequence[Sequence[float]],
    tol: float,
    workers: int = MAX_WORKERS,
) -> ExtensiveReport:
    """
    iota_xi e = 0 and semidefiniteness; with a potential also e = Hess phi
    and xi(phi) = phi.
    """
    kernel = check_extensive_kernel(e, samples, tol, workers)
    semidefinite = check_semidefinite(e.metric, samples, workers)
    if phi is None:
        return ExtensiveReport(kernel, semidefinite)

    def homogeneity(p):
        jet = eval_jet(phi, p, 1)
        x = e.xi.jets(p, 0)[0]
        return abs(float(x @ jet.first) - jet.value)

    return ExtensiveReport(
        kernel,
        semidefinite,
        check_hessian_potential(c, phi, e.metric, samples, tol, workers, name="extensive_hessian_match"),
        StructureReport.from_residuals("extensive_potential_homogeneous", samples, homogeneity, tol, workers),
    )
