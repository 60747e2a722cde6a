# tools/tensor.py
"""
Coordinate tensor calculus on a chart.

Fields hold ScalarExpr components; every operation evaluates them as jets at
a point and combines the derivative tensors in index notation. Conventions:

    dg[a, b, c]    = d_c g_ab
    Gamma[k, i, j] = Gamma^k_ij
    dGamma[k, i, j, m] = d_m Gamma^k_ij
    J[k, i]        = d_i V^k   (first derivatives of a field's components)
"""

import itertools
import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from analytics.report import StructureReport
from config import MAX_WORKERS, POSITIVITY_FLOOR, SEMIDEFINITE_TOLERANCE
from utils.chart import ChartDomain
from utils.expr import ScalarExpr, expr_sum, parse_expr
from utils.jet import eval_jet
from utils.linalg import max_abs, smallest_eigenvalue, symmetric_inverse

logger = logging.getLogger(__name__)

POSITIVE_DEFINITE = "positive_definite"
POSITIVE_SEMIDEFINITE = "positive_semidefinite"
DEFINITENESS = (POSITIVE_DEFINITE, POSITIVE_SEMIDEFINITE)

LEVI_CIVITA = "levi_civita"
EXPLICIT = "explicit"


# ----------------------------------------------------------------------------
# Pointwise evaluation of component lists
# ----------------------------------------------------------------------------

def _component_jets(exprs: Sequence[ScalarExpr], point: Sequence[float], order: int) -> List[np.ndarray]:
    """
    Stack the jets of several expressions.

    Returns [values (n,), first (n, d), second (n, d, d), ...] up to `order`.
    """
    jets = [eval_jet(e, point, order) for e in exprs]
    d = len(point)
    n = len(exprs)
    out = [np.array([j.value for j in jets])]
    if order >= 1:
        out.append(np.array([j.first for j in jets]).reshape(n, d))
    if order >= 2:
        out.append(np.array([j.second for j in jets]).reshape(n, d, d))
    if order >= 3:
        out.append(np.array([j.third for j in jets]).reshape(n, d, d, d))
    return out


def _check_chart(chart: ChartDomain, exprs: Sequence[ScalarExpr], what: str) -> None:
    for e in exprs:
        if e.coords != chart.coords:
            raise ValueError(f"{what} component is bound to {list(e.coords)}, chart has {list(chart.coords)}")


# ----------------------------------------------------------------------------
# Value types
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class Tensor02:
    """A pointwise (0,2)-tensor: d x d values plus a symmetry flag."""
    values: np.ndarray
    symmetric: bool = False

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.ndim != 2 or values.shape[0] != values.shape[1]:
            raise ValueError(f"Tensor02 needs a square matrix, got shape {values.shape}")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def dim(self) -> int:
        return self.values.shape[0]

    def __sub__(self, other: "Tensor02") -> "Tensor02":
        return Tensor02(self.values - other.values, self.symmetric and other.symmetric)

    def __add__(self, other: "Tensor02") -> "Tensor02":
        return Tensor02(self.values + other.values, self.symmetric and other.symmetric)

    def scale(self, c: float) -> "Tensor02":
        return Tensor02(c * self.values, self.symmetric)

    def alt(self) -> "Tensor02":
        """Unnormalized antisymmetrization T_ij - T_ji."""
        return Tensor02(self.values - self.values.T, False)

    def asymmetry(self) -> float:
        return max_abs(self.values - self.values.T)

    def max_abs(self) -> float:
        return max_abs(self.values)


@dataclass(frozen=True)
class MetricField:
    """
    Symmetric (0,2) field with expression components over a chart.

    Components must be symmetric as expressions; use `from_upper` to give
    only the upper triangle.
    """
    chart: ChartDomain
    comp: Tuple[Tuple[ScalarExpr, ...], ...]
    definiteness: str = POSITIVE_DEFINITE

    def __post_init__(self):
        comp = tuple(tuple(row) for row in self.comp)
        object.__setattr__(self, "comp", comp)
        d = self.chart.dim
        if len(comp) != d or any(len(row) != d for row in comp):
            raise ValueError(f"metric needs {d}x{d} components")
        if self.definiteness not in DEFINITENESS:
            raise ValueError(f"unknown definiteness claim '{self.definiteness}'")
        _check_chart(self.chart, [e for row in comp for e in row], "metric")
        for i, j in itertools.combinations(range(d), 2):
            if comp[i][j].node != comp[j][i].node:
                names = self.chart.coords
                raise ValueError(f"metric component ({names[i]}, {names[j]}) differs from ({names[j]}, {names[i]})")

    @classmethod
    def from_upper(cls, chart: ChartDomain, upper: Dict[Tuple[int, int], ScalarExpr], definiteness: str = POSITIVE_DEFINITE) -> "MetricField":
        """Build from {(i, j): expr} with i <= j; missing entries are zero."""
        zero = ScalarExpr.constant(0.0, chart.coords)
        d = chart.dim
        rows = [[zero] * d for _ in range(d)]
        for (i, j), e in upper.items():
            rows[i][j] = e
            rows[j][i] = e
        return cls(chart, tuple(tuple(r) for r in rows), definiteness)

    @classmethod
    def diagonal(cls, chart: ChartDomain, entries: Sequence[ScalarExpr], definiteness: str = POSITIVE_DEFINITE) -> "MetricField":
        return cls.from_upper(chart, {(i, i): e for i, e in enumerate(entries)}, definiteness)

    @classmethod
    def euclidean(cls, chart: ChartDomain) -> "MetricField":
        one = ScalarExpr.constant(1.0, chart.coords)
        return cls.diagonal(chart, [one] * chart.dim)

    @classmethod
    def parse(cls, chart: ChartDomain, rows: Sequence[Sequence[str]], definiteness: str = POSITIVE_DEFINITE) -> "MetricField":
        return cls(chart, tuple(tuple(parse_expr(s, chart.coords) for s in row) for row in rows), definiteness)

    @property
    def dim(self) -> int:
        return self.chart.dim

    @property
    def is_degenerate(self) -> bool:
        return self.definiteness == POSITIVE_SEMIDEFINITE

    def flat(self) -> List[ScalarExpr]:
        return [e for row in self.comp for e in row]

    def jets(self, point: Sequence[float], order: int) -> List[np.ndarray]:
        """[g (d,d), dg (d,d,d), ddg (d,d,d,d)] up to `order`."""
        d = self.dim
        upper = list(zip(*np.triu_indices(d)))
        stacked = _component_jets([self.comp[i][j] for i, j in upper], point, order)
        out = []
        for a in stacked:
            full = np.empty((d, d) + a.shape[1:])
            for n, (i, j) in enumerate(upper):
                full[i, j] = a[n]
                full[j, i] = a[n]
            out.append(full)
        return out

    def to_sources(self) -> List[List[str]]:
        return [[e.to_source() for e in row] for row in self.comp]


@dataclass(frozen=True)
class VectorField:
    chart: ChartDomain
    comp: Tuple[ScalarExpr, ...]

    def __post_init__(self):
        object.__setattr__(self, "comp", tuple(self.comp))
        if len(self.comp) != self.chart.dim:
            raise ValueError(f"vector field needs {self.chart.dim} components, got {len(self.comp)}")
        _check_chart(self.chart, self.comp, "vector field")

    @classmethod
    def parse(cls, chart: ChartDomain, sources: Sequence[str]) -> "VectorField":
        return cls(chart, tuple(parse_expr(s, chart.coords) for s in sources))

    @classmethod
    def euler(cls, chart: ChartDomain) -> "VectorField":
        """sum_i x^i d_i"""
        return cls(chart, tuple(ScalarExpr.coordinate(n, chart.coords) for n in chart.coords))

    @classmethod
    def coordinate_frame(cls, chart: ChartDomain, index: int) -> "VectorField":
        zero = ScalarExpr.constant(0.0, chart.coords)
        one = ScalarExpr.constant(1.0, chart.coords)
        return cls(chart, tuple(one if k == index else zero for k in range(chart.dim)))

    def jets(self, point: Sequence[float], order: int) -> List[np.ndarray]:
        """[V (d,), J (d,d) with J[k, i] = d_i V^k, ...]"""
        return _component_jets(self.comp, point, order)

    def to_sources(self) -> List[str]:
        return [e.to_source() for e in self.comp]


@dataclass(frozen=True)
class OneFormField:
    chart: ChartDomain
    comp: Tuple[ScalarExpr, ...]

    def __post_init__(self):
        object.__setattr__(self, "comp", tuple(self.comp))
        if len(self.comp) != self.chart.dim:
            raise ValueError(f"one-form needs {self.chart.dim} components, got {len(self.comp)}")
        _check_chart(self.chart, self.comp, "one-form")

    @classmethod
    def parse(cls, chart: ChartDomain, sources: Sequence[str]) -> "OneFormField":
        return cls(chart, tuple(parse_expr(s, chart.coords) for s in sources))

    @classmethod
    def zero(cls, chart: ChartDomain) -> "OneFormField":
        return cls(chart, tuple(ScalarExpr.constant(0.0, chart.coords) for _ in chart.coords))

    def jets(self, point: Sequence[float], order: int) -> List[np.ndarray]:
        """[w (d,), J (d,d) with J[j, i] = d_i w_j, ...]"""
        return _component_jets(self.comp, point, order)

    def is_zero(self) -> bool:
        return all(e.is_zero() for e in self.comp)

    def to_sources(self) -> List[str]:
        return [e.to_source() for e in self.comp]


ChristoffelTable = Tuple[Tuple[Tuple[ScalarExpr, ...], ...], ...]


@dataclass(frozen=True)
class Connection:
    """
    Christoffel field of an affine connection: Levi-Civita of a metric or
    explicit Gamma^k_ij expressions.
    """
    chart: ChartDomain
    kind: str
    metric: Optional[MetricField] = None
    table: Optional[ChristoffelTable] = None
    symmetric_claim: bool = True

    def __post_init__(self):
        if self.kind == LEVI_CIVITA:
            if self.metric is None:
                raise ValueError("a Levi-Civita connection needs a metric")
            if self.metric.is_degenerate:
                raise ValueError("a degenerate metric has no Levi-Civita connection")
        elif self.kind == EXPLICIT:
            d = self.chart.dim
            if self.table is None or len(self.table) != d or any(
                len(plane) != d or any(len(row) != d for row in plane) for plane in self.table
            ):
                raise ValueError(f"explicit connection needs {d}x{d}x{d} Christoffel expressions")
            _check_chart(self.chart, [e for plane in self.table for row in plane for e in row], "Christoffel")
        else:
            raise ValueError(f"unknown connection kind '{self.kind}'")

    @classmethod
    def levi_civita(cls, metric: MetricField) -> "Connection":
        return cls(metric.chart, LEVI_CIVITA, metric=metric)

    @classmethod
    def explicit(
        cls,
        chart: ChartDomain,
        entries: Dict[Tuple[int, int, int], ScalarExpr],
        mirror: bool = True,
        symmetric_claim: bool = True,
    ) -> "Connection":
        """
        Build from {(k, i, j): Gamma^k_ij}; missing entries are zero.
        With `mirror`, each entry is also stored at (k, j, i).
        """
        zero = ScalarExpr.constant(0.0, chart.coords)
        d = chart.dim
        table = [[[zero] * d for _ in range(d)] for _ in range(d)]
        for (k, i, j), e in entries.items():
            table[k][i][j] = e
            if mirror:
                table[k][j][i] = e
        frozen = tuple(tuple(tuple(row) for row in plane) for plane in table)
        return cls(chart, EXPLICIT, table=frozen, symmetric_claim=symmetric_claim)

    @classmethod
    def cartesian_flat(cls, chart: ChartDomain) -> "Connection":
        return cls.explicit(chart, {})

    @property
    def dim(self) -> int:
        return self.chart.dim

    def coefficients(self, point: Sequence[float], derivatives: bool = False) -> Tuple[np.ndarray, Optional[np.ndarray]]:
        """
        Gamma[k, i, j] at a point, and dGamma[k, i, j, m] when `derivatives`.

        Raises:
            SingularMetricError: Levi-Civita of a singular metric
        """
        if self.kind == LEVI_CIVITA:
            return levi_civita_coefficients(self.metric, point, derivatives)
        d = self.dim
        exprs = [e for plane in self.table for row in plane for e in row]
        stacked = _component_jets(exprs, point, 1 if derivatives else 0)
        gamma = stacked[0].reshape(d, d, d)
        d_gamma = stacked[1].reshape(d, d, d, d) if derivatives else None
        return gamma, d_gamma

    def to_entries(self) -> Dict[Tuple[int, int, int], ScalarExpr]:
        """Nonzero explicit entries (all index orders)."""
        if self.table is None:
            return {}
        d = self.dim
        return {
            (k, i, j): self.table[k][i][j]
            for k, i, j in itertools.product(range(d), repeat=3)
            if not self.table[k][i][j].is_zero()
        }


# ----------------------------------------------------------------------------
# Array kernels (shared with the cone and hessian checks)
# ----------------------------------------------------------------------------

def christoffel_from_jets(g_inv: np.ndarray, dg: np.ndarray) -> np.ndarray:
    """Gamma^k_ij = 1/2 g^kl (d_i g_jl + d_j g_il - d_l g_ij)."""
    s = np.einsum("jli->lij", dg) + np.einsum("ilj->lij", dg) - np.einsum("ijl->lij", dg)
    return 0.5 * np.einsum("kl,lij->kij", g_inv, s)


def christoffel_derivative_from_jets(g_inv: np.ndarray, dg: np.ndarray, ddg: np.ndarray) -> np.ndarray:
    """d_m Gamma^k_ij using d g^-1 = -g^-1 (dg) g^-1."""
    s = np.einsum("jli->lij", dg) + np.einsum("ilj->lij", dg) - np.einsum("ijl->lij", dg)
    ds = np.einsum("jlim->lijm", ddg) + np.einsum("iljm->lijm", ddg) - np.einsum("ijlm->lijm", ddg)
    d_g_inv = -np.einsum("ka,abm,bl->klm", g_inv, dg, g_inv)
    return 0.5 * (np.einsum("klm,lij->kijm", d_g_inv, s) + np.einsum("kl,lijm->kijm", g_inv, ds))


def levi_civita_coefficients(
    metric: MetricField, point: Sequence[float], derivatives: bool = False
) -> Tuple[np.ndarray, Optional[np.ndarray]]:
    arrays = metric.jets(point, 2 if derivatives else 1)
    g_inv = symmetric_inverse(arrays[0])
    gamma = christoffel_from_jets(g_inv, arrays[1])
    d_gamma = christoffel_derivative_from_jets(g_inv, arrays[1], arrays[2]) if derivatives else None
    return gamma, d_gamma


def curvature_from_coefficients(gamma: np.ndarray, d_gamma: np.ndarray) -> np.ndarray:
    """R[l, k, i, j] = d_i G^l_jk - d_j G^l_ik + G^l_im G^m_jk - G^l_jm G^m_ik."""
    return (
        np.einsum("ljki->lkij", d_gamma)
        - np.einsum("likj->lkij", d_gamma)
        + np.einsum("lim,mjk->lkij", gamma, gamma)
        - np.einsum("ljm,mik->lkij", gamma, gamma)
    )


def lie_derivative_components(x: np.ndarray, jx: np.ndarray, g: np.ndarray, dg: np.ndarray) -> np.ndarray:
    """X^k d_k g_ij + g_kj d_i X^k + g_ik d_j X^k."""
    return np.einsum("k,ijk->ij", x, dg) + np.einsum("kj,ki->ij", g, jx) + np.einsum("ik,kj->ij", g, jx)


def covariant_oneform_components(gamma: np.ndarray, w: np.ndarray, jw: np.ndarray) -> np.ndarray:
    """[i, j] = d_i w_j - Gamma^k_ij w_k, with jw[j, i] = d_i w_j."""
    return jw.T - np.einsum("kij,k->ij", gamma, w)


def exterior_components(jw: np.ndarray) -> np.ndarray:
    """(dw)_ij = d_i w_j - d_j w_i, with jw[j, i] = d_i w_j."""
    return jw.T - jw


def hessian_components(gamma: np.ndarray, dphi: np.ndarray, ddphi: np.ndarray) -> np.ndarray:
    return ddphi - np.einsum("kij,k->ij", gamma, dphi)


def hessian_derivative_components(
    gamma: np.ndarray, d_gamma: np.ndarray, dphi: np.ndarray, ddphi: np.ndarray, dddphi: np.ndarray
) -> np.ndarray:
    """dH[i, j, m] = d_m (d_i d_j phi - Gamma^k_ij d_k phi)."""
    return (
        dddphi
        - np.einsum("kijm,k->ijm", d_gamma, dphi)
        - np.einsum("kij,km->ijm", gamma, ddphi)
    )


# ----------------------------------------------------------------------------
# Pointwise operations
# ----------------------------------------------------------------------------

def metric_at(g: MetricField, point: Sequence[float]) -> Tensor02:
    """Component values of g at a point (must lie in the chart)."""
    g.chart.require(point)
    return Tensor02(g.jets(point, 0)[0], symmetric=True)


def inverse_metric(m: Tensor02) -> Tensor02:
    """
    Raises:
        SingularMetricError: condition number above CONDITION_BOUND
    """
    return Tensor02(symmetric_inverse(m.values), symmetric=True)


def christoffel(g: MetricField, point: Sequence[float]) -> np.ndarray:
    """Levi-Civita Christoffel symbols Gamma[k, i, j] of g at a point."""
    g.chart.require(point)
    return levi_civita_coefficients(g, point)[0]


def lie_bracket(x: VectorField, y: VectorField, point: Sequence[float]) -> np.ndarray:
    """[X, Y]^k = X^i d_i Y^k - Y^i d_i X^k."""
    x0, jx = x.jets(point, 1)
    y0, jy = y.jets(point, 1)
    return jy @ x0 - jx @ y0


def covariant_derivative_vector(c: Connection, v: VectorField, point: Sequence[float]) -> np.ndarray:
    """Entry [k, i] = (nabla_i V)^k = d_i V^k + Gamma^k_ij V^j."""
    v0, jv = v.jets(point, 1)
    gamma, _ = c.coefficients(point)
    return jv + np.einsum("kij,j->ki", gamma, v0)


def covariant_derivative_oneform(c: Connection, w: OneFormField, point: Sequence[float]) -> Tensor02:
    """Entry [i, j] = d_i w_j - Gamma^k_ij w_k."""
    w0, jw = w.jets(point, 1)
    gamma, _ = c.coefficients(point)
    return Tensor02(covariant_oneform_components(gamma, w0, jw))


def lie_derivative_metric(x: VectorField, g: MetricField, point: Sequence[float]) -> Tensor02:
    x0, jx = x.jets(point, 1)
    g0, dg = g.jets(point, 1)
    return Tensor02(lie_derivative_components(x0, jx, g0, dg), symmetric=True)


def lie_derivative_metric_frame(x: VectorField, g: MetricField, point: Sequence[float]) -> Tensor02:
    """
    Lie_X g on the coordinate frame via brackets:
    (Lie_X g)(E_i, E_j) = X(g_ij) - g([X, E_i], E_j) - g(E_i, [X, E_j]).
    """
    d = g.dim
    x0, _ = x.jets(point, 1)
    g0, dg = g.jets(point, 1)
    brackets = [lie_bracket(x, VectorField.coordinate_frame(g.chart, i), point) for i in range(d)]
    out = np.empty((d, d))
    for i, j in itertools.product(range(d), repeat=2):
        out[i, j] = dg[i, j] @ x0 - brackets[i] @ g0[:, j] - g0[i, :] @ brackets[j]
    return Tensor02(out, symmetric=True)


def exterior_derivative_oneform(w: OneFormField, point: Sequence[float]) -> Tensor02:
    _, jw = w.jets(point, 1)
    return Tensor02(exterior_components(jw))


def flat_hessian(c: Connection, phi: ScalarExpr, point: Sequence[float]) -> Tensor02:
    """(Hess phi)_ij = d_i d_j phi - Gamma^k_ij d_k phi."""
    jet = eval_jet(phi, point, 2)
    gamma, _ = c.coefficients(point)
    return Tensor02(hessian_components(gamma, jet.first, jet.second), symmetric=c.symmetric_claim)


def flat_hessian_jet(c: Connection, phi: ScalarExpr, point: Sequence[float]) -> Tuple[np.ndarray, np.ndarray]:
    """Hess phi and its first derivatives dH[i, j, m]; needs order-3 jets of phi."""
    jet = eval_jet(phi, point, 3)
    gamma, d_gamma = c.coefficients(point, derivatives=True)
    hess = hessian_components(gamma, jet.first, jet.second)
    d_hess = hessian_derivative_components(gamma, d_gamma, jet.first, jet.second, jet.third)
    return hess, d_hess


def interior_product(x: VectorField, g: MetricField) -> OneFormField:
    """theta_j = g_ij X^i, built from component expressions."""
    coords = g.chart.coords
    d = g.dim
    comp = tuple(expr_sum([g.comp[i][j] * x.comp[i] for i in range(d)], coords) for j in range(d))
    return OneFormField(g.chart, comp)


def riemann_tensor(c: Connection, point: Sequence[float]) -> np.ndarray:
    """R[l, k, i, j] = R^l_kij of the connection at a point."""
    gamma, d_gamma = c.coefficients(point, derivatives=True)
    return curvature_from_coefficients(gamma, d_gamma)


def torsion(c: Connection, point: Sequence[float]) -> np.ndarray:
    gamma, _ = c.coefficients(point)
    return gamma - gamma.transpose(0, 2, 1)


def metric_compatibility(c: Connection, g: MetricField, point: Sequence[float]) -> np.ndarray:
    """[k, i, j] = d_k g_ij - Gamma^l_ki g_lj - Gamma^l_kj g_il (zero for Levi-Civita)."""
    g0, dg = g.jets(point, 1)
    gamma, _ = c.coefficients(point)
    return (
        np.einsum("ijk->kij", dg)
        - np.einsum("lki,lj->kij", gamma, g0)
        - np.einsum("lkj,il->kij", gamma, g0)
    )


# ----------------------------------------------------------------------------
# Expression-level helpers
# ----------------------------------------------------------------------------

def expression_determinant(rows: Sequence[Sequence[ScalarExpr]]) -> ScalarExpr:
    """Cofactor expansion along the first row."""
    n = len(rows)
    if n == 1:
        return rows[0][0]
    coords = rows[0][0].coords
    terms = []
    for j in range(n):
        minor = [[row[c] for c in range(n) if c != j] for row in rows[1:]]
        term = rows[0][j] * expression_determinant(minor)
        terms.append(term if j % 2 == 0 else -term)
    return expr_sum(terms, coords)


def expression_inverse(rows: Sequence[Sequence[ScalarExpr]]) -> List[List[ScalarExpr]]:
    """Adjugate over determinant, as expressions."""
    n = len(rows)
    det = expression_determinant(rows)
    if n == 1:
        return [[1.0 / det]]
    inverse = [[None] * n for _ in range(n)]
    for i, j in itertools.product(range(n), repeat=2):
        minor = [[rows[r][c] for c in range(n) if c != i] for r in range(n) if r != j]
        cofactor = expression_determinant(minor)
        if (i + j) % 2:
            cofactor = -cofactor
        inverse[i][j] = cofactor / det
    return inverse


def dual_norm_squared(g: MetricField, w: OneFormField) -> ScalarExpr:
    """g^-1(w, w) = g^ij w_i w_j as an expression."""
    d = g.dim
    nonzero = [i for i in range(d) if not w.comp[i].is_zero()]
    if not nonzero:
        return ScalarExpr.constant(0.0, g.chart.coords)
    inverse = expression_inverse(g.comp)
    terms = [inverse[i][j] * w.comp[i] * w.comp[j] for i in nonzero for j in nonzero]
    return expr_sum(terms, g.chart.coords)


# ----------------------------------------------------------------------------
# Sampled checks
# ----------------------------------------------------------------------------

def check_flat_torsion_free(
    c: Connection, samples: Sequence[Sequence[float]], tol: float, workers: int = MAX_WORKERS
) -> Tuple[StructureReport, StructureReport]:
    """
    Torsion |Gamma^k_ij - Gamma^k_ji| and curvature |R^l_kij| over samples.

    Returns:
        (torsion_free report, flat report); the connection is flat and
        torsion-free iff both pass
    """
    torsion_report = StructureReport.from_residuals(
        "torsion_free", samples, lambda p: max_abs(torsion(c, p)), tol, workers
    )
    curvature_report = StructureReport.from_residuals(
        "flat", samples, lambda p: max_abs(riemann_tensor(c, p)), tol, workers
    )
    return torsion_report, curvature_report


def check_metric_compatibility(
    c: Connection, g: MetricField, samples: Sequence[Sequence[float]], tol: float, workers: int = MAX_WORKERS
) -> StructureReport:
    return StructureReport.from_residuals(
        "metric_compatible", samples, lambda p: max_abs(metric_compatibility(c, g, p)), tol, workers
    )


def check_definiteness(
    g: MetricField, samples: Sequence[Sequence[float]], workers: int = MAX_WORKERS
) -> StructureReport:
    """
    Smallest-eigenvalue sampling against the field's definiteness claim.

    Positive definite: residual max(0, floor - lambda_min), tolerance 0.
    Positive semidefinite: residual max(0, -lambda_min), tolerance
    SEMIDEFINITE_TOLERANCE.
    """
    if g.is_degenerate:
        return StructureReport.from_residuals(
            "positive_semidefinite",
            samples,
            lambda p: max(0.0, -smallest_eigenvalue(metric_at(g, p).values)),
            SEMIDEFINITE_TOLERANCE,
            workers,
        )
    return StructureReport.from_residuals(
        "positive_definite",
        samples,
        lambda p: max(0.0, POSITIVITY_FLOOR - smallest_eigenvalue(metric_at(g, p).values)),
        0.0,
        workers,
    )

