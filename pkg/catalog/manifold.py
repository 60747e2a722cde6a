# catalog/manifold.py
"""Manifold declarations: what the classifier, the catalog and spec files exchange."""

import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from analytics.report import FLAG_NAMES
from config import CheckConfig
from tools.cone import ConeMetricSpec, assemble_selfsimilar_metric, cone_chart, cone_vector_field
from tools.tensor import Connection, MetricField, VectorField
from utils.chart import ChartDomain
from utils.expr import ScalarExpr

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ManifoldSpec:
    """
    A chart with a metric, a distinguished field xi and optional extras.

    Args:
        id: Name used in reports
        metric: Metric field on the chart (assembled when `cone` is given)
        xi: The field tested for selfsimilarity / radiance
        connection: Flat connection for the radiant and Hessian checks
        potential: Declared potential of the metric
        cone: The triple the metric was assembled from, if any
        dilation: Coordinates scaled by the dilation map (default: last)
        expected: Declared flag expectations
        margin: Positivity margin for constructions that need one
    """
    id: str
    metric: MetricField
    xi: VectorField
    connection: Optional[Connection] = None
    potential: Optional[ScalarExpr] = None
    cone: Optional[ConeMetricSpec] = None
    dilation: Tuple[str, ...] = ()
    expected: Optional[Dict[str, bool]] = None
    margin: Optional[float] = None

    def __post_init__(self):
        coords = self.metric.chart.coords
        if self.xi.chart.coords != coords:
            raise ValueError("xi and the metric live on different charts")
        if self.connection is not None and self.connection.chart.coords != coords:
            raise ValueError("the connection and the metric live on different charts")
        if self.potential is not None and self.potential.coords != coords:
            raise ValueError("the potential is not bound to the metric's chart")
        unknown = set(self.dilation) - set(coords)
        if unknown:
            raise ValueError(f"dilation scales undeclared coordinates {sorted(unknown)}")
        if self.expected:
            bad = set(self.expected) - set(FLAG_NAMES)
            if bad:
                raise ValueError(f"unknown expected flags {sorted(bad)}")

    @property
    def chart(self) -> ChartDomain:
        return self.metric.chart

    @property
    def scaled_coordinates(self) -> Tuple[str, ...]:
        return self.dilation or (self.chart.coords[-1],)

    def samples(self, config: CheckConfig) -> List[Tuple[float, ...]]:
        return self.chart.sample_points(config.samples, config.seed)

    @classmethod
    def from_cone(
        cls,
        id: str,
        cone: ConeMetricSpec,
        config: CheckConfig = CheckConfig(),
        **kwargs,
    ) -> "ManifoldSpec":
        """Assemble the selfsimilar metric; xi defaults to t d/dt."""
        metric = assemble_selfsimilar_metric(cone, config)
        xi = kwargs.pop("xi", None) or cone_vector_field(cone_chart(cone), cone.t_name)
        kwargs.setdefault("dilation", (cone.t_name,))
        return cls(id, metric, xi, cone=cone, **kwargs)


@dataclass(frozen=True)
class NamedExample:
    """A catalog manifold with its analytically known classification."""
    id: str
    spec: ManifoldSpec
    expected: Dict[str, bool]
    provenance: str = ""

    def __post_init__(self):
        missing = set(FLAG_NAMES) - set(self.expected)
        if missing:
            raise ValueError(f"catalog entry '{self.id}' lacks expectations for {sorted(missing)}")
