# catalog/entries.py
"""
Built-in manifolds with analytically known classifications.

Each entry records the flags the classifier must reproduce and a short note
on why each flag holds.
"""

import logging
from typing import Dict, List

from catalog.manifold import ManifoldSpec, NamedExample
from config import CONE_T_RANGE, CheckConfig
from tools.cone import ConeMetricSpec, cone_chart, contact_selfsimilar_example
from tools.tensor import Connection, MetricField, OneFormField, VectorField
from utils.chart import ChartDomain
from utils.expr import ScalarExpr, parse_expr

logger = logging.getLogger(__name__)

ANGLE_PARAMETERS = (0.5, 2.0)
THETA_BOUND = (0.1, 1.5)

ALL_PASS = {
    "selfsimilar": True,
    "conical_riemannian": True,
    "radiant": True,
    "hessian_cone": True,
    "conical_hessian": True,
    "extensive_exists": True,
}
SELFSIMILAR_ONLY = {**{k: False for k in ALL_PASS}, "selfsimilar": True}
CONICAL_ONLY = {**SELFSIMILAR_ONLY, "conical_riemannian": True}
NONE_PASS = {k: False for k in ALL_PASS}


def _polar_chart() -> ChartDomain:
    return ChartDomain(("theta", "t"), {"theta": THETA_BOUND, "t": (0.0, None)}, {"t": CONE_T_RANGE})


def _theta_base() -> ChartDomain:
    return ChartDomain(("theta",), {"theta": THETA_BOUND})


def euclidean_cone_cartesian() -> NamedExample:
    chart = ChartDomain(("x", "y"), {"x": (0.0, None)}, {"x": (0.5, 2.0), "y": (-1.0, 1.0)})
    spec = ManifoldSpec(
        "euclidean_cone_cartesian",
        MetricField.euclidean(chart),
        VectorField.euler(chart),
        connection=Connection.cartesian_flat(chart),
        potential=parse_expr("(x^2 + y^2) / 2", chart.coords),
        dilation=("x", "y"),
    )
    return NamedExample(
        spec.id,
        spec,
        dict(ALL_PASS),
        "Flat plane away from the origin with the Euler field: the Euler field scales the flat "
        "metric, is parallel-identity for the flat connection, and (x^2+y^2)/2 is its potential.",
    )


def polar_connection(chart: ChartDomain, c: float = 1.0) -> Connection:
    """
    Flat connection of the plane carried to (theta, t) by
    (u, v) = (t cos(c theta), t sin(c theta)):
    Gamma^t_theta,theta = -c^2 t, Gamma^theta_theta,t = 1/t.
    """
    theta, t = chart.index("theta"), chart.index("t")
    t_expr = ScalarExpr.coordinate("t", chart.coords)
    return Connection.explicit(
        chart,
        {
            (t, theta, theta): t_expr * (-c * c),
            (theta, theta, t): 1.0 / t_expr,
        },
    )


def round_cone_polar() -> NamedExample:
    base = _theta_base()
    one = ScalarExpr.constant(1.0, base.coords)
    cone = ConeMetricSpec(base, MetricField.euclidean(base), OneFormField.zero(base), one)
    chart = cone_chart(cone)
    spec = ManifoldSpec.from_cone(
        "round_cone_polar",
        cone,
        connection=polar_connection(chart),
        potential=parse_expr("t^2 / 2", chart.coords),
    )
    return NamedExample(
        spec.id,
        spec,
        dict(ALL_PASS),
        "Metric cone t^2 dtheta^2 + dt^2 over an arc; the flat polar connection makes t d/dt "
        "radiant and t^2/2 the potential.",
    )


def angle_cone(c: float) -> NamedExample:
    base = _theta_base()
    one = ScalarExpr.constant(1.0, base.coords)
    g_m = MetricField.diagonal(base, [ScalarExpr.constant(c * c, base.coords)])
    cone = ConeMetricSpec(base, g_m, OneFormField.zero(base), one)
    chart = cone_chart(cone)
    spec = ManifoldSpec.from_cone(
        f"angle_cone_c{c:g}",
        cone,
        connection=polar_connection(chart, c),
        potential=parse_expr("t^2 / 2", chart.coords),
    )
    return NamedExample(
        spec.id,
        spec,
        dict(ALL_PASS),
        f"Cone of angle parameter {c:g}: the flat metric pulled back by "
        f"(t cos({c:g} theta), t sin({c:g} theta)), with the transported flat connection.",
    )


def contact_cone(config: CheckConfig = CheckConfig()) -> NamedExample:
    base = ChartDomain(("x", "y", "z"))
    alpha = OneFormField.parse(base, ["-y", "0", "1"])
    cone = contact_selfsimilar_example(alpha, MetricField.euclidean(base), 1.0, config)
    spec = ManifoldSpec.from_cone("contact_cone", cone, config)
    return NamedExample(
        spec.id,
        spec,
        dict(SELFSIMILAR_ONLY),
        "Contact form dz - y dx with f = 1 + y^2 + 1 on the base block: selfsimilar by "
        "construction, but d(iota_xi g) contains t^2 d alpha != 0 so it is not conical.",
    )


def warped_noncone() -> NamedExample:
    base = ChartDomain(("x",), {"x": (-1.0, 1.0)})
    cone = ConeMetricSpec(
        base,
        MetricField.euclidean(base),
        OneFormField.zero(base),
        parse_expr("2 + sin(x)", base.coords),
    )
    spec = ManifoldSpec.from_cone("warped_noncone", cone)
    return NamedExample(
        spec.id,
        spec,
        dict(SELFSIMILAR_ONLY),
        "alpha = 0 with nonconstant f: selfsimilar, but df != 2 alpha so not conical.",
    )


def exact_alpha_cone() -> NamedExample:
    base = ChartDomain(("x", "y", "z"))
    cone = ConeMetricSpec(
        base,
        MetricField.euclidean(base),
        OneFormField.parse(base, ["0", "0", "0.5 * cos(z)"]),
        parse_expr("2 + sin(z)", base.coords),
    )
    spec = ManifoldSpec.from_cone("exact_alpha_cone", cone)
    return NamedExample(
        spec.id,
        spec,
        dict(CONICAL_ONLY),
        "f = 2 + sin z with alpha = 1/2 cos z dz, so df = 2 alpha: selfsimilar and conical; "
        "no flat connection is declared.",
    )


def product_nonselfsimilar() -> NamedExample:
    chart = _polar_chart()
    spec = ManifoldSpec(
        "product_nonselfsimilar",
        MetricField.euclidean(chart),
        VectorField.parse(chart, ["0", "t"]),
        dilation=("t",),
    )
    return NamedExample(
        spec.id,
        spec,
        dict(NONE_PASS),
        "Product metric dtheta^2 + dt^2: the dtheta^2 term does not scale under t d/dt.",
    )


def catalog_entries(config: CheckConfig = CheckConfig()) -> List[NamedExample]:
    """All built-in manifolds, in a fixed order."""
    entries = [
        euclidean_cone_cartesian(),
        round_cone_polar(),
        *(angle_cone(c) for c in ANGLE_PARAMETERS),
        contact_cone(config),
        warped_noncone(),
        exact_alpha_cone(),
        product_nonselfsimilar(),
    ]
    logger.debug(f"Catalog holds {len(entries)} entries")
    return entries


def catalog_by_id(config: CheckConfig = CheckConfig()) -> Dict[str, NamedExample]:
    return {entry.id: entry for entry in catalog_entries(config)}
