# handlers/spec_file.py
"""
Manifold spec files: JSON documents with expression strings as leaves.

See docs/spec_file_schema.md for the schema. Loading validates the document
and builds a ManifoldSpec; dumping renders a ManifoldSpec back so that the
written file re-loads to the same fields.
"""

import json
import logging
import math
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

from analytics.report import FLAG_NAMES, dumps
from catalog.manifold import ManifoldSpec
from config import CheckConfig
from tools.cone import ConeMetricSpec, assemble_selfsimilar_metric
from tools.tensor import (
    DEFINITENESS,
    LEVI_CIVITA,
    POSITIVE_DEFINITE,
    Connection,
    MetricField,
    OneFormField,
    VectorField,
)
from utils.chart import ChartDomain
from utils.error_handler import ExprSyntaxError, SpecFileError
from utils.expr import ScalarExpr, parse_expr

logger = logging.getLogger(__name__)

TOP_LEVEL_KEYS = {
    "id", "chart", "metric", "cone", "xi", "connection", "potential",
    "definiteness", "dilation", "expected", "margin", "verification", "notes",
}
CONE_KEYS = {"g_M", "alpha", "f", "f_placement"}
PLACEMENTS = ("dt2", "base")


def read_document(path: str) -> Dict[str, Any]:
    """
    Raises:
        SpecFileError: Unreadable file, malformed JSON (with line/column) or
            a top level that is not an object
    """
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise SpecFileError(f"cannot read spec file: {exc.strerror or exc}", path) from exc
    try:
        document = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecFileError(exc.msg, path, exc.lineno, exc.colno) from exc
    if not isinstance(document, dict):
        raise SpecFileError("top level must be an object", path, 1, 1)
    return document


def write_document(document: Dict[str, Any], path: str) -> None:
    target = Path(path)
    if target.parent and not target.parent.exists():
        target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(dumps(document), encoding="utf-8")
    logger.info(f"💾 Wrote spec file {path}")


class SpecValidator:
    """Static validators: each normalizes one part of a document or raises SpecFileError."""

    @staticmethod
    def require(document: Dict[str, Any], key: str, path: str, kind: type, where: str = "") -> Any:
        full = f"{where}.{key}" if where else key
        if key not in document:
            raise SpecFileError("missing required key", path, key=full)
        value = document[key]
        if not isinstance(value, kind) or isinstance(value, bool) and kind is not bool:
            raise SpecFileError(f"expected {kind.__name__}, got {type(value).__name__}", path, key=full)
        return value

    @staticmethod
    def check_keys(document: Dict[str, Any], allowed: set, path: str, where: str = "") -> None:
        unknown = sorted(set(document) - allowed)
        if unknown:
            raise SpecFileError(f"unknown keys {unknown}", path, key=where or "<top>")

    @staticmethod
    def number(value: Any, path: str, key: str, allow_null: bool = False) -> Optional[float]:
        if value is None and allow_null:
            return None
        if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
            raise SpecFileError(f"expected a finite number, got {value!r}", path, key=key)
        return float(value)

    @staticmethod
    def interval(value: Any, path: str, key: str, allow_null: bool) -> Tuple[Optional[float], Optional[float]]:
        if not isinstance(value, list) or len(value) != 2:
            raise SpecFileError("expected a two-element list [lo, hi]", path, key=key)
        return (
            SpecValidator.number(value[0], path, f"{key}[0]", allow_null),
            SpecValidator.number(value[1], path, f"{key}[1]", allow_null),
        )

    @staticmethod
    def chart(document: Dict[str, Any], path: str) -> ChartDomain:
        section = SpecValidator.require(document, "chart", path, dict)
        SpecValidator.check_keys(section, {"coords", "bounds", "sample_box", "dim"}, path, "chart")
        coords = SpecValidator.require(section, "coords", path, list, "chart")
        if not coords or not all(isinstance(c, str) and c.isidentifier() for c in coords):
            raise SpecFileError("coordinates must be a non-empty list of identifiers", path, key="chart.coords")
        if "dim" in section and section["dim"] != len(coords):
            raise SpecFileError(f"dim {section['dim']} does not match {len(coords)} coordinates", path, key="chart.dim")
        bounds = {
            name: SpecValidator.interval(value, path, f"chart.bounds.{name}", True)
            for name, value in section.get("bounds", {}).items()
        }
        box = {
            name: SpecValidator.interval(value, path, f"chart.sample_box.{name}", False)
            for name, value in section.get("sample_box", {}).items()
        }
        try:
            return ChartDomain(tuple(coords), bounds, box)
        except ValueError as exc:
            raise SpecFileError(str(exc), path, key="chart") from exc

    @staticmethod
    def expression(source: Any, coords: Sequence[str], path: str, key: str) -> ScalarExpr:
        if isinstance(source, (int, float)) and not isinstance(source, bool):
            source = repr(float(source))
        if not isinstance(source, str):
            raise SpecFileError(f"expected an expression string, got {type(source).__name__}", path, key=key)
        try:
            return parse_expr(source, coords)
        except ExprSyntaxError as exc:
            raise SpecFileError(str(exc), path, key=key) from exc

    @staticmethod
    def vector(value: Any, coords: Sequence[str], path: str, key: str) -> List[ScalarExpr]:
        if not isinstance(value, list) or len(value) != len(coords):
            raise SpecFileError(f"expected a list of {len(coords)} expressions", path, key=key)
        return [SpecValidator.expression(v, coords, path, f"{key}[{i}]") for i, v in enumerate(value)]

    @staticmethod
    def matrix(value: Any, coords: Sequence[str], path: str, key: str) -> List[List[ScalarExpr]]:
        if not isinstance(value, list) or len(value) != len(coords):
            raise SpecFileError(f"expected {len(coords)} rows", path, key=key)
        return [SpecValidator.vector(row, coords, path, f"{key}[{i}]") for i, row in enumerate(value)]

    @staticmethod
    def metric(value: Any, chart: ChartDomain, definiteness: str, path: str, key: str) -> MetricField:
        rows = SpecValidator.matrix(value, chart.coords, path, key)
        try:
            return MetricField(chart, tuple(tuple(r) for r in rows), definiteness)
        except ValueError as exc:
            raise SpecFileError(str(exc), path, key=key) from exc

    @staticmethod
    def connection(value: Any, chart: ChartDomain, metric: Optional[MetricField], path: str) -> Connection:
        if value == "cartesian_flat":
            return Connection.cartesian_flat(chart)
        if value == LEVI_CIVITA:
            if metric is None or metric.is_degenerate:
                raise SpecFileError("levi_civita needs a positive definite metric", path, key="connection")
            return Connection.levi_civita(metric)
        if not isinstance(value, dict) or value.get("kind") != "christoffel":
            raise SpecFileError(
                "expected 'cartesian_flat', 'levi_civita' or {\"kind\": \"christoffel\", ...}", path, key="connection"
            )
        SpecValidator.check_keys(value, {"kind", "symmetric", "components"}, path, "connection")
        symmetric = value.get("symmetric", True)
        if not isinstance(symmetric, bool):
            raise SpecFileError("expected a boolean", path, key="connection.symmetric")
        components = SpecValidator.require(value, "components", path, dict, "connection")
        entries = {}
        for upper, lowers in components.items():
            if upper not in chart.coords or not isinstance(lowers, dict):
                raise SpecFileError(f"unknown upper index '{upper}'", path, key="connection.components")
            for pair, source in lowers.items():
                names = pair.split()
                key = f"connection.components.{upper}.{pair}"
                if len(names) != 2 or any(n not in chart.coords for n in names):
                    raise SpecFileError("lower indices must be two coordinate names separated by a space", path, key=key)
                index = (chart.index(upper), chart.index(names[0]), chart.index(names[1]))
                entries[index] = SpecValidator.expression(source, chart.coords, path, key)
        return Connection.explicit(chart, entries, mirror=symmetric, symmetric_claim=symmetric)

    @staticmethod
    def expected(value: Any, path: str) -> Dict[str, bool]:
        if not isinstance(value, dict):
            raise SpecFileError("expected an object of flag -> pass/fail", path, key="expected")
        out = {}
        for name, verdict in value.items():
            if name not in FLAG_NAMES:
                raise SpecFileError(f"unknown flag '{name}'", path, key="expected")
            if verdict not in ("pass", "fail", True, False):
                raise SpecFileError(f"expected 'pass' or 'fail', got {verdict!r}", path, key=f"expected.{name}")
            out[name] = verdict in ("pass", True)
        return out

    @staticmethod
    def cone_parts(
        document: Dict[str, Any], chart: ChartDomain, path: str, require_f: bool = True
    ) -> Tuple[ChartDomain, MetricField, OneFormField, Optional[ScalarExpr], bool]:
        """(base chart, g_M, alpha, f or None, f_on_base) of a cone block; t is the last chart coordinate."""
        section = SpecValidator.require(document, "cone", path, dict)
        SpecValidator.check_keys(section, CONE_KEYS, path, "cone")
        if chart.dim < 2:
            raise SpecFileError("a cone chart needs base coordinates plus t", path, key="chart.coords")
        t_name = chart.coords[-1]
        lo, _ = chart.bound(t_name)
        if lo is None or lo < 0.0:
            raise SpecFileError(f"cone coordinate '{t_name}' must be bounded below by 0 or more", path, key="chart.bounds")
        base = chart.restrict(chart.coords[:-1])
        g_m = SpecValidator.metric(
            SpecValidator.require(section, "g_M", path, list, "cone"), base, POSITIVE_DEFINITE, path, "cone.g_M"
        )
        alpha = OneFormField(base, tuple(SpecValidator.vector(section.get("alpha"), base.coords, path, "cone.alpha")))
        f = None
        if "f" in section:
            f = SpecValidator.expression(section["f"], base.coords, path, "cone.f")
        elif require_f:
            raise SpecFileError("missing required key", path, key="cone.f")
        placement = section.get("f_placement", "dt2")
        if placement not in PLACEMENTS:
            raise SpecFileError(f"expected one of {list(PLACEMENTS)}", path, key="cone.f_placement")
        return base, g_m, alpha, f, placement == "base"


def cone_spec_from_parts(
    chart: ChartDomain, base: ChartDomain, g_m: MetricField, alpha: OneFormField, f: ScalarExpr, f_on_base: bool
) -> ConeMetricSpec:
    t_name = chart.coords[-1]
    return ConeMetricSpec(base, g_m, alpha, f, f_on_base, t_name, chart.bound(t_name), chart.box(t_name))


def spec_from_document(document: Dict[str, Any], path: str = "", config: CheckConfig = CheckConfig()) -> ManifoldSpec:
    """
    Build a ManifoldSpec from a parsed document.

    Raises:
        SpecFileError: Schema violation
        PositivityError: A cone block assembles to a non positive definite metric
    """
    v = SpecValidator
    v.check_keys(document, TOP_LEVEL_KEYS, path)
    spec_id = document.get("id", Path(path).stem if path else "spec")
    if not isinstance(spec_id, str):
        raise SpecFileError("expected a string", path, key="id")
    chart = v.chart(document, path)

    definiteness = document.get("definiteness", POSITIVE_DEFINITE)
    if definiteness not in DEFINITENESS:
        raise SpecFileError(f"expected one of {list(DEFINITENESS)}", path, key="definiteness")
    if ("metric" in document) == ("cone" in document):
        raise SpecFileError("give exactly one of 'metric' or 'cone'", path, key="<top>")

    extras: Dict[str, Any] = {}
    if "potential" in document:
        extras["potential"] = v.expression(document["potential"], chart.coords, path, "potential")
    if "expected" in document:
        extras["expected"] = v.expected(document["expected"], path)
    if "margin" in document:
        extras["margin"] = v.number(document["margin"], path, "margin")
    if "dilation" in document:
        scaled = document["dilation"]
        if not isinstance(scaled, list) or not all(isinstance(n, str) and n in chart.coords for n in scaled):
            raise SpecFileError("expected a list of chart coordinates", path, key="dilation")
        extras["dilation"] = tuple(scaled)
    xi = None
    if "xi" in document:
        xi = VectorField(chart, tuple(v.vector(document["xi"], chart.coords, path, "xi")))

    try:
        if "cone" in document:
            if definiteness != POSITIVE_DEFINITE:
                raise SpecFileError("a cone block always assembles a positive definite metric", path, key="definiteness")
            base, g_m, alpha, f, f_on_base = v.cone_parts(document, chart, path)
            cone = cone_spec_from_parts(chart, base, g_m, alpha, f, f_on_base)
            if "connection" in document:
                metric = assemble_selfsimilar_metric(cone, config)
                extras["connection"] = v.connection(document["connection"], chart, metric, path)
            if xi is not None:
                extras["xi"] = xi
            spec = ManifoldSpec.from_cone(spec_id, cone, config, **extras)
        else:
            metric = v.metric(document["metric"], chart, definiteness, path, "metric")
            if xi is None:
                raise SpecFileError("missing required key", path, key="xi")
            if "connection" in document:
                extras["connection"] = v.connection(document["connection"], chart, metric, path)
            spec = ManifoldSpec(spec_id, metric, xi, **extras)
    except ValueError as exc:
        raise SpecFileError(str(exc), path) from exc
    logger.debug(f"Loaded spec '{spec.id}' on {list(chart.coords)}")
    return spec


def load_spec(path: str, config: CheckConfig = CheckConfig()) -> ManifoldSpec:
    return spec_from_document(read_document(path), path, config)


# ----------------------------------------------------------------------------
# Rendering
# ----------------------------------------------------------------------------

def chart_to_document(chart: ChartDomain) -> Dict[str, Any]:
    return {
        "coords": list(chart.coords),
        "bounds": {name: list(chart.bound(name)) for name in chart.coords if chart.bound(name) != (None, None)},
        "sample_box": {name: list(chart.box(name)) for name in chart.coords},
    }


def connection_to_document(c: Connection) -> Any:
    if c.kind == LEVI_CIVITA:
        return LEVI_CIVITA
    entries = c.to_entries()
    if not entries:
        return "cartesian_flat"
    names = c.chart.coords
    symmetric = c.symmetric_claim and all(
        (k, j, i) in entries and entries[(k, j, i)].node == e.node for (k, i, j), e in entries.items()
    )
    components: Dict[str, Dict[str, str]] = {}
    for (k, i, j), e in sorted(entries.items()):
        if symmetric and i > j:
            continue
        components.setdefault(names[k], {})[f"{names[i]} {names[j]}"] = e.to_source()
    return {"kind": "christoffel", "symmetric": symmetric, "components": components}


def spec_to_document(spec: ManifoldSpec) -> Dict[str, Any]:
    """Render a ManifoldSpec; a cone-built spec keeps its cone block."""
    document: Dict[str, Any] = {"id": spec.id, "chart": chart_to_document(spec.chart)}
    if spec.cone is not None:
        cone = spec.cone
        document["cone"] = {
            "g_M": cone.g_m.to_sources(),
            "alpha": cone.alpha.to_sources(),
            "f": cone.f.to_source(),
            "f_placement": cone.placement,
        }
    else:
        document["metric"] = spec.metric.to_sources()
        document["definiteness"] = spec.metric.definiteness
    document["xi"] = spec.xi.to_sources()
    if spec.connection is not None:
        document["connection"] = connection_to_document(spec.connection)
    if spec.potential is not None:
        document["potential"] = spec.potential.to_source()
    if spec.dilation:
        document["dilation"] = list(spec.dilation)
    if spec.expected is not None:
        document["expected"] = {k: ("pass" if v else "fail") for k, v in spec.expected.items()}
    if spec.margin is not None:
        document["margin"] = spec.margin
    return document
