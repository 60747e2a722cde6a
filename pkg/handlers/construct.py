# handlers/construct.py
"""
construct sub-command: build a structure from an input spec file, verify its
defining property and write the result as a new spec file.

Kinds:
    selfsimilar-from-contact  cone block (g_M, alpha) with alpha contact ->
                              selfsimilar, non-conical metric (base placement)
    extensive-from-cone       Hessian cone t^2 g_M + dt^2 with flat connection
                              -> degenerate metric t g_M, potential t
    extensive-from-conical    conical (g, xi) -> projected degenerate metric,
                              potential sqrt(g(xi, xi))
    lemma212-f                cone block (g_M, alpha) -> the same block with
                              f = g_M^-1(alpha, alpha) + margin
                              (alias: positivity-f)

The written spec declares, as `expected`, only the flags its kind
guarantees; the run fails if the constructed metric classifies otherwise.
"""

import argparse
import dataclasses
import logging
from typing import Any, Dict, List, Tuple

from analytics.report import ClassificationReport, StructureReport
from catalog.classifier import classify, is_plain_cone, squared_norm
from catalog.manifold import ManifoldSpec
from config import CheckConfig
from handlers.options import add_check_options, config_from_args, positive_float
from handlers.spec_file import (
    SpecValidator,
    cone_spec_from_parts,
    load_spec,
    read_document,
    spec_to_document,
    write_document,
)
from tools.cone import SELFSIMILAR, contact_selfsimilar_example, lemma_2_12_f
from tools.tensor import POSITIVE_DEFINITE
from tools.hessian import check_extensive, extensive_from_cone, extensive_from_conical
from utils.expr import ScalarExpr
from utils.error_handler import (
    EXIT_OK,
    ConeGeomError,
    ConstructionError,
    ContactError,
    ErrorContext,
    ErrorHandler,
    SpecFileError,
)

logger = logging.getLogger(__name__)

DEFAULT_MARGIN = 1.0


def _margin(args: argparse.Namespace, document: Dict[str, Any], path: str) -> float:
    if args.margin is not None:
        return args.margin
    if "margin" in document:
        margin = SpecValidator.number(document["margin"], path, "margin")
        if not margin > 0:
            raise SpecFileError("margin must be positive", path, key="margin")
        return margin
    return DEFAULT_MARGIN


def _base_block(document: Dict[str, Any], path: str):
    chart = SpecValidator.chart(document, path)
    base, g_m, alpha, f, f_on_base = SpecValidator.cone_parts(document, chart, path, require_f=False)
    return chart, base, g_m, alpha, f_on_base


def selfsimilar_from_contact(
    args: argparse.Namespace, config: CheckConfig
) -> Tuple[ManifoldSpec, List[StructureReport]]:
    document = read_document(args.input)
    chart, base, g_m, alpha, _ = _base_block(document, args.input)
    cone = contact_selfsimilar_example(alpha, g_m, _margin(args, document, args.input), config)
    t_name = chart.coords[-1]
    cone = dataclasses.replace(cone, t_name=t_name, t_bound=chart.bound(t_name), t_range=chart.box(t_name))
    spec = ManifoldSpec.from_cone(f"{document.get('id', 'contact')}_selfsimilar", cone, config)

    report = classify(spec, config)
    selfsimilar = report.check(SELFSIMILAR)
    if not selfsimilar.verdict:
        raise ConstructionError(SELFSIMILAR, selfsimilar.max_residual, selfsimilar.tolerance, selfsimilar.worst_point)
    if report.flags["conical_riemannian"]:
        raise ContactError("constructed metric is conical: alpha is not a contact form")
    return spec, [selfsimilar, *(r for r in report.checks if r.name.startswith("conical_"))]


def extensive_cone(args: argparse.Namespace, config: CheckConfig) -> Tuple[ManifoldSpec, List[StructureReport]]:
    source = load_spec(args.input, config)
    if not is_plain_cone(source):
        raise SpecFileError("needs a cone block with alpha = 0, f = 1 and f_placement dt2", args.input, key="cone")
    if source.connection is None:
        raise SpecFileError("needs a flat connection", args.input, key="connection")
    cone = source.cone
    extensive, reports = extensive_from_cone(
        cone.g_m, source.connection, source.samples(config), config.tol, cone.t_name, config.workers
    )
    spec = ManifoldSpec(
        f"{source.id}_extensive",
        extensive.metric,
        extensive.xi,
        connection=source.connection,
        potential=ScalarExpr.coordinate(cone.t_name, source.chart.coords),
        dilation=source.scaled_coordinates,
    )
    return spec, reports


def extensive_conical(args: argparse.Namespace, config: CheckConfig) -> Tuple[ManifoldSpec, List[StructureReport]]:
    source = load_spec(args.input, config)
    samples = source.samples(config)
    extensive = extensive_from_conical(source.metric, source.xi, samples, config.tol, workers=config.workers)
    potential = squared_norm(source).apply("sqrt") if source.connection is not None else None
    result = check_extensive(extensive, source.connection, potential, samples, config.tol, config.workers)
    for r in result.reports:
        if not r.verdict:
            raise ConstructionError(r.name, r.max_residual, r.tolerance, r.worst_point)
    spec = ManifoldSpec(
        f"{source.id}_extensive",
        extensive.metric,
        extensive.xi,
        connection=source.connection,
        potential=potential,
        dilation=source.scaled_coordinates,
    )
    return spec, result.reports


def positivity_f(args: argparse.Namespace, config: CheckConfig) -> Tuple[ManifoldSpec, List[StructureReport]]:
    document = read_document(args.input)
    chart, base, g_m, alpha, f_on_base = _base_block(document, args.input)
    f = lemma_2_12_f(g_m, alpha, _margin(args, document, args.input), base.sample_points(config.samples, config.seed))
    cone = cone_spec_from_parts(chart, base, g_m, alpha, f, f_on_base)
    spec = ManifoldSpec.from_cone(f"{document.get('id', 'cone')}_positive", cone, config)
    report = classify(spec, config)
    return spec, [report.check(POSITIVE_DEFINITE)]


CONSTRUCTIONS = {
    "selfsimilar-from-contact": selfsimilar_from_contact,
    "extensive-from-cone": extensive_cone,
    "extensive-from-conical": extensive_conical,
    "lemma212-f": positivity_f,
    "positivity-f": positivity_f,
}

# Flags each kind guarantees; written as the output's expectations.
GUARANTEED_FLAGS = {
    "selfsimilar-from-contact": {"selfsimilar": True, "conical_riemannian": False},
    "extensive-from-cone": {"extensive_exists": True},
    "extensive-from-conical": {"extensive_exists": True},
    "lemma212-f": {"selfsimilar": True},
    "positivity-f": {"selfsimilar": True},
}


def _verify_guarantees(
    spec: ManifoldSpec, kind: str, config: CheckConfig
) -> Tuple[ManifoldSpec, ClassificationReport]:
    spec = dataclasses.replace(spec, expected=dict(GUARANTEED_FLAGS[kind]))
    report = classify(spec, config)
    mismatches = report.mismatches()
    if mismatches:
        name, (want, got) = next(iter(mismatches.items()))
        raise ConstructionError(
            name, 0.0, config.tol,
            detail=f"{kind} guarantees {name}={'pass' if want else 'fail'}, classified {'pass' if got else 'fail'}",
        )
    return spec, report


def cmd_construct(args: argparse.Namespace) -> int:
    """
    Run one construction and write the constructed spec, with the flags its
    kind guarantees and the reports that verify it.
    """
    config = config_from_args(args)
    try:
        spec, verification = CONSTRUCTIONS[args.kind](args, config)
        spec, report = _verify_guarantees(spec, args.kind, config)
        document = spec_to_document(spec)
        document["verification"] = [r.to_dict() for r in verification]
        if report.notes:
            document["notes"] = list(report.notes)
        write_document(document, args.output)
    except ConeGeomError as exc:
        return ErrorHandler().handle_error(
            exc, ErrorContext(operation=f"construct {args.kind}", extra={"path": args.input})
        )
    except OSError as exc:
        logger.error(f"❌ cannot write {args.output}: {exc}", exc_info=True)
        return ErrorHandler().handle_error(SpecFileError(str(exc), args.output))

    logger.info(f"✅ {args.kind}: wrote '{spec.id}' to {args.output}")
    return EXIT_OK


def register_construct_handlers(subparsers: argparse._SubParsersAction) -> None:
    """Register the construct command."""
    parser = subparsers.add_parser("construct", help="build a structure from a spec file")
    parser.add_argument("kind", choices=sorted(CONSTRUCTIONS), help="construction to run")
    parser.add_argument("input", help="input spec file")
    parser.add_argument("output", help="where to write the constructed spec file")
    parser.add_argument("--margin", type=positive_float, default=None, help="positivity margin (default 1)")
    add_check_options(parser)
    parser.set_defaults(handler=cmd_construct)
