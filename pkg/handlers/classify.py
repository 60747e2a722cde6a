# handlers/classify.py
import argparse
import logging
import sys

from catalog.classifier import classify
from handlers.options import add_check_options, config_from_args
from handlers.spec_file import load_spec
from utils.error_handler import EXIT_MISMATCH, EXIT_OK, ConeGeomError, ErrorContext, ErrorHandler

logger = logging.getLogger(__name__)


def cmd_classify(args: argparse.Namespace) -> int:
    """
    Classify a spec file and print the report.

    Returns:
        0 when every declared expectation holds, 1 on a mismatch, 2 on a
        spec or evaluation error
    """
    config = config_from_args(args)
    try:
        spec = load_spec(args.spec, config)
        report = classify(spec, config)
    except ConeGeomError as exc:
        return ErrorHandler().handle_error(exc, ErrorContext(operation="classify", extra={"path": args.spec}))

    sys.stdout.write(report.to_json() if args.json else report.to_text() + "\n")
    mismatches = report.mismatches()
    if mismatches:
        logger.warning(f"⚠️ '{spec.id}' does not match its expectations: {', '.join(mismatches)}")
        return EXIT_MISMATCH
    return EXIT_OK


def register_classify_handlers(subparsers: argparse._SubParsersAction) -> None:
    """Register the classify command."""
    parser = subparsers.add_parser("classify", help="classify the structures of a spec file")
    parser.add_argument("spec", help="path to a spec file")
    parser.add_argument("--json", action="store_true", help="print the structured report")
    add_check_options(parser)
    parser.set_defaults(handler=cmd_classify)
