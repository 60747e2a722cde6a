# handlers/verify.py
import argparse
import logging
import sys

from analytics.suite import run_theorem_suite
from handlers.options import add_check_options, config_from_args
from utils.error_handler import EXIT_MISMATCH, EXIT_OK, ConeGeomError, ErrorContext, ErrorHandler

logger = logging.getLogger(__name__)


def cmd_verify_theorems(args: argparse.Namespace) -> int:
    """Run the property suite over the catalog; exit 0 iff every row passes."""
    config = config_from_args(args)
    try:
        suite = run_theorem_suite(config)
    except ConeGeomError as exc:
        return ErrorHandler().handle_error(exc, ErrorContext(operation="verify-theorems"))

    sys.stdout.write(suite.to_json() if args.json else suite.to_text() + "\n")
    return EXIT_OK if suite.passed else EXIT_MISMATCH


def register_verify_handlers(subparsers: argparse._SubParsersAction) -> None:
    """Register the verify-theorems command."""
    parser = subparsers.add_parser("verify-theorems", help="run the structure property suite over the catalog")
    parser.add_argument("--json", action="store_true", help="print the structured suite report")
    add_check_options(parser)
    parser.set_defaults(handler=cmd_verify_theorems)
