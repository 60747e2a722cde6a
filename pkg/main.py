import argparse
import logging
import os
import sys
from typing import List, Optional

from config import ENGINE_VERSION, LOG_FILE, LOG_LEVEL
from utils.error_handler import ErrorContext, ErrorHandler

logger = logging.getLogger(__name__)


def setup_logging(verbose: bool = False) -> None:
    """Log to stderr and LOG_FILE; stdout carries reports only."""
    log_dir = os.path.dirname(LOG_FILE)
    if log_dir:
        os.makedirs(log_dir, exist_ok=True)
    level = logging.DEBUG if verbose else getattr(logging, LOG_LEVEL.upper(), logging.INFO)
    logging.basicConfig(
        level=level,
        format="%(asctime)s - %(levelname)s - %(message)s",
        handlers=[logging.FileHandler(LOG_FILE), logging.StreamHandler(sys.stderr)],
    )
    logging.getLogger().setLevel(level)


def build_parser() -> argparse.ArgumentParser:
    """Root parser with every sub-command registered."""
    from handlers.catalog_export import register_catalog_handlers
    from handlers.classify import register_classify_handlers
    from handlers.construct import register_construct_handlers
    from handlers.verify import register_verify_handlers

    parser = argparse.ArgumentParser(
        prog="conegeom",
        description="Classify and construct selfsimilar, conical, radiant and Hessian structures on charts.",
    )
    parser.add_argument("--verbose", action="store_true", help="log check verdicts at DEBUG level")
    parser.add_argument("--version", action="version", version=f"conegeom {ENGINE_VERSION}")
    subparsers = parser.add_subparsers(dest="command", required=True)

    register_classify_handlers(subparsers)
    register_verify_handlers(subparsers)
    register_construct_handlers(subparsers)
    register_catalog_handlers(subparsers)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging(args.verbose)
    logger.debug(f"conegeom {ENGINE_VERSION}: {args.command}")
    try:
        return args.handler(args)
    except Exception as e:
        return ErrorHandler().handle_error(e, ErrorContext(operation=args.command))


if __name__ == "__main__":
    sys.exit(main())
