# handlers/catalog_export.py
import argparse
import dataclasses
import logging
import sys

from analytics.report import FLAG_NAMES
from catalog.entries import catalog_by_id, catalog_entries
from handlers.options import add_check_options, config_from_args
from handlers.spec_file import spec_to_document, write_document
from utils.error_handler import EXIT_ERROR, EXIT_OK, ConeGeomError, ErrorContext, ErrorHandler

logger = logging.getLogger(__name__)


def cmd_catalog_export(args: argparse.Namespace) -> int:
    """Write a catalog entry as a spec file, expectations included."""
    config = config_from_args(args)
    try:
        entries = catalog_by_id(config)
        if args.id not in entries:
            logger.error(f"❌ unknown catalog entry '{args.id}'; known: {', '.join(entries)}")
            return EXIT_ERROR
        entry = entries[args.id]
        document = spec_to_document(dataclasses.replace(entry.spec, expected=dict(entry.expected)))
        document["notes"] = [entry.provenance]
        write_document(document, args.output)
    except ConeGeomError as exc:
        return ErrorHandler().handle_error(exc, ErrorContext(operation="catalog export", spec_id=args.id))
    except OSError as exc:
        logger.error(f"❌ cannot write {args.output}: {exc}", exc_info=True)
        return EXIT_ERROR
    return EXIT_OK


def cmd_catalog_list(args: argparse.Namespace) -> int:
    config = config_from_args(args)
    try:
        entries = catalog_entries(config)
    except ConeGeomError as exc:
        return ErrorHandler().handle_error(exc, ErrorContext(operation="catalog list"))
    for entry in entries:
        passing = [name for name in FLAG_NAMES if entry.expected[name]]
        sys.stdout.write(f"{entry.id:<28} {', '.join(passing) or '-'}\n")
    return EXIT_OK


def register_catalog_handlers(subparsers: argparse._SubParsersAction) -> None:
    """Register the catalog command and its export/list actions."""
    parser = subparsers.add_parser("catalog", help="built-in manifolds with known classifications")
    actions = parser.add_subparsers(dest="action", required=True)

    export = actions.add_parser("export", help="write a catalog entry as a spec file")
    export.add_argument("id", help="catalog entry id")
    export.add_argument("output", help="where to write the spec file")
    add_check_options(export)
    export.set_defaults(handler=cmd_catalog_export)

    listing = actions.add_parser("list", help="list catalog entries and their passing flags")
    add_check_options(listing)
    listing.set_defaults(handler=cmd_catalog_list)
