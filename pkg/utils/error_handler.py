# utils/error_handler.py
"""
conegeom error types and centralized error handling

Every engine failure derives from ConeGeomError and carries an ErrorCategory.
The CLI boundary hands exceptions to ErrorHandler, which logs a structured
event and maps it to an exit code.

Usage:
    handler = ErrorHandler()
    try:
        ...
    except ConeGeomError as exc:
        return handler.handle_error(exc, ErrorContext(operation="classify"))
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Optional, Sequence, Tuple

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_ERROR = 2


class ErrorCategory(Enum):
    """Error categorization for reporting."""
    SYNTAX = "syntax"
    EVALUATION = "evaluation"
    CHART = "chart"
    LINEAR_ALGEBRA = "linear_algebra"
    POSITIVITY = "positivity"
    CONTACT = "contact"
    CONSTRUCTION = "construction"
    SPEC_FILE = "spec_file"
    UNKNOWN = "unknown"


def _format_point(point: Optional[Sequence[float]]) -> str:
    if point is None:
        return "?"
    return "(" + ", ".join(f"{float(x):.6g}" for x in point) + ")"


class ConeGeomError(Exception):
    """Base class of all engine errors."""
    category = ErrorCategory.UNKNOWN


class ExprSyntaxError(ConeGeomError):
    """Malformed expression text."""
    category = ErrorCategory.SYNTAX

    def __init__(self, message: str, offset: int, source: str = ""):
        self.offset = offset
        self.source = source
        super().__init__(f"{message} at offset {offset}")


class UnknownIdentifierError(ExprSyntaxError):
    """Identifier that is neither a chart coordinate nor a known function."""

    def __init__(self, name: str, offset: int, source: str = ""):
        self.name = name
        super().__init__(f"unknown identifier '{name}'", offset, source)


class ArityError(ExprSyntaxError):
    """Function called with the wrong number of arguments."""

    def __init__(self, function: str, expected: int, got: int, offset: int, source: str = ""):
        self.function = function
        self.expected = expected
        self.got = got
        super().__init__(f"{function}() takes {expected} argument(s), got {got}", offset, source)


class ExprDomainError(ConeGeomError):
    """A partial function was evaluated outside its domain."""
    category = ErrorCategory.EVALUATION

    def __init__(self, message: str, subexpression: str, point: Optional[Sequence[float]] = None):
        self.subexpression = subexpression
        self.point = tuple(point) if point is not None else None
        super().__init__(f"{message} in '{subexpression}' at {_format_point(self.point)}")


class ChartDomainError(ConeGeomError):
    """A point (or a stencil / dilated point) lies outside the chart."""
    category = ErrorCategory.CHART

    def __init__(self, message: str, point: Optional[Sequence[float]] = None):
        self.point = tuple(point) if point is not None else None
        super().__init__(f"{message}: {_format_point(self.point)}")


class SingularMetricError(ConeGeomError):
    """Singular or ill-conditioned symmetric matrix."""
    category = ErrorCategory.LINEAR_ALGEBRA

    def __init__(self, smallest_eigenvalue: float, condition: float = float("inf")):
        self.smallest_eigenvalue = smallest_eigenvalue
        self.condition = condition
        super().__init__(
            f"matrix is singular or ill-conditioned "
            f"(smallest eigenvalue {smallest_eigenvalue:.3e}, condition {condition:.3e})"
        )


class PositivityError(ConeGeomError):
    """Assembled metric is not positive definite."""
    category = ErrorCategory.POSITIVITY

    def __init__(self, message: str, point: Optional[Sequence[float]] = None):
        self.point = tuple(point) if point is not None else None
        super().__init__(f"{message} at {_format_point(self.point)}")


class ContactError(ConeGeomError):
    """The one-form is not contact (or the base is even-dimensional)."""
    category = ErrorCategory.CONTACT

    def __init__(self, message: str, point: Optional[Sequence[float]] = None):
        self.point = tuple(point) if point is not None else None
        suffix = f" at {_format_point(self.point)}" if self.point is not None else ""
        super().__init__(f"{message}{suffix}")


class ConstructionError(ConeGeomError):
    """A construction's defining property failed on the samples."""
    category = ErrorCategory.CONSTRUCTION

    def __init__(self, check: str, residual: float, tolerance: float,
                 point: Optional[Sequence[float]] = None, detail: Optional[str] = None):
        self.check = check
        self.residual = residual
        self.tolerance = tolerance
        self.point = tuple(point) if point is not None else None
        super().__init__(detail or (
            f"construction check '{check}' failed: residual {residual:.3e} > {tolerance:.1e} "
            f"at {_format_point(self.point)}"
        ))


class SpecFileError(ConeGeomError):
    """Spec-file parse or schema error."""
    category = ErrorCategory.SPEC_FILE

    def __init__(self, message: str, path: str = "", line: Optional[int] = None,
                 column: Optional[int] = None, key: str = ""):
        self.path = path
        self.line = line
        self.column = column
        self.key = key
        where = path or "<spec>"
        if line is not None:
            where += f":{line}"
            if column is not None:
                where += f":{column}"
        if key:
            where += f" [{key}]"
        super().__init__(f"{where}: {message}")


@dataclass
class ErrorContext:
    """Where an error happened: the running operation and the sample point."""
    operation: Optional[str] = None
    check: Optional[str] = None
    point: Optional[Tuple[float, ...]] = None
    spec_id: Optional[str] = None
    extra: Dict[str, Any] = field(default_factory=dict)


class CheckEvaluationError(ConeGeomError):
    """An evaluation error raised inside a named check."""
    category = ErrorCategory.EVALUATION

    def __init__(self, check: str, cause: ConeGeomError):
        self.check = check
        self.cause = cause
        self.point = getattr(cause, "point", None)
        super().__init__(f"check '{check}' failed to evaluate: {cause}")


class ErrorHandler:
    """
    Logs engine errors with their context and maps them to CLI exit codes.

    Args:
        exit_codes: Optional per-category override of the exit code
    """

    DEFAULT_EXIT_CODES = {category: EXIT_ERROR for category in ErrorCategory}

    def __init__(self, exit_codes: Optional[Dict[ErrorCategory, int]] = None):
        self.exit_codes = dict(self.DEFAULT_EXIT_CODES)
        if exit_codes:
            self.exit_codes.update(exit_codes)
        self.error_counts: Dict[ErrorCategory, int] = {}

    def _get_category(self, exception: Exception) -> ErrorCategory:
        if isinstance(exception, ConeGeomError):
            return exception.category
        return ErrorCategory.UNKNOWN

    def handle_error(self, exception: Exception, context: Optional[ErrorContext] = None) -> int:
        """
        Log an error with its context and return the exit code for it.

        Args:
            exception: Exception to handle
            context: Operation/check/point the error is attributed to

        Returns:
            Process exit code
        """
        context = context or ErrorContext()
        category = self._get_category(exception)
        self.error_counts[category] = self.error_counts.get(category, 0) + 1

        check = context.check or getattr(exception, "check", None)
        point = context.point or getattr(exception, "point", None)
        parts = [f"❌ {category.value} error"]
        if context.operation:
            parts.append(f"during {context.operation}")
        if context.spec_id:
            parts.append(f"on '{context.spec_id}'")
        if check:
            parts.append(f"in check '{check}'")
        if point is not None:
            parts.append(f"at {_format_point(point)}")
        message = " ".join(parts) + f": {exception}"

        if category is ErrorCategory.UNKNOWN:
            logger.error(message, exc_info=True)
        else:
            logger.error(message)
        return self.exit_codes.get(category, EXIT_ERROR)
