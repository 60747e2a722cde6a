# analytics/report.py
"""
Check results and their deterministic serialization.

StructureReport is the verdict of one check over a set of sample points;
ClassificationReport and SuiteReport collect them for the CLI.
"""

import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from config import ENGINE_VERSION, MAX_WORKERS
from utils.error_handler import CheckEvaluationError, ConeGeomError

logger = logging.getLogger(__name__)

Point = Tuple[float, ...]


def _clean_float(x: float) -> Any:
    """JSON-safe float: non-finite values become strings."""
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


@dataclass(frozen=True)
class StructureReport:
    """Verdict of one check: passes iff max_residual <= tolerance."""
    name: str
    max_residual: float
    worst_point: Optional[Point]
    samples_used: int
    tolerance: float

    @property
    def verdict(self) -> bool:
        return self.max_residual <= self.tolerance

    @property
    def verdict_text(self) -> str:
        return "pass" if self.verdict else "fail"

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "verdict": self.verdict_text,
            "max_residual": _clean_float(self.max_residual),
            "worst_point": None if self.worst_point is None else [_clean_float(x) for x in self.worst_point],
            "samples_used": self.samples_used,
            "tolerance": _clean_float(self.tolerance),
        }

    @staticmethod
    def from_residuals(
        name: str,
        samples: Sequence[Sequence[float]],
        residual: Callable[[Point], float],
        tol: float,
        workers: int = MAX_WORKERS,
    ) -> "StructureReport":
        """
        Evaluate `residual` at every sample and keep the worst one.

        Args:
            name: Check name (used for error attribution)
            samples: Sample points
            residual: point -> nonnegative residual
            tol: Pass tolerance
            workers: Threads to fan the evaluation over (1 = sequential)

        Raises:
            CheckEvaluationError: An engine error inside the check
        """
        points = [tuple(float(x) for x in p) for p in samples]

        def run(point: Point) -> float:
            try:
                return float(residual(point))
            except CheckEvaluationError:
                raise
            except ConeGeomError as exc:
                raise CheckEvaluationError(name, exc) from exc

        if workers > 1 and len(points) > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                values = list(pool.map(run, points))
        else:
            values = [run(p) for p in points]

        worst_value, worst_point = 0.0, None
        for point, value in zip(points, values):
            if math.isnan(value):
                value = math.inf
            if worst_point is None or value > worst_value:
                worst_value, worst_point = value, point
        report = StructureReport(name, worst_value, worst_point, len(points), tol)
        logger.debug(f"{name}: {report.verdict_text} (max residual {worst_value:.3e}, tol {tol:.1e})")
        return report

    @staticmethod
    def combine(name: str, reports: Sequence["StructureReport"], tol: Optional[float] = None) -> "StructureReport":
        """Worst-case merge of several reports of the same quantity."""
        if not reports:
            return StructureReport(name, 0.0, None, 0, tol if tol is not None else 0.0)
        worst = max(reports, key=lambda r: r.max_residual)
        return StructureReport(
            name,
            worst.max_residual,
            worst.worst_point,
            sum(r.samples_used for r in reports),
            tol if tol is not None else worst.tolerance,
        )


FLAG_NAMES = (
    "selfsimilar",
    "conical_riemannian",
    "radiant",
    "hessian_cone",
    "conical_hessian",
    "extensive_exists",
)


@dataclass
class ClassificationReport:
    """Per-check records, derived flags and the config echo of one classify run."""
    spec_id: str
    checks: List[StructureReport] = field(default_factory=list)
    flags: Dict[str, bool] = field(default_factory=dict)
    config: Dict[str, Any] = field(default_factory=dict)
    notes: List[str] = field(default_factory=list)
    expected: Optional[Dict[str, bool]] = None
    conical_consistency: Optional[bool] = None
    version: str = ENGINE_VERSION

    def add(self, report: StructureReport) -> StructureReport:
        self.checks.append(report)
        return report

    def check(self, name: str) -> Optional[StructureReport]:
        for report in self.checks:
            if report.name == name:
                return report
        return None

    def mismatches(self) -> Dict[str, Tuple[bool, bool]]:
        """flag -> (expected, actual) for every declared expectation that differs."""
        if not self.expected:
            return {}
        return {
            name: (want, self.flags.get(name, False))
            for name, want in sorted(self.expected.items())
            if self.flags.get(name, False) != want
        }

    def to_dict(self) -> Dict[str, Any]:
        payload = {
            "spec_id": self.spec_id,
            "checks": [r.to_dict() for r in self.checks],
            "flags": {k: ("pass" if v else "fail") for k, v in self.flags.items()},
            "config": self.config,
            "notes": list(self.notes),
            "engine_version": self.version,
            "conical_consistency": {None: "not_asserted", True: "agree", False: "disagree"}[self.conical_consistency],
        }
        if self.expected is not None:
            payload["expected"] = {k: ("pass" if v else "fail") for k, v in self.expected.items()}
            payload["mismatches"] = sorted(self.mismatches())
        return payload

    def to_json(self) -> str:
        return dumps(self.to_dict())

    def to_text(self) -> str:
        lines = [f"📐 {self.spec_id}"]
        for r in self.checks:
            mark = "✅" if r.verdict else "❌"
            lines.append(f"  {mark} {r.name:<36} residual {r.max_residual:.3e}  (tol {r.tolerance:.1e})")
        for note in self.notes:
            lines.append(f"  • {note}")
        lines.append("  flags:")
        for name in FLAG_NAMES:
            if name in self.flags:
                lines.append(f"    {name:<20} {'pass' if self.flags[name] else 'fail'}")
        for name, (want, got) in self.mismatches().items():
            lines.append(f"  ⚠️ expected {name}={'pass' if want else 'fail'}, got {'pass' if got else 'fail'}")
        return "\n".join(lines)


@dataclass(frozen=True)
class TheoremRow:
    """One (property, example) line of the theorem suite."""
    theorem: str
    example: str
    passed: bool
    max_residual: float
    detail: str = ""

    def to_dict(self) -> Dict[str, Any]:
        return {
            "theorem": self.theorem,
            "example": self.example,
            "verdict": "pass" if self.passed else "fail",
            "max_residual": _clean_float(self.max_residual),
            "detail": self.detail,
        }


@dataclass
class SuiteReport:
    rows: List[TheoremRow] = field(default_factory=list)
    config: Dict[str, Any] = field(default_factory=dict)
    version: str = ENGINE_VERSION

    @property
    def passed(self) -> bool:
        return all(row.passed for row in self.rows)

    def add(self, row: TheoremRow) -> TheoremRow:
        self.rows.append(row)
        logger.info(f"{'✅' if row.passed else '❌'} {row.theorem} / {row.example}")
        return row

    def to_dict(self) -> Dict[str, Any]:
        return {
            "rows": [row.to_dict() for row in self.rows],
            "passed": self.passed,
            "config": self.config,
            "engine_version": self.version,
        }

    def to_json(self) -> str:
        return dumps(self.to_dict())

    def to_text(self) -> str:
        lines = []
        for row in self.rows:
            mark = "✅" if row.passed else "❌"
            detail = f"  {row.detail}" if row.detail else ""
            lines.append(f"{mark} {row.theorem:<28} {row.example:<36} {row.max_residual:.3e}{detail}")
        passed = sum(row.passed for row in self.rows)
        lines.append(f"{passed}/{len(self.rows)} rows pass")
        return "\n".join(lines)


def dumps(payload: Dict[str, Any]) -> str:
    """Deterministic JSON: sorted keys, shortest round-trip floats."""
    return json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False) + "\n"
