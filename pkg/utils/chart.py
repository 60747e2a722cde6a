# utils/chart.py
"""Chart domains: coordinate names, open-interval bounds and sample boxes."""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.stats import qmc

from config import DEFAULT_SAMPLE_RANGE
from utils.error_handler import ChartDomainError

logger = logging.getLogger(__name__)

Bound = Tuple[Optional[float], Optional[float]]


@dataclass(frozen=True)
class ChartDomain:
    """
    A coordinate chart: names, per-coordinate open-interval constraints and
    the box sample points are drawn from.

    Args:
        coords: Coordinate names, unique
        bounds: name -> (lo, hi) open interval; None means unbounded
        sample_box: name -> (lo, hi) sampling range; defaults to the finite
            bounds, falling back to DEFAULT_SAMPLE_RANGE clipped to the bounds
    """
    coords: Tuple[str, ...]
    bounds: Dict[str, Bound] = field(default_factory=dict)
    sample_box: Dict[str, Tuple[float, float]] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(self.coords))
        if not self.coords:
            raise ValueError("a chart needs at least one coordinate")
        if len(set(self.coords)) != len(self.coords):
            raise ValueError(f"coordinate names must be unique: {list(self.coords)}")
        unknown = (set(self.bounds) | set(self.sample_box)) - set(self.coords)
        if unknown:
            raise ValueError(f"bounds given for undeclared coordinates {sorted(unknown)}")
        for name in self.coords:
            lo, hi = self.bound(name)
            if lo is not None and hi is not None and not lo < hi:
                raise ValueError(f"empty interval for '{name}': ({lo}, {hi})")
            box_lo, box_hi = self.box(name)
            if not box_lo < box_hi:
                raise ValueError(f"empty sample box for '{name}'")
            if (lo is not None and box_lo < lo) or (hi is not None and box_hi > hi):
                raise ValueError(f"sample box of '{name}' leaves its bounds")

    @property
    def dim(self) -> int:
        return len(self.coords)

    def index(self, name: str) -> int:
        return self.coords.index(name)

    def bound(self, name: str) -> Bound:
        return self.bounds.get(name, (None, None))

    def box(self, name: str) -> Tuple[float, float]:
        if name in self.sample_box:
            lo, hi = self.sample_box[name]
            return float(lo), float(hi)
        lo, hi = self.bound(name)
        default_lo, default_hi = DEFAULT_SAMPLE_RANGE
        box_lo = lo if lo is not None else min(default_lo, (hi - 1.0) if hi is not None else default_lo)
        box_hi = hi if hi is not None else max(default_hi, (lo + 1.0) if lo is not None else default_hi)
        return float(box_lo), float(box_hi)

    def contains(self, point: Sequence[float]) -> bool:
        if len(point) != self.dim:
            return False
        for name, x in zip(self.coords, point):
            if not math.isfinite(x):
                return False
            lo, hi = self.bound(name)
            if lo is not None and not x > lo:
                return False
            if hi is not None and not x < hi:
                return False
        return True

    def require(self, point: Sequence[float]) -> None:
        if not self.contains(point):
            raise ChartDomainError("point outside the chart", point)

    def sample_points(self, n: int, seed: int) -> List[Tuple[float, ...]]:
        """
        Deterministic quasi-random points strictly inside the sample box.

        A scrambled Halton sequence seeded by `seed`; identical inputs give
        identical points on every run.
        """
        if n < 1:
            raise ValueError(f"need at least one sample point, got {n}")
        sampler = qmc.Halton(d=self.dim, scramble=True, seed=seed)
        unit = sampler.random(n)
        lows = np.array([self.box(name)[0] for name in self.coords])
        highs = np.array([self.box(name)[1] for name in self.coords])
        # keep clear of the open box edges
        unit = np.clip(unit, 1e-6, 1.0 - 1e-6)
        points = [tuple(float(x) for x in row) for row in lows + unit * (highs - lows)]
        logger.debug(f"Sampled {n} points on chart {list(self.coords)} (seed={seed})")
        return points

    def extend(self, name: str, bound: Bound, sample_range: Tuple[float, float]) -> "ChartDomain":
        """Append a coordinate (e.g. the cone coordinate t) to the chart."""
        bounds = dict(self.bounds)
        bounds[name] = bound
        box = dict(self.sample_box)
        box[name] = sample_range
        return ChartDomain(self.coords + (name,), bounds, box)

    def restrict(self, names: Sequence[str]) -> "ChartDomain":
        """The chart on a subset of the coordinates (e.g. the base M)."""
        return ChartDomain(
            tuple(names),
            {k: v for k, v in self.bounds.items() if k in names},
            {k: v for k, v in self.sample_box.items() if k in names},
        )
