import pytest

from config import CheckConfig
from utils.chart import ChartDomain


@pytest.fixture
def fast_config() -> CheckConfig:
    """Fewer samples than the CLI default; verdicts do not depend on the count."""
    return CheckConfig(samples=12, seed=42, workers=1)


@pytest.fixture
def plane() -> ChartDomain:
    return ChartDomain(("x", "y"))


@pytest.fixture
def right_half_plane() -> ChartDomain:
    return ChartDomain(("x", "y"), {"x": (0.0, None)}, {"x": (0.5, 2.0), "y": (-1.0, 1.0)})


@pytest.fixture
def polar_chart() -> ChartDomain:
    return ChartDomain(("theta", "t"), {"theta": (0.1, 1.5), "t": (0.0, None)}, {"t": (0.5, 2.0)})


@pytest.fixture
def space() -> ChartDomain:
    return ChartDomain(("x", "y", "z"))

