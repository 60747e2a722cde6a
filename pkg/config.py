import os
from dataclasses import dataclass

from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()

ENGINE_VERSION = "0.1.0"

# Sampling - deterministic quasi-random points in the chart box
DEFAULT_SAMPLES = int(os.getenv("CONEGEOM_SAMPLES", 64))
DEFAULT_SEED = int(os.getenv("CONEGEOM_SEED", 42))
CONE_T_RANGE = (0.5, 2.0)  # sample range of the cone coordinate t
DEFAULT_SAMPLE_RANGE = (-1.0, 1.0)  # for coordinates with infinite bounds

# Tolerances
JET_TOLERANCE = float(os.getenv("CONEGEOM_TOL", 1e-8))
FD_TOLERANCE = 1e-5  # finite-difference oracle, orders 1 and 2
FD_STEP = 1e-4
KERNEL_TOLERANCE = 1e-12  # iota_xi of a projected metric
SEMIDEFINITE_TOLERANCE = 1e-9  # floor on the smallest eigenvalue
POSITIVITY_FLOOR = 1e-12

# Linear algebra
CONDITION_BOUND = 1e12

# Theorem suite
DILATION_FACTORS = (0.5, 2.0, 7.0)
POTENTIAL_SEEDS = 20
POTENTIAL_SAMPLES = 16
POTENTIAL_DEGREE = 4
RANDOM_SPEC_COUNT = 20
FAILING_RESIDUAL_FLOOR = 1e-2  # failing conical conditions stay above this

# Worker threads for sample loops (1 = sequential)
MAX_WORKERS = int(os.getenv("CONEGEOM_WORKERS", 1))

# Logging configuration
LOG_FILE = os.getenv("CONEGEOM_LOG_FILE", "logs/conegeom.log")
LOG_LEVEL = os.getenv("CONEGEOM_LOG_LEVEL", "INFO")


@dataclass(frozen=True)
class CheckConfig:
    """Settings shared by every check of one run."""
    samples: int = DEFAULT_SAMPLES
    seed: int = DEFAULT_SEED
    tol: float = JET_TOLERANCE
    fd_tol: float = FD_TOLERANCE
    workers: int = MAX_WORKERS

    def echo(self) -> dict:
        return {
            "samples": self.samples,
            "seed": self.seed,
            "tol": self.tol,
            "fd_tol": self.fd_tol,
        }
