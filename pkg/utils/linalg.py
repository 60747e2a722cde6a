# utils/linalg.py
"""Small dense symmetric matrix kernels: inverse, spectrum, definiteness."""

import logging

import numpy as np

from config import CONDITION_BOUND, SEMIDEFINITE_TOLERANCE
from utils.error_handler import SingularMetricError

logger = logging.getLogger(__name__)


def symmetrize(m: np.ndarray) -> np.ndarray:
    return 0.5 * (m + m.T)


def eigenvalues(m: np.ndarray) -> np.ndarray:
    """Ascending eigenvalues of the symmetric part of m."""
    return np.linalg.eigvalsh(symmetrize(np.asarray(m, dtype=float)))


def smallest_eigenvalue(m: np.ndarray) -> float:
    return float(eigenvalues(m)[0])


def condition_number(m: np.ndarray) -> float:
    values = np.abs(eigenvalues(m))
    smallest = float(np.min(values))
    if smallest == 0.0:
        return float("inf")
    return float(np.max(values)) / smallest


def symmetric_inverse(m: np.ndarray, condition_bound: float = CONDITION_BOUND) -> np.ndarray:
    """
    Inverse of a symmetric matrix, symmetrized.

    Raises:
        SingularMetricError: condition number above the bound
    """
    m = np.asarray(m, dtype=float)
    condition = condition_number(m)
    if not condition < condition_bound:
        raise SingularMetricError(smallest_eigenvalue(m), condition)
    return symmetrize(np.linalg.inv(m))


def kernel_dimension(m: np.ndarray, tolerance: float = SEMIDEFINITE_TOLERANCE) -> int:
    """Number of eigenvalues within tolerance (scaled by the spectral radius) of zero."""
    values = eigenvalues(m)
    scale = max(1.0, float(np.max(np.abs(values))))
    return int(np.sum(np.abs(values) <= tolerance * scale))


def max_abs(a: np.ndarray) -> float:
    a = np.asarray(a, dtype=float)
    return float(np.max(np.abs(a))) if a.size else 0.0

