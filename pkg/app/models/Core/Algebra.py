import logging
from typing import Any, Sequence, Union

import numpy as np

from app.exceptions import ConfigurationError
from app.interfaces.inference_problem import InferenceProblem

logger = logging.getLogger(__name__)


def as_vector(values: Union[Sequence[float], np.ndarray], dim: int, name: str = "vector") -> np.ndarray:
    """
    Convert values to a float vector of length dim.

    Args:
        values: Weights or feature values.
        dim: Expected feature dimension D.
        name: Name used in error messages.
    Raises:
        ConfigurationError: If the length differs from dim or an entry is not finite.
    """
    vector = np.asarray(values, dtype=float)
    if vector.ndim != 1 or vector.shape[0] != dim:
        raise ConfigurationError(f"{name} must have length {dim}, got shape {vector.shape}")
    if not np.all(np.isfinite(vector)):
        raise ConfigurationError(f"{name} must contain only finite entries")
    return vector


def zero_weights(dim: int) -> np.ndarray:
    if not isinstance(dim, int) or dim <= 0:
        raise ValueError(f"feature dimension must be a positive integer, got: {dim}")
    return np.zeros(dim)


def score(problem: InferenceProblem, output: Any, w: np.ndarray) -> float:
    """Linear score f(x, y; w) = <phi(x, y), w>."""
    w = as_vector(w, problem.feature_dim, "w")
    return float(np.dot(problem.features(output), w))


def half_sq_norm(w: np.ndarray) -> float:
    return 0.5 * float(np.dot(w, w))
