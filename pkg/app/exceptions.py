"""Error hierarchy shared by models, solvers and the experiment harness."""

from typing import Optional

import numpy as np


class ConfigurationError(ValueError):
    """Invalid configuration, flags or mismatched dimensions (CLI exit code 2)."""


class DatasetFormatError(ConfigurationError):
    """A dataset file could not be parsed."""


class DegenerateSampleError(ValueError):
    """The output subspace a loss needs to maximize over is empty."""


class EnumerationCapError(ValueError):
    """An exhaustive oracle was asked to enumerate more outputs than its cap."""


class BoundIdentityError(RuntimeError):
    """A generated bound broke the b = mean task loss identity of a linear score."""


class QPConvergenceError(RuntimeError):
    """The simplex QP hit its iteration cap before the KKT residual met tolerance."""

    def __init__(self, message: str, alpha: Optional[np.ndarray] = None, residual: float = float("nan")):
        super().__init__(message)
        self.alpha = alpha
        self.residual = residual
