import logging
from typing import Any, List

import numpy as np

from app.interfaces.inference_problem import SpaceSelector
from app.models.Core.Algebra import as_vector
from app.models.Core.Dataset import Dataset

logger = logging.getLogger(__name__)


def predict(w: np.ndarray, dataset: Dataset) -> List[Any]:
    return [instance.argmax_augmented(w, SpaceSelector.FULL, 0)[0] for instance in dataset]


def evaluate_test_loss(w: np.ndarray, test: Dataset) -> float:
    """
    Percent of ground-truth components the unconstrained prediction gets wrong, averaged over instances.

    Raises:
        ValueError: If a test instance is not fully annotated (some ground-truth component is hidden).
    """
    w = as_vector(w, test.feature_dim, "w")
    total = 0.0
    for instance, prediction in zip(test, predict(w, test)):
        components = instance.component_count
        if components == 0 or len(instance.truth_components()) != components:
            raise ValueError(f"test instance {instance!r} is not fully annotated")
        total += instance.violations(prediction) / components
    return 100.0 * total / len(test)
