# Abstract capability set every structured problem must provide to the losses and solvers

from abc import ABC, abstractmethod
from enum import Enum
from typing import Any, Hashable, List, Sequence, Tuple

import numpy as np


class SpaceSelector(Enum):
    """Which part of the output space a maximization runs over."""
    FULL = "full"                  # every output
    COMPATIBLE = "compatible"      # outputs consistent with the partial annotation
    INCOMPATIBLE = "incompatible"  # everything else


class InferenceProblem(ABC):
    """
    One training or test instance with exact loss-augmented inference.

    Outputs are opaque to the losses; their encodings must be totally ordered
    so that argmax ties break towards the lexicographically smallest output.
    """

    @property
    @abstractmethod
    def feature_dim(self) -> int:
        pass

    @property
    @abstractmethod
    def delta_scale(self) -> float:
        pass

    @property
    @abstractmethod
    def has_annotation(self) -> bool:
        pass

    @property
    @abstractmethod
    def component_count(self) -> int:
        """Number of output components (positions, truth events) used to normalize test loss."""
        pass

    @abstractmethod
    def features(self, output: Any) -> np.ndarray:
        pass

    @abstractmethod
    def violations(self, output: Any) -> int:
        """Number of annotated components the output disagrees with."""
        pass

    def task_loss(self, output: Any) -> float:
        return self.delta_scale * self.violations(output)

    def is_compatible(self, output: Any) -> bool:
        return self.violations(output) == 0

    def has_incompatible_output(self) -> bool:
        """Whether some output violates the annotation; without one the sample carries no supervision."""
        return self.has_annotation

    def augmented_value(self, output: Any, w: np.ndarray, delta_coeff: int) -> float:
        """<phi(y), w> + delta_coeff * task_loss(y), the quantity every argmax maximizes."""
        value = float(np.dot(self.features(output), w))
        if delta_coeff:
            value += delta_coeff * self.task_loss(output)
        return value

    @abstractmethod
    def argmax_augmented(self, w: np.ndarray, space: SpaceSelector, delta_coeff: int) -> Tuple[Any, float]:
        pass

    def enumerate(self, space: SpaceSelector) -> List[Any]:
        raise NotImplementedError(f"{type(self).__name__} cannot enumerate its outputs")

    @abstractmethod
    def truth_components(self) -> List[Tuple[int, Hashable]]:
        """(component index, stratum) for every annotated component."""
        pass

    @abstractmethod
    def with_annotation(self, revealed: Sequence[int]) -> "InferenceProblem":
        """Copy keeping only the annotated components whose indices are in `revealed`."""
        pass
