import logging
from typing import Iterator, List, Sequence

from app.exceptions import ConfigurationError
from app.interfaces.inference_problem import InferenceProblem

logger = logging.getLogger(__name__)


class Dataset:
    """
    A nonempty list of inference problems sharing one feature dimension.

    Attributes:
        instances (List[InferenceProblem]): The samples, in file order.
        feature_dim (int): The shared dimension D.
    """

    def __init__(self, instances: Sequence[InferenceProblem]):
        if not isinstance(instances, (list, tuple)):
            raise TypeError(f"instances must be a list, got: {type(instances)}")
        if len(instances) == 0:
            raise ValueError("a dataset needs at least one instance")
        for inst in instances:
            if not isinstance(inst, InferenceProblem):
                raise TypeError(f"instances must be InferenceProblem objects, got: {type(inst)}")

        dims = {inst.feature_dim for inst in instances}
        if len(dims) != 1:
            raise ConfigurationError(f"instances disagree on feature dimension: {sorted(dims)}")

        self.instances: List[InferenceProblem] = list(instances)
        self.feature_dim: int = dims.pop()

    def __len__(self) -> int:
        return len(self.instances)

    def __iter__(self) -> Iterator[InferenceProblem]:
        return iter(self.instances)

    def __getitem__(self, index: int) -> InferenceProblem:
        return self.instances[index]
