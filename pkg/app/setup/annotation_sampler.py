import logging
import math
from collections import defaultdict
from dataclasses import dataclass
from typing import Dict, Hashable, List, Sequence, Tuple

import numpy as np

from app.exceptions import DegenerateSampleError
from app.models.Core.Dataset import Dataset

logger = logging.getLogger(__name__)

# (instance index, component index, stratum)
Component = Tuple[int, int, Hashable]


@dataclass(frozen=True)
class AnnotationMask:
    """
    Components whose ground truth stays revealed, per instance.

    Attributes:
        revealed: Sorted revealed component indices, one tuple per instance.
    """
    revealed: Tuple[Tuple[int, ...], ...]

    @property
    def count(self) -> int:
        return sum(len(r) for r in self.revealed)

    def apply(self, dataset: Dataset) -> Dataset:
        """
        Partially annotated copy of a fully annotated dataset.

        Instances left without an incompatible output are dropped: no component was
        revealed, or the revealed ones are forced (a tracking APPEAR with no parent in reach).

        Raises:
            ValueError: If the mask does not cover the dataset.
            DegenerateSampleError: If no instance keeps any supervision.
        """
        if len(self.revealed) != len(dataset):
            raise ValueError(f"mask covers {len(self.revealed)} instances, dataset has {len(dataset)}")
        annotated = [instance.with_annotation(revealed)
                     for instance, revealed in zip(dataset, self.revealed) if revealed]
        kept = [instance for instance in annotated if instance.has_incompatible_output()]
        if not kept:
            raise DegenerateSampleError(
                f"no instance keeps an incompatible output under a mask of {self.count} components")
        if len(kept) < len(dataset):
            logger.debug(f"dropped {len(dataset) - len(kept)} instances without supervision")
        return Dataset(kept)


def round_half_up(value: float) -> int:
    return int(math.floor(value + 0.5))


def stratified_sample_annotations(instance_truth: Sequence[Sequence[Tuple[int, Hashable]]],
                                  fraction: float, seed) -> AnnotationMask:
    """
    Reveal round(fraction * total) ground-truth components, covering every stratum when possible.

    One component is drawn from each stratum first (the rarest strata first when fewer
    components than strata are requested); the rest are drawn uniformly from what remains.

    Args:
        instance_truth: Per instance, the (component index, stratum) pairs of its ground truth.
        fraction: Share of components to reveal, in (0, 1].
        seed: Anything accepted by np.random.default_rng.
    Returns:
        The mask.
    Raises:
        ValueError: If fraction is outside (0, 1] or rounds to zero components.
    """
    if not isinstance(fraction, (int, float)) or not 0.0 < fraction <= 1.0:
        raise ValueError(f"fraction must lie in (0, 1], got: {fraction}")

    components: List[Component] = [(n, index, stratum)
                                   for n, truth in enumerate(instance_truth) for index, stratum in truth]
    total = len(components)
    wanted = round_half_up(fraction * total)
    if wanted == 0:
        raise ValueError(f"fraction {fraction} of {total} components rounds to zero annotated components")

    strata: Dict[Hashable, List[int]] = defaultdict(list)
    for position, (_, _, stratum) in enumerate(components):
        strata[stratum].append(position)
    by_rarity = sorted(strata, key=lambda s: (len(strata[s]), str(s)))

    rng = np.random.default_rng(seed)
    chosen = [int(rng.choice(strata[stratum])) for stratum in by_rarity[:wanted]]
    remaining = np.setdiff1d(np.arange(total), chosen)
    extra = wanted - len(chosen)
    if extra > 0:
        chosen.extend(int(p) for p in rng.choice(remaining, size=extra, replace=False))

    revealed: List[List[int]] = [[] for _ in instance_truth]
    for position in chosen:
        n, index, _ = components[position]
        revealed[n].append(index)
    mask = AnnotationMask(tuple(tuple(sorted(r)) for r in revealed))
    logger.debug(f"revealed {mask.count}/{total} components over {len(strata)} strata")
    return mask


def dataset_truth(dataset: Dataset) -> List[List[Tuple[int, Hashable]]]:
    return [instance.truth_components() for instance in dataset]
