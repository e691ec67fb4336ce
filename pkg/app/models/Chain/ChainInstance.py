import itertools
import logging
from typing import Hashable, List, Optional, Sequence, Tuple, Union

import numpy as np

from app.exceptions import ConfigurationError, DegenerateSampleError, EnumerationCapError
from app.globals import CHAIN_ENUMERATION_CAP, DEFAULT_DELTA_SCALE
from app.interfaces.inference_problem import InferenceProblem, SpaceSelector

logger = logging.getLogger(__name__)

UNKNOWN = -1

LabelSequence = Tuple[int, ...]


class ChainInstance(InferenceProblem):
    """
    A partially labeled label sequence with a linear chain model.

    The joint feature map has two disjoint blocks: for every label k the sum of the
    observation vectors of the positions labeled k (K * F entries), then one
    indicator count per ordered label pair (K * K entries).

    Attributes:
        observations (np.ndarray): L x F observation matrix.
        label_count (int): Number of labels K.
        partial_labels (Tuple[int, ...]): Annotated label per position, UNKNOWN (-1) if not revealed.
    """

    @staticmethod
    def _validate_positive_int(value: int, name: str, minimum: int = 1) -> None:
        if not isinstance(value, (int, np.integer)) or isinstance(value, bool):
            raise TypeError(f"{name} must be an integer, got: {type(value)}")
        if value < minimum:
            raise ValueError(f"{name} must be at least {minimum}, got: {value}")

    @staticmethod
    def _validate_delta_scale(value: float) -> None:
        if not isinstance(value, (int, float)):
            raise TypeError(f"delta_scale must be a number, got: {type(value)}")
        if not value > 0:
            raise ValueError(f"delta_scale must be positive, got: {value}")

    def __init__(self, observations: Union[np.ndarray, Sequence[Sequence[float]]], label_count: int,
                 partial_labels: Optional[Sequence[int]] = None, delta_scale: float = DEFAULT_DELTA_SCALE):
        """
        Args:
            observations: Per-position observation vectors, shape (L, F).
            label_count: Number of labels K (at least 2).
            partial_labels: Annotated label or UNKNOWN per position; all UNKNOWN when omitted.
            delta_scale: Task loss charged per violated annotated position.
        Raises:
            ValueError: If shapes or labels are out of range.
            TypeError: If arguments have the wrong type.
        """
        obs = np.asarray(observations, dtype=float)
        if obs.ndim != 2 or obs.shape[0] < 1 or obs.shape[1] < 1:
            raise ValueError(f"observations must be a nonempty (L, F) matrix, got shape {obs.shape}")
        if not np.all(np.isfinite(obs)):
            raise ValueError("observations must be finite")
        self._validate_positive_int(label_count, "label_count", minimum=2)
        self._validate_delta_scale(delta_scale)

        length = obs.shape[0]
        if partial_labels is None:
            partial_labels = [UNKNOWN] * length
        labels = tuple(int(v) for v in partial_labels)
        if len(labels) != length:
            raise ValueError(f"partial_labels must have length {length}, got: {len(labels)}")
        for label in labels:
            if label != UNKNOWN and not 0 <= label < label_count:
                raise ValueError(f"label {label} outside [0, {label_count})")

        self.observations = obs
        self.observations.setflags(write=False)
        self.label_count = int(label_count)
        self.partial_labels: Tuple[int, ...] = labels
        self._delta_scale = float(delta_scale)
        self.annotated_positions: Tuple[int, ...] = tuple(i for i, v in enumerate(labels) if v != UNKNOWN)

    @property
    def length(self) -> int:
        return self.observations.shape[0]

    @property
    def obs_dim(self) -> int:
        return self.observations.shape[1]

    @property
    def feature_dim(self) -> int:
        return chain_feature_dim(self.label_count, self.obs_dim)

    @property
    def delta_scale(self) -> float:
        return self._delta_scale

    @property
    def has_annotation(self) -> bool:
        return len(self.annotated_positions) > 0

    @property
    def is_fully_annotated(self) -> bool:
        return len(self.annotated_positions) == self.length

    @property
    def component_count(self) -> int:
        return self.length

    def _split_weights(self, w: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        w = np.asarray(w, dtype=float)
        if w.shape != (self.feature_dim,):
            raise ConfigurationError(f"w must have length {self.feature_dim}, got shape {w.shape}")
        k, f = self.label_count, self.obs_dim
        return w[:k * f].reshape(k, f), w[k * f:].reshape(k, k)

    def _check_output(self, output: Sequence[int]) -> np.ndarray:
        labels = np.asarray(output, dtype=int)
        if labels.shape != (self.length,) or labels.min() < 0 or labels.max() >= self.label_count:
            raise ValueError(f"invalid label sequence {tuple(output)} for L={self.length}, K={self.label_count}")
        return labels

    def features(self, output: Sequence[int]) -> np.ndarray:
        labels = self._check_output(output)
        k = self.label_count
        unary = np.eye(k)[labels].T @ self.observations
        transitions = np.zeros((k, k))
        np.add.at(transitions, (labels[:-1], labels[1:]), 1.0)
        return np.concatenate([unary.ravel(), transitions.ravel()])

    def violations(self, output: Sequence[int]) -> int:
        return sum(1 for i in self.annotated_positions if output[i] != self.partial_labels[i])

    def unary_scores(self, w: np.ndarray, delta_coeff: int = 0) -> np.ndarray:
        """L x K unary scores, with delta_coeff * delta_scale added to every wrong label at annotated positions."""
        unary_w, _ = self._split_weights(w)
        scores = self.observations @ unary_w.T
        if delta_coeff:
            bonus = delta_coeff * self._delta_scale
            for i in self.annotated_positions:
                wrong = np.arange(self.label_count) != self.partial_labels[i]
                scores[i, wrong] += bonus
        return scores

    def argmax_augmented(self, w: np.ndarray, space: SpaceSelector, delta_coeff: int) -> Tuple[LabelSequence, float]:
        return chain_argmax(self, w, space, delta_coeff)

    def enumerate(self, space: SpaceSelector) -> List[LabelSequence]:
        return chain_enumerate(self, space)

    def truth_components(self) -> List[Tuple[int, Hashable]]:
        return [(i, self.partial_labels[i]) for i in self.annotated_positions]

    def with_annotation(self, revealed: Sequence[int]) -> "ChainInstance":
        keep = set(int(i) for i in revealed)
        missing = keep - set(self.annotated_positions)
        if missing:
            raise ValueError(f"positions {sorted(missing)} are not annotated and cannot be revealed")
        labels = [v if i in keep else UNKNOWN for i, v in enumerate(self.partial_labels)]
        return ChainInstance(self.observations, self.label_count, labels, self._delta_scale)

    def __repr__(self) -> str:
        return (f"ChainInstance(L={self.length}, K={self.label_count}, F={self.obs_dim}, "
                f"annotated={len(self.annotated_positions)})")


def chain_feature_dim(label_count: int, obs_dim: int) -> int:
    return label_count * obs_dim + label_count * label_count


def _max_sum_decode(unary: np.ndarray, transitions: np.ndarray) -> LabelSequence:
    """
    Max-sum dynamic program returning the lexicographically smallest optimal sequence.

    Suffix tables are filled backwards so that a forward pass can always pick the
    smallest label that still admits an optimal completion (np.argmax keeps the first maximum).
    """
    length = unary.shape[0]
    suffix = np.empty_like(unary)
    suffix[-1] = unary[-1]
    for i in range(length - 2, -1, -1):
        suffix[i] = unary[i] + np.max(transitions + suffix[i + 1][np.newaxis, :], axis=1)

    labels = [int(np.argmax(suffix[0]))]
    for i in range(1, length):
        labels.append(int(np.argmax(transitions[labels[-1]] + suffix[i])))
    return tuple(labels)


def chain_argmax(instance: ChainInstance, w: np.ndarray, space: SpaceSelector,
                 delta_coeff: int) -> Tuple[LabelSequence, float]:
    """
    Exact loss-augmented inference over FULL, COMPATIBLE or INCOMPATIBLE label sequences.

    INCOMPATIBLE is the union over annotated positions i of {y : y_i != annotation_i};
    one constrained dynamic program per annotated position covers it exactly.

    Raises:
        DegenerateSampleError: For INCOMPATIBLE on an instance without annotations.
    """
    if delta_coeff not in (-1, 0, 1):
        raise ValueError(f"delta_coeff must be -1, 0 or +1, got: {delta_coeff}")
    if not isinstance(space, SpaceSelector):
        raise TypeError(f"space must be a SpaceSelector, got: {type(space)}")

    unary = instance.unary_scores(w, delta_coeff)
    _, transitions = instance._split_weights(w)

    if space is SpaceSelector.FULL:
        best = _max_sum_decode(unary, transitions)
    elif space is SpaceSelector.COMPATIBLE:
        clamped = unary.copy()
        for i in instance.annotated_positions:
            keep = clamped[i, instance.partial_labels[i]]
            clamped[i, :] = -np.inf
            clamped[i, instance.partial_labels[i]] = keep
        best = _max_sum_decode(clamped, transitions)
    else:
        if not instance.has_annotation:
            raise DegenerateSampleError("incompatible space is empty: instance has no annotated position")
        best, best_value = None, -np.inf
        for i in instance.annotated_positions:
            forbidden = unary.copy()
            forbidden[i, instance.partial_labels[i]] = -np.inf
            candidate = _max_sum_decode(forbidden, transitions)
            value = instance.augmented_value(candidate, w, delta_coeff)
            if value > best_value or (value == best_value and candidate < best):
                best, best_value = candidate, value
        return best, best_value

    return best, instance.augmented_value(best, w, delta_coeff)


def chain_enumerate(instance: ChainInstance, space: SpaceSelector,
                    cap: int = CHAIN_ENUMERATION_CAP) -> List[LabelSequence]:
    """
    All label sequences of the selected space in lexicographic order (test oracle).

    Raises:
        EnumerationCapError: If K^L exceeds cap.
    """
    total = instance.label_count ** instance.length
    if total > cap:
        raise EnumerationCapError(f"refusing to enumerate {total} sequences (cap {cap})")
    outputs = itertools.product(range(instance.label_count), repeat=instance.length)
    if space is SpaceSelector.FULL:
        return list(outputs)
    want_compatible = space is SpaceSelector.COMPATIBLE
    return [y for y in outputs if (instance.violations(y) == 0) == want_compatible]
