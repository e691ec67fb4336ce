import logging
from functools import cached_property
from typing import Dict, Hashable, List, Optional, Sequence, Tuple

import numpy as np

from app.exceptions import ConfigurationError, DegenerateSampleError, EnumerationCapError
from app.globals import DEFAULT_DELTA_SCALE, TRACKING_DETECTION_CAP
from app.interfaces.inference_problem import InferenceProblem, SpaceSelector
from .Event import EVENT_BLOCK_SIZE, TRACKING_FEATURE_DIM, Assignment, Detection, Event, EventKind

logger = logging.getLogger(__name__)


def event_features(event: Event, left: Sequence[Detection], right: Sequence[Detection]) -> np.ndarray:
    """
    Geometric features of one event, placed in the block shared by all events of its kind.

    MOVE: (1, displacement, |log size ratio|); DIVIDE: (1, mean child displacement,
    |log(children size / parent size)|); APPEAR and DISAPPEAR only carry the bias.
    """
    block = np.zeros(EVENT_BLOCK_SIZE)
    block[0] = 1.0
    if event.kind is EventKind.MOVE:
        parent, child = left[event.left[0]], right[event.right[0]]
        block[1] = parent.point.distance(child.point)
        block[2] = abs(np.log(child.size / parent.size))
    elif event.kind is EventKind.DIVIDE:
        parent = left[event.left[0]]
        children = [right[r] for r in event.right]
        block[1] = np.mean([parent.point.distance(c.point) for c in children])
        block[2] = abs(np.log(sum(c.size for c in children) / parent.size))

    phi = np.zeros(TRACKING_FEATURE_DIM)
    start = event.kind.block * EVENT_BLOCK_SIZE
    phi[start:start + EVENT_BLOCK_SIZE] = block
    return phi


class TrackingInstance(InferenceProblem):
    """
    Two-frame tracking by assignment with exact inference by enumeration.

    Every left detection must end in exactly one realized event (unique fate) and every
    right detection must start from exactly one realized event (unique history).
    Scores are maximized; the energy of a tracking is the negated score.

    Attributes:
        left (Tuple[Detection, ...]): Detections of the first frame.
        right (Tuple[Detection, ...]): Detections of the second frame.
        events (Tuple[Event, ...]): Candidate event menu.
        annotated (Tuple[int, ...]): Indices of events asserted realized.
        truth_size (int): Number of ground-truth events, revealed or not; len(annotated) when fully annotated.
    """

    def __init__(self, left: Sequence[Detection], right: Sequence[Detection], events: Sequence[Event],
                 annotated: Sequence[int] = (), delta_scale: float = DEFAULT_DELTA_SCALE,
                 cap: int = TRACKING_DETECTION_CAP, truth_size: Optional[int] = None):
        """
        Raises:
            ValueError: If an event references a missing detection, the menu admits no
                feasible assignment, the annotated events are not jointly realizable, or
                truth_size is smaller than the number of annotated events.
        """
        if not all(isinstance(d, Detection) for d in list(left) + list(right)):
            raise TypeError("detections must be Detection objects")
        if not all(isinstance(e, Event) for e in events):
            raise TypeError("events must be Event objects")
        if not isinstance(delta_scale, (int, float)) or not delta_scale > 0:
            raise ValueError(f"delta_scale must be positive, got: {delta_scale}")

        self.left: Tuple[Detection, ...] = tuple(left)
        self.right: Tuple[Detection, ...] = tuple(right)
        self.events: Tuple[Event, ...] = tuple(events)
        self.annotated: Tuple[int, ...] = tuple(sorted(set(int(i) for i in annotated)))
        self._delta_scale = float(delta_scale)
        self.cap = cap
        self.truth_size = len(self.annotated) if truth_size is None else int(truth_size)

        if len(set(self.events)) != len(self.events):
            raise ValueError("candidate events must be unique")
        for event in self.events:
            if any(not 0 <= i < len(self.left) for i in event.left) or \
               any(not 0 <= i < len(self.right) for i in event.right):
                raise ValueError(f"event {event.encode()} references a missing detection")
        if any(not 0 <= i < len(self.events) for i in self.annotated):
            raise ValueError(f"annotated event indices {self.annotated} out of range")
        if self.truth_size < len(self.annotated):
            raise ValueError(f"truth_size {self.truth_size} is below the {len(self.annotated)} annotated events")

        self._event_matrix = np.array([event_features(e, self.left, self.right) for e in self.events]) \
            if self.events else np.zeros((0, TRACKING_FEATURE_DIM))
        self._feature_cache: Dict[Assignment, np.ndarray] = {}

        if self.detection_count <= self.cap:
            feasible = self.feasible_assignments
            if not feasible:
                raise ValueError("candidate events admit no feasible assignment")
            if not any(self.violations(a) == 0 for a in feasible):
                raise ValueError("annotated events are not jointly realizable")

    @property
    def detection_count(self) -> int:
        return len(self.left) + len(self.right)

    @property
    def feature_dim(self) -> int:
        return TRACKING_FEATURE_DIM

    @property
    def delta_scale(self) -> float:
        return self._delta_scale

    @property
    def has_annotation(self) -> bool:
        return len(self.annotated) > 0

    @property
    def component_count(self) -> int:
        return self.truth_size

    def features(self, output: Assignment) -> np.ndarray:
        cached = self._feature_cache.get(output)
        if cached is None:
            if any(not 0 <= i < len(self.events) for i in output.realized):
                raise ValueError(f"assignment {output.realized} references unknown events")
            cached = np.sum(self._event_matrix[list(output.realized)], axis=0) if output.realized \
                else np.zeros(TRACKING_FEATURE_DIM)
            self._feature_cache[output] = cached
        return cached

    def violations(self, output: Assignment) -> int:
        return sum(1 for i in self.annotated if i not in output.realized)

    def satisfies_conservation(self, output: Assignment) -> bool:
        left_uses = [0] * len(self.left)
        right_uses = [0] * len(self.right)
        for i in output.realized:
            for l in self.events[i].left:
                left_uses[l] += 1
            for r in self.events[i].right:
                right_uses[r] += 1
        return all(u == 1 for u in left_uses) and all(u == 1 for u in right_uses)

    def has_incompatible_output(self) -> bool:
        return any(self.violations(a) > 0 for a in self.feasible_assignments)

    @cached_property
    def feasible_assignments(self) -> List[Assignment]:
        return enumerate_feasible(self)

    def argmax_augmented(self, w: np.ndarray, space: SpaceSelector, delta_coeff: int) -> Tuple[Assignment, float]:
        return tracking_argmax(self, w, space, delta_coeff)

    def enumerate(self, space: SpaceSelector) -> List[Assignment]:
        return [a for a in self.feasible_assignments if _in_space(self, a, space)]

    def truth_components(self) -> List[Tuple[int, Hashable]]:
        return [(i, self.events[i].kind.name) for i in self.annotated]

    def with_annotation(self, revealed: Sequence[int]) -> "TrackingInstance":
        keep = set(int(i) for i in revealed)
        missing = keep - set(self.annotated)
        if missing:
            raise ValueError(f"events {sorted(missing)} are not annotated and cannot be revealed")
        return TrackingInstance(self.left, self.right, self.events, sorted(keep), self._delta_scale, self.cap,
                                self.truth_size)

    def __repr__(self) -> str:
        return (f"TrackingInstance(left={len(self.left)}, right={len(self.right)}, "
                f"events={len(self.events)}, annotated={len(self.annotated)})")


def _in_space(instance: TrackingInstance, assignment: Assignment, space: SpaceSelector) -> bool:
    if space is SpaceSelector.FULL:
        return True
    compatible = instance.violations(assignment) == 0
    return compatible if space is SpaceSelector.COMPATIBLE else not compatible


def enumerate_feasible(instance: TrackingInstance, cap: Optional[int] = None) -> List[Assignment]:
    """
    Every event subset satisfying both conservation families, sorted by encoding.

    Left detections are resolved in index order by choosing the one event that carries
    each of them; right detections left over at the end must be covered by APPEAR events.

    Raises:
        EnumerationCapError: If the instance has more detections than the cap.
    """
    cap = instance.cap if cap is None else cap
    if instance.detection_count > cap:
        raise EnumerationCapError(f"refusing to enumerate {instance.detection_count} detections (cap {cap})")

    fates: List[List[int]] = [[] for _ in instance.left]
    appear_for: Dict[int, int] = {}
    for index, event in enumerate(instance.events):
        if event.kind is EventKind.APPEAR:
            appear_for[event.right[0]] = index
        else:
            fates[event.left[0]].append(index)

    results: List[Assignment] = []

    def search(l: int, used_right: frozenset, chosen: List[int]) -> None:
        if l == len(instance.left):
            remaining = [r for r in range(len(instance.right)) if r not in used_right]
            if all(r in appear_for for r in remaining):
                results.append(Assignment(tuple(sorted(chosen + [appear_for[r] for r in remaining]))))
            return
        for index in fates[l]:
            children = instance.events[index].right
            if used_right.isdisjoint(children):
                search(l + 1, used_right.union(children), chosen + [index])

    search(0, frozenset(), [])
    results.sort()
    return results


def tracking_argmax(instance: TrackingInstance, w: np.ndarray, space: SpaceSelector,
                    delta_coeff: int) -> Tuple[Assignment, float]:
    """
    Maximize <sum of realized event features, w> + delta_coeff * task loss over a subspace.

    Ties go to the first assignment in encoding order.

    Raises:
        DegenerateSampleError: If the selected subspace is empty.
    """
    if delta_coeff not in (-1, 0, 1):
        raise ValueError(f"delta_coeff must be -1, 0 or +1, got: {delta_coeff}")
    w = np.asarray(w, dtype=float)
    if w.shape != (instance.feature_dim,):
        raise ConfigurationError(f"w must have length {instance.feature_dim}, got shape {w.shape}")

    best, best_value = None, -np.inf
    for assignment in instance.feasible_assignments:
        if not _in_space(instance, assignment, space):
            continue
        value = instance.augmented_value(assignment, w, delta_coeff)
        if value > best_value:
            best, best_value = assignment, value
    if best is None:
        raise DegenerateSampleError(f"{space.value} subspace is empty for {instance!r}")
    return best, best_value
