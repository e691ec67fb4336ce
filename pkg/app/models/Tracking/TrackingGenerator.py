import logging
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from app.exceptions import ConfigurationError
from app.globals import *
from .Event import Assignment, Detection, Event, EventKind
from .TrackingInstance import TrackingInstance

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TrackingGenConfig:
    """
    Parameters of the synthetic two-frame tracking generator.

    Left detections are kept min_separation apart and children stay within half the
    gating radius of their parent, so no event can link a detection to another
    object's descendants. Appearing detections are placed outside every gate.
    """
    min_left: int = TRACK_MIN_LEFT
    max_left: int = TRACK_MAX_LEFT
    p_divide: float = TRACK_P_DIVIDE
    p_disappear: float = TRACK_P_DISAPPEAR
    p_appear: float = TRACK_P_APPEAR
    motion_noise: float = TRACK_MOTION_NOISE
    min_separation: float = TRACK_MIN_SEPARATION
    gating_radius: float = TRACK_GATING_RADIUS
    arena_size: float = TRACK_ARENA_SIZE
    size_range: Tuple[float, float] = TRACK_SIZE_RANGE
    size_noise: float = TRACK_SIZE_NOISE
    max_retries: int = TRACK_MAX_RETRIES
    detection_cap: int = TRACKING_DETECTION_CAP
    delta_scale: float = DEFAULT_DELTA_SCALE

    def __post_init__(self):
        if not 0 <= self.min_left <= self.max_left:
            raise ConfigurationError(f"need 0 <= min_left <= max_left, got {self.min_left}, {self.max_left}")
        for name in ("p_divide", "p_disappear", "p_appear"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ConfigurationError(f"{name} must be a probability, got: {value}")
        if self.p_divide + self.p_disappear > 1.0:
            raise ConfigurationError("p_divide + p_disappear must not exceed 1")
        if self.motion_noise < 0 or self.size_noise < 0:
            raise ConfigurationError("noise levels must be nonnegative")
        if not self.gating_radius > 0 or self.min_separation <= 2 * self.gating_radius:
            raise ConfigurationError(
                f"min_separation ({self.min_separation}) must exceed twice the gating radius ({self.gating_radius})")
        low, high = self.size_range
        if not 0 < low <= high:
            raise ConfigurationError(f"size_range must satisfy 0 < low <= high, got: {self.size_range}")
        if self.max_left > self.detection_cap:
            raise ConfigurationError(f"max_left ({self.max_left}) cannot exceed the detection cap ({self.detection_cap})")


def planted_tracking_weights() -> np.ndarray:
    return np.array(PLANTED_TRACKING_WEIGHTS, dtype=float)


def _place_left(rng: np.random.Generator, count: int, config: TrackingGenConfig) -> Optional[np.ndarray]:
    margin = config.gating_radius
    positions: List[np.ndarray] = []
    for _ in range(config.max_retries):
        if len(positions) == count:
            break
        candidate = rng.uniform(margin, config.arena_size - margin, size=2)
        if all(np.linalg.norm(candidate - p) >= config.min_separation for p in positions):
            positions.append(candidate)
    return np.array(positions) if len(positions) == count else None


def _offset(rng: np.random.Generator, scale: float, limit: float) -> np.ndarray:
    """Gaussian displacement redrawn until it stays inside the limit."""
    while True:
        step = rng.normal(0.0, scale, size=2) if scale > 0 else np.zeros(2)
        if np.linalg.norm(step) <= limit:
            return step


def _noisy_size(rng: np.random.Generator, size: float, config: TrackingGenConfig) -> float:
    return float(size * max(1.0 + config.size_noise * rng.normal(), 0.5))


def _candidate_events(left: List[Detection], right: List[Detection], radius: float) -> List[Event]:
    events: List[Event] = []
    for l, parent in enumerate(left):
        gate = parent.point.buffer(radius)
        reachable = [r for r, child in enumerate(right) if gate.contains(child.point)]
        events.extend(Event.move(l, r) for r in reachable)
        events.extend(Event.divide(l, a, b) for i, a in enumerate(reachable) for b in reachable[i + 1:])
        events.append(Event.disappear(l))
    events.extend(Event.appear(r) for r in range(len(right)))
    return events


def _sample_once(rng: np.random.Generator, config: TrackingGenConfig) -> Optional[Tuple[TrackingInstance, Assignment]]:
    n_left = int(rng.integers(config.min_left, config.max_left + 1))
    positions = _place_left(rng, n_left, config)
    if positions is None:
        return None

    low, high = config.size_range
    left = [Detection(f"L{i}", float(p[0]), float(p[1]), float(rng.uniform(low, high)))
            for i, p in enumerate(positions)]

    # (kind, parent, generated right slots)
    plans: List[Tuple[EventKind, Optional[int], List[int]]] = []
    raw_right: List[Tuple[float, float, float]] = []
    reach = config.gating_radius / 2.0
    for l, parent in enumerate(left):
        origin = positions[l]
        u = rng.uniform()
        if u < config.p_divide:
            direction = rng.normal(size=2)
            direction = direction / max(np.linalg.norm(direction), 1e-12)
            spread = min(1.0 + config.motion_noise * abs(rng.normal()), reach)
            slots = []
            for sign in (1.0, -1.0):
                centre = origin + sign * spread * direction
                jitter = _offset(rng, config.motion_noise / 4.0, reach - spread) if spread < reach else np.zeros(2)
                x, y = centre + jitter
                raw_right.append((float(x), float(y), _noisy_size(rng, parent.size / 2.0, config)))
                slots.append(len(raw_right) - 1)
            plans.append((EventKind.DIVIDE, l, slots))
        elif u < config.p_divide + config.p_disappear:
            plans.append((EventKind.DISAPPEAR, l, []))
        else:
            x, y = origin + _offset(rng, config.motion_noise, reach)
            raw_right.append((float(x), float(y), _noisy_size(rng, parent.size, config)))
            plans.append((EventKind.MOVE, l, [len(raw_right) - 1]))

    n_appear = int(rng.binomial(2, config.p_appear))
    for _ in range(n_appear):
        for _ in range(config.max_retries):
            candidate = rng.uniform(0.0, config.arena_size, size=2)
            if n_left == 0 or np.min(np.linalg.norm(positions - candidate, axis=1)) > config.gating_radius + 1.0:
                break
        else:
            return None
        raw_right.append((float(candidate[0]), float(candidate[1]), float(rng.uniform(low, high))))
        plans.append((EventKind.APPEAR, None, [len(raw_right) - 1]))

    if n_left + len(raw_right) > config.detection_cap:
        return None

    order = rng.permutation(len(raw_right))
    slot_to_index = {int(slot): index for index, slot in enumerate(order)}
    right = [Detection(f"R{index}", *raw_right[int(slot)]) for index, slot in enumerate(order)]

    truth_events: List[Event] = []
    for kind, parent, slots in plans:
        mapped = [slot_to_index[s] for s in slots]
        if kind is EventKind.MOVE:
            truth_events.append(Event.move(parent, mapped[0]))
        elif kind is EventKind.DIVIDE:
            truth_events.append(Event.divide(parent, mapped[0], mapped[1]))
        elif kind is EventKind.DISAPPEAR:
            truth_events.append(Event.disappear(parent))
        else:
            truth_events.append(Event.appear(mapped[0]))

    if not truth_events:
        return None

    events = _candidate_events(left, right, config.gating_radius)
    index_of = {event: i for i, event in enumerate(events)}
    if any(event not in index_of for event in truth_events):
        return None
    truth = Assignment(tuple(sorted(index_of[e] for e in truth_events)))

    instance = TrackingInstance(left, right, events, truth.realized, config.delta_scale, config.detection_cap)
    if truth not in instance.feasible_assignments:
        return None
    return instance, truth


def generate_instance(gen_config: TrackingGenConfig, rng_seed) -> Tuple[TrackingInstance, Assignment]:
    """
    Sample a fully annotated tracking instance and its ground truth.

    The ground truth is drawn first, then detections are emitted around it. Draws that
    break the detection cap or gating layout are discarded and redrawn from the same stream.

    Args:
        gen_config: Generator parameters.
        rng_seed: Anything accepted by np.random.default_rng.
    Returns:
        (instance annotated with every truth event, truth assignment)
    Raises:
        ConfigurationError: If no valid instance is found within max_retries draws.
    """
    rng = np.random.default_rng(rng_seed)
    for attempt in range(max(gen_config.max_retries, 1)):
        sample = _sample_once(rng, gen_config)
        if sample is not None:
            if attempt:
                logger.debug(f"tracking instance accepted after {attempt + 1} draws")
            return sample
    raise ConfigurationError(f"no valid tracking instance after {gen_config.max_retries} draws; relax the generator")

