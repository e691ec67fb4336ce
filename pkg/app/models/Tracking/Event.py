import logging
from dataclasses import dataclass
from enum import Enum
from typing import Tuple

from shapely.geometry import Point

logger = logging.getLogger(__name__)


class EventKind(Enum):
    MOVE = "M"
    DIVIDE = "D"
    APPEAR = "A"
    DISAPPEAR = "X"

    @property
    def block(self) -> int:
        """Index of the shared parameter block of this event kind."""
        return list(EventKind).index(self)


# Features per event kind: (bias, distance, size mismatch)
EVENT_BLOCK_SIZE = 3
TRACKING_FEATURE_DIM = EVENT_BLOCK_SIZE * len(EventKind)


@dataclass(frozen=True)
class Detection:
    """A detected object in one of the two frames."""
    id: str
    x: float
    y: float
    size: float

    def __post_init__(self):
        if not isinstance(self.id, str) or not self.id.strip():
            raise ValueError(f"detection id must be a nonempty string, got: {self.id!r}")
        if not self.size > 0:
            raise ValueError(f"detection size must be positive, got: {self.size}")

    @property
    def point(self) -> Point:
        return Point(self.x, self.y)


@dataclass(frozen=True)
class Event:
    """
    A candidate event linking left-frame detections to right-frame detections.

    Attributes:
        kind: MOVE (l -> r), DIVIDE (l -> r1, r2 with r1 < r2), APPEAR (-> r) or DISAPPEAR (l ->).
        left: Indices of the left detections involved.
        right: Indices of the right detections involved.
    """
    kind: EventKind
    left: Tuple[int, ...]
    right: Tuple[int, ...]

    def __post_init__(self):
        expected = {
            EventKind.MOVE: (1, 1),
            EventKind.DIVIDE: (1, 2),
            EventKind.APPEAR: (0, 1),
            EventKind.DISAPPEAR: (1, 0),
        }[self.kind]
        if (len(self.left), len(self.right)) != expected:
            raise ValueError(f"{self.kind.name} needs {expected[0]} left and {expected[1]} right detections, "
                             f"got left={self.left}, right={self.right}")
        if self.kind is EventKind.DIVIDE and not self.right[0] < self.right[1]:
            raise ValueError(f"DIVIDE children must be distinct and ordered, got: {self.right}")

    @classmethod
    def move(cls, left: int, right: int) -> "Event":
        return cls(EventKind.MOVE, (left,), (right,))

    @classmethod
    def divide(cls, left: int, right_a: int, right_b: int) -> "Event":
        return cls(EventKind.DIVIDE, (left,), tuple(sorted((right_a, right_b))))

    @classmethod
    def appear(cls, right: int) -> "Event":
        return cls(EventKind.APPEAR, (), (right,))

    @classmethod
    def disappear(cls, left: int) -> "Event":
        return cls(EventKind.DISAPPEAR, (left,), ())

    def encode(self) -> str:
        return ":".join([self.kind.value] + [str(i) for i in self.left + self.right])

    @classmethod
    def decode(cls, text: str) -> "Event":
        code, *indices = text.split(":")
        kind = EventKind(code)
        values = [int(i) for i in indices]
        n_left = 0 if kind is EventKind.APPEAR else 1
        return cls(kind, tuple(values[:n_left]), tuple(values[n_left:]))


@dataclass(frozen=True, order=True)
class Assignment:
    """A joint assignment, encoded as the sorted tuple of realized candidate-event indices."""
    realized: Tuple[int, ...]

    def __post_init__(self):
        if tuple(sorted(set(self.realized))) != tuple(self.realized):
            raise ValueError(f"realized events must be sorted and unique, got: {self.realized}")

    def __contains__(self, event_index: int) -> bool:
        return event_index in self.realized
