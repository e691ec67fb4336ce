import unittest
import sys
import os

sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', '..', '..', '..', '..'))

from app.models.Tracking.Event import TRACKING_FEATURE_DIM, Assignment, Detection, Event, EventKind


class TestEvent(unittest.TestCase):
    """Test cases for detections, events and assignments."""

    def test_detection_validation(self):
        """Test that detections need an id and a positive size."""
        self.assertEqual(Detection("L0", 1.0, 2.0, 1.5).point.x, 1.0)
        with self.assertRaises(ValueError):
            Detection("", 0.0, 0.0, 1.0)
        with self.assertRaises(ValueError):
            Detection("R0", 0.0, 0.0, 0.0)

    def test_event_arity(self):
        """Test the number of detections each kind links."""
        with self.assertRaises(ValueError):
            Event(EventKind.MOVE, (0,), ())
        with self.assertRaises(ValueError):
            Event(EventKind.APPEAR, (0,), (1,))
        with self.assertRaises(ValueError):
            Event(EventKind.DIVIDE, (0,), (2, 1))

    def test_divide_sorts_children(self):
        """Test that the divide constructor orders its children."""
        self.assertEqual(Event.divide(0, 3, 1).right, (1, 3))

    def test_encode_decode(self):
        """Test the text encoding of every kind."""
        for event in (Event.move(1, 2), Event.divide(0, 1, 2), Event.appear(4), Event.disappear(3)):
            self.assertEqual(Event.decode(event.encode()), event)
        self.assertEqual(Event.divide(0, 1, 2).encode(), "D:0:1:2")
        self.assertEqual(Event.appear(4).encode(), "A:4")

    def test_kind_blocks(self):
        """Test that each kind owns one parameter block."""
        self.assertEqual([kind.block for kind in EventKind], [0, 1, 2, 3])
        self.assertEqual(TRACKING_FEATURE_DIM, 12)

    def test_assignment_ordering(self):
        """Test that assignments compare by their encoding and must be sorted."""
        self.assertLess(Assignment((0,)), Assignment((1, 2)))
        self.assertIn(2, Assignment((1, 2)))
        with self.assertRaises(ValueError):
            Assignment((2, 1))
        with self.assertRaises(ValueError):
            Assignment((1, 1))


if __name__ == '__main__':
    unittest.main()
