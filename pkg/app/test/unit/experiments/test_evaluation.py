import unittest
import sys
import os

import numpy as np

sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', '..', '..', '..'))

from app.experiments.evaluation import evaluate_test_loss, predict
from app.models.Chain.ChainInstance import UNKNOWN, ChainInstance
from app.models.Core.Dataset import Dataset
from app.models.Tracking.TrackingGenerator import TrackingGenConfig, generate_instance


class TestEvaluation(unittest.TestCase):
    """Test cases for the percent test loss."""

    def setUp(self):
        # w favours label 1 everywhere: unary weight of label 1 on the single observation feature
        self.w = np.array([0.0, 1.0, 0.0, 0.0, 0.0, 0.0])

    def test_predict(self):
        """Test unconstrained predictions."""
        dataset = Dataset([ChainInstance([[1.0], [0.5]], 2, [0, 0])])
        self.assertEqual(tuple(predict(self.w, dataset)[0]), (1, 1))

    def test_perfect_and_wrong(self):
        """Test 0% and 100% loss."""
        right = Dataset([ChainInstance([[1.0], [0.5]], 2, [1, 1])])
        wrong = Dataset([ChainInstance([[1.0], [0.5]], 2, [0, 0])])
        self.assertEqual(evaluate_test_loss(self.w, right), 0.0)
        self.assertEqual(evaluate_test_loss(self.w, wrong), 100.0)

    def test_averaged_per_instance(self):
        """Test that instances count equally regardless of their length."""
        dataset = Dataset([ChainInstance([[1.0], [0.5], [0.2], [0.1]], 2, [1, 1, 1, 0]),
                           ChainInstance([[1.0]], 2, [1])])
        self.assertAlmostEqual(evaluate_test_loss(self.w, dataset), 12.5)

    def test_partial_test_set_rejected(self):
        """Test that partially annotated test instances raise ValueError."""
        dataset = Dataset([ChainInstance([[1.0], [0.5]], 2, [1, UNKNOWN])])
        with self.assertRaises(ValueError):
            evaluate_test_loss(self.w, dataset)

    def test_partial_tracking_set_rejected(self):
        """Test that tracking instances with unrevealed truth events raise ValueError."""
        instance = generate_instance(TrackingGenConfig(), 0)[0]
        w = np.zeros(instance.feature_dim)
        loss = evaluate_test_loss(w, Dataset([instance]))
        self.assertTrue(0.0 <= loss <= 100.0)
        partial = instance.with_annotation(instance.annotated[:1])
        with self.assertRaises(ValueError):
            evaluate_test_loss(w, Dataset([partial]))

    def test_dimension_checked(self):
        """Test that weights of the wrong size are rejected."""
        dataset = Dataset([ChainInstance([[1.0]], 2, [1])])
        with self.assertRaises(ValueError):
            evaluate_test_loss(np.zeros(3), dataset)


if __name__ == '__main__':
    unittest.main()
