import unittest
import sys
import os

import numpy as np

sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', '..', '..', '..', '..'))

from app.models.Chain.ChainInstance import ChainInstance
from app.models.Core.Dataset import Dataset
from app.models.Solver.CCCPSolver import SolverConfig
from app.models.Solver.Perceptron import train_perceptron, training_task_loss
from app.setup.dataset_initializer import ChainGenConfig, ChainInitializer


class TestPerceptron(unittest.TestCase):
    """Test cases for the structured perceptron with partial annotations."""

    def test_compatible_prediction_no_update(self):
        """Test that already compatible predictions stop training at once."""
        dataset = Dataset([ChainInstance(np.zeros((3, 2)), 2, [0, 0, 0])])
        w, trace = train_perceptron(dataset, SolverConfig())
        np.testing.assert_array_equal(w, np.zeros(dataset.feature_dim))
        self.assertEqual(len(trace.rows), 1)
        self.assertTrue(trace.converged)
        self.assertEqual(trace.final.objective, 0.0)

    def test_separable_chains_reach_zero_loss(self):
        """Test that noiseless planted chains are fit exactly."""
        rng = np.random.default_rng(0)
        config = ChainGenConfig(length=5, label_count=3, obs_dim=4, noise=0.0)
        dataset = ChainInitializer.from_rng(config, rng).create_dataset(10, rng)
        w, trace = train_perceptron(dataset, SolverConfig(max_perceptron_passes=200, patience=50))
        self.assertEqual(training_task_loss(dataset, w), 0.0)
        self.assertTrue(trace.converged)

    def test_partial_annotation_update(self):
        """Test that the best pass is returned on partially annotated chains."""
        rng = np.random.default_rng(1)
        config = ChainGenConfig(length=6, label_count=3, obs_dim=4, noise=0.3)
        full = ChainInitializer.from_rng(config, rng).create_dataset(10, rng)
        partial = Dataset([chain.with_annotation([0, 3]) for chain in full])
        w, trace = train_perceptron(partial, SolverConfig(max_perceptron_passes=30))
        self.assertEqual(training_task_loss(partial, w), min(trace.objectives))
        self.assertLessEqual(min(trace.objectives), trace.rows[0].objective)

    def test_inference_call_accounting(self):
        """Test calls: N at start, then per pass N predictions, one per update and N for the evaluation."""
        rng = np.random.default_rng(2)
        config = ChainGenConfig(length=4, label_count=3, obs_dim=3)
        dataset = ChainInitializer.from_rng(config, rng).create_dataset(6, rng)
        _, trace = train_perceptron(dataset, SolverConfig(max_perceptron_passes=3, patience=3))
        n = len(dataset)
        self.assertEqual(trace.rows[0].inference_calls, n)
        for earlier, later in zip(trace.rows, trace.rows[1:]):
            self.assertEqual(later.inference_calls - earlier.inference_calls, 2 * n + later.inner_iters)

    def test_training_task_loss(self):
        """Test the mean task loss of the unconstrained predictions."""
        dataset = Dataset([ChainInstance([[1.0], [0.5]], 2, [0, 0]), ChainInstance([[1.0], [0.5]], 2, [1, 1])])
        w = np.array([0.0, 1.0, 0.0, 0.0, 0.0, 0.0])
        self.assertEqual(training_task_loss(dataset, w), 1.0)


if __name__ == '__main__':
    unittest.main()
