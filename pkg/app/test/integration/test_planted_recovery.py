import unittest
import sys
import os

import numpy as np

sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', '..', '..'))

from app.experiments.annotation_sweep import full_annotation_config
from app.experiments.evaluation import evaluate_test_loss
from app.experiments.experiment_config import ExperimentConfig
from app.models.Solver.CCCPSolver import SolverConfig, train_cccp
from app.setup.dataset_initializer import ChainGenConfig, synth_dataset


class TestPlantedRecovery(unittest.TestCase):
    """Integration test of learning back a planted model."""

    def test_planted_tracking_weights_zero_loss(self):
        """Test that planted tracking weights decode an unshifted test set exactly."""
        config = ExperimentConfig(problem="tracking", train_size=3, test_size=20, domain_shift=0.0)
        _, test, planted = synth_dataset(config, 0)
        self.assertEqual(evaluate_test_loss(planted, test), 0.0)

    def test_noiseless_chains_learned(self):
        """Test that hinge training on noiseless chains generalizes to noiseless test chains."""
        config = ExperimentConfig(train_size=20, test_size=20, domain_shift=0.0,
                                  solver=SolverConfig(max_cccp_iters=50),
                                  chain=ChainGenConfig(length=5, label_count=3, obs_dim=3, noise=0.0))
        train, test, planted = synth_dataset(config, 3)
        self.assertEqual(evaluate_test_loss(planted, test), 0.0)
        w, _ = train_cccp(train, full_annotation_config(config))
        self.assertLessEqual(evaluate_test_loss(w, test), 5.0)
        self.assertLess(evaluate_test_loss(w, test), evaluate_test_loss(np.zeros_like(w), test))


if __name__ == '__main__':
    unittest.main()
