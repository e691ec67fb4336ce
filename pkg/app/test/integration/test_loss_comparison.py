import unittest
import sys
import os

import numpy as np

sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', '..', '..'))

from app.experiments.experiment_config import ExperimentConfig
from app.experiments.experiment_result import OK, cell_seed
from app.experiments.loss_comparison import COMPARISON_COLUMNS, run_loss_comparison
from app.models.Solver.CCCPSolver import SolverConfig, train_cccp
from app.setup.annotation_sampler import dataset_truth, stratified_sample_annotations
from app.setup.dataset_initializer import ChainGenConfig, synth_dataset


class TestLossComparison(unittest.TestCase):
    """Integration test of training every loss on identical partial annotations."""

    @classmethod
    def setUpClass(cls):
        cls.config = ExperimentConfig(train_size=8, test_size=6, repeats=2, fraction=0.3, seed=2,
                                      solver=SolverConfig(max_cccp_iters=40),
                                      chain=ChainGenConfig(length=4, label_count=3, obs_dim=3))
        cls.result = run_loss_comparison(cls.config)

    def test_rows(self):
        """Test one successful row per loss and repeat."""
        frame = self.result.frame
        self.assertEqual(list(frame.columns), COMPARISON_COLUMNS)
        self.assertEqual(len(frame), len(self.config.losses) * self.config.repeats)
        self.assertTrue((frame["status"] == OK).all())
        self.assertTrue(frame["test_loss_pct"].between(0.0, 100.0).all())
        self.assertTrue((frame["inference_calls"] > 0).all())

    def test_summary(self):
        """Test one summary row per loss in configured order."""
        summary = self.result.summary
        self.assertEqual(list(summary["loss"]), list(self.config.losses))
        self.assertTrue((summary["runs"] == self.config.repeats).all())

    def test_repeat_uses_its_own_mask(self):
        """Test that a repeat trains on the mask drawn from its cell seed."""
        train = synth_dataset(self.config, self.config.seed)[0]
        mask = stratified_sample_annotations(dataset_truth(train), self.config.fraction, cell_seed(self.config.seed, 1))
        spec = self.config.loss_spec("hinge")
        w, _ = train_cccp(mask.apply(train), self.config.solver_for(spec))
        np.testing.assert_array_equal(self.result.weights[("hinge", 1)], w)


if __name__ == '__main__':
    unittest.main()
