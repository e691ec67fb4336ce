import unittest
import sys
import os
import shutil

import pandas as pd

sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', '..', '..', '..'))

from app.experiments.results_writer import derived_path, read_results, write_results
from app.globals import VERSION

MOCK_DIR = "mock_results"


class TestResultsWriter(unittest.TestCase):
    """Test cases for result files."""

    def tearDown(self):
        if os.path.exists(MOCK_DIR):
            shutil.rmtree(MOCK_DIR)

    def test_metadata_block(self):
        """Test that the file starts with hash, seed and version comments."""
        path = os.path.join(MOCK_DIR, "nested", "run.csv")
        write_results(path, pd.DataFrame({"a": [1, 2]}), "deadbeef", 3)
        with open(path) as f:
            lines = f.read().splitlines()
        self.assertEqual(lines[:4], ["# config_hash=deadbeef", "# seed=3", f"# version={VERSION}", "a"])

    def test_floats_exact(self):
        """Test that floats survive writing with 17 significant digits."""
        path = os.path.join(MOCK_DIR, "floats.csv")
        frame = pd.DataFrame({"x": [0.1, 1.0 / 3.0, 2.0 ** -40], "name": ["p", "q", "r"]})
        write_results(path, frame, "h", None)
        pd.testing.assert_frame_equal(read_results(path), frame)

    def test_derived_path(self):
        """Test companion file names."""
        self.assertEqual(derived_path("results/run.csv", "_summary"), "results/run_summary.csv")
        self.assertEqual(derived_path("out", "_trace"), "out_trace.csv")


if __name__ == '__main__':
    unittest.main()
