import unittest
import sys
import os

import numpy as np

sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', '..', '..', '..', '..'))

from app.data.dataset_io.WeightsLoader import WeightsLoader, weights_frame
from app.exceptions import DatasetFormatError
from app.experiments.results_writer import write_results

MOCK_FILE = "mock_weights.csv"


class TestWeightsLoader(unittest.TestCase):
    """Test cases for reading weight vectors."""

    def write_mock_csv(self, content: str):
        with open(MOCK_FILE, "w") as f:
            f.write(content)

    def tearDown(self):
        if os.path.exists(MOCK_FILE):
            os.remove(MOCK_FILE)

    def test_reads_results_file(self):
        """Test loading weights written with the metadata block."""
        w = np.array([0.1, -2.5, 1.0 / 3.0])
        write_results(MOCK_FILE, weights_frame(w), "abc", 7)
        np.testing.assert_array_equal(WeightsLoader(MOCK_FILE).get_weights(), w)

    def test_unsorted_indices(self):
        """Test that rows are ordered by index."""
        self.write_mock_csv("index,value\n1,2.0\n0,1.0\n")
        np.testing.assert_array_equal(WeightsLoader(MOCK_FILE).get_weights(), [1.0, 2.0])

    def test_invalid_files(self):
        """Test rejection of missing columns, gaps and non-finite values."""
        for content in ("i,v\n0,1.0\n", "index,value\n0,1.0\n2,3.0\n", "index,value\n0,inf\n"):
            self.write_mock_csv(content)
            with self.assertRaises(DatasetFormatError):
                WeightsLoader(MOCK_FILE)

    def test_missing_file(self):
        """Test that a missing file raises DatasetFormatError."""
        with self.assertRaises(DatasetFormatError):
            WeightsLoader("missing_weights.csv")


if __name__ == '__main__':
    unittest.main()
