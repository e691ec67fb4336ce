import unittest
import sys
import os

sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', '..', '..', '..', '..'))

from app.data.config_loaders.ConfigLoader import ConfigLoader
from app.exceptions import ConfigurationError

MOCK_FILE = "mock_experiment.cfg"


class TestConfigLoader(unittest.TestCase):
    """Test cases for the flat key = value settings reader."""

    def write_mock_file(self, content: str):
        with open(MOCK_FILE, "w") as f:
            f.write(content)

    def tearDown(self):
        if os.path.exists(MOCK_FILE):
            os.remove(MOCK_FILE)

    def test_reads_settings(self):
        """Test that comments and blanks are skipped and values are stripped."""
        self.write_mock_file(
            "# sweep settings\n"
            "problem = chain\n"
            "\n"
            "fractions = 0.1, 0.3, 1.0\n"
            "lambda=0.01\n"
        )
        values = ConfigLoader(MOCK_FILE).get_config()
        self.assertEqual(values, {"problem": "chain", "fractions": "0.1, 0.3, 1.0", "lambda": "0.01"})

    def test_missing_file(self):
        """Test that a missing file raises ConfigurationError."""
        with self.assertRaises(ConfigurationError):
            ConfigLoader("missing_experiment.cfg")

    def test_key_without_value(self):
        """Test rejection of lines with no value."""
        self.write_mock_file("problem = chain\nseed\n")
        with self.assertRaises(ConfigurationError):
            ConfigLoader(MOCK_FILE)

    def test_duplicated_key(self):
        """Test rejection of keys set twice."""
        self.write_mock_file("seed = 1\nseed = 2\n")
        with self.assertRaises(ConfigurationError):
            ConfigLoader(MOCK_FILE)


if __name__ == '__main__':
    unittest.main()
