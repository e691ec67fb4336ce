import logging
from typing import Dict

import pandas as pd

from app.exceptions import ConfigurationError

logger = logging.getLogger(__name__)


class ConfigLoader:
    """
    ConfigLoader reads a flat `key = value` experiment file into a mapping of strings.

    Blank lines and lines starting with '#' are ignored; list values stay comma separated
    and are interpreted by the experiment configuration.

    Attributes:
        values (Dict[str, str]): Raw settings in file order.
    """

    def __init__(self, filepath: str):
        self.values = self.load_config(filepath)

    def load_config(self, filepath: str) -> Dict[str, str]:
        """
        Raises:
            ConfigurationError: If the file cannot be read, a line has no '=', or a key repeats.
        """
        try:
            df = pd.read_csv(filepath, sep="=", header=None, names=["key", "value"], comment="#",
                             dtype=str, skip_blank_lines=True, engine="python")
        except FileNotFoundError as e:
            raise ConfigurationError(f"ConfigLoader config file not found: {filepath}") from e
        except Exception as e:
            raise ConfigurationError(f"ConfigLoader failed to read {filepath}: {e}") from e

        df["key"] = df["key"].str.strip()
        df["value"] = df["value"].str.strip()
        missing = df[df["value"].isna() | (df["value"] == "")]
        if not missing.empty:
            raise ConfigurationError(f"ConfigLoader keys without a value: {list(missing['key'])}")
        duplicated = df[df["key"].duplicated()]
        if not duplicated.empty:
            raise ConfigurationError(f"ConfigLoader duplicated keys: {list(duplicated['key'])}")

        values = dict(zip(df["key"], df["value"]))
        logger.info(f"read {len(values)} settings from {filepath}")
        return values

    def get_config(self) -> Dict[str, str]:
        return self.values
