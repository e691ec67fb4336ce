import logging

import numpy as np
import pandas as pd

from app.exceptions import DatasetFormatError

logger = logging.getLogger(__name__)


class WeightsLoader:
    """
    WeightsLoader reads a weight vector stored as a two-column CSV (index, value).

    Attributes:
        weights (np.ndarray): The vector, ordered by index.
    """

    def __init__(self, filepath: str):
        self.weights = self.load_weights(filepath)

    def load_weights(self, filepath: str) -> np.ndarray:
        """
        Raises:
            DatasetFormatError: If the file cannot be read or its indices are not 0..D-1.
        """
        try:
            df = pd.read_csv(filepath, comment="#", float_precision="round_trip")
        except Exception as e:
            raise DatasetFormatError(f"WeightsLoader failed to read weights CSV: {e}") from e

        if "index" not in df.columns or "value" not in df.columns:
            raise DatasetFormatError("WeightsLoader required columns ('index', 'value') missing")
        df = df.sort_values("index")
        if list(df["index"]) != list(range(len(df))):
            raise DatasetFormatError("WeightsLoader indices must run from 0 to D-1")
        values = df["value"].to_numpy(dtype=float)
        if not np.all(np.isfinite(values)):
            raise DatasetFormatError("WeightsLoader weights must be finite")
        return values

    def get_weights(self) -> np.ndarray:
        return self.weights


def weights_frame(w: np.ndarray) -> pd.DataFrame:
    return pd.DataFrame({"index": np.arange(len(w)), "value": np.asarray(w, dtype=float)})
