import logging
import os
from typing import Optional

import pandas as pd

from app.globals import VERSION

logger = logging.getLogger(__name__)

# Columns holding wall-clock measurements; everything else is reproducible bit for bit
TIMING_COLUMNS = ("train_wall_ms", "wall_ms")


def derived_path(path: str, suffix: str) -> str:
    """results/run.csv + '_summary' -> results/run_summary.csv"""
    stem, ext = os.path.splitext(path)
    return f"{stem}{suffix}{ext or '.csv'}"


def write_results(path: str, frame: pd.DataFrame, config_hash: str, seed: Optional[int]) -> None:
    """
    Write a result table as CSV below a metadata comment block.

        # config_hash=3f2a...
        # seed=0
        # version=1.0.0
        method,fraction,...
    """
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as handle:
        handle.write(f"# config_hash={config_hash}\n")
        handle.write(f"# seed={'' if seed is None else seed}\n")
        handle.write(f"# version={VERSION}\n")
        frame.to_csv(handle, index=False, float_format="%.17g")
    logger.info(f"wrote {len(frame)} rows to {path}")


def read_results(path: str) -> pd.DataFrame:
    return pd.read_csv(path, comment="#", float_precision="round_trip")
