import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, Hashable, Optional, Tuple, TypeVar

import numpy as np
import pandas as pd

from app.exceptions import ConfigurationError

logger = logging.getLogger(__name__)

OK = "ok"
FAILED = "failed"

# Errors a single experiment cell may raise without aborting the run
CELL_ERRORS = (ValueError, RuntimeError, ArithmeticError)

T = TypeVar("T")


@dataclass
class ExperimentResult:
    """
    Output of one experiment run.

    Attributes:
        frame: Per-run rows, written as the main result file.
        summary: Aggregates over repeats.
        failed: Number of rows marked failed.
        weights: Learned weights keyed by the row's identifying fields.
    """
    frame: pd.DataFrame
    summary: Optional[pd.DataFrame] = None
    failed: int = 0
    weights: Dict[Hashable, np.ndarray] = field(default_factory=dict)


def cell_seed(master_seed: int, cell_index: int) -> np.random.SeedSequence:
    """Independent RNG stream of one experiment cell."""
    return np.random.SeedSequence([master_seed, cell_index])


def attempt(what: str, run: Callable[[], T]) -> Tuple[Optional[T], Optional[Exception]]:
    """
    Run one experiment cell, turning its failure into a logged (None, error) pair.

    ConfigurationError still propagates: a bad configuration fails every cell alike.
    """
    try:
        return run(), None
    except ConfigurationError:
        raise
    except CELL_ERRORS as e:
        logger.error(f"{what} failed: {type(e).__name__}: {e}")
        return None, e


def summarize(frame: pd.DataFrame, by, columns) -> pd.DataFrame:
    """Mean and std of the successful rows per group, flattened to `<column>_<stat>` columns."""
    ok = frame[frame["status"] == OK]
    grouped = ok.groupby(by, sort=False)
    summary = grouped[list(columns)].agg(["mean", "std"])
    summary.columns = [f"{column}_{stat}" for column, stat in summary.columns]
    summary["runs"] = grouped.size()
    return summary.reset_index()
