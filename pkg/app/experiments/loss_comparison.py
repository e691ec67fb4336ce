import logging
from typing import Optional

import pandas as pd

from app.experiments.annotation_sweep import train_and_evaluate
from app.experiments.experiment_config import ExperimentConfig
from app.experiments.experiment_result import FAILED, ExperimentResult, attempt, cell_seed, summarize
from app.models.Core.Dataset import Dataset
from app.models.Solver.CCCPSolver import train_cccp
from app.setup.annotation_sampler import dataset_truth, stratified_sample_annotations
from app.setup.dataset_initializer import synth_dataset

logger = logging.getLogger(__name__)

COMPARISON_COLUMNS = ["loss", "repeat", "status", "test_loss_pct", "train_wall_ms", "inference_calls"]


def run_loss_comparison(config: ExperimentConfig, train: Optional[Dataset] = None,
                        test: Optional[Dataset] = None) -> ExperimentResult:
    """
    Train every loss of config.losses with CCCP on identical partial-annotation splits.

    Repeat r samples one stratified mask at config.fraction from stream (seed, r); all losses
    of that repeat train on it.

    Returns:
        Per-run rows (COMPARISON_COLUMNS) and a per-loss summary of mean and std.
    """
    if train is None or test is None:
        train, test = synth_dataset(config, config.seed)[:2]
    truth = dataset_truth(train)
    specs = [config.loss_spec(label) for label in config.losses]

    rows = []
    weights = {}
    for repeat in range(config.repeats):
        partial, _ = attempt(f"annotation sampling for repeat {repeat}",
                             lambda: stratified_sample_annotations(truth, config.fraction,
                                                                   cell_seed(config.seed, repeat)).apply(train))
        for spec in specs:
            row = {"loss": spec.label, "repeat": repeat, "status": FAILED}
            if partial is not None:
                logger.info(f"loss comparison: {spec.label}, repeat {repeat}")
                outcome, _ = attempt(f"{spec.label} at repeat {repeat}",
                                     lambda: train_and_evaluate(train_cccp, partial, config.solver_for(spec), test))
                if outcome is not None:
                    w, result = outcome
                    row.update(result)
                    weights[(spec.label, repeat)] = w
            rows.append(row)

    frame = pd.DataFrame(rows).reindex(columns=COMPARISON_COLUMNS)
    failed = int((frame["status"] == FAILED).sum())
    if failed:
        logger.warning(f"loss comparison finished with {failed} failed rows")
    summary = summarize(frame, "loss", ["test_loss_pct", "train_wall_ms", "inference_calls"])
    return ExperimentResult(frame=frame, summary=summary, failed=failed, weights=weights)
