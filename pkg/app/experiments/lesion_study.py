import logging
from typing import Optional

import pandas as pd

from app.experiments.experiment_config import ExperimentConfig
from app.experiments.experiment_result import FAILED, OK, ExperimentResult, attempt, cell_seed
from app.models.Core.Dataset import Dataset
from app.models.Solver.CCCPSolver import lesion_label, train_lesion_variant
from app.setup.annotation_sampler import dataset_truth, stratified_sample_annotations
from app.setup.dataset_initializer import synth_dataset

logger = logging.getLogger(__name__)

# (recycle, adaptive); the full method first, vanilla CCCP last
LESION_GRID = ((True, True), (True, False), (False, True), (False, False))
TOTALS_COLUMNS = ["variant", "repeat", "recycle", "adaptive", "status", "iterations", "bounds_total",
                  "inference_calls", "train_wall_ms", "final_objective", "converged"]


def run_lesion_study(config: ExperimentConfig, train: Optional[Dataset] = None) -> ExperimentResult:
    """
    Run the four solver variants {recycling on/off} x {adaptive precision on/off} on identical data.

    Returns:
        frame: convergence traces of every variant and repeat in long format.
        summary: one totals row per variant and repeat (TOTALS_COLUMNS).
    """
    if train is None:
        train = synth_dataset(config, config.seed)[0]
    truth = dataset_truth(train)

    traces = []
    totals = []
    weights = {}
    for repeat in range(config.repeats):
        partial, _ = attempt(f"annotation sampling for repeat {repeat}",
                             lambda: stratified_sample_annotations(truth, config.fraction,
                                                                   cell_seed(config.seed, repeat)).apply(train))
        for recycle, adaptive in LESION_GRID:
            variant = lesion_label(recycle, adaptive)
            row = {"variant": variant, "repeat": repeat, "recycle": recycle, "adaptive": adaptive, "status": FAILED}
            outcome = None
            if partial is not None:
                logger.info(f"lesion study: {variant}, repeat {repeat}")
                outcome, _ = attempt(f"{variant} at repeat {repeat}",
                                     lambda: train_lesion_variant(partial, config.solver, recycle, adaptive))
            if outcome is not None:
                w, trace = outcome
                final = trace.final
                row.update(status=OK, iterations=final.iter, bounds_total=final.bounds_total,
                           inference_calls=final.inference_calls, train_wall_ms=final.wall_ms,
                           final_objective=final.objective, converged=trace.converged)
                frame = trace.to_frame(extended=True)
                frame.insert(0, "variant", variant)
                frame.insert(1, "repeat", repeat)
                frame.insert(2, "recycle", recycle)
                frame.insert(3, "adaptive", adaptive)
                traces.append(frame)
                weights[(variant, repeat)] = w
            totals.append(row)

    summary = pd.DataFrame(totals).reindex(columns=TOTALS_COLUMNS)
    failed = int((summary["status"] == FAILED).sum())
    if failed:
        logger.warning(f"lesion study finished with {failed} failed variants")
    frame = pd.concat(traces, ignore_index=True) if traces else pd.DataFrame()
    return ExperimentResult(frame=frame, summary=summary, failed=failed, weights=weights)
