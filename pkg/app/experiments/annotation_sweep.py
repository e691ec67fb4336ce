import logging
from typing import Callable, Dict, Optional, Tuple

import numpy as np
import pandas as pd

from app.experiments.evaluation import evaluate_test_loss
from app.experiments.experiment_config import ExperimentConfig
from app.experiments.experiment_result import FAILED, OK, ExperimentResult, attempt, cell_seed, summarize
from app.models.Core.Dataset import Dataset
from app.models.Core.GenericLoss import GenericLossSpec, LossKind
from app.models.Solver.CCCPSolver import SolverConfig, TrainTrace, train_cccp
from app.models.Solver.Perceptron import train_perceptron
from app.setup.annotation_sampler import dataset_truth, stratified_sample_annotations
from app.setup.dataset_initializer import synth_dataset

logger = logging.getLogger(__name__)

SWEEP_COLUMNS = ["method", "fraction", "repeat", "status", "test_loss_pct", "train_wall_ms", "inference_calls"]
FULL_ANNOTATION_METHOD = "full-structsvm"
PERCEPTRON_METHOD = "perceptron"

Trainer = Callable[[Dataset, SolverConfig], Tuple[np.ndarray, TrainTrace]]


def full_annotation_config(config: ExperimentConfig) -> SolverConfig:
    """Hinge loss on the fully annotated training set: the structured SVM baseline."""
    return config.solver_for(GenericLossSpec(LossKind.HINGE, delta_scale=config.delta_scale))


def sweep_methods(config: ExperimentConfig) -> Tuple[str, str, str]:
    return f"{config.solver.loss.label}-cccp", PERCEPTRON_METHOD, FULL_ANNOTATION_METHOD


def train_and_evaluate(trainer: Trainer, train: Dataset, solver: SolverConfig,
                       test: Dataset) -> Tuple[np.ndarray, Dict]:
    w, trace = trainer(train, solver)
    final = trace.final
    return w, {
        "status": OK,
        "test_loss_pct": evaluate_test_loss(w, test),
        "train_wall_ms": final.wall_ms,
        "inference_calls": final.inference_calls,
    }


def run_annotation_sweep(config: ExperimentConfig, train: Optional[Dataset] = None,
                         test: Optional[Dataset] = None) -> ExperimentResult:
    """
    Test loss against annotation fraction for the partial-annotation CCCP, the perceptron and
    the full-annotation structured SVM.

    Each (fraction, repeat) cell draws one stratified mask from its own seed stream and both
    partial-annotation methods train on it. The full-annotation baseline ignores the mask, so
    it is trained once and its result repeated in every cell.

    Args:
        config: Experiment configuration.
        train, test: Fully annotated datasets; synthesized from config.seed when omitted.
    Returns:
        One row per fraction x repeat x method with columns SWEEP_COLUMNS; the summary holds
        mean and std per (method, fraction).
    """
    if train is None or test is None:
        train, test = synth_dataset(config, config.seed)[:2]
    truth = dataset_truth(train)
    partial_method, _, _ = methods = sweep_methods(config)

    full = None
    rows = []
    weights = {}

    for fraction_index, fraction in enumerate(config.fractions):
        for repeat in range(config.repeats):
            cell = fraction_index * config.repeats + repeat
            logger.info(f"sweep cell {cell}: fraction={fraction}, repeat={repeat}")
            partial, _ = attempt(
                f"annotation sampling at fraction {fraction}, repeat {repeat}",
                lambda: stratified_sample_annotations(truth, fraction, cell_seed(config.seed, cell)).apply(train))

            for method in methods:
                if method == FULL_ANNOTATION_METHOD:
                    if full is None:
                        full = attempt(f"{method} training",
                                       lambda: train_and_evaluate(train_cccp, train, full_annotation_config(config), test))
                    outcome = full[0]
                elif partial is None:
                    outcome = None
                else:
                    trainer = train_cccp if method == partial_method else train_perceptron
                    outcome, _ = attempt(f"{method} at fraction {fraction}, repeat {repeat}",
                                         lambda: train_and_evaluate(trainer, partial, config.solver, test))

                row = {"method": method, "fraction": fraction, "repeat": repeat}
                if outcome is None:
                    row["status"] = FAILED
                else:
                    w, result = outcome
                    row.update(result)
                    weights[(method, fraction, repeat)] = w
                rows.append(row)

    frame = pd.DataFrame(rows).reindex(columns=SWEEP_COLUMNS)
    failed = int((frame["status"] == FAILED).sum())
    if failed:
        logger.warning(f"annotation sweep finished with {failed} failed rows")
    summary = summarize(frame, ["method", "fraction"], ["test_loss_pct", "train_wall_ms", "inference_calls"])
    return ExperimentResult(frame=frame, summary=summary, failed=failed, weights=weights)
