import logging
import time
from typing import Tuple

import numpy as np

from app.interfaces.inference_problem import SpaceSelector
from app.models.Core.Dataset import Dataset
from .CCCPSolver import SolverConfig, TraceRow, TrainTrace

logger = logging.getLogger(__name__)


def training_task_loss(dataset: Dataset, w: np.ndarray) -> float:
    """Mean task loss of the unconstrained predictions against the (partial) annotations."""
    total = 0.0
    for problem in dataset:
        prediction, _ = problem.argmax_augmented(w, SpaceSelector.FULL, 0)
        total += problem.task_loss(prediction)
    return total / len(dataset)


def train_perceptron(dataset: Dataset, config: SolverConfig) -> Tuple[np.ndarray, TrainTrace]:
    """
    Structured perceptron with partial annotations.

    A sample whose prediction violates its annotation pulls w towards the best compatible
    output: w <- w + phi(best compatible) - phi(prediction). Training stops when the training
    task loss reaches zero or has not improved for config.patience passes; the weights with
    the lowest training task loss are returned.

    Returns:
        (weights, trace) where the trace objective is the training task loss after each pass.
    """
    config.validate()
    start = time.perf_counter()
    trace = TrainTrace(method="perceptron")
    calls = 0

    w = config.initial_weights(dataset.feature_dim)
    best_w, best_loss = w.copy(), training_task_loss(dataset, w)
    calls += len(dataset)
    trace.append(TraceRow(0, 0, 0, calls, best_loss, (time.perf_counter() - start) * 1000.0))
    if best_loss == 0.0:
        trace.converged = True
        return best_w, trace

    stale = 0
    for epoch in range(1, config.max_perceptron_passes + 1):
        updates = 0
        for problem in dataset:
            prediction, _ = problem.argmax_augmented(w, SpaceSelector.FULL, 0)
            calls += 1
            if problem.is_compatible(prediction):
                continue
            target, _ = problem.argmax_augmented(w, SpaceSelector.COMPATIBLE, 0)
            calls += 1
            w = w + problem.features(target) - problem.features(prediction)
            updates += 1

        loss = training_task_loss(dataset, w)
        calls += len(dataset)
        trace.append(TraceRow(epoch, updates, 0, calls, loss, (time.perf_counter() - start) * 1000.0))
        logger.info(f"[perceptron] pass {epoch}: training task loss {loss:.6g}, updates {updates}")

        if loss < best_loss:
            best_w, best_loss, stale = w.copy(), loss, 0
        else:
            stale += 1
        if best_loss == 0.0 or updates == 0:
            trace.converged = True
            break
        if stale >= config.patience:
            logger.info(f"[perceptron] no improvement for {config.patience} passes, stopping")
            trace.converged = True
            break
    else:
        logger.warning(f"[perceptron] reached {config.max_perceptron_passes} passes")

    return best_w, trace
