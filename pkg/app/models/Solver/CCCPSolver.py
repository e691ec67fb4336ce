import logging
import time
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
import pandas as pd

from app.exceptions import ConfigurationError, QPConvergenceError
from app.globals import *
from app.models.Core.Algebra import as_vector
from app.models.Core.Dataset import Dataset
from app.models.Core.GenericLoss import GenericLossSpec, objective_from_reports
from .Bundle import Bundle, LossOracle, approximation_gap, compute_bound, compute_v, inner_solve, solution_from_alpha

logger = logging.getLogger(__name__)

TRACE_COLUMNS = ["iter", "inner_iters", "bounds_total", "inference_calls", "objective", "wall_ms"]


@dataclass
class SolverConfig:
    """
    Inputs of the CCCP solvers and the perceptron baseline.

    Attributes:
        lam: Regularization weight.
        eta: Outer termination threshold on the objective decrease.
        eps0: Initial inner precision.
        eps_min: Final inner precision.
        rho: Precision decay factor in (0, 1).
        w0: Starting weights; zeros when None.
        max_cccp_iters: Outer iteration cap.
        max_inner_iters: Bounds added per outer iteration at most.
        loss: Loss family member being minimized.
        max_perceptron_passes: Pass cap of the perceptron.
        patience: Perceptron passes without improvement before stopping.
    """
    lam: float = DEFAULT_LAMBDA
    eta: float = DEFAULT_ETA
    eps0: float = DEFAULT_EPS0
    eps_min: float = DEFAULT_EPS_MIN
    rho: float = DEFAULT_RHO
    w0: Optional[np.ndarray] = None
    max_cccp_iters: int = DEFAULT_MAX_CCCP_ITERS
    max_inner_iters: int = DEFAULT_MAX_INNER_ITERS
    loss: GenericLossSpec = field(default_factory=GenericLossSpec)
    max_perceptron_passes: int = DEFAULT_MAX_PERCEPTRON_PASSES
    patience: int = DEFAULT_PERCEPTRON_PATIENCE

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        """
        Raises:
            ConfigurationError: If any field is out of range.
        """
        for name in ("lam", "eta", "eps0", "eps_min"):
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or not value > 0:
                raise ConfigurationError(f"{name} must be positive, got: {value!r}")
        if self.eps_min > self.eps0:
            raise ConfigurationError(f"eps_min ({self.eps_min}) must not exceed eps0 ({self.eps0})")
        if not 0 < self.rho < 1:
            raise ConfigurationError(f"rho must lie in (0, 1), got: {self.rho}")
        for name in ("max_cccp_iters", "max_inner_iters", "max_perceptron_passes", "patience"):
            value = getattr(self, name)
            if not isinstance(value, int) or value < 1:
                raise ConfigurationError(f"{name} must be a positive integer, got: {value!r}")
        if not isinstance(self.loss, GenericLossSpec):
            raise ConfigurationError(f"loss must be a GenericLossSpec, got: {type(self.loss)}")

    def initial_weights(self, dim: int) -> np.ndarray:
        if self.w0 is None:
            return np.zeros(dim)
        return as_vector(self.w0, dim, "w0").copy()


@dataclass
class TraceRow:
    iter: int
    inner_iters: int
    bounds_total: int
    inference_calls: int
    objective: float
    wall_ms: float
    eps: float = float("nan")
    gaps: List[float] = field(default_factory=list)


@dataclass
class TrainTrace:
    """Per-iteration record of a training run; row 0 is the starting point."""
    method: str
    rows: List[TraceRow] = field(default_factory=list)
    converged: bool = False

    def append(self, row: TraceRow) -> None:
        if self.rows:
            last = self.rows[-1]
            if row.bounds_total < last.bounds_total or row.inference_calls < last.inference_calls:
                raise ValueError("trace counters must be nondecreasing")
        self.rows.append(row)

    @property
    def objectives(self) -> List[float]:
        return [row.objective for row in self.rows]

    @property
    def final(self) -> TraceRow:
        return self.rows[-1]

    def to_frame(self, extended: bool = False) -> pd.DataFrame:
        frame = pd.DataFrame([{name: getattr(row, name) for name in TRACE_COLUMNS} for row in self.rows],
                             columns=TRACE_COLUMNS)
        if extended:
            frame["eps"] = [row.eps for row in self.rows]
            frame["final_gap"] = [row.gaps[-1] if row.gaps else float("nan") for row in self.rows]
        return frame

    def to_csv(self, path: str) -> None:
        self.to_frame().to_csv(path, index=False, float_format="%.17g")


def lesion_label(recycle: bool, adaptive: bool) -> str:
    return f"recycle={'on' if recycle else 'off'},adaptive={'on' if adaptive else 'off'}"


def _elapsed_ms(start: float) -> float:
    return (time.perf_counter() - start) * 1000.0


def train_lesion_variant(dataset: Dataset, config: SolverConfig, recycle: bool,
                         adaptive: bool) -> Tuple[np.ndarray, TrainTrace]:
    """
    CCCP with the bundle inner solver, with bounds recycling and adaptive precision switchable.

    Each outer iteration linearizes the concave reward term at w_t, then adds cutting planes
    of the convex part until the approximation gap drops to the current precision. The next
    iterate is the best anchor under the new linearization; the linearized objective majorizes
    the true one, so the true objective never rises. The loop stops once the precision has
    reached eps_min and the true objective decreased by at most eta.

    Args:
        dataset: Training samples.
        config: Solver parameters.
        recycle: Keep bounds across outer iterations.
        adaptive: Tighten the precision geometrically from eps0; otherwise use eps_min throughout.
    Returns:
        (weights, trace). The weights are the best iterate; trace.converged is False unless
        the termination test stopped the run and every inner loop met its precision with exact
        QP solutions.
    """
    config.validate()
    spec, lam = config.loss, config.lam
    start = time.perf_counter()
    oracle = LossOracle(dataset, spec)
    bundle = Bundle()
    trace = TrainTrace(method=lesion_label(recycle, adaptive))

    w = config.initial_weights(dataset.feature_dim)
    reports = oracle.evaluate(w)
    current = objective_from_reports(reports, w, lam)[0]
    trace.append(TraceRow(0, 0, 0, oracle.inference_calls, current, _elapsed_ms(start)))
    logger.info(f"[{trace.method}] start: J={current:.6g}")

    eps = config.eps0
    bounds_total = 0
    inner_capped = qp_failed = False
    for t in range(1, config.max_cccp_iters + 1):
        v = compute_v(dataset, w, spec, reports)
        eps = max(eps * config.rho, config.eps_min) if adaptive else config.eps_min
        if not recycle:
            bundle.clear()
        if not bundle.has_anchor(w):
            bundle.add(compute_bound(dataset, w, spec, reports))
            bounds_total += 1

        gaps: List[float] = []
        inner = 0
        while True:
            try:
                candidate, approx_min = inner_solve(bundle, v, lam)
            except QPConvergenceError as e:
                logger.warning(f"[{trace.method}] {e}; continuing from the best dual point")
                candidate, approx_min = solution_from_alpha(bundle, v, lam, e.alpha)
                bundle.alpha = e.alpha
                qp_failed = True
            gap = approximation_gap(bundle, v, lam, approx_min)
            gaps.append(gap)
            if gap < -ANCHOR_TIGHTNESS_TOL * max(1.0, abs(approx_min)):
                logger.warning(f"[{trace.method}] negative approximation gap {gap:.3e}")
            if gap <= eps:
                break
            if inner >= config.max_inner_iters:
                logger.warning(f"[{trace.method}] inner loop hit {config.max_inner_iters} bounds with gap {gap:.3e}")
                inner_capped = True
                break
            bundle.add(compute_bound(dataset, candidate, spec, oracle.evaluate(candidate)))
            bounds_total += 1
            inner += 1
            logger.debug(f"[{trace.method}] iter {t}.{inner}: gap={gap:.4e}, bounds={len(bundle)}")

        index, _ = bundle.incumbent(v, lam)
        next_w, next_reports = bundle[index].anchor_w.copy(), bundle[index].reports
        next_objective = objective_from_reports(next_reports, next_w, lam)[0]
        decrease = current - next_objective
        rose = decrease < -ANCHOR_TIGHTNESS_TOL * max(1.0, abs(current))
        if rose:
            logger.warning(f"[{trace.method}] iter {t}: objective would rise from {current:.6g} to "
                           f"{next_objective:.6g}; keeping the previous iterate")
        else:
            w, reports, current = next_w, next_reports, next_objective
        trace.append(TraceRow(t, inner, bounds_total, oracle.inference_calls, current, _elapsed_ms(start),
                              eps=eps, gaps=gaps))
        logger.info(f"[{trace.method}] iter {t}: J={current:.6g}, eps={eps:.3g}, "
                    f"inner={inner}, bounds={bounds_total}, calls={oracle.inference_calls}")

        if rose:
            break
        # rises were rejected above, so decrease is nonnegative up to rounding here
        if eps <= config.eps_min and decrease <= config.eta:
            trace.converged = not (inner_capped or qp_failed)
            break
    else:
        logger.warning(f"[{trace.method}] reached {config.max_cccp_iters} outer iterations without converging")

    return w, trace


def train_cccp(dataset: Dataset, config: SolverConfig) -> Tuple[np.ndarray, TrainTrace]:
    """CCCP with bounds recycling and adaptive precision."""
    return train_lesion_variant(dataset, config, recycle=True, adaptive=True)


def train_vanilla_cccp(dataset: Dataset, config: SolverConfig) -> Tuple[np.ndarray, TrainTrace]:
    """CCCP that rebuilds its bundle every outer iteration at fixed precision eps_min."""
    return train_lesion_variant(dataset, config, recycle=False, adaptive=False)
