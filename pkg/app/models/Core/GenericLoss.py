import logging
from dataclasses import dataclass
from enum import Enum
from typing import Any, List, Optional, Tuple

import numpy as np

from app.exceptions import ConfigurationError
from app.globals import DEFAULT_DELTA_SCALE
from app.interfaces.inference_problem import InferenceProblem, SpaceSelector
from .Algebra import as_vector, half_sq_norm
from .Dataset import Dataset

logger = logging.getLogger(__name__)


class LossKind(Enum):
    HINGE = "hinge"
    RAMP = "ramp"
    MAX = "max"
    BRIDGE = "bridge"


# (penalty space, reward space) for each loss
LOSS_SPACES = {
    LossKind.HINGE: (SpaceSelector.FULL, SpaceSelector.COMPATIBLE),
    LossKind.RAMP: (SpaceSelector.FULL, SpaceSelector.FULL),
    LossKind.MAX: (SpaceSelector.INCOMPATIBLE, SpaceSelector.FULL),
    LossKind.BRIDGE: (SpaceSelector.INCOMPATIBLE, SpaceSelector.COMPATIBLE),
}


@dataclass(frozen=True)
class GenericLossSpec:
    """
    Selects one member of the margin loss family.

    Attributes:
        kind: Which (penalty, reward) space pair to use.
        delta_in_reward: Subtract the task loss inside the reward maximization.
        delta_scale: Task loss charged per violated annotated component.
    """
    kind: LossKind = LossKind.BRIDGE
    delta_in_reward: bool = False
    delta_scale: float = DEFAULT_DELTA_SCALE

    def __post_init__(self):
        if not isinstance(self.kind, LossKind):
            raise TypeError(f"kind must be a LossKind, got: {type(self.kind)}")
        if not isinstance(self.delta_in_reward, bool):
            raise TypeError(f"delta_in_reward must be a bool, got: {type(self.delta_in_reward)}")
        if not isinstance(self.delta_scale, (int, float)) or not self.delta_scale > 0:
            raise ValueError(f"delta_scale must be positive, got: {self.delta_scale}")

    @property
    def penalty_space(self) -> SpaceSelector:
        return LOSS_SPACES[self.kind][0]

    @property
    def reward_space(self) -> SpaceSelector:
        return LOSS_SPACES[self.kind][1]

    @property
    def reward_delta_coeff(self) -> int:
        return -1 if self.delta_in_reward else 0

    @property
    def filters_nonnegativity(self) -> bool:
        """MAX and BRIDGE margins can go negative; HINGE and RAMP margins cannot."""
        return self.kind in (LossKind.MAX, LossKind.BRIDGE)

    @property
    def label(self) -> str:
        return self.kind.value + ("-delta" if self.delta_in_reward else "")

    @classmethod
    def parse(cls, text: str, delta_in_reward: bool = False, delta_scale: float = DEFAULT_DELTA_SCALE) -> "GenericLossSpec":
        """Parse 'bridge', 'ramp-delta', ... into a spec."""
        name = text.strip().lower()
        if name.endswith("-delta"):
            name = name[: -len("-delta")]
            delta_in_reward = True
        try:
            kind = LossKind(name)
        except ValueError:
            raise ValueError(f"unknown loss '{text}', expected one of {[k.value for k in LossKind]}")
        return cls(kind=kind, delta_in_reward=delta_in_reward, delta_scale=delta_scale)


@dataclass(frozen=True)
class SampleLossReport:
    penalty_value: float
    reward_value: float
    margin: float
    loss: float
    penalty_output: Any = None
    reward_output: Any = None


def generic_loss(problem: InferenceProblem, w: np.ndarray, spec: GenericLossSpec) -> SampleLossReport:
    """
    Evaluate |max_P [f + delta] - max_R [f (- delta)]|_+ for one sample.

    Raises:
        DegenerateSampleError: If the penalty or reward space is empty for this sample.
    """
    w = as_vector(w, problem.feature_dim, "w")
    if problem.delta_scale != spec.delta_scale:
        raise ConfigurationError(
            f"loss delta_scale {spec.delta_scale} does not match the instance delta_scale {problem.delta_scale}")
    penalty_output, penalty_value = problem.argmax_augmented(w, spec.penalty_space, +1)
    reward_output, reward_value = problem.argmax_augmented(w, spec.reward_space, spec.reward_delta_coeff)
    margin = penalty_value - reward_value
    return SampleLossReport(
        penalty_value=penalty_value,
        reward_value=reward_value,
        margin=margin,
        loss=max(margin, 0.0),
        penalty_output=penalty_output,
        reward_output=reward_output,
    )


def loss_subgradient(problem: InferenceProblem, w: np.ndarray, spec: GenericLossSpec,
                     report: Optional[SampleLossReport] = None) -> np.ndarray:
    """phi(penalty argmax) - phi(reward argmax), or zero when the loss is clamped."""
    if report is None:
        report = generic_loss(problem, w, spec)
    if report.margin <= 0.0:
        return np.zeros(problem.feature_dim)
    return problem.features(report.penalty_output) - problem.features(report.reward_output)


def evaluate_reports(dataset: Dataset, w: np.ndarray, spec: GenericLossSpec) -> List[SampleLossReport]:
    return [generic_loss(problem, w, spec) for problem in dataset]


def convex_part(reports: List[SampleLossReport], spec: GenericLossSpec) -> float:
    """
    Mean of max(penalty, reward) per sample, the convex term of the clamped loss.

    |P - R|_+ = max(P, R) - R, so the objective is this term minus the mean reward maximum plus
    the regularizer. Margins of HINGE and RAMP are never negative and the term reduces to the
    mean penalty maximum.
    """
    if not spec.filters_nonnegativity:
        return sum(r.penalty_value for r in reports) / len(reports)
    return sum(max(r.penalty_value, r.reward_value) for r in reports) / len(reports)


def objective_from_reports(reports: List[SampleLossReport], w: np.ndarray, lam: float) -> Tuple[float, float, float]:
    n = len(reports)
    penalty = sum(r.penalty_value for r in reports) / n
    reward = sum(r.reward_value for r in reports) / n
    loss = sum(r.loss for r in reports) / n
    return lam * half_sq_norm(w) + loss, penalty, reward


def objective(dataset: Dataset, w: np.ndarray, lam: float, spec: GenericLossSpec) -> Tuple[float, float, float]:
    """
    Regularized objective J = lam * 0.5 * ||w||^2 + mean clamped loss.

    Returns:
        (J, P, R) where P and R are the mean penalty and reward maxima.
    """
    if not isinstance(lam, (int, float)) or not lam > 0:
        raise ValueError(f"lambda must be positive, got: {lam}")
    w = as_vector(w, dataset.feature_dim, "w")
    return objective_from_reports(evaluate_reports(dataset, w, spec), w, lam)
