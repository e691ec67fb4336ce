import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from app.exceptions import BoundIdentityError, QPConvergenceError
from app.globals import ANCHOR_TIGHTNESS_TOL, BOUND_IDENTITY_TOL
from app.models.Core.Algebra import as_vector, half_sq_norm
from app.models.Core.Dataset import Dataset
from app.models.Core.GenericLoss import GenericLossSpec, SampleLossReport, evaluate_reports
from app.models.QP.SimplexQP import SimplexQP, solve_simplex_qp

logger = logging.getLogger(__name__)


class LossOracle:
    """
    Evaluates the loss of every sample at a given w and counts the argmax calls spent.

    Attributes:
        dataset (Dataset): Training samples.
        spec (GenericLossSpec): Loss being optimized.
        inference_calls (int): Loss-augmented argmax calls made so far (two per sample per evaluation).
    """

    def __init__(self, dataset: Dataset, spec: GenericLossSpec):
        self.dataset = dataset
        self.spec = spec
        self.inference_calls = 0

    def evaluate(self, w: np.ndarray) -> List[SampleLossReport]:
        reports = evaluate_reports(self.dataset, w, self.spec)
        self.inference_calls += 2 * len(self.dataset)
        return reports


def active_samples(reports: Sequence[SampleLossReport], spec: GenericLossSpec) -> Tuple[int, ...]:
    """Samples whose penalty argmax enters a bound; MAX and BRIDGE filter out those with margin <= 0."""
    if not spec.filters_nonnegativity:
        return tuple(range(len(reports)))
    return tuple(n for n, report in enumerate(reports) if report.margin > 0.0)


def compute_v(dataset: Dataset, w: np.ndarray, spec: GenericLossSpec,
              reports: Optional[List[SampleLossReport]] = None) -> np.ndarray:
    """
    Linearization of the concave part: v = -(1/N) * sum over all samples of phi(reward argmax).

    Passing the reports already computed at w avoids running inference again.
    """
    w = as_vector(w, dataset.feature_dim, "w")
    if reports is None:
        reports = evaluate_reports(dataset, w, spec)
    v = np.zeros(dataset.feature_dim)
    for problem, report in zip(dataset, reports):
        v -= problem.features(report.reward_output)
    return v / len(dataset)


@dataclass
class Bound:
    """
    Affine lower bound <a, w> + b on the convex part of the objective, tight at its anchor.

    The convex part is the mean of max(penalty, reward) per sample (see convex_part); for
    HINGE and RAMP it is the mean penalty maximum P. A sample filtered out at the anchor
    contributes its reward argmax, which cancels against its term in v there.

    Attributes:
        a: Subgradient of the convex part at the anchor.
        b: Offset; equals the mean task loss of the argmaxes used for a linear score.
        anchor_w: Point the bound was generated at.
        anchor_P: Exact convex part at anchor_w.
        active: Samples that contributed their penalty argmax.
        reports: Per-sample loss reports at the anchor.
    """
    a: np.ndarray
    b: float
    anchor_w: np.ndarray
    anchor_P: float
    active: Tuple[int, ...] = ()
    reports: List[SampleLossReport] = field(default_factory=list, repr=False)

    def value(self, w: np.ndarray) -> float:
        return float(self.a @ w + self.b)

    def is_tight(self, tol: float = ANCHOR_TIGHTNESS_TOL) -> bool:
        return abs(self.value(self.anchor_w) - self.anchor_P) <= tol * max(1.0, abs(self.anchor_P))


def compute_bound(dataset: Dataset, w: np.ndarray, spec: GenericLossSpec,
                  reports: Optional[List[SampleLossReport]] = None) -> Bound:
    """
    Cutting plane of the convex part at w from the penalty-space argmaxes of the active samples
    and the reward-space argmaxes of the filtered ones.

    Raises:
        BoundIdentityError: If b differs from the mean task loss of the argmaxes, which
            would mean the score is not linear in w.
    """
    w = as_vector(w, dataset.feature_dim, "w")
    if reports is None:
        reports = evaluate_reports(dataset, w, spec)
    n_total = len(dataset)
    active = active_samples(reports, spec)
    is_active = set(active)

    a = np.zeros(dataset.feature_dim)
    value_sum = 0.0
    delta_sum = 0.0
    for n, (problem, report) in enumerate(zip(dataset, reports)):
        if n in is_active:
            a += problem.features(report.penalty_output)
            value_sum += report.penalty_value
            delta_sum += problem.task_loss(report.penalty_output)
        else:
            a += problem.features(report.reward_output)
            value_sum += report.reward_value
            delta_sum += spec.reward_delta_coeff * problem.task_loss(report.reward_output)
    a /= n_total
    anchor_P = value_sum / n_total
    b = anchor_P - float(a @ w)

    mean_delta = delta_sum / n_total
    if abs(b - mean_delta) > BOUND_IDENTITY_TOL * max(1.0, abs(anchor_P)):
        raise BoundIdentityError(f"bound offset {b!r} differs from mean task loss {mean_delta!r}")

    bound = Bound(a=a, b=b, anchor_w=w.copy(), anchor_P=anchor_P, active=active, reports=list(reports))
    logger.debug(f"bound at |w|={np.linalg.norm(w):.4g}: P={anchor_P:.6g}, b={b:.6g}, active={len(active)}/{n_total}")
    return bound


class Bundle:
    """Growing collection of bounds, plus the last QP solution for warm starts."""

    def __init__(self):
        self.bounds: List[Bound] = []
        self.alpha: Optional[np.ndarray] = None

    def __len__(self) -> int:
        return len(self.bounds)

    def __getitem__(self, index: int) -> Bound:
        return self.bounds[index]

    def add(self, bound: Bound) -> None:
        self.bounds.append(bound)

    def clear(self) -> None:
        self.bounds = []
        self.alpha = None

    def has_anchor(self, w: np.ndarray) -> bool:
        return any(np.array_equal(bound.anchor_w, w) for bound in self.bounds)

    @property
    def A(self) -> np.ndarray:
        """D x k matrix of bound subgradients."""
        return np.column_stack([bound.a for bound in self.bounds])

    @property
    def b(self) -> np.ndarray:
        return np.array([bound.b for bound in self.bounds])

    def anchor_values(self, v: np.ndarray, lam: float) -> np.ndarray:
        """
        Linearized objective lam/2 |w|^2 + convex part + <v, w> at every cached anchor.

        Up to a constant of the linearization, each value is an upper bound on the true objective
        at that anchor, exact when the anchor is the linearization point.
        """
        return np.array([lam * half_sq_norm(bound.anchor_w) + bound.anchor_P + float(v @ bound.anchor_w)
                         for bound in self.bounds])

    def incumbent(self, v: np.ndarray, lam: float) -> Tuple[int, float]:
        """Index and value of the best anchor under the current v (first one on ties)."""
        values = self.anchor_values(v, lam)
        index = int(np.argmin(values))
        return index, float(values[index])


def bundle_dual(bundle: Bundle, v: np.ndarray, lam: float) -> SimplexQP:
    """Simplex dual of the bundle subproblem: H = A'A / lam, c = b - A'v / lam."""
    if len(bundle) == 0:
        raise ValueError("inner_solve needs at least one bound")
    if not lam > 0:
        raise ValueError(f"lambda must be positive, got: {lam}")
    A = bundle.A
    H = A.T @ A / lam
    return SimplexQP(0.5 * (H + H.T), bundle.b - A.T @ v / lam)


def solution_from_alpha(bundle: Bundle, v: np.ndarray, lam: float, alpha: np.ndarray) -> Tuple[np.ndarray, float]:
    """
    Primal point w = -(v + A alpha) / lam and the dual value minus |v|^2 / (2 lam).

    The value is a lower bound on the bundle minimum for every alpha on the simplex and
    equals it at the dual optimum.
    """
    qp = bundle_dual(bundle, v, lam)
    w = -(v + bundle.A @ alpha) / lam
    return w, qp.value(alpha) - float(v @ v) / (2.0 * lam)


def inner_solve(bundle: Bundle, v: np.ndarray, lam: float) -> Tuple[np.ndarray, float]:
    """
    Minimize lam/2 |w|^2 + max_j (<a_j, w> + b_j) + <v, w> through its simplex dual.

    Returns:
        (minimizer w, minimum value)
    Raises:
        ValueError: If the bundle is empty.
        QPConvergenceError: If the dual solver fails; the message names the bundle size and
            the error carries the best alpha found.
    """
    qp = bundle_dual(bundle, v, lam)
    try:
        point, dual_value = solve_simplex_qp(qp, alpha0=bundle.alpha)
    except QPConvergenceError as e:
        raise QPConvergenceError(f"inner solve with {len(bundle)} bounds failed: {e}",
                                 alpha=e.alpha, residual=e.residual) from e
    bundle.alpha = point.alpha

    w = -(v + bundle.A @ point.alpha) / lam
    approx_min = dual_value - float(v @ v) / (2.0 * lam)
    return w, approx_min


def approximation_gap(bundle: Bundle, v: np.ndarray, lam: float, approx_min: float) -> float:
    """Best exactly evaluated anchor value minus the bundle minimum, re-priced with the current v."""
    _, best = bundle.incumbent(v, lam)
    return best - approx_min
