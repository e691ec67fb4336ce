import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from app.exceptions import ConfigurationError, QPConvergenceError
from app.globals import QP_EXCHANGES_PER_COORD, QP_MAX_ITERS, QP_TOL, SIMPLEX_SUM_TOL

logger = logging.getLogger(__name__)

# Exchanges between exact gradient refreshes
_REFRESH_EVERY = 100


@dataclass
class SimplexQP:
    """
    maximize -0.5 * a'Ha + c'a  subject to  a >= 0, sum(a) = 1.

    Attributes:
        H (np.ndarray): Symmetric positive semidefinite k x k matrix.
        c (np.ndarray): Linear term of length k.
        tol (float): Absolute tolerance on the KKT residual.
    """
    H: np.ndarray
    c: np.ndarray
    tol: float = QP_TOL

    def __post_init__(self):
        self.H = np.atleast_2d(np.asarray(self.H, dtype=float))
        self.c = np.atleast_1d(np.asarray(self.c, dtype=float))
        k = self.c.shape[0]
        if k < 1:
            raise ConfigurationError("a simplex QP needs at least one coordinate")
        if self.H.shape != (k, k):
            raise ConfigurationError(f"H must be {k} x {k}, got shape {self.H.shape}")
        if not (np.all(np.isfinite(self.H)) and np.all(np.isfinite(self.c))):
            raise ConfigurationError("QP data must be finite")
        if np.max(np.abs(self.H - self.H.T)) > 1e-12 * max(1.0, self.scale):
            raise ConfigurationError("H must be symmetric")
        if not self.tol > 0:
            raise ConfigurationError(f"tol must be positive, got: {self.tol}")

    @property
    def size(self) -> int:
        return self.c.shape[0]

    @property
    def scale(self) -> float:
        return float(max(np.max(np.abs(self.H)), np.max(np.abs(self.c)), 1.0))

    def value(self, alpha: np.ndarray) -> float:
        return float(-0.5 * alpha @ self.H @ alpha + self.c @ alpha)

    def gradient(self, alpha: np.ndarray) -> np.ndarray:
        return self.c - self.H @ alpha

    def effective_tol(self) -> float:
        """The requested tolerance, floored at the rounding noise of a residual of this size."""
        return max(self.tol, 16.0 * np.finfo(float).eps * self.size * self.scale)


@dataclass
class SimplexPoint:
    """A point of the probability simplex, with the solver statistics that produced it."""
    alpha: np.ndarray
    iterations: int = 0
    residual: float = 0.0

    def __post_init__(self):
        self.alpha = np.asarray(self.alpha, dtype=float)
        if np.any(self.alpha < 0):
            raise ValueError("simplex point has negative entries")
        if abs(self.alpha.sum() - 1.0) > SIMPLEX_SUM_TOL * max(1, self.alpha.size):
            raise ValueError(f"simplex point sums to {self.alpha.sum()!r}")


def kkt_residual(qp: SimplexQP, alpha: np.ndarray, grad: Optional[np.ndarray] = None) -> float:
    """max_i g_i - a'g, zero exactly at the optimum; equals the primal-dual gap of the bundle problem."""
    g = qp.gradient(alpha) if grad is None else grad
    return float(np.max(g) - alpha @ g)


def _starting_point(qp: SimplexQP, alpha0: Optional[np.ndarray]) -> np.ndarray:
    if alpha0 is None:
        alpha = np.zeros(qp.size)
        alpha[int(np.argmax(qp.c - 0.5 * np.diag(qp.H)))] = 1.0
        return alpha
    alpha = np.asarray(alpha0, dtype=float)
    if alpha.shape[0] < qp.size:
        alpha = np.concatenate([alpha, np.zeros(qp.size - alpha.shape[0])])
    if alpha.shape != (qp.size,) or np.any(alpha < 0) or not alpha.sum() > 0:
        raise ConfigurationError(f"warm start of shape {alpha.shape} is not usable for a QP of size {qp.size}")
    return alpha / alpha.sum()


def solve_simplex_qp(qp: SimplexQP, alpha0: Optional[np.ndarray] = None,
                     max_iter: int = QP_MAX_ITERS) -> Tuple[SimplexPoint, float]:
    """
    Pairwise exchanges to find the support, then active-set steps that solve the
    equality-constrained KKT system on it exactly.

    Args:
        qp: The problem.
        alpha0: Warm start; shorter vectors are padded with zeros for the new coordinates.
        max_iter: Budget shared by exchanges and active-set steps.
    Returns:
        (optimal point, dual value)
    Raises:
        QPConvergenceError: If the residual is still above tolerance once the budget is spent.
    """
    alpha = _starting_point(qp, alpha0)
    tol = qp.effective_tol()
    alpha, used, residual = _exchange_phase(qp, alpha, min(max_iter, QP_EXCHANGES_PER_COORD * qp.size), tol)
    if residual > tol:
        alpha, steps, residual = _active_set_phase(qp, alpha, max_iter - used, tol)
        used += steps
    if residual <= tol:
        return _finish(qp, alpha, used, residual)
    raise QPConvergenceError(f"simplex QP of size {qp.size} did not converge in {max_iter} iterations "
                             f"(residual {residual:.3e} > {tol:.3e})", alpha=alpha.copy(), residual=residual)


def _exchange_phase(qp: SimplexQP, alpha: np.ndarray, budget: int, tol: float) -> Tuple[np.ndarray, int, float]:
    """Move mass from the active coordinate with the smallest gradient to the largest one, exact line search."""
    H = qp.H
    grad = qp.gradient(alpha)
    for iteration in range(budget):
        if iteration % _REFRESH_EVERY == 0:
            grad = qp.gradient(alpha)
        residual = float(np.max(grad) - alpha @ grad)
        if residual <= tol:
            grad = qp.gradient(alpha)
            residual = kkt_residual(qp, alpha, grad)
            if residual <= tol:
                return alpha, iteration, residual

        best = int(np.argmax(grad))
        active = np.flatnonzero(alpha > 0)
        worst = int(active[np.argmin(grad[active])])
        slope = grad[best] - grad[worst]
        if best == worst or slope <= 0:
            exact = qp.gradient(alpha)
            if not np.array_equal(exact, grad):
                grad = exact
                continue
            # rounding stall, left to the active-set phase
            return alpha, iteration, kkt_residual(qp, alpha, exact)
        curvature = H[best, best] + H[worst, worst] - 2.0 * H[best, worst]
        step = alpha[worst] if curvature <= 0 else min(alpha[worst], slope / curvature)

        alpha[best] += step
        alpha[worst] -= step
        if alpha[worst] < 0:
            alpha[worst] = 0.0
        grad -= step * (H[:, best] - H[:, worst])
    return alpha, budget, kkt_residual(qp, alpha)


def _face_direction(H_face: np.ndarray, grad_face: np.ndarray) -> np.ndarray:
    """
    Ascent direction within the face {sum = 1} of the current support.

    Solves [[H, 1], [1', 0]] [d; mu] = [g; 0] in the least-squares sense. When the system is
    consistent d is the step to the face optimum; otherwise the residual is a direction of
    zero curvature along which the dual grows linearly.
    """
    m = grad_face.shape[0]
    kkt = np.zeros((m + 1, m + 1))
    kkt[:m, :m] = H_face
    kkt[:m, m] = 1.0
    kkt[m, :m] = 1.0
    rhs = np.append(grad_face, 0.0)
    solution = np.linalg.lstsq(kkt, rhs, rcond=None)[0]
    ray = (rhs - kkt @ solution)[:m]
    direction = ray if np.linalg.norm(ray) > 1e-8 * max(1.0, np.linalg.norm(grad_face)) else solution[:m]
    return direction - direction.mean()


def _active_set_phase(qp: SimplexQP, alpha: np.ndarray, budget: int, tol: float) -> Tuple[np.ndarray, int, float]:
    H = qp.H
    for step in range(budget):
        grad = qp.gradient(alpha)
        residual = kkt_residual(qp, alpha, grad)
        if residual <= tol:
            return alpha, step, residual

        support = np.flatnonzero(alpha > 0)
        if np.max(grad[support]) - alpha @ grad <= 0.5 * tol:
            # face solved: the best coordinate outside it enters
            support = np.append(support, int(np.argmax(grad)))
        face_grad = grad[support]
        face_alpha = alpha[support]
        H_face = H[np.ix_(support, support)]

        direction = _face_direction(H_face, face_grad)
        shrinking = direction < 0
        if face_grad @ direction <= 0 or np.any(face_alpha[shrinking] <= 0):
            direction = np.zeros(support.shape[0])
            positive = np.flatnonzero(face_alpha > 0)
            direction[int(np.argmax(face_grad))] += 1.0
            direction[int(positive[np.argmin(face_grad[positive])])] -= 1.0
            shrinking = direction < 0
            if not np.any(shrinking):
                return alpha, step, residual

        ratios = face_alpha[shrinking] / -direction[shrinking]
        blocking = int(np.argmin(ratios))
        length = float(ratios[blocking])
        curvature = float(direction @ H_face @ direction)
        if curvature > 0:
            length = min(length, float(face_grad @ direction) / curvature)

        face_alpha = face_alpha + length * direction
        if length == float(ratios[blocking]):
            face_alpha[np.flatnonzero(shrinking)[blocking]] = 0.0
        alpha = np.zeros(qp.size)
        alpha[support] = np.clip(face_alpha, 0.0, None)
        alpha /= alpha.sum()
    return alpha, budget, kkt_residual(qp, alpha)


def _finish(qp: SimplexQP, alpha: np.ndarray, iterations: int, residual: float) -> Tuple[SimplexPoint, float]:
    alpha = np.clip(alpha, 0.0, None)
    alpha /= alpha.sum()
    point = SimplexPoint(alpha, iterations=iterations, residual=residual)
    logger.debug(f"simplex QP size={qp.size} converged in {iterations} iterations, residual {residual:.3e}")
    return point, qp.value(alpha)
