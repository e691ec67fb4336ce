import unittest
import sys
import os

import numpy as np

sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', '..', '..', '..', '..'))

from app.exceptions import ConfigurationError, QPConvergenceError
from app.models.QP.SimplexQP import SimplexPoint, SimplexQP, kkt_residual, solve_simplex_qp


def random_qp(rng: np.random.Generator, k: int, d: int) -> SimplexQP:
    A = rng.normal(size=(d, k))
    H = A.T @ A
    return SimplexQP(0.5 * (H + H.T), rng.normal(size=k))


class TestSimplexQP(unittest.TestCase):
    """Test cases for the simplex-constrained QP solver."""

    def test_single_coordinate(self):
        """Test that a one-point simplex returns alpha = [1]."""
        point, value = solve_simplex_qp(SimplexQP([[2.0]], [0.5]))
        np.testing.assert_array_equal(point.alpha, [1.0])
        self.assertAlmostEqual(value, -0.5 * 2.0 + 0.5)

    def test_two_point_example(self):
        """Test H = [[1, -1], [-1, 1]], c = 0 gives the midpoint with value 0."""
        point, value = solve_simplex_qp(SimplexQP([[1.0, -1.0], [-1.0, 1.0]], [0.0, 0.0]))
        np.testing.assert_allclose(point.alpha, [0.5, 0.5], atol=1e-8)
        self.assertAlmostEqual(value, 0.0, places=10)

    def test_two_point_grid_search(self):
        """Test the solver value against a fine grid over the one-dimensional simplex."""
        qp = SimplexQP([[2.0, 0.5], [0.5, 1.0]], [0.3, -0.2])
        grid = np.linspace(0.0, 1.0, 10001)
        best = max(qp.value(np.array([t, 1.0 - t])) for t in grid)
        _, value = solve_simplex_qp(qp)
        self.assertGreaterEqual(value, best - 1e-9)
        self.assertLess(value - best, 1e-7)

    def test_duplicated_coordinate(self):
        """Test that duplicating a bound leaves the optimum value unchanged."""
        single = solve_simplex_qp(SimplexQP([[3.0]], [1.0]))[1]
        double = solve_simplex_qp(SimplexQP([[3.0, 3.0], [3.0, 3.0]], [1.0, 1.0]))[1]
        self.assertAlmostEqual(single, double, places=12)

    def test_random_problems_reach_tolerance(self):
        """Test feasibility and the KKT residual on random problems."""
        rng = np.random.default_rng(0)
        for _ in range(50):
            qp = random_qp(rng, int(rng.integers(1, 31)), int(rng.integers(1, 51)))
            point, value = solve_simplex_qp(qp)
            self.assertTrue(np.all(point.alpha >= 0))
            self.assertAlmostEqual(point.alpha.sum(), 1.0, places=12)
            self.assertLessEqual(kkt_residual(qp, point.alpha), qp.effective_tol() * 10)
            self.assertAlmostEqual(value, qp.value(point.alpha), places=12)
            for vertex in range(qp.size):
                e = np.zeros(qp.size)
                e[vertex] = 1.0
                self.assertLessEqual(qp.value(e), value + 1e-9)

    def test_ill_conditioned_bundle_dual(self):
        """Test near-collinear columns with a small lambda, as late bundles produce."""
        rng = np.random.default_rng(3)
        lam = 1e-3
        for k in (60, 100, 140):
            base = rng.normal(size=(30, 1))
            A = base + 1e-4 * rng.normal(size=(30, k))
            H = A.T @ A / lam
            qp = SimplexQP(0.5 * (H + H.T), rng.normal(size=k) - A.T @ rng.normal(size=30) / lam)
            point, value = solve_simplex_qp(qp)
            self.assertTrue(np.all(point.alpha >= 0))
            self.assertAlmostEqual(point.alpha.sum(), 1.0, places=12)
            self.assertLessEqual(kkt_residual(qp, point.alpha), qp.effective_tol() * 10)
            vertices = [qp.value(np.eye(k)[j]) for j in range(k)]
            self.assertGreaterEqual(value, max(vertices) - 1e-9 * qp.scale)

    def test_warm_start(self):
        """Test that a shorter warm start is padded and reaches the same optimum."""
        rng = np.random.default_rng(1)
        qp = random_qp(rng, 6, 4)
        cold = solve_simplex_qp(qp)[1]
        warm = solve_simplex_qp(qp, alpha0=np.array([0.2, 0.3, 0.5]))[1]
        self.assertAlmostEqual(cold, warm, places=9)
        with self.assertRaises(ConfigurationError):
            solve_simplex_qp(qp, alpha0=-np.ones(6))

    def test_iteration_cap(self):
        """Test that hitting the cap raises with the last iterate attached."""
        rng = np.random.default_rng(2)
        qp = random_qp(rng, 30, 40)
        with self.assertRaises(QPConvergenceError) as context:
            solve_simplex_qp(qp, max_iter=1)
        self.assertIsNotNone(context.exception.alpha)
        self.assertGreater(context.exception.residual, 0.0)

    def test_validation(self):
        """Test shape, symmetry and finiteness checks."""
        with self.assertRaises(ConfigurationError):
            SimplexQP([[1.0, 0.0], [0.0, 1.0]], [1.0])
        with self.assertRaises(ConfigurationError):
            SimplexQP([[1.0, 2.0], [0.0, 1.0]], [1.0, 1.0])
        with self.assertRaises(ConfigurationError):
            SimplexQP([[np.nan]], [1.0])
        with self.assertRaises(ConfigurationError):
            SimplexQP([[1.0]], [1.0], tol=0.0)

    def test_simplex_point_validation(self):
        """Test that simplex points must be nonnegative and sum to one."""
        with self.assertRaises(ValueError):
            SimplexPoint(np.array([1.5, -0.5]))
        with self.assertRaises(ValueError):
            SimplexPoint(np.array([0.5, 0.4]))


if __name__ == '__main__':
    unittest.main()
