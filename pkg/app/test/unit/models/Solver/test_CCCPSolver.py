import unittest
import importlib
import sys
import os
from unittest.mock import patch

import numpy as np

sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', '..', '..', '..', '..'))

from app.exceptions import ConfigurationError, QPConvergenceError
from app.models.Core.Dataset import Dataset
from app.models.Core.GenericLoss import (GenericLossSpec, LossKind, convex_part, evaluate_reports, objective,
                                         objective_from_reports)
from app.models.Solver.Bundle import Bundle
from app.models.Solver.CCCPSolver import (TRACE_COLUMNS, SolverConfig, TraceRow, TrainTrace, lesion_label,
                                          train_cccp, train_lesion_variant, train_vanilla_cccp)
from app.setup.dataset_initializer import ChainGenConfig, ChainInitializer


def partial_chains(seed: int, size: int = 8, noise: float = 0.8) -> Dataset:
    rng = np.random.default_rng(seed)
    config = ChainGenConfig(length=5, label_count=3, obs_dim=3, noise=noise)
    full = ChainInitializer.from_rng(config, rng).create_dataset(size, rng)
    return Dataset([chain.with_annotation([i for i in range(chain.length) if rng.uniform() < 0.5] or [0])
                    for chain in full])


def solver_config(kind: LossKind = LossKind.HINGE, **overrides) -> SolverConfig:
    settings = dict(lam=0.1, eta=1e-4, eps0=1.0, eps_min=1e-3, rho=0.5, max_cccp_iters=50, loss=GenericLossSpec(kind))
    settings.update(overrides)
    return SolverConfig(**settings)


class TestSolverConfig(unittest.TestCase):
    """Test cases for solver parameter validation."""

    def test_defaults_valid(self):
        """Test that the default configuration validates."""
        config = SolverConfig()
        self.assertEqual(config.loss.kind, LossKind.BRIDGE)
        np.testing.assert_array_equal(config.initial_weights(3), np.zeros(3))

    def test_invalid_values(self):
        """Test rejection of out-of-range parameters."""
        for overrides in ({"lam": 0.0}, {"eta": -1.0}, {"eps0": 1e-4, "eps_min": 1e-3}, {"rho": 1.0},
                          {"rho": 0.0}, {"max_cccp_iters": 0}, {"patience": 0}, {"loss": "bridge"}):
            with self.assertRaises(ConfigurationError):
                SolverConfig(**overrides)

    def test_initial_weights(self):
        """Test that a starting point must match the feature dimension."""
        config = SolverConfig(w0=np.ones(3))
        np.testing.assert_array_equal(config.initial_weights(3), np.ones(3))
        with self.assertRaises(ConfigurationError):
            config.initial_weights(4)


class TestTrainTrace(unittest.TestCase):
    """Test cases for the training trace."""

    def test_counters_nondecreasing(self):
        """Test that decreasing counters are rejected."""
        trace = TrainTrace("x")
        trace.append(TraceRow(0, 0, 2, 10, 1.0, 0.0))
        with self.assertRaises(ValueError):
            trace.append(TraceRow(1, 0, 1, 12, 1.0, 0.0))

    def test_frames(self):
        """Test the exported columns."""
        trace = TrainTrace("x")
        trace.append(TraceRow(0, 0, 0, 2, 1.0, 0.1))
        trace.append(TraceRow(1, 3, 4, 10, 0.5, 0.2, eps=0.5, gaps=[0.9, 0.4]))
        self.assertEqual(list(trace.to_frame().columns), TRACE_COLUMNS)
        extended = trace.to_frame(extended=True)
        self.assertEqual(list(extended.columns), TRACE_COLUMNS + ["eps", "final_gap"])
        self.assertEqual(extended["final_gap"].iloc[1], 0.4)
        self.assertTrue(np.isnan(extended["final_gap"].iloc[0]))
        self.assertEqual(trace.objectives, [1.0, 0.5])

    def test_lesion_label(self):
        """Test variant names."""
        self.assertEqual(lesion_label(True, False), "recycle=on,adaptive=off")


class TestCCCPSolver(unittest.TestCase):
    """Test cases for CCCP with bounds recycling and adaptive precision."""

    def test_precision_schedule(self):
        """Test eps_t = max(eps_{t-1} * rho, eps_min) starting from eps0."""
        config = solver_config(eps0=2.0, rho=0.3)
        _, trace = train_cccp(partial_chains(0), config)
        eps = config.eps0
        for row in trace.rows[1:]:
            eps = max(eps * config.rho, config.eps_min)
            self.assertEqual(row.eps, eps)

    def test_inner_loop_contract(self):
        """Test that inner loops exit at the precision with nonnegative, nonincreasing gaps."""
        for seed in range(3):
            for kind in (LossKind.HINGE, LossKind.BRIDGE, LossKind.MAX):
                config = solver_config(kind)
                _, trace = train_cccp(partial_chains(seed), config)
                self.assertTrue(trace.converged)
                for row in trace.rows[1:]:
                    self.assertLessEqual(row.gaps[-1], row.eps)
                    self.assertGreaterEqual(min(row.gaps), -1e-9 * max(1.0, abs(row.objective)))
                    for earlier, later in zip(row.gaps, row.gaps[1:]):
                        self.assertLessEqual(later, earlier + 1e-8)
                    self.assertEqual(len(row.gaps), row.inner_iters + 1)

    def test_objective_descent(self):
        """Test that J(w_t) never rises for any loss and every inner loop keeps a nonnegative gap."""
        for seed in range(10):
            for kind in LossKind:
                config = solver_config(kind)
                dataset = partial_chains(100 + seed)
                w, trace = train_cccp(dataset, config)
                objectives = trace.objectives
                for earlier, later in zip(objectives, objectives[1:]):
                    self.assertLessEqual(later, earlier + config.eps_min + config.eta)
                for row in trace.rows[1:]:
                    self.assertGreaterEqual(min(row.gaps), -1e-9 * max(1.0, abs(row.objective)))
                self.assertLessEqual(objectives[-1], objectives[0])
                self.assertAlmostEqual(objectives[-1], objective(dataset, w, config.lam, config.loss)[0], places=10)

    def test_bridge_stays_below_start(self):
        """Test that bridge training on sparse annotations ends at or below its starting objective."""
        dataset = partial_chains(103)
        config = solver_config(LossKind.BRIDGE)
        w, trace = train_cccp(dataset, config)
        start = objective(dataset, np.zeros(dataset.feature_dim), config.lam, config.loss)[0]
        self.assertEqual(trace.objectives[0], start)
        for earlier, later in zip(trace.objectives, trace.objectives[1:]):
            self.assertLessEqual(later, earlier + 1e-9 * max(1.0, abs(earlier)))
        self.assertLessEqual(objective(dataset, w, config.lam, config.loss)[0], start)
        self.assertTrue(trace.converged)

    def test_trace_bookkeeping(self):
        """Test row 0, counters and convergence flag."""
        dataset = partial_chains(4)
        _, trace = train_cccp(dataset, solver_config())
        self.assertEqual(trace.rows[0].iter, 0)
        self.assertEqual(trace.rows[0].bounds_total, 0)
        self.assertEqual(trace.rows[0].inference_calls, 2 * len(dataset))
        self.assertTrue(trace.converged)
        self.assertEqual(trace.method, "recycle=on,adaptive=on")
        for earlier, later in zip(trace.rows, trace.rows[1:]):
            self.assertLessEqual(earlier.bounds_total, later.bounds_total)
            self.assertLessEqual(earlier.inference_calls, later.inference_calls)

    def test_bound_soundness_during_training(self):
        """Test tightness, offset identity and validity of every bound a run generates."""
        generated = []
        original_add = Bundle.add

        def recording_add(bundle, bound):
            generated.append(bound)
            original_add(bundle, bound)

        rng = np.random.default_rng(5)
        kinds = (LossKind.HINGE, LossKind.BRIDGE, LossKind.MAX, LossKind.RAMP)
        for seed in range(10):
            kind = kinds[seed % len(kinds)]
            dataset = partial_chains(200 + seed, size=5)
            spec = GenericLossSpec(kind)
            generated.clear()
            with patch.object(Bundle, "add", recording_add):
                train_cccp(dataset, solver_config(kind, max_cccp_iters=10))
            self.assertGreater(len(generated), 0)
            for bound in generated:
                self.assertTrue(bound.is_tight(1e-9))
                # filtered samples add their reward argmax, whose offset is zero without delta_in_reward
                mean_delta = sum(dataset[n].task_loss(bound.reports[n].penalty_output)
                                 for n in bound.active) / len(dataset)
                self.assertAlmostEqual(bound.b, mean_delta, delta=1e-12 * max(1.0, abs(bound.anchor_P)))
            for _ in range(50):
                point = rng.normal(size=dataset.feature_dim)
                reports = evaluate_reports(dataset, point, spec)
                bounded = convex_part(reports, spec)
                for bound in generated:
                    self.assertLessEqual(bound.value(point), bounded + 1e-9)

    def test_large_lambda_shrinks_weights(self):
        """Test that a dominant regularizer keeps w near zero."""
        dataset = partial_chains(6)
        config = solver_config(lam=1e6)
        w, trace = train_cccp(dataset, config)
        self.assertLess(np.linalg.norm(w), 1e-4)
        zero = np.zeros(dataset.feature_dim)
        self.assertAlmostEqual(trace.final.objective, objective(dataset, zero, config.lam, config.loss)[0], places=3)

    def test_first_iteration_matches_vanilla(self):
        """Test that with one outer iteration and equal precision, recycling changes nothing."""
        dataset = partial_chains(7)
        config = solver_config(max_cccp_iters=1)
        w_recycle, _ = train_lesion_variant(dataset, config, recycle=True, adaptive=False)
        w_vanilla, trace = train_vanilla_cccp(dataset, config)
        np.testing.assert_array_equal(w_recycle, w_vanilla)
        self.assertEqual(trace.rows[1].eps, config.eps_min)

    def test_vanilla_matches_final_objective(self):
        """Test that vanilla CCCP reaches the same objective on fully annotated hinge training."""
        rng = np.random.default_rng(8)
        full = ChainInitializer.from_rng(ChainGenConfig(length=5, label_count=3, obs_dim=3), rng) \
            .create_dataset(8, rng)
        config = solver_config(LossKind.HINGE, eps_min=1e-5, eta=1e-7, max_cccp_iters=100)
        _, fast = train_cccp(full, config)
        _, vanilla = train_vanilla_cccp(full, config)
        self.assertAlmostEqual(fast.final.objective, vanilla.final.objective,
                               delta=1e-3 * abs(vanilla.final.objective))
        self.assertLess(fast.final.bounds_total, vanilla.final.bounds_total)

    def test_iteration_cap(self):
        """Test that hitting the outer cap returns the iterate flagged non-converged."""
        dataset = partial_chains(9)
        w, trace = train_cccp(dataset, solver_config(max_cccp_iters=1, eps0=1e-3, eta=1e-12))
        self.assertEqual(len(trace.rows), 2)
        self.assertEqual(w.shape, (dataset.feature_dim,))

    def test_inner_cap_logs_warning(self):
        """Test that a tiny inner budget is reported and leaves the run non-converged."""
        dataset = partial_chains(10)
        with self.assertLogs("app.models.Solver.CCCPSolver", level="WARNING"):
            _, trace = train_cccp(dataset, solver_config(max_inner_iters=1, eps0=1e-3))
        self.assertFalse(trace.converged)

    def test_objective_rise_keeps_previous_iterate(self):
        """Test that a step raising the true objective is rejected, logged and ends the run unconverged."""
        dataset = partial_chains(11)
        calls = []

        def rising(reports, w, lam):
            value = objective_from_reports(reports, w, lam)
            calls.append(value[0])
            return (value[0] + 10.0 * (len(calls) - 1),) + tuple(value[1:])

        with patch("app.models.Solver.CCCPSolver.objective_from_reports", side_effect=rising), \
                self.assertLogs("app.models.Solver.CCCPSolver", level="WARNING") as logs:
            w, trace = train_cccp(dataset, solver_config())
        self.assertFalse(trace.converged)
        self.assertEqual(len(trace.rows), 2)
        self.assertEqual(trace.objectives[1], trace.objectives[0])
        np.testing.assert_array_equal(w, np.zeros(dataset.feature_dim))
        self.assertTrue(any("would rise" in message for message in logs.output))

    def test_qp_failure_continues_unconverged(self):
        """Test that a failed inner QP continues from its best dual point and flags the run."""
        dataset = partial_chains(12)
        config = solver_config(LossKind.BRIDGE, max_cccp_iters=3, max_inner_iters=5)

        def failing(qp, alpha0=None):
            raise QPConvergenceError("did not converge", alpha=np.full(qp.size, 1.0 / qp.size), residual=1.0)

        with patch.object(importlib.import_module("app.models.Solver.Bundle"), "solve_simplex_qp", side_effect=failing), \
                self.assertLogs("app.models.Solver.CCCPSolver", level="WARNING"):
            w, trace = train_cccp(dataset, config)
        self.assertFalse(trace.converged)
        self.assertTrue(np.all(np.isfinite(w)))
        for earlier, later in zip(trace.objectives, trace.objectives[1:]):
            self.assertLessEqual(later, earlier + 1e-9 * max(1.0, abs(earlier)))
        self.assertAlmostEqual(trace.final.objective, objective(dataset, w, config.lam, config.loss)[0], places=10)


if __name__ == '__main__':
    unittest.main()
