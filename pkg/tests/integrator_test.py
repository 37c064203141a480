# -*- coding: utf-8 -*-
"""Unit tests for histories, trajectories, the RK4 integrator and the
invariant-region checks."""
import dataclasses
import os
import shutil
import tempfile
import unittest

import numpy as np
from scipy.integrate import solve_ivp

from virodyn.equilibria import classify
from virodyn.exception import (
    InsufficientHistoryError,
    IntegrationError,
    ScenarioError,
)
from virodyn.integrator import (
    ConstantHistory,
    HistoryFunction,
    PiecewiseLinearHistory,
    Trajectory,
    breakpoints,
    default_step,
    distance_series,
    gamma_bounds,
    integrate,
    integrate_on_grid,
    monitor,
    refine,
    relative_distance,
    self_convergence,
)
from virodyn.kernels import DiracKernel, GammaKernel
from virodyn.model import (
    Identity,
    LogisticSource,
    ModelSpec,
    Parameters,
    RatioDependent,
    Saturating,
    rhs,
)

HISTORY = ConstantHistory((25.0, 50.0, 10.0, 5.0))


def ratio_model(beta: float) -> ModelSpec:
    """The ratio-dependent model with logistic-source growth."""
    return ModelSpec(
        growth=LogisticSource(200.0, 0.1, 0.6, 500.0),
        incidence=RatioDependent(beta, 0.001, 0.001),
        phi1=Identity(),
        phi2=Identity(),
        params=Parameters(0.8, 1.0, 0.8, 3.5, 0.03, 0.75, 0.1, 0.05),
        kernel1=DiracKernel(5.0),
        kernel2=DiracKernel(10.0),
    )


def saturating_model() -> ModelSpec:
    """The saturating-incidence model with beta = 0.1."""
    return dataclasses.replace(
        ratio_model(0.1),
        incidence=Saturating(0.1, 0.001, 0.001),
    )


class HistoryTest(unittest.TestCase):
    """Initial functions."""

    def test_constant(self) -> None:
        """One row per requested time."""
        states = HISTORY(np.array([-100.0, -1.0, 0.0]))
        self.assertEqual(states.shape, (3, 4))
        np.testing.assert_array_equal(states[0], [25.0, 50.0, 10.0, 5.0])
        with self.assertRaises(ValueError):
            ConstantHistory((1.0, 2.0, 3.0))
        with self.assertRaises(ValueError):
            ConstantHistory((1.0, -2.0, 3.0, 4.0))

    def test_piecewise_linear(self) -> None:
        """Interpolation inside the span, an error before it."""
        history = PiecewiseLinearHistory(
            [-10.0, 0.0],
            [[0.0, 0.0, 0.0, 0.0], [10.0, 20.0, 30.0, 40.0]],
        )
        np.testing.assert_allclose(
            history(np.array([-5.0]))[0],
            [5.0, 10.0, 15.0, 20.0],
        )
        with self.assertRaises(InsufficientHistoryError):
            history(np.array([-11.0]))
        with self.assertRaises(ValueError):
            PiecewiseLinearHistory([-1.0, 1.0], np.ones((2, 4)))

    def test_from_config(self) -> None:
        """Histories are built by kind, constant by default."""
        history = HistoryFunction.from_config({})
        np.testing.assert_array_equal(history.state, [25.0, 50.0, 10.0, 5.0])
        with self.assertRaises(ScenarioError):
            HistoryFunction.from_config({"kind": "spline"})
        with self.assertRaises(ScenarioError):
            HistoryFunction.from_config({"state": [1.0]})


class TrajectoryTest(unittest.TestCase):
    """Dense output and CSV files."""

    def setUp(self) -> None:
        self.tmpdir = tempfile.mkdtemp()
        times = np.linspace(0.0, 2.0, 5)
        # a cubic is reproduced exactly by Hermite interpolation
        states = np.column_stack([times**3, times**2, times, np.ones(5)])
        derivatives = np.column_stack(
            [3.0 * times**2, 2.0 * times, np.ones(5), np.zeros(5)],
        )
        self.trajectory = Trajectory.uniform(
            0.0,
            0.5,
            states,
            derivatives,
            ConstantHistory((0.0, 0.0, 0.0, 1.0)),
        )

    def tearDown(self) -> None:
        shutil.rmtree(self.tmpdir)

    def test_dense_output(self) -> None:
        """Exact on cubics, the history before the start."""
        t = np.array([0.1, 0.77, 1.9])
        np.testing.assert_allclose(
            self.trajectory(t),
            np.column_stack([t**3, t**2, t, np.ones(3)]),
            atol=1e-13,
        )
        np.testing.assert_array_equal(
            self.trajectory.evaluate(-3.0),
            [0.0, 0.0, 0.0, 1.0],
        )
        self.assertEqual(self.trajectory.t_end, 2.0)
        self.assertEqual(len(self.trajectory), 5)

    def test_require(self) -> None:
        """Windows beyond the computed span are refused."""
        self.trajectory.require(-10.0, 2.0)
        with self.assertRaises(InsufficientHistoryError):
            self.trajectory.require(0.0, 2.5)

    def test_csv(self) -> None:
        """Grid states survive a write and a read."""
        path = os.path.join(self.tmpdir, "run", "trajectory.csv")
        self.trajectory.to_csv(path)
        with open(path, encoding="utf-8") as f:
            self.assertEqual(f.readline().strip(), "t,x,y,v,z")
        reread = Trajectory.read_csv(path)
        np.testing.assert_array_equal(reread.states, self.trajectory.states)
        self.assertAlmostEqual(reread.h, 0.5)

    def test_uneven_grid(self) -> None:
        """Dense output and CSV files on a grid of unequal steps."""
        times = np.array([0.0, 0.3, 1.0, 1.1, 2.0])
        trajectory = Trajectory(
            times,
            np.column_stack([times**3, times**2, times, np.ones(5)]),
            np.column_stack(
                [3.0 * times**2, 2.0 * times, np.ones(5), np.zeros(5)],
            ),
            ConstantHistory((0.0, 0.0, 0.0, 1.0)),
        )
        t = np.array([0.1, 0.77, 1.05, 1.9])
        np.testing.assert_allclose(
            trajectory(t),
            np.column_stack([t**3, t**2, t, np.ones(4)]),
            atol=1e-13,
        )
        self.assertAlmostEqual(trajectory.h, 0.9)
        np.testing.assert_allclose(trajectory.steps, [0.3, 0.7, 0.1, 0.9])

        path = os.path.join(self.tmpdir, "uneven.csv")
        trajectory.to_csv(path)
        np.testing.assert_array_equal(Trajectory.read_csv(path).times, times)
        with self.assertRaises(ValueError):
            Trajectory(
                times[::-1],
                trajectory.states,
                trajectory.derivatives,
                trajectory.history,
            )

    def test_append(self) -> None:
        """Points are appended past the initial capacity."""
        trajectory = Trajectory.start(
            0.0,
            np.zeros(4),
            np.zeros(4),
            ConstantHistory((1.0, 1.0, 1.0, 1.0)),
            capacity=2,
        )
        for i in range(1, 6):
            trajectory.append(0.5 * i, np.full(4, i), np.zeros(4))
        self.assertEqual(len(trajectory), 6)
        self.assertEqual(trajectory.t_end, 2.5)
        np.testing.assert_array_equal(trajectory.states[:, 0], range(6))
        with self.assertRaises(ValueError):
            trajectory.append(2.5, np.ones(4), np.zeros(4))


class SolverTest(unittest.TestCase):
    """The fixed-step integrator."""

    def test_default_step(self) -> None:
        """The smallest positive Dirac delay over 50, at most 0.1."""
        model = ratio_model(0.003)
        self.assertEqual(default_step(model), 0.1)
        short = dataclasses.replace(model, kernel1=DiracKernel(1.0))
        self.assertAlmostEqual(default_step(short), 0.02)
        gamma = dataclasses.replace(
            model,
            kernel1=GammaKernel(2, 1.0),
            kernel2=GammaKernel(2, 1.0),
        )
        self.assertEqual(default_step(gamma), 0.1)

    def test_step_divides_span(self) -> None:
        """The step is shrunk to land on t_end."""
        trajectory = integrate(ratio_model(0.003), HISTORY, 1.0, 0.3)
        self.assertAlmostEqual(trajectory.h, 0.25)
        self.assertAlmostEqual(trajectory.t_end, 1.0)
        with self.assertRaises(ValueError):
            integrate(ratio_model(0.003), HISTORY, 0.05, 0.1)

    def test_short_history(self) -> None:
        """A history that does not reach back over the delays."""
        history = PiecewiseLinearHistory([-2.0, 0.0], np.ones((2, 4)))
        with self.assertRaises(InsufficientHistoryError):
            integrate(ratio_model(0.003), history, 10.0)

    def test_zero_incidence(self) -> None:
        """Without infection x follows the scalar growth flow."""
        model = ratio_model(0.0)
        trajectory = integrate(
            model,
            ConstantHistory((25.0, 0.0, 0.0, 0.0)),
            20.0,
            0.02,
        )
        reference = solve_ivp(
            lambda t, x: model.growth(x),
            (0.0, float(trajectory.times[-1])),
            [25.0],
            rtol=1e-11,
            atol=1e-11,
            t_eval=trajectory.times,
        )
        np.testing.assert_allclose(
            trajectory.states[:, 0],
            reference.y[0],
            rtol=1e-6,
        )
        self.assertEqual(float(np.abs(trajectory.states[:, 1:]).max()), 0.0)

    def test_gamma_kernels(self) -> None:
        """Distributed delays integrate from a constant history."""
        model = dataclasses.replace(
            ratio_model(0.003),
            kernel1=GammaKernel(2, 0.4),
            kernel2=GammaKernel(3, 0.3),
        )
        trajectory = integrate(model, HISTORY, 20.0, 0.1)
        self.assertTrue(np.all(np.isfinite(trajectory.states)))
        self.assertGreaterEqual(float(trajectory.states.min()), -1e-9)

    def test_breach(self) -> None:
        """A fixed step far beyond the stability limit fails loudly."""
        model = ratio_model(0.003).with_param("u", 1000.0)
        with self.assertRaises(IntegrationError) as context:
            integrate(model, HISTORY, 10.0, 0.1, adaptive=False)
        self.assertGreater(context.exception.time, 0.0)

    def test_stiff_step(self) -> None:
        """The step shrinks to the fast virion clearance instead."""
        model = ratio_model(0.003).with_param("u", 1000.0)
        trajectory = integrate(model, HISTORY, 10.0, 0.1)
        self.assertEqual(trajectory.t_end, 10.0)
        self.assertGreaterEqual(float(trajectory.states.min()), -1e-9)
        self.assertLess(float(trajectory.steps.min()), 0.01)
        self.assertLessEqual(trajectory.h, 0.1 + 1e-12)

    def test_breakpoints(self) -> None:
        """Sums of up to four delays, and the steps land on them."""
        model = ratio_model(0.003)
        np.testing.assert_allclose(
            breakpoints(model, 30.0),
            [5.0, 10.0, 15.0, 20.0, 25.0, 30.0],
        )
        self.assertEqual(breakpoints(model, 3.0).tolist(), [3.0])
        trajectory = integrate(model, HISTORY, 12.0, 0.35)
        self.assertIn(5.0, trajectory.times.tolist())
        self.assertIn(10.0, trajectory.times.tolist())
        self.assertEqual(trajectory.t_end, 12.0)

    def test_refine(self) -> None:
        """Every interval is split evenly."""
        np.testing.assert_allclose(
            refine(np.array([0.0, 1.0, 3.0]), 2),
            [0.0, 0.5, 1.0, 2.0, 3.0],
        )

    def test_prescribed_grid(self) -> None:
        """One step per interval of a given grid."""
        grid = np.concatenate([np.linspace(0.0, 5.0, 51), [5.5, 7.0]])
        trajectory = integrate_on_grid(ratio_model(0.003), HISTORY, grid)
        np.testing.assert_array_equal(trajectory.times, grid)
        with self.assertRaises(ValueError):
            integrate_on_grid(ratio_model(0.003), HISTORY, [1.0, 2.0])

    def test_rhs_consistency(self) -> None:
        """Stored derivatives are the right-hand side on the solution."""
        model = ratio_model(0.0096)
        trajectory = integrate(model, HISTORY, 30.0)
        for i in (0, 1, 57, 150, len(trajectory) - 1):
            t = float(trajectory.times[i])
            np.testing.assert_allclose(
                trajectory.derivatives[i],
                rhs(model, t, trajectory),
                rtol=0.0,
                atol=1e-12,
            )

    def test_equilibrium_pinning(self) -> None:
        """Starting at an equilibrium, the solution stays there."""
        cases = (
            (ratio_model(0.003), "E0"),
            (ratio_model(0.0096), "E1"),
            (ratio_model(1.0), "E2"),
            (saturating_model(), "E2"),
        )
        for model, name in cases:
            E = np.asarray(getattr(classify(model), name), dtype=float)
            trajectory = integrate(model, ConstantHistory(E), 100.0)
            deviation = np.max(np.abs(trajectory.states - E))
            self.assertLessEqual(deviation, 1e-6, f"{name} of {model}")

    def test_fourth_order(self) -> None:
        """Halving the step divides the error by about 16."""
        report = self_convergence(saturating_model(), HISTORY, 50.0, 0.1)
        self.assertGreater(report.order, 3.5)
        self.assertLess(report.order, 4.5)

    def test_fourth_order_stiff(self) -> None:
        """The order survives the stiff transient of the beta = 1 run."""
        report = self_convergence(ratio_model(1.0), HISTORY, 50.0, 0.1)
        self.assertGreater(report.order, 3.5)
        self.assertLess(report.order, 4.5)


class LongRunTest(unittest.TestCase):
    """Convergence to the equilibrium of the regime."""

    @classmethod
    def setUpClass(cls) -> None:
        cls.infection_free = ratio_model(0.003)
        cls.infection_free_run = integrate(cls.infection_free, HISTORY, 600.0)
        cls.activated = saturating_model()
        cls.activated_run = integrate(cls.activated, HISTORY, 3000.0)
        cls.stiff = ratio_model(1.0)
        cls.stiff_run = integrate(cls.stiff, HISTORY, 2000.0)

    def test_infection_free(self) -> None:
        """The infection dies out."""
        E0 = classify(self.infection_free).E0
        self.assertAlmostEqual(E0.x, 666.6666, delta=1e-3)
        final = self.infection_free_run.final_state
        self.assertLessEqual(relative_distance(final, E0), 0.01)

        times, distances = distance_series(self.infection_free_run, E0)
        self.assertEqual(len(times), len(distances))
        self.assertLess(distances[-1], distances[len(distances) // 2])

    def test_ctl_activated(self) -> None:
        """The saturating model settles at E2."""
        E2 = classify(self.activated).E2
        final = self.activated_run.final_state
        self.assertLessEqual(relative_distance(final, E2), 0.02)

    def test_stiff_activated(self) -> None:
        """The ratio-dependent model with beta = 1 settles at E2 through a
        stiff transient."""
        E2 = classify(self.stiff).E2
        final = self.stiff_run.final_state
        self.assertLessEqual(relative_distance(final, E2), 0.02)
        self.assertEqual(self.stiff_run.t_end, 2000.0)
        self.assertLess(float(self.stiff_run.steps.min()), 0.005)

    def test_monitor(self) -> None:
        """Solutions stay positive and end inside the region."""
        for model, run in (
            (self.infection_free, self.infection_free_run),
            (self.activated, self.activated_run),
            (self.stiff, self.stiff_run),
        ):
            report = monitor(run, gamma_bounds(model))
            self.assertTrue(report.positive)
            self.assertTrue(report.eventually_bounded)
            self.assertGreaterEqual(min(report.minima), -1e-9)


class BoundsTest(unittest.TestCase):
    """The invariant region."""

    def test_bounds(self) -> None:
        """x_max is xbar and M1 the vertex value of the source."""
        model = ratio_model(0.003)
        bounds = gamma_bounds(model)
        self.assertAlmostEqual(bounds.x_max, 2000.0 / 3.0, delta=1e-6)
        vertex = model.growth.vertex
        self.assertAlmostEqual(
            bounds.M1,
            float(model.growth(vertex)),
            delta=1e-3 * float(model.growth(vertex)),
        )
        self.assertGreater(bounds.z_max, 0.0)
        self.assertEqual(bounds.as_array().shape, (4,))

    def test_excursions(self) -> None:
        """A history above the bounds is flagged but settles."""
        model = ratio_model(0.003)
        bounds = gamma_bounds(model)
        history = ConstantHistory((25.0, 1000.0, 10.0, 0.0))
        self.assertGreater(1000.0, bounds.y_max)

        report = monitor(integrate(model, history, 200.0), bounds)
        self.assertEqual(report.first_excursions[1], 0.0)
        self.assertIsNone(report.first_excursions[0])
        self.assertTrue(report.excursions)
        self.assertTrue(report.eventually_bounded)


if __name__ == "__main__":
    unittest.main()
