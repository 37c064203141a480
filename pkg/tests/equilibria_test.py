# -*- coding: utf-8 -*-
"""Unit tests for reproduction numbers, equilibria and the regime
classification."""
import dataclasses
import math
import unittest

import numpy as np

from virodyn.constants import Regime
from virodyn.equilibria import (
    check_uniqueness_sets,
    classify,
    compute_R0,
    compute_R1,
    compute_RCTL,
    ctl_set_point,
    equilibrium_residuals,
    find_xbar,
    locate_threshold,
    report_to_dict,
    reproduction_summary,
    residual_scale,
    solve_E1,
    solve_E2,
)
from virodyn.exception import BracketError, H1ViolationError
from virodyn.kernels import DiracKernel
from virodyn.model import (
    GrowthFunction,
    Identity,
    IncidenceFunction,
    LinearSource,
    LogisticSource,
    ModelSpec,
    Parameters,
    RatioDependent,
    Saturating,
    State,
)

E1_LOW = (659.461141, 5.962025, 0.826548, 0.0)
E1_HIGH = (1.461792, 152.184859, 21.098236, 0.0)
E2_HIGH = (1.537198, 25.0, 3.465889, 4.070823)
E1_SATURATING = (115.436331, 183.268932, 25.407594, 0.0)
E2_SATURATING = (481.791432, 25.0, 3.465889, 3.138764)


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


def saturating_model(beta: float = 0.1) -> ModelSpec:
    """The saturating-incidence model."""
    return dataclasses.replace(
        ratio_model(beta),
        incidence=Saturating(beta, 0.001, 0.001),
    )


class ThresholdTest(unittest.TestCase):
    """xbar and the reproduction numbers."""

    def test_xbar(self) -> None:
        """The positive root of the logistic source."""
        self.assertAlmostEqual(
            find_xbar(LogisticSource(200.0, 0.1, 0.6, 500.0)),
            2000.0 / 3.0,
            delta=1e-6,
        )
        self.assertAlmostEqual(find_xbar(LinearSource(10.0, 0.1)), 100.0)
        with self.assertRaises(H1ViolationError):
            find_xbar(GrowthFunction.custom(lambda x: -1.0 - x))
        with self.assertRaises(H1ViolationError):
            find_xbar(GrowthFunction.custom(lambda x: 1.0 + x))

    def test_R0_coefficients(self) -> None:
        """R0 is linear in beta."""
        self.assertAlmostEqual(
            compute_R0(ratio_model(1.0)),
            105.108412,
            delta=1e-5,
        )
        self.assertAlmostEqual(
            compute_R0(saturating_model(1.0)),
            70.0722745,
            delta=1e-6,
        )
        self.assertAlmostEqual(compute_R0(ratio_model(0.003)), 0.3153252, 6)

    def test_R1(self) -> None:
        """R1 of the three reference parameter sets."""
        self.assertAlmostEqual(compute_R1(ratio_model(0.0096)), 0.97091, 4)
        self.assertAlmostEqual(compute_R1(ratio_model(1.0)), 6.088529, 4)
        self.assertAlmostEqual(compute_R1(saturating_model()), 4.9234561, 4)

    def test_set_point(self) -> None:
        """y_hat = b / c and v_hat follows from it."""
        point = ctl_set_point(ratio_model(1.0))
        self.assertAlmostEqual(point.y, 25.0)
        self.assertAlmostEqual(
            point.v,
            25.0 * 0.8 * math.exp(-0.5) / 3.5,
            places=9,
        )
        self.assertAlmostEqual(point.v, 3.465889, 6)

    def test_no_ctl_expansion(self) -> None:
        """Without CTL expansion there is no set point and R1 is zero."""
        model = ratio_model(1.0).with_param("c", 0.0)
        self.assertIsNone(ctl_set_point(model))
        self.assertEqual(compute_R1(model), 0.0)
        report = classify(model)
        self.assertEqual(report.regime, Regime.CTL_INACTIVATED)
        self.assertIsNone(report.E2)

    def test_thresholds(self) -> None:
        """R0 crosses one where beta equals one over its slope."""
        model = ratio_model(0.003)
        beta = locate_threshold(model, "incidence.beta", 0.003, 1.0)
        self.assertAlmostEqual(beta, 0.009513986, delta=1e-8)
        beta1 = locate_threshold(model, "incidence.beta", 0.0096, 1.0, "R1")
        self.assertAlmostEqual(
            compute_R1(model.with_param("incidence.beta", beta1)),
            1.0,
            places=8,
        )
        with self.assertRaises(BracketError):
            locate_threshold(model, "incidence.beta", 0.001, 0.002)
        with self.assertRaises(ValueError):
            locate_threshold(model, "incidence.beta", 0.001, 1.0, "R2")

    def test_saturating_threshold(self) -> None:
        """R0 = 1 at beta = 1 / 70.0722745 for saturating incidence."""
        beta = locate_threshold(
            saturating_model(),
            "incidence.beta",
            0.001,
            0.1,
        )
        self.assertAlmostEqual(beta, 0.01427097, delta=1e-7)


class EquilibriumTest(unittest.TestCase):
    """Equilibria of the reference parameter sets."""

    def assert_state(self, state, expected, delta=1e-4) -> None:
        """Componentwise comparison."""
        self.assertIsNotNone(state)
        for got, want in zip(state, expected):
            self.assertAlmostEqual(got, want, delta=delta)

    def test_E1(self) -> None:
        """CTL-inactivated equilibria."""
        self.assert_state(solve_E1(ratio_model(0.0096)), E1_LOW)
        self.assert_state(solve_E1(ratio_model(1.0)), E1_HIGH)
        self.assert_state(solve_E1(saturating_model()), E1_SATURATING)
        self.assertIsNone(solve_E1(ratio_model(0.003)))

    def test_E2(self) -> None:
        """CTL-activated equilibria."""
        self.assert_state(solve_E2(ratio_model(1.0)), E2_HIGH)
        self.assert_state(solve_E2(saturating_model()), E2_SATURATING)
        self.assertIsNone(solve_E2(ratio_model(0.0096)))

    def test_residuals(self) -> None:
        """Computed equilibria solve the steady-state equations."""
        for model in (ratio_model(1.0), saturating_model()):
            report = classify(model)
            for E in (report.E0, report.E1, report.E2):
                residuals = equilibrium_residuals(model, E)
                self.assertLess(
                    float(np.max(np.abs(residuals))),
                    1e-8 * residual_scale(model, E),
                )

    def test_RCTL(self) -> None:
        """c phi1(y1) / b at E1."""
        model = ratio_model(1.0)
        E1 = solve_E1(model)
        self.assertAlmostEqual(compute_RCTL(model, E1), 6.08739, 4)
        with self.assertRaises(ValueError):
            compute_RCTL(model, None)


class ClassifyTest(unittest.TestCase):
    """The regime classification and its reports."""

    def test_regimes(self) -> None:
        """The three regimes along a beta sweep."""
        expected = {
            0.003: Regime.INFECTION_FREE,
            0.0096: Regime.CTL_INACTIVATED,
            1.0: Regime.CTL_ACTIVATED,
        }
        for beta, regime in expected.items():
            report = classify(ratio_model(beta))
            self.assertEqual(report.regime, regime)
            self.assertEqual(report.E1 is None, report.R0 <= 1)
            self.assertEqual(report.E2 is None, report.R1 <= 1)
            self.assertEqual(report.RCTL is None, report.E1 is None)

        report = classify(ratio_model(0.003))
        self.assertEqual(report.E0, (report.xbar, 0.0, 0.0, 0.0))
        self.assertEqual(report.target(), report.E0)

    def test_presence_follows_thresholds(self) -> None:
        """E1 exists exactly when R0 > 1, E2 exactly when R1 > 1."""
        for beta in np.geomspace(0.001, 2.0, 25):
            report = classify(ratio_model(float(beta)))
            self.assertEqual(report.E1 is not None, report.R0 > 1)
            self.assertEqual(report.E2 is not None, report.R1 > 1)
            if report.E1 is not None:
                self.assertLess(report.R1, report.R0)

    def test_near_threshold(self) -> None:
        """Inside the band around one the lower regime is kept."""
        beta = 1.0 / compute_R0(ratio_model(1.0))
        report = classify(ratio_model(beta))
        self.assertEqual(report.regime, Regime.INFECTION_FREE)
        self.assertTrue(report.warnings)

    def test_report_layout(self) -> None:
        """The machine-readable and text reports."""
        report = classify(ratio_model(1.0))
        data = report_to_dict(report)
        self.assertEqual(data["regime"], "CtlActivated")
        self.assertEqual(len(data["E2"]), 4)
        self.assertEqual(
            set(data),
            {
                "regime",
                "G1",
                "G2",
                "G3",
                "xbar",
                "R0",
                "R1",
                "RCTL",
                "E0",
                "E1",
                "E2",
                "warnings",
            },
        )
        text = reproduction_summary(classify(ratio_model(0.003)))
        self.assertIn("InfectionFree", text)
        self.assertIn("absent", text)

    def test_uniqueness_sets(self) -> None:
        """Sign conditions around the computed equilibria."""
        model = saturating_model()
        sets = check_uniqueness_sets(model, classify(model).E2)
        self.assertTrue(sets.incidence_condition)
        self.assertTrue(sets.growth_condition)
        self.assertIsNone(sets.incidence_witness)

        # the logistic source rises past n(x1) up to its vertex
        model = ratio_model(1.0)
        sets = check_uniqueness_sets(model, classify(model).E1)
        self.assertTrue(sets.incidence_condition)
        self.assertFalse(sets.growth_condition)
        self.assertIsNotNone(sets.growth_witness)

    def test_uniqueness_witnesses(self) -> None:
        """An incidence flat in x fails with a witness, a linear source
        with an increasing incidence passes."""
        flat = dataclasses.replace(
            ratio_model(1.0),
            incidence=IncidenceFunction.custom(
                lambda x, y, v: np.full_like(np.asarray(x, dtype=float), 0.01),
            ),
        )
        E = State(300.0, 25.0, 3.0, 1.0)
        sets = check_uniqueness_sets(flat, E)
        self.assertFalse(sets.incidence_condition)
        self.assertIsNotNone(sets.incidence_witness)
        self.assertGreaterEqual(sets.incidence_witness, 0.0)

        linear = dataclasses.replace(
            saturating_model(),
            growth=LinearSource(10.0, 0.1),
        )
        sets = check_uniqueness_sets(linear, State(50.0, 25.0, 3.0, 1.0))
        self.assertTrue(sets.growth_condition)
        self.assertTrue(sets.incidence_condition)
        self.assertIsNone(sets.growth_witness)
        self.assertIsNone(sets.incidence_witness)

    def test_zero_incidence(self) -> None:
        """Without infection only E0 exists."""
        model = ratio_model(0.0)
        report = classify(model)
        self.assertEqual(report.regime, Regime.INFECTION_FREE)
        self.assertEqual(report.R0, 0.0)
        self.assertEqual(report.R1, 0.0)
        self.assertIsNone(report.E1)
        self.assertIsNone(report.E2)
        self.assertIsNone(report.RCTL)
        self.assertAlmostEqual(ctl_set_point(model).x, report.xbar)
        self.assertIn("InfectionFree", reproduction_summary(report))


if __name__ == "__main__":
    unittest.main()
