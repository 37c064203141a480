# -*- coding: utf-8 -*-
"""Unit tests for the model ingredients, the right-hand side and the
hypothesis validator."""
import math
import unittest

import numpy as np

from virodyn.exception import (
    HypothesisError,
    MalformedKernelError,
    ResponseInverseError,
)
from virodyn.integrator import ConstantHistory, gamma_bounds
from virodyn.kernels import DiracKernel, GammaKernel, TabulatedKernel
from virodyn.model import (
    BeddingtonDeAngelis,
    Bilinear,
    GrowthFunction,
    Identity,
    IncidenceFunction,
    LogisticSource,
    ModelSpec,
    Parameters,
    Quadratic,
    RatioDependent,
    ResponseFunction,
    Saturating,
    rhs,
    validate_hypotheses,
)


def example_model(beta: float = 0.003, **changes: object) -> ModelSpec:
    """The ratio-dependent model with logistic-source growth."""
    components = {
        "growth": LogisticSource(200.0, 0.1, 0.6, 500.0),
        "incidence": RatioDependent(beta, 0.001, 0.001),
        "phi1": Identity(),
        "phi2": Identity(),
        "params": Parameters(0.8, 1.0, 0.8, 3.5, 0.03, 0.75, 0.1, 0.05),
        "kernel1": DiracKernel(5.0),
        "kernel2": DiracKernel(10.0),
    }
    components.update(changes)
    return ModelSpec(**components)


class FunctionTest(unittest.TestCase):
    """Growth, incidence and response variants."""

    def test_logistic_source(self) -> None:
        """Values and the vertex of the parabola."""
        growth = LogisticSource(200.0, 0.1, 0.6, 500.0)
        self.assertAlmostEqual(growth(25.0), 211.75)
        self.assertAlmostEqual(growth.vertex, 0.5 * 500.0 / 1.2)
        self.assertEqual(
            GrowthFunction.from_config(growth.to_config()).constants(),
            growth.constants(),
        )
        self.assertIn("lambda", growth.to_config())

    def test_ratio_dependent(self) -> None:
        """Zero on x = 0 even where the denominator vanishes."""
        incidence = RatioDependent(0.003, 0.001, 0.001)
        self.assertEqual(incidence(0.0, 0.0, 0.0), 0.0)
        self.assertAlmostEqual(incidence(25.0, 50.0, 10.0), 1.0)
        values = incidence(np.array([0.0, 10.0]), np.zeros(2), np.zeros(2))
        np.testing.assert_allclose(values, [0.0, 3.0])

    def test_other_incidences(self) -> None:
        """Saturating, bilinear and Beddington-DeAngelis rates."""
        self.assertAlmostEqual(
            Saturating(0.1, 0.001, 0.001)(100.0, 1000.0, 1000.0),
            10.0 / 4.0,
        )
        self.assertEqual(
            Bilinear(2.0)(np.ones(3), np.zeros(3), np.zeros(3)).shape,
            (3,),
        )
        self.assertAlmostEqual(
            BeddingtonDeAngelis(1.0, 1.0, 1.0, 1.0)(1.0, 1.0, 1.0),
            0.25,
        )

    def test_unknown_kind(self) -> None:
        """Families reject kinds registered elsewhere."""
        with self.assertRaises(ValueError):
            IncidenceFunction.from_config({"kind": "logistic_source"})
        with self.assertRaises(ValueError):
            ResponseFunction.from_config({"q": 1.0})
        self.assertIs(IncidenceFunction.get_variant("saturating"), Saturating)

    def test_responses(self) -> None:
        """Inverses and their domain."""
        quadratic = Quadratic(0.5)
        w = quadratic(np.array([0.0, 1.0, 4.0]))
        np.testing.assert_allclose(quadratic.inverse(w), [0.0, 1.0, 4.0])
        self.assertEqual(Identity().inverse(3.0), 3.0)
        with self.assertRaises(ResponseInverseError):
            Identity().inverse(-1.0)
        custom = ResponseFunction.custom(np.sqrt, np.square)
        self.assertLess(custom.k_lower, 1e-2)

    def test_custom_functions_do_not_serialize(self) -> None:
        """Wrapped callables have no config."""
        with self.assertRaises(ValueError):
            GrowthFunction.custom(lambda x: 1.0 - x).to_config()


class ModelSpecTest(unittest.TestCase):
    """Parameters, kernel masses and derived constants."""

    def test_parameters(self) -> None:
        """Positivity and finiteness of the rate constants."""
        with self.assertRaises(ValueError):
            Parameters(0.0, 1.0, 0.8, 3.5, 0.03, 0.75)
        with self.assertRaises(ValueError):
            Parameters(0.8, 1.0, -0.1, 3.5, 0.03, 0.75)
        with self.assertRaises(ValueError):
            Parameters(0.8, 1.0, 0.8, math.nan, 0.03, 0.75)
        params = Parameters(0.8, 1, 0.8, 3.5, 0.0, 0.75)
        self.assertEqual(params.c, 0.0)
        self.assertIsInstance(params.p, float)

    def test_survival_constants(self) -> None:
        """G1 and G2 carry the attenuation, G3 is the plain mass."""
        model = example_model()
        self.assertAlmostEqual(model.G1, math.exp(-0.5))
        self.assertAlmostEqual(model.G2, math.exp(-0.5))
        self.assertEqual(model.G3, 1.0)

    def test_kernel_masses(self) -> None:
        """Infection and production delays must be distributions."""
        half = TabulatedKernel([0.0, 1.0], [0.5, 0.5])
        with self.assertRaises(MalformedKernelError):
            example_model(kernel1=half)
        model = example_model(kernel3=half)
        self.assertAlmostEqual(model.G3, 0.5)

    def test_with_param(self) -> None:
        """Copies with one constant replaced."""
        model = example_model()
        self.assertEqual(model.with_param("c", 0.0).params.c, 0.0)
        self.assertEqual(model.with_param("params.a", 0.5).params.a, 0.5)
        self.assertEqual(
            model.with_param("incidence.beta", 1.0).incidence.beta,
            1.0,
        )
        self.assertEqual(model.with_param("kernel1.tau", 2.0).kernel1.tau, 2.0)
        self.assertEqual(model.incidence.beta, 0.003)
        with self.assertRaises(KeyError):
            model.with_param("incidence.delta", 1.0)
        with self.assertRaises(KeyError):
            model.with_param("beta", 1.0)


class RhsTest(unittest.TestCase):
    """The right-hand side against hand evaluations."""

    def test_constant_history(self) -> None:
        """The derivatives of the default history at t = 10."""
        model = example_model()
        derivative = rhs(model, 10.0, ConstantHistory((25, 50, 10, 5)))
        g = math.exp(-0.5)
        np.testing.assert_allclose(
            derivative,
            [
                211.75 - 10.0,
                g * 10.0 - 0.8 * 50.0 - 50.0 * 5.0,
                0.8 * g * 50.0 - 3.5 * 10.0,
                0.03 * 50.0 * 5.0 - 0.75 * 5.0,
            ],
            rtol=1e-12,
        )

    def test_discrete_delays(self) -> None:
        """Dirac kernels sample the history at the delays."""
        model = example_model(beta=0.5)
        rng = np.random.default_rng(7)
        for _ in range(20):
            a, b, c, d = rng.uniform(0.0, 1.0, 4)

            def history(times: np.ndarray) -> np.ndarray:
                times = np.atleast_1d(times)
                return np.column_stack(
                    [
                        100.0 + 10.0 * np.sin(a * times),
                        5.0 + np.cos(b * times),
                        2.0 + np.sin(c * times) ** 2,
                        1.0 + d * np.exp(0.01 * times),
                    ],
                )

            t = float(rng.uniform(20.0, 40.0))
            x, y, v, z = history(np.array([t]))[0]
            x1, y1, v1, _ = history(np.array([t - 5.0]))[0]
            _, y2, _, _ = history(np.array([t - 10.0]))[0]
            f = model.incidence
            expected = [
                model.growth(x) - f(x, y, v) * v,
                math.exp(-0.5) * f(x1, y1, v1) * v1 - 0.8 * y - y * z,
                0.8 * math.exp(-0.5) * y2 - 3.5 * v,
                0.03 * y * z - 0.75 * z,
            ]
            np.testing.assert_allclose(
                rhs(model, t, history),
                expected,
                rtol=1e-12,
                atol=1e-12,
            )

    def test_gamma_kernel_constant_history(self) -> None:
        """A constant history weighs the inflow by G1."""
        model = example_model(kernel1=GammaKernel(2, 0.5))
        derivative = rhs(model, 0.0, ConstantHistory((25, 50, 10, 5)))
        g1 = (0.5 / 0.6) ** 2
        self.assertAlmostEqual(model.G1, g1)
        self.assertAlmostEqual(derivative[1], g1 * 10.0 - 290.0, places=8)


class HypothesisTest(unittest.TestCase):
    """Grid checks of the standing hypotheses."""

    def test_examples_pass(self) -> None:
        """The ratio-dependent and saturating models pass every check."""
        report = validate_hypotheses(example_model())
        self.assertTrue(report.passed, report.to_text())
        saturating = example_model(incidence=Saturating(0.1, 0.001, 0.001))
        self.assertTrue(validate_hypotheses(saturating).passed)

    def test_unbounded_incidence(self) -> None:
        """Without gamma the ratio-dependent rate blows up at y = 0."""
        report = validate_hypotheses(
            example_model(incidence=RatioDependent(0.003, 0.001, 0.0)),
        )
        self.assertFalse(report["evaluability"].passed)
        self.assertEqual(report["evaluability"].witness[1], 0.0)
        with self.assertRaises(HypothesisError):
            report.raise_for_failures()

    def test_increasing_in_y(self) -> None:
        """A rate growing with y fails condition iii)."""
        incidence = IncidenceFunction.custom(lambda x, y, v: x * (1.0 + y))
        report = validate_hypotheses(example_model(incidence=incidence))
        self.assertFalse(report["iii)"].passed)
        self.assertTrue(report["i)"].passed)

    def test_growth_without_root(self) -> None:
        """A growth rate that stays positive violates H1."""
        growth = GrowthFunction.custom(lambda x: 1.0 + 0.0 * np.asarray(x))
        report = validate_hypotheses(example_model(growth=growth))
        self.assertFalse(report["H1"].passed)

    def test_switched_off_rates(self) -> None:
        """k = 0 or c = 0 is flagged."""
        model = example_model()
        report = validate_hypotheses(model.with_param("c", 0.0))
        self.assertFalse(report["params"].passed)
        self.assertTrue(report["H1"].passed)

    def test_activation_on_z_range(self) -> None:
        """phi2 and the product phi1(y) phi2(z) are sampled up to z_max."""
        model = example_model()
        report = validate_hypotheses(model)
        self.assertTrue(report["H3"].passed)
        self.assertTrue(report["H4"].passed)

        cap = 0.5 * gamma_bounds(model).z_max
        phi2 = ResponseFunction.custom(
            lambda z: np.minimum(z, cap),
            lambda w: w,
            k_lower=1.0,
        )
        report = validate_hypotheses(example_model(phi2=phi2))
        self.assertTrue(report["H2[phi1]"].passed)
        self.assertFalse(report["H2[phi2]"].passed)
        self.assertGreater(report["H2[phi2]"].witness[0], cap)
        self.assertFalse(report["H3"].passed)
        self.assertEqual(report["H3"].detail, "w is not increasing in z")
        self.assertGreater(report["H3"].witness[1], cap)

    def test_activation_off_axes(self) -> None:
        """A response that is positive at zero breaks w = 0 on the axes."""
        phi1 = ResponseFunction.custom(
            lambda y: 1.0 + np.asarray(y),
            lambda w: np.asarray(w) - 1.0,
            k_lower=1.0,
        )
        report = validate_hypotheses(example_model(phi1=phi1))
        self.assertFalse(report["H3"].passed)
        self.assertEqual(report["H3"].detail, "w is not zero on the axes")
        self.assertEqual(report["H3"].witness[0], 0.0)


if __name__ == "__main__":
    unittest.main()
