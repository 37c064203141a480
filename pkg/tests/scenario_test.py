# -*- coding: utf-8 -*-
"""Unit tests for scenario files."""
import json
import os
import shutil
import tempfile
import unittest

from pydantic import ValidationError

from virodyn.constants import Regime
from virodyn.equilibria import classify
from virodyn.exception import ScenarioError
from virodyn.scenario import (
    SweepConfig,
    bundled_scenarios,
    load_scenario,
    resolve_scenario,
    scenario_from_config,
)


class ScenarioTest(unittest.TestCase):
    """Loading and validating scenarios."""

    def setUp(self) -> None:
        self.tmpdir = tempfile.mkdtemp()
        with open(
            resolve_scenario("example1_beta0003"),
            encoding="utf-8",
        ) as f:
            self.config = json.load(f)

    def tearDown(self) -> None:
        shutil.rmtree(self.tmpdir)

    def assert_section(self, config: dict, section: str) -> None:
        """The document is refused with `section` as culprit."""
        with self.assertRaises(ScenarioError) as context:
            scenario_from_config(config)
        self.assertEqual(context.exception.section, section)

    def test_bundled(self) -> None:
        """The shipped scenarios load and keep their names."""
        self.assertEqual(
            bundled_scenarios(),
            [
                "example1_beta0003",
                "example2_beta00096",
                "example2_beta1",
                "example3_beta01",
            ],
        )
        for name in bundled_scenarios():
            self.assertEqual(load_scenario(name).name, name)

        scenario = load_scenario("example1_beta0003")
        self.assertEqual(
            classify(scenario.model).regime,
            Regime.INFECTION_FREE,
        )
        self.assertEqual(scenario.run.t_end, 600.0)
        self.assertEqual(scenario.sweep.param, "incidence.beta")
        self.assertIsNone(load_scenario("example2_beta1").run.h)
        self.assertTrue(load_scenario("example2_beta1").run.adaptive)

    def test_defaults(self) -> None:
        """Omitted sections fall back to identity responses, an
        instantaneous activation and the constant history."""
        for section in ("phi1", "phi2", "kernel3", "history", "run"):
            del self.config[section]
        scenario = scenario_from_config(self.config, "bare")
        self.assertTrue(scenario.model.kernel3.is_instantaneous)
        self.assertEqual(scenario.run.t_end, 600.0)
        self.assertIsNone(scenario.run.h)
        self.assertTrue(scenario.run.adaptive)
        self.assertEqual(scenario.name, "example1_beta0003")
        self.assertEqual(scenario.quad.panels, scenario.run.panels)

    def test_bad_params(self) -> None:
        """Rate constants are positive."""
        self.config["params"]["a"] = -1.0
        self.assert_section(self.config, "params")

    def test_bad_incidence(self) -> None:
        """Unknown kinds are refused."""
        self.config["incidence"] = {"kind": "holling_iv", "beta": 1.0}
        self.assert_section(self.config, "incidence")

    def test_bad_kernel(self) -> None:
        """The infection delay must be a distribution."""
        self.config["kernel1"] = {
            "kind": "table",
            "nodes": [0.0, 1.0],
            "densities": [0.5, 0.5],
        }
        self.assert_section(self.config, "kernel1")

    def test_unknown_field(self) -> None:
        """Misspelled run settings are not ignored."""
        self.config["run"]["t_stop"] = 10.0
        self.assert_section(self.config, "run")

    def test_bad_files(self) -> None:
        """Broken JSON, non-objects and unknown names."""
        path = os.path.join(self.tmpdir, "broken.json")
        with open(path, "w", encoding="utf-8") as f:
            f.write("{\"growth\": ")
        with self.assertRaises(ScenarioError) as context:
            load_scenario(path)
        self.assertEqual(context.exception.section, "scenario")

        path = os.path.join(self.tmpdir, "list.json")
        with open(path, "w", encoding="utf-8") as f:
            json.dump([1, 2], f)
        with self.assertRaises(ScenarioError):
            load_scenario(path)

        with self.assertRaises(ScenarioError) as context:
            load_scenario("example9")
        self.assertIn("example1_beta0003", str(context.exception))

    def test_sweep_values(self) -> None:
        """Sweep values are finite and strictly ascending."""
        SweepConfig(param="incidence.beta", values=[0.1, 0.2])
        with self.assertRaises(ValidationError):
            SweepConfig(param="incidence.beta", values=[0.2, 0.1])
        with self.assertRaises(ValidationError):
            SweepConfig(param="incidence.beta", values=[])
        with self.assertRaises(ValidationError):
            SweepConfig(param="incidence.beta", values=[float("nan")])


if __name__ == "__main__":
    unittest.main()
