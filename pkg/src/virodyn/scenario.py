# -*- coding: utf-8 -*-
"""Scenario files: a model, a history, run settings and outputs.

A scenario is a JSON document such as

.. code-block:: json

    {
        "growth": {"kind": "logistic_source", "lambda": 200, "d": 0.1,
                   "r": 0.6, "K": 500},
        "incidence": {"kind": "ratio_dependent", "beta": 0.003,
                      "alpha": 0.001, "gamma": 0.001},
        "phi1": {"kind": "identity"},
        "phi2": {"kind": "identity"},
        "params": {"a": 0.8, "p": 1, "k": 0.8, "u": 3.5, "c": 0.03,
                   "b": 0.75, "alpha1": 0.1, "alpha2": 0.05},
        "kernel1": {"kind": "dirac", "tau": 5},
        "kernel2": {"kind": "dirac", "tau": 10},
        "run": {"t_end": 600}
    }

Arguments naming a scenario are either a path or the name of a bundled
scenario, see `bundled_scenarios`.
"""
from __future__ import annotations

import glob
import json
import math
import os
from dataclasses import dataclass
from typing import Any, Callable, List, Optional

from loguru import logger
from pydantic import BaseModel, ConfigDict, Field, ValidationError
from pydantic import field_validator

from .constants import _DEFAULT_PANELS, _DEFAULT_TAIL_EPSILON
from .exception import ScenarioError, VirodynError
from .integrator.history import HistoryFunction
from .kernels import DelayKernel, QuadratureSpec
from .model.functions import (
    GrowthFunction,
    IncidenceFunction,
    ResponseFunction,
)
from .model.spec import ModelSpec, Parameters

_BUNDLED_DIR = os.path.join(os.path.dirname(__file__), "scenarios")


class ComponentConfig(BaseModel):
    """A function or kernel section: its `kind` and constants."""

    model_config = ConfigDict(extra="allow")

    kind: str


class ParamsConfig(BaseModel):
    """The `params` section."""

    model_config = ConfigDict(extra="forbid")

    a: float = Field(gt=0)
    p: float = Field(gt=0)
    k: float = Field(ge=0)
    u: float = Field(gt=0)
    c: float = Field(ge=0)
    b: float = Field(gt=0)
    alpha1: float = Field(default=0.0, ge=0)
    alpha2: float = Field(default=0.0, ge=0)


class HistoryConfig(BaseModel):
    """The `history` section, a constant history if omitted."""

    model_config = ConfigDict(extra="allow")

    kind: str = "constant"


class RunConfig(BaseModel):
    """The `run` section."""

    model_config = ConfigDict(extra="forbid")

    t_end: float = Field(default=600.0, gt=0)
    h: Optional[float] = Field(default=None, gt=0)
    tail_mass_epsilon: float = Field(
        default=_DEFAULT_TAIL_EPSILON,
        gt=0,
        lt=1,
    )
    panels: int = Field(default=_DEFAULT_PANELS, ge=16)
    adaptive: bool = True
    """Shrink the step where the system stiffens, see `integrate`."""

    target: Optional[str] = None
    """The functional audited by `verify` if `--target` is not given."""


class OutputsConfig(BaseModel):
    """The `outputs` section; relative paths resolve against `--out`."""

    model_config = ConfigDict(extra="forbid")

    csv: Optional[str] = None
    plot: Optional[str] = None
    report: Optional[str] = None
    lyapunov: Optional[str] = None
    sweep: Optional[str] = None


class SweepConfig(BaseModel):
    """The `sweep` section."""

    model_config = ConfigDict(extra="forbid")

    param: str
    values: List[float] = Field(min_length=1)
    simulate: bool = False

    @field_validator("values")
    @classmethod
    def _check_values(cls, values: List[float]) -> List[float]:
        if not all(math.isfinite(_) for _ in values):
            raise ValueError("sweep values must be finite")
        if any(b <= a for a, b in zip(values, values[1:])):
            raise ValueError("sweep values must be strictly ascending")
        return values


class ScenarioConfig(BaseModel):
    """A whole scenario document."""

    model_config = ConfigDict(extra="forbid")

    name: str = ""
    description: str = ""
    growth: ComponentConfig
    incidence: ComponentConfig
    phi1: ComponentConfig = ComponentConfig(kind="identity")
    phi2: ComponentConfig = ComponentConfig(kind="identity")
    params: ParamsConfig
    kernel1: ComponentConfig
    kernel2: ComponentConfig
    kernel3: ComponentConfig = ComponentConfig(kind="dirac", tau=0.0)
    history: HistoryConfig = HistoryConfig()
    run: RunConfig = RunConfig()
    outputs: OutputsConfig = OutputsConfig()
    sweep: Optional[SweepConfig] = None


@dataclass(frozen=True)
class Scenario:
    """A loaded and validated scenario."""

    name: str
    model: ModelSpec
    history: HistoryFunction
    run: RunConfig
    outputs: OutputsConfig
    sweep: Optional[SweepConfig]
    config: dict
    """The validated document, for sweep workers in other processes."""

    @property
    def quad(self) -> QuadratureSpec:
        """The quadrature settings of the run."""
        return QuadratureSpec(self.run.tail_mass_epsilon, self.run.panels)


def bundled_scenarios() -> List[str]:
    """The names of the scenarios shipped with the package."""
    return sorted(
        os.path.splitext(os.path.basename(path))[0]
        for path in glob.glob(os.path.join(_BUNDLED_DIR, "*.json"))
    )


def resolve_scenario(name_or_path: str) -> str:
    """Return the file of a scenario given by path or bundled name."""
    if os.path.isfile(name_or_path):
        return name_or_path
    stem = os.path.splitext(os.path.basename(name_or_path))[0]
    candidate = os.path.join(_BUNDLED_DIR, f"{stem}.json")
    if os.path.isfile(candidate):
        return candidate
    raise ScenarioError(
        "scenario",
        f"No file or bundled scenario named [{name_or_path}]; bundled are "
        f"{bundled_scenarios()}.",
    )


def _build(section: str, factory: Callable[[dict], Any], config: Any) -> Any:
    try:
        return factory(config.model_dump())
    except (VirodynError, TypeError, ValueError) as e:
        message = e.message if isinstance(e, VirodynError) else str(e)
        raise ScenarioError(section, message) from e


def scenario_from_config(config: dict, name: str = "") -> Scenario:
    """Validate a scenario document and build its model and history.

    Args:
        config (`dict`):
            The parsed document.
        name (`str`, defaults to `""`):
            The name used when the document has none.

    Returns:
        `Scenario`: The scenario.
    """
    try:
        parsed = ScenarioConfig.model_validate(config)
    except ValidationError as e:
        error = e.errors()[0]
        section = str(error["loc"][0]) if error["loc"] else "scenario"
        location = ".".join(str(_) for _ in error["loc"])
        raise ScenarioError(section, f"{location}: {error['msg']}") from e

    components = {
        "growth": _build("growth", GrowthFunction.from_config, parsed.growth),
        "incidence": _build(
            "incidence",
            IncidenceFunction.from_config,
            parsed.incidence,
        ),
        "phi1": _build("phi1", ResponseFunction.from_config, parsed.phi1),
        "phi2": _build("phi2", ResponseFunction.from_config, parsed.phi2),
        "params": _build(
            "params",
            lambda args: Parameters(**args),
            parsed.params,
        ),
    }
    for section in ("kernel1", "kernel2", "kernel3"):
        components[section] = _build(
            section,
            DelayKernel.from_config,
            getattr(parsed, section),
        )
    try:
        model = ModelSpec(**components)
    except VirodynError as e:
        section = e.message.split()[0]
        raise ScenarioError(
            section if section.startswith("kernel") else "model",
            e.message,
        ) from e

    history = HistoryFunction.from_config(parsed.history.model_dump())
    return Scenario(
        name=parsed.name or name,
        model=model,
        history=history,
        run=parsed.run,
        outputs=parsed.outputs,
        sweep=parsed.sweep,
        config=parsed.model_dump(),
    )


def load_scenario(name_or_path: str) -> Scenario:
    """Load a scenario file or a bundled scenario by name."""
    path = resolve_scenario(name_or_path)
    try:
        with open(path, "r", encoding="utf-8") as f:
            config = json.load(f)
    except json.JSONDecodeError as e:
        raise ScenarioError(
            "scenario",
            f"{path} is not valid JSON: {e}",
        ) from e
    if not isinstance(config, dict):
        raise ScenarioError("scenario", f"{path} must hold a JSON object.")

    name = os.path.splitext(os.path.basename(path))[0]
    scenario = scenario_from_config(config, name)
    logger.debug(f"Loaded scenario [{scenario.name}] from {path}.")
    return scenario
