# -*- coding: utf-8 -*-
"""The immutable description of a model instance."""
from __future__ import annotations

import dataclasses
import math
import numbers
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, NamedTuple

import numpy as np

from ..constants import _MASS_TOLERANCE
from ..exception import MalformedKernelError
from ..kernels import (
    DelayKernel,
    DiracKernel,
    QuadratureSpec,
    truncation_horizon,
    weighted_mass,
)
from .functions import GrowthFunction, IncidenceFunction, ResponseFunction


class State(NamedTuple):
    """A point `(x, y, v, z)` of the state space: uninfected cells, infected
    cells, free virions and CTLs."""

    x: float
    y: float
    v: float
    z: float

    def as_array(self) -> np.ndarray:
        """Return the state as a float array of length 4."""
        return np.array(self, dtype=float)


@dataclass(frozen=True)
class Parameters:
    """The rate constants of the model.

    `a`, `u`, `b` and `p` divide equilibrium formulas and have to be
    positive. `k = 0` switches virion production off and `c = 0` switches
    CTL expansion off.
    """

    a: float
    """Death rate of infected cells."""

    p: float
    """CTL killing rate."""

    k: float
    """Virion production rate."""

    u: float
    """Virion clearance rate."""

    c: float
    """CTL expansion rate."""

    b: float
    """CTL decay rate."""

    alpha1: float = 0.0
    """Death rate of cells during the infection delay."""

    alpha2: float = 0.0
    """Death rate of cells during the production delay."""

    def __post_init__(self) -> None:
        for item in dataclasses.fields(self):
            value = getattr(self, item.name)
            if not (
                isinstance(value, numbers.Real) and math.isfinite(value)
            ):
                raise ValueError(
                    f"Parameter {item.name} must be a finite number, got "
                    f"{value!r}.",
                )
            object.__setattr__(self, item.name, float(value))
        for name in ("a", "u", "b", "p"):
            if getattr(self, name) <= 0:
                raise ValueError(
                    f"Parameter {name} must be positive, got "
                    f"{getattr(self, name)}.",
                )
        for name in ("k", "c", "alpha1", "alpha2"):
            if getattr(self, name) < 0:
                raise ValueError(
                    f"Parameter {name} must be nonnegative, got "
                    f"{getattr(self, name)}.",
                )

    def to_config(self) -> dict:
        """Return the parameters as a plain dict."""
        return dataclasses.asdict(self)


@dataclass(frozen=True)
class ModelSpec:
    """A complete model: the functional ingredients, the rate constants and
    the three delay kernels.

    Args:
        growth (`GrowthFunction`):
            The growth rate `n(x)` of uninfected cells.
        incidence (`IncidenceFunction`):
            The incidence `f(x, y, v)`.
        phi1 (`ResponseFunction`):
            The response in the infected cells.
        phi2 (`ResponseFunction`):
            The response in the CTLs.
        params (`Parameters`):
            The rate constants.
        kernel1 (`DelayKernel`):
            The infection delay, a probability distribution.
        kernel2 (`DelayKernel`):
            The production delay, a probability distribution.
        kernel3 (`DelayKernel`, defaults to `DiracKernel(0)`):
            The CTL activation delay, a sub-probability distribution.
    """

    growth: GrowthFunction
    incidence: IncidenceFunction
    phi1: ResponseFunction
    phi2: ResponseFunction
    params: Parameters
    kernel1: DelayKernel
    kernel2: DelayKernel
    kernel3: DelayKernel = field(default_factory=lambda: DiracKernel(0.0))

    def __post_init__(self) -> None:
        for name in ("kernel1", "kernel2"):
            mass = getattr(self, name).mass
            if abs(mass - 1.0) > _MASS_TOLERANCE:
                raise MalformedKernelError(
                    f"{name} must be a probability distribution, its mass is "
                    f"{mass:.12g}.",
                )
        if self.kernel3.mass > 1.0 + _MASS_TOLERANCE:
            raise MalformedKernelError(
                f"kernel3 mass must not exceed one, got "
                f"{self.kernel3.mass:.12g}.",
            )

    @cached_property
    def G1(self) -> float:
        """The infection-delay survival `int f1(tau) e^{-alpha1 tau}`."""
        return weighted_mass(self.kernel1, self.params.alpha1)

    @cached_property
    def G2(self) -> float:
        """The production-delay survival `int f2(tau) e^{-alpha2 tau}`."""
        return weighted_mass(self.kernel2, self.params.alpha2)

    @cached_property
    def G3(self) -> float:
        """The mass of the CTL activation delay."""
        return weighted_mass(self.kernel3, 0.0)

    def max_horizon(self, quad: QuadratureSpec) -> float:
        """Return the largest truncation horizon of the three kernels."""
        return max(
            truncation_horizon(kernel, quad.tail_mass_epsilon)
            for kernel in (self.kernel1, self.kernel2, self.kernel3)
        )

    def with_param(self, name: str, value: Any) -> "ModelSpec":
        """Return a copy with one constant replaced.

        Args:
            name (`str`):
                Either a rate constant such as `"c"`, or a dotted path into a
                component such as `"incidence.beta"` or `"kernel1.tau"`.
            value (`Any`):
                The new value.
        """
        if "." not in name:
            if name not in {f.name for f in dataclasses.fields(Parameters)}:
                raise KeyError(f"Unknown parameter [{name}].")
            params = dataclasses.replace(self.params, **{name: value})
            return dataclasses.replace(self, params=params)

        component, key = name.split(".", 1)
        if component == "params":
            return self.with_param(key, value)
        if component not in (
            "growth",
            "incidence",
            "phi1",
            "phi2",
            "kernel1",
            "kernel2",
            "kernel3",
        ):
            raise KeyError(f"Unknown model component [{component}].")

        current = getattr(self, component)
        config = current.to_config()
        if key not in config or key == "kind":
            raise KeyError(f"{current!r} has no constant [{key}].")
        config[key] = value
        return dataclasses.replace(
            self,
            **{component: type(current).from_config(config)},
        )

    def to_config(self) -> dict:
        """Serialize the model into scenario sections. Custom functions
        cannot be serialized."""
        return {
            "growth": self.growth.to_config(),
            "incidence": self.incidence.to_config(),
            "phi1": self.phi1.to_config(),
            "phi2": self.phi2.to_config(),
            "params": self.params.to_config(),
            "kernel1": self.kernel1.to_config(),
            "kernel2": self.kernel2.to_config(),
            "kernel3": self.kernel3.to_config(),
        }
