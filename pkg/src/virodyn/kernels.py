# -*- coding: utf-8 -*-
"""Delay distributions and their weighted convolutions.

A kernel is configured by its `kind`, in the same way a model wrapper is
picked by its `model_type`:

.. code-block:: python

    {"kind": "dirac", "tau": 5.0}
    {"kind": "gamma", "shape": 2, "rate": 0.5}
    {"kind": "table", "nodes": [0, 1, 2], "densities": [0, 1, 0]}

The infinite upper limit of every delay integral is replaced by the horizon
returned by `truncation_horizon`, beyond which the kernel carries at most
`tail_mass_epsilon` of its mass.
"""
from __future__ import annotations

import math
from abc import ABCMeta, abstractmethod
from dataclasses import dataclass
from typing import Any, Callable, Dict, Optional, Sequence, Tuple, Type, Union

import numpy as np
from scipy import stats
from scipy.integrate import trapezoid
from scipy.optimize import brentq
from scipy.special import gammaincc

from .constants import (
    _DEFAULT_PANELS,
    _DEFAULT_TAIL_EPSILON,
    _MASS_TOLERANCE,
    _MIN_PANELS,
)
from .exception import MalformedKernelError
from .utils.quadrature import simpson_rule

HistoryEvaluator = Callable[[np.ndarray], Union[np.ndarray, float]]


@dataclass(frozen=True)
class QuadratureSpec:
    """Settings of the composite rule used for delay integrals."""

    tail_mass_epsilon: float = _DEFAULT_TAIL_EPSILON
    """Kernel mass allowed beyond the truncation horizon."""

    panels: int = _DEFAULT_PANELS
    """Number of Simpson sub-intervals of `[0, tau_max]`."""

    def __post_init__(self) -> None:
        if not 0.0 < self.tail_mass_epsilon < 1.0:
            raise ValueError(
                "tail_mass_epsilon must lie in (0, 1), got "
                f"{self.tail_mass_epsilon}.",
            )
        if self.panels < _MIN_PANELS:
            raise ValueError(
                f"At least {_MIN_PANELS} panels are required, got "
                f"{self.panels}.",
            )
        if self.panels % 2:
            # Simpson needs pairs of panels
            object.__setattr__(self, "panels", self.panels + 1)


class _KernelMeta(ABCMeta):
    """A metaclass registering every concrete kernel by its `kind`."""

    def __init__(cls, name: Any, bases: Any, attrs: Any) -> None:
        if not hasattr(cls, "_type_registry"):
            cls._type_registry = {}
        elif "kind" in attrs:
            cls._type_registry[attrs["kind"]] = cls
        super().__init__(name, bases, attrs)


class DelayKernel(metaclass=_KernelMeta):
    """The base class of delay distributions `f(tau)` on `[0, inf)`."""

    kind: str
    """The name of the kernel variant in scenario configs."""

    _type_registry: Dict[str, Type["DelayKernel"]]

    def __init__(self) -> None:
        # memo of quadrature rules keyed by (alpha, quad)
        self._rules: Dict[Tuple[float, QuadratureSpec], Tuple] = {}

    @classmethod
    def get_kernel(cls, kind: str) -> Type["DelayKernel"]:
        """Get the kernel class registered under `kind`."""
        if kind not in cls._type_registry:
            raise MalformedKernelError(
                f"Unknown kernel kind [{kind}], expected one of "
                f"{sorted(cls._type_registry)}.",
            )
        return cls._type_registry[kind]

    @classmethod
    def from_config(cls, config: dict) -> "DelayKernel":
        """Build a kernel from a config dict with a `kind` key."""
        args = dict(config)
        kind = args.pop("kind", None)
        if kind is None:
            raise MalformedKernelError("Kernel config misses the `kind` key.")
        return cls.get_kernel(kind)(**args)

    @property
    @abstractmethod
    def mass(self) -> float:
        """The total mass `int f(tau) dtau`."""

    @abstractmethod
    def to_config(self) -> dict:
        """Serialize the kernel into its config dict."""

    @abstractmethod
    def closed_form_mass(self, alpha: float) -> Optional[float]:
        """Return the closed-form weighted mass, or `None` if the kernel has
        no closed form."""

    @abstractmethod
    def horizon(self, epsilon: float) -> float:
        """Return the truncation horizon for the tail mass `epsilon`."""

    @abstractmethod
    def _build_rule(
        self,
        alpha: float,
        quad: QuadratureSpec,
    ) -> Tuple[np.ndarray, np.ndarray]:
        """Return the delays and weights `f(tau) e^{-alpha tau} w_i`."""

    @property
    def is_instantaneous(self) -> bool:
        """Whether the kernel is the point mass at zero delay."""
        return False

    def quadrature_rule(
        self,
        alpha: float,
        quad: QuadratureSpec,
    ) -> Tuple[np.ndarray, np.ndarray]:
        """Return the delays and the weights approximating
        `int_0^tau_max f(tau) e^{-alpha tau} g(t - tau) dtau` as
        `sum(weights * g(t - delays))`."""
        key = (float(alpha), quad)
        if key not in self._rules:
            self._rules[key] = self._build_rule(float(alpha), quad)
        return self._rules[key]

    def __repr__(self) -> str:
        args = ", ".join(f"{k}={v!r}" for k, v in self.to_config().items())
        return f"{type(self).__name__}({args})"


class DiracKernel(DelayKernel):
    """The point mass at a single delay `tau`."""

    kind: str = "dirac"

    def __init__(self, tau: float) -> None:
        super().__init__()
        tau = float(tau)
        if not math.isfinite(tau) or tau < 0:
            raise MalformedKernelError(
                f"Dirac delay must be finite and nonnegative, got {tau}.",
            )
        self.tau = tau

    @property
    def mass(self) -> float:
        return 1.0

    @property
    def is_instantaneous(self) -> bool:
        return self.tau == 0.0

    def to_config(self) -> dict:
        return {"kind": self.kind, "tau": self.tau}

    def closed_form_mass(self, alpha: float) -> float:
        return math.exp(-alpha * self.tau)

    def horizon(self, epsilon: float) -> float:
        return self.tau

    def _build_rule(
        self,
        alpha: float,
        quad: QuadratureSpec,
    ) -> Tuple[np.ndarray, np.ndarray]:
        return (
            np.array([self.tau]),
            np.array([self.closed_form_mass(alpha)]),
        )


class GammaKernel(DelayKernel):
    """The gamma (Erlang) density `rate^n tau^{n-1} e^{-rate tau} / (n-1)!`."""

    kind: str = "gamma"

    def __init__(self, shape: int, rate: float) -> None:
        super().__init__()
        if int(shape) != shape or shape < 1:
            raise MalformedKernelError(
                f"Gamma shape must be a positive integer, got {shape}.",
            )
        rate = float(rate)
        if not math.isfinite(rate) or rate <= 0:
            raise MalformedKernelError(
                f"Gamma rate must be positive and finite, got {rate}.",
            )
        self.shape = int(shape)
        self.rate = rate

    @property
    def mass(self) -> float:
        return 1.0

    def to_config(self) -> dict:
        return {"kind": self.kind, "shape": self.shape, "rate": self.rate}

    def density(self, tau: np.ndarray) -> np.ndarray:
        """Evaluate the gamma density."""
        return stats.gamma.pdf(tau, self.shape, scale=1.0 / self.rate)

    def closed_form_mass(self, alpha: float) -> float:
        return (self.rate / (self.rate + alpha)) ** self.shape

    def horizon(self, epsilon: float) -> float:
        # regularized upper incomplete gamma is the tail mass beyond tau
        def tail(tau: float) -> float:
            return float(gammaincc(self.shape, self.rate * tau)) - epsilon

        upper = self.shape / self.rate
        while tail(upper) > 0:
            upper *= 2.0
        return brentq(tail, 0.0, upper, xtol=1e-12, rtol=1e-14, maxiter=500)

    def _build_rule(
        self,
        alpha: float,
        quad: QuadratureSpec,
    ) -> Tuple[np.ndarray, np.ndarray]:
        horizon = self.horizon(quad.tail_mass_epsilon)
        delays, weights = simpson_rule(0.0, horizon, quad.panels)
        weights = weights * self.density(delays) * np.exp(-alpha * delays)
        total = weights.sum()
        if not np.isfinite(total) or total <= 0:
            raise MalformedKernelError(
                f"Quadrature of {self!r} is not finite.",
            )
        # rescale to the closed-form mass, absorbing the truncated tail
        return delays, weights * (self.closed_form_mass(alpha) / total)


class TabulatedKernel(DelayKernel):
    """A piecewise-linear density given at ascending nodes."""

    kind: str = "table"

    def __init__(
        self,
        nodes: Sequence[float],
        densities: Sequence[float],
        mass: Optional[float] = None,
    ) -> None:
        super().__init__()
        self.nodes = np.asarray(nodes, dtype=float)
        self.densities = np.asarray(densities, dtype=float)

        if self.nodes.ndim != 1 or self.nodes.shape != self.densities.shape:
            raise MalformedKernelError(
                "Tabulated kernel needs 1-d nodes and densities of equal "
                "length.",
            )
        if len(self.nodes) < 2:
            raise MalformedKernelError(
                "Tabulated kernel needs at least two nodes.",
            )
        if not (
            np.all(np.isfinite(self.nodes))
            and np.all(np.isfinite(self.densities))
        ):
            raise MalformedKernelError("Tabulated kernel has non-finite data.")
        if self.nodes[0] < 0 or np.any(np.diff(self.nodes) <= 0):
            raise MalformedKernelError(
                "Tabulated nodes must be nonnegative and strictly ascending.",
            )
        if np.any(self.densities < 0):
            raise MalformedKernelError(
                "Tabulated densities must be nonnegative.",
            )

        integrated = float(trapezoid(self.densities, self.nodes))
        if mass is not None and abs(integrated - mass) > _MASS_TOLERANCE:
            raise MalformedKernelError(
                f"Tabulated densities integrate to {integrated:.12g}, "
                f"which differs from the stored mass {mass}.",
            )
        if not 0.0 < integrated <= 1.0 + _MASS_TOLERANCE:
            raise MalformedKernelError(
                f"Tabulated mass must lie in (0, 1], got {integrated:.12g}.",
            )
        self._mass = integrated

    @property
    def mass(self) -> float:
        return self._mass

    def to_config(self) -> dict:
        return {
            "kind": self.kind,
            "nodes": self.nodes.tolist(),
            "densities": self.densities.tolist(),
            "mass": self._mass,
        }

    def closed_form_mass(self, alpha: float) -> None:
        return None

    def horizon(self, epsilon: float) -> float:
        return float(self.nodes[-1])

    def _build_rule(
        self,
        alpha: float,
        quad: QuadratureSpec,
    ) -> Tuple[np.ndarray, np.ndarray]:
        # composite Simpson inside every node interval, so that the kinks of
        # the interpolated density sit on panel boundaries
        widths = np.diff(self.nodes)
        span = self.nodes[-1] - self.nodes[0]
        counts = 2 * np.ceil(0.5 * quad.panels * widths / span).astype(int)
        rules = [
            simpson_rule(lower, upper, int(count))
            for lower, upper, count in zip(
                self.nodes[:-1],
                self.nodes[1:],
                counts,
            )
        ]
        delays, inverse = np.unique(
            np.concatenate([nodes for nodes, _ in rules]),
            return_inverse=True,
        )
        weights = np.bincount(
            inverse,
            weights=np.concatenate([weights for _, weights in rules]),
        )
        densities = np.interp(delays, self.nodes, self.densities)
        return delays, weights * densities * np.exp(-alpha * delays)


def weighted_mass(kernel: DelayKernel, alpha: float) -> float:
    """Compute `int_0^inf f(tau) e^{-alpha tau} dtau`.

    Args:
        kernel (`DelayKernel`):
            The delay distribution.
        alpha (`float`):
            The nonnegative attenuation exponent.

    Returns:
        `float`: The weighted mass, closed form for Dirac and gamma kernels.
    """
    if alpha < 0:
        raise ValueError(f"alpha must be nonnegative, got {alpha}.")

    value = kernel.closed_form_mass(alpha)
    if value is None:
        _, weights = kernel.quadrature_rule(alpha, QuadratureSpec())
        value = float(weights.sum())

    if not math.isfinite(value):
        raise MalformedKernelError(
            f"Weighted mass of {kernel!r} at alpha={alpha} is not finite.",
        )
    return value


def truncation_horizon(kernel: DelayKernel, epsilon: float) -> float:
    """Return `tau_max` such that the kernel mass beyond it is at most
    `epsilon`."""
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}.")
    return kernel.horizon(epsilon)


def weighted_convolve(
    kernel: DelayKernel,
    alpha: float,
    g: HistoryEvaluator,
    t: float,
    quad: Optional[QuadratureSpec] = None,
) -> float:
    """Compute `int_0^tau_max f(tau) e^{-alpha tau} g(t - tau) dtau`.

    Args:
        kernel (`DelayKernel`):
            The delay distribution.
        alpha (`float`):
            The attenuation exponent.
        g (`HistoryEvaluator`):
            A vectorized evaluator of the history, which raises
            `InsufficientHistoryError` outside of its span.
        t (`float`):
            The current time.
        quad (`Optional[QuadratureSpec]`, defaults to `None`):
            The quadrature settings, defaults to `QuadratureSpec()`.

    Returns:
        `float`: The weighted convolution.
    """
    if isinstance(kernel, DiracKernel):
        return math.exp(-alpha * kernel.tau) * float(
            np.asarray(g(np.array([t - kernel.tau])), dtype=float).ravel()[0],
        )

    delays, weights = kernel.quadrature_rule(alpha, quad or QuadratureSpec())
    values = np.broadcast_to(
        np.asarray(g(t - delays), dtype=float),
        delays.shape,
    )
    return float(np.dot(weights, values))
