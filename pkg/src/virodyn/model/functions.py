# -*- coding: utf-8 -*-
"""The functional ingredients of the model: the target-cell growth `n(x)`,
the incidence `f(x, y, v)` and the immune responses `phi_1`, `phi_2`.

Every family is selected in a scenario by its `kind`:

.. code-block:: python

    {"kind": "logistic_source", "lambda": 200, "d": 0.1, "r": 0.6, "K": 500}
    {"kind": "ratio_dependent", "beta": 0.003, "alpha": 0.001, "gamma": 0.001}
    {"kind": "identity"}

User functions enter through the `custom` constructors and have to pass
`validate_hypotheses` before they are used.
"""
from __future__ import annotations

from abc import ABCMeta, abstractmethod
from typing import Any, Callable, Dict, Optional, Type

import numpy as np

from ..exception import ResponseInverseError

ArrayLike = Any


class _FamilyMeta(ABCMeta):
    """A metaclass registering the built-in variants of a function family by
    their `kind`, one registry per family base class."""

    def __init__(cls, name: Any, bases: Any, attrs: Any) -> None:
        if "_type_registry" in attrs:
            pass
        elif "kind" in attrs:
            cls._type_registry[attrs["kind"]] = cls
        super().__init__(name, bases, attrs)


class _FunctionFamily(metaclass=_FamilyMeta):
    """Shared config handling of the function families."""

    _type_registry: Dict[str, Type] = {}

    kind: str
    """The name of the variant in scenario configs."""

    _config_aliases: Dict[str, str] = {}
    """Config keys that are not valid python argument names."""

    @classmethod
    def get_variant(cls, kind: str) -> Type:
        """Get the variant registered under `kind` in this family."""
        if kind not in cls._type_registry:
            raise ValueError(
                f"Unknown {cls.family} kind [{kind}], expected one of "
                f"{sorted(cls._type_registry)}.",
            )
        return cls._type_registry[kind]

    @classmethod
    def from_config(cls, config: dict) -> Any:
        """Build a variant from a config dict with a `kind` key."""
        args = dict(config)
        kind = args.pop("kind", None)
        if kind is None:
            raise ValueError(f"The {cls.family} config misses the `kind` key.")
        variant = cls.get_variant(kind)
        for key, name in variant._config_aliases.items():
            if key in args:
                args[name] = args.pop(key)
        return variant(**args)

    def to_config(self) -> dict:
        """Serialize the variant into its config dict."""
        if not hasattr(self, "kind"):
            raise ValueError(
                f"{type(self).__name__} wraps python callables and cannot "
                "be serialized.",
            )
        inverse_aliases = {v: k for k, v in self._config_aliases.items()}
        config = {"kind": self.kind}
        for name, value in self.constants().items():
            config[inverse_aliases.get(name, name)] = value
        return config

    def constants(self) -> Dict[str, float]:
        """The scalar constants of the variant."""
        return {}

    def __repr__(self) -> str:
        args = ", ".join(f"{k}={v!r}" for k, v in self.constants().items())
        return f"{type(self).__name__}({args})"


# ================================ growth ================================


class GrowthFunction(_FunctionFamily):
    """The intrinsic growth rate `n(x)` of uninfected cells."""

    _type_registry: Dict[str, Type] = {}
    family = "growth"

    @abstractmethod
    def __call__(self, x: ArrayLike) -> ArrayLike:
        """Evaluate `n(x)`, vectorized over numpy arrays."""

    @staticmethod
    def custom(func: Callable[[ArrayLike], ArrayLike]) -> "GrowthFunction":
        """Wrap a user-supplied vectorized `n(x)`."""
        return _CustomGrowth(func)


class LogisticSource(GrowthFunction):
    """`n(x) = lambda - d x + r x (1 - x / K)`."""

    kind: str = "logistic_source"
    _config_aliases = {"lambda": "lam"}

    def __init__(self, lam: float, d: float, r: float, K: float) -> None:
        if K <= 0:
            raise ValueError(f"Carrying capacity K must be positive, got {K}.")
        self.lam = float(lam)
        self.d = float(d)
        self.r = float(r)
        self.K = float(K)

    def __call__(self, x: ArrayLike) -> ArrayLike:
        return self.lam - self.d * x + self.r * x * (1.0 - x / self.K)

    def constants(self) -> Dict[str, float]:
        return {"lam": self.lam, "d": self.d, "r": self.r, "K": self.K}

    @property
    def vertex(self) -> float:
        """The maximizer `(r - d) K / (2 r)` of the parabola."""
        if self.r == 0:
            return 0.0
        return (self.r - self.d) * self.K / (2.0 * self.r)


class LinearSource(GrowthFunction):
    """`n(x) = s - d x`."""

    kind: str = "linear"

    def __init__(self, s: float, d: float) -> None:
        self.s = float(s)
        self.d = float(d)

    def __call__(self, x: ArrayLike) -> ArrayLike:
        return self.s - self.d * x

    def constants(self) -> Dict[str, float]:
        return {"s": self.s, "d": self.d}


class _CustomGrowth(GrowthFunction):
    def __init__(self, func: Callable[[ArrayLike], ArrayLike]) -> None:
        self.func = func

    def __call__(self, x: ArrayLike) -> ArrayLike:
        return self.func(x)

    def __repr__(self) -> str:
        return f"CustomGrowth({getattr(self.func, '__name__', 'func')})"


# =============================== incidence ===============================


class IncidenceFunction(_FunctionFamily):
    """The per-virion infection rate `f(x, y, v)`; new infections occur at
    rate `f(x, y, v) v`."""

    _type_registry: Dict[str, Type] = {}
    family = "incidence"

    beta: float
    """The infection rate constant shared by the built-in variants."""

    @abstractmethod
    def __call__(self, x: ArrayLike, y: ArrayLike, v: ArrayLike) -> ArrayLike:
        """Evaluate `f(x, y, v)`, vectorized over numpy arrays."""

    @staticmethod
    def custom(
        func: Callable[[ArrayLike, ArrayLike, ArrayLike], ArrayLike],
    ) -> "IncidenceFunction":
        """Wrap a user-supplied vectorized `f(x, y, v)`."""
        return _CustomIncidence(func)


class RatioDependent(IncidenceFunction):
    """`f(x, y, v) = beta x / (alpha y + gamma x)`, with `f(0, y, v) = 0`."""

    kind: str = "ratio_dependent"

    def __init__(self, beta: float, alpha: float, gamma: float) -> None:
        self.beta = float(beta)
        self.alpha = float(alpha)
        self.gamma = float(gamma)

    def __call__(self, x: ArrayLike, y: ArrayLike, v: ArrayLike) -> ArrayLike:
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            denominator = self.alpha * np.asarray(y) + self.gamma * x
            value = self.beta * x / denominator
        # the limit along x -> 0 is zero whenever the denominator stays away
        # from zero, and hypothesis i) fixes it at the corner
        value = np.where(x == 0.0, 0.0, value)
        return value if value.ndim else float(value)

    def constants(self) -> Dict[str, float]:
        return {"beta": self.beta, "alpha": self.alpha, "gamma": self.gamma}


class Saturating(IncidenceFunction):
    """`f(x, y, v) = beta x / ((1 + alpha y) (1 + gamma v))`."""

    kind: str = "saturating"

    def __init__(self, beta: float, alpha: float, gamma: float) -> None:
        self.beta = float(beta)
        self.alpha = float(alpha)
        self.gamma = float(gamma)

    def __call__(self, x: ArrayLike, y: ArrayLike, v: ArrayLike) -> ArrayLike:
        return (
            self.beta
            * x
            / ((1.0 + self.alpha * np.asarray(y)) * (1.0 + self.gamma * v))
        )

    def constants(self) -> Dict[str, float]:
        return {"beta": self.beta, "alpha": self.alpha, "gamma": self.gamma}


class Bilinear(IncidenceFunction):
    """`f(x, y, v) = beta x`, the mass-action rate."""

    kind: str = "bilinear"

    def __init__(self, beta: float) -> None:
        self.beta = float(beta)

    def __call__(self, x: ArrayLike, y: ArrayLike, v: ArrayLike) -> ArrayLike:
        x = np.broadcast_arrays(x, y, v)[0]
        value = self.beta * np.asarray(x, dtype=float)
        return value if value.ndim else float(value)

    def constants(self) -> Dict[str, float]:
        return {"beta": self.beta}


class BeddingtonDeAngelis(IncidenceFunction):
    """`f(x, y, v) = beta x / (1 + a0 x + a1 y + a2 v)`."""

    kind: str = "beddington_deangelis"

    def __init__(
        self,
        beta: float,
        a0: float = 0.0,
        a1: float = 0.0,
        a2: float = 0.0,
    ) -> None:
        self.beta = float(beta)
        self.a0 = float(a0)
        self.a1 = float(a1)
        self.a2 = float(a2)

    def __call__(self, x: ArrayLike, y: ArrayLike, v: ArrayLike) -> ArrayLike:
        return self.beta * x / (1.0 + self.a0 * x + self.a1 * y + self.a2 * v)

    def constants(self) -> Dict[str, float]:
        return {"beta": self.beta, "a0": self.a0, "a1": self.a1, "a2": self.a2}


class _CustomIncidence(IncidenceFunction):
    def __init__(
        self,
        func: Callable[[ArrayLike, ArrayLike, ArrayLike], ArrayLike],
    ) -> None:
        self.func = func

    def __call__(self, x: ArrayLike, y: ArrayLike, v: ArrayLike) -> ArrayLike:
        return self.func(x, y, v)

    def __repr__(self) -> str:
        return f"CustomIncidence({getattr(self.func, '__name__', 'func')})"


# =============================== responses ===============================


class ResponseFunction(_FunctionFamily):
    """A strictly increasing response `phi` with `phi(0) = 0` and
    `phi(y) >= k_lower y`."""

    _type_registry: Dict[str, Type] = {}
    family = "phi"

    k_lower: float
    """The lower-slope constant of H2."""

    @abstractmethod
    def __call__(self, y: ArrayLike) -> ArrayLike:
        """Evaluate `phi(y)`."""

    @abstractmethod
    def inverse(self, w: ArrayLike) -> ArrayLike:
        """Evaluate `phi^{-1}(w)` for `w >= 0`."""

    def _check_domain(self, w: ArrayLike) -> None:
        if np.any(np.asarray(w) < 0) or not np.all(np.isfinite(w)):
            raise ResponseInverseError(
                f"{self!r} inverse is defined on [0, inf), got {w}.",
            )

    @staticmethod
    def custom(
        func: Callable[[ArrayLike], ArrayLike],
        inverse: Callable[[ArrayLike], ArrayLike],
        k_lower: Optional[float] = None,
    ) -> "ResponseFunction":
        """Wrap a user-supplied response and its inverse. The lower slope is
        estimated as the grid minimum of `phi(y) / y` if not given."""
        return _CustomResponse(func, inverse, k_lower)


class Identity(ResponseFunction):
    """`phi(y) = y`."""

    kind: str = "identity"
    k_lower: float = 1.0

    def __call__(self, y: ArrayLike) -> ArrayLike:
        return y

    def inverse(self, w: ArrayLike) -> ArrayLike:
        self._check_domain(w)
        return w


class Quadratic(ResponseFunction):
    """`phi(y) = y + q y^2`, a response with accelerating saturation-free
    growth."""

    kind: str = "quadratic"
    k_lower: float = 1.0

    def __init__(self, q: float) -> None:
        if q < 0:
            raise ValueError(f"q must be nonnegative, got {q}.")
        self.q = float(q)

    def __call__(self, y: ArrayLike) -> ArrayLike:
        return y + self.q * np.asarray(y) * y

    def inverse(self, w: ArrayLike) -> ArrayLike:
        self._check_domain(w)
        if self.q == 0:
            return w
        w = np.asarray(w, dtype=float)
        # the stable root of q y^2 + y - w = 0
        value = 2.0 * w / (1.0 + np.sqrt(1.0 + 4.0 * self.q * w))
        return value if value.ndim else float(value)

    def constants(self) -> Dict[str, float]:
        return {"q": self.q}


class _CustomResponse(ResponseFunction):
    _SLOPE_GRID = np.logspace(-6, 6, 256)

    def __init__(
        self,
        func: Callable[[ArrayLike], ArrayLike],
        inverse: Callable[[ArrayLike], ArrayLike],
        k_lower: Optional[float] = None,
    ) -> None:
        self.func = func
        self._inverse = inverse
        if k_lower is None:
            k_lower = float(
                np.min(np.asarray(func(self._SLOPE_GRID)) / self._SLOPE_GRID),
            )
        self.k_lower = k_lower

    def __call__(self, y: ArrayLike) -> ArrayLike:
        return self.func(y)

    def inverse(self, w: ArrayLike) -> ArrayLike:
        self._check_domain(w)
        return self._inverse(w)

    def __repr__(self) -> str:
        return f"CustomResponse({getattr(self.func, '__name__', 'func')})"
