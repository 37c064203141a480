# -*- coding: utf-8 -*-
"""Initial functions on `(-inf, 0]`."""
from __future__ import annotations

from abc import ABC, abstractmethod
from typing import Dict, Sequence, Type

import numpy as np

from ..constants import _DEFAULT_HISTORY
from ..exception import InsufficientHistoryError, ScenarioError


class HistoryFunction(ABC):
    """The state of the system before the start time `t0 = 0`."""

    kind: str

    lower: float
    """The lowest time the history covers."""

    @abstractmethod
    def __call__(self, times: np.ndarray) -> np.ndarray:
        """Evaluate the history at an array of `m` times, returning an
        `(m, 4)` array."""

    @abstractmethod
    def to_config(self) -> dict:
        """Serialize the history into its config dict."""

    def _check_span(self, times: np.ndarray) -> None:
        if times.size and float(times.min()) < self.lower:
            raise InsufficientHistoryError(
                f"History is defined from t={self.lower:.6g}, but "
                f"t={float(times.min()):.6g} was requested",
                requested=float(times.min()),
                lower=self.lower,
            )

    @staticmethod
    def from_config(config: dict) -> "HistoryFunction":
        """Build a history from its config dict. An empty config gives the
        default constant history."""
        args = dict(config)
        kind = args.pop("kind", "constant")
        if kind not in _HISTORY_REGISTRY:
            raise ScenarioError(
                "history",
                f"Unknown kind [{kind}], expected one of "
                f"{sorted(_HISTORY_REGISTRY)}.",
            )
        try:
            return _HISTORY_REGISTRY[kind](**args)
        except (TypeError, ValueError) as e:
            raise ScenarioError("history", str(e)) from e


class ConstantHistory(HistoryFunction):
    """A history that is constant for all negative times."""

    kind: str = "constant"
    lower: float = -np.inf

    def __init__(self, state: Sequence[float] = _DEFAULT_HISTORY) -> None:
        self.state = np.asarray(state, dtype=float)
        if self.state.shape != (4,):
            raise ValueError(f"A state has 4 components, got {state}.")
        if not np.all(np.isfinite(self.state)) or np.any(self.state < 0):
            raise ValueError(
                f"History states must be finite and nonnegative, got {state}.",
            )

    def __call__(self, times: np.ndarray) -> np.ndarray:
        times = np.atleast_1d(np.asarray(times, dtype=float))
        return np.tile(self.state, (times.size, 1))

    def to_config(self) -> dict:
        return {"kind": self.kind, "state": self.state.tolist()}

    def __repr__(self) -> str:
        return f"ConstantHistory({self.state.tolist()})"


class PiecewiseLinearHistory(HistoryFunction):
    """A history interpolated linearly between breakpoints `t_0 < ... < 0`,
    defined on `[t_0, 0]`."""

    kind: str = "piecewise_linear"

    def __init__(
        self,
        breakpoints: Sequence[float],
        states: Sequence[Sequence[float]],
    ) -> None:
        self.breakpoints = np.asarray(breakpoints, dtype=float)
        self.states = np.asarray(states, dtype=float)
        if self.breakpoints.ndim != 1 or len(self.breakpoints) < 2:
            raise ValueError("At least two breakpoints are required.")
        if self.states.shape != (len(self.breakpoints), 4):
            raise ValueError(
                "Every breakpoint needs a state with 4 components.",
            )
        if np.any(np.diff(self.breakpoints) <= 0):
            raise ValueError("Breakpoints must be strictly ascending.")
        if self.breakpoints[-1] != 0.0:
            raise ValueError(
                f"Breakpoints must end at 0, got {self.breakpoints[-1]}.",
            )
        if not np.all(np.isfinite(self.states)) or np.any(self.states < 0):
            raise ValueError("History states must be finite and nonnegative.")
        self.lower = float(self.breakpoints[0])

    def __call__(self, times: np.ndarray) -> np.ndarray:
        times = np.atleast_1d(np.asarray(times, dtype=float))
        self._check_span(times)
        return np.column_stack(
            [
                np.interp(times, self.breakpoints, self.states[:, i])
                for i in range(4)
            ],
        )

    def to_config(self) -> dict:
        return {
            "kind": self.kind,
            "breakpoints": self.breakpoints.tolist(),
            "states": self.states.tolist(),
        }

    def __repr__(self) -> str:
        return (
            f"PiecewiseLinearHistory(lower={self.lower}, "
            f"breakpoints={len(self.breakpoints)})"
        )


_HISTORY_REGISTRY: Dict[str, Type[HistoryFunction]] = {
    ConstantHistory.kind: ConstantHistory,
    PiecewiseLinearHistory.kind: PiecewiseLinearHistory,
}
