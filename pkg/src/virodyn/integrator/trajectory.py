# -*- coding: utf-8 -*-
"""A solution on a grid of steps with cubic Hermite dense output."""
from __future__ import annotations

import os
from typing import Optional, Union

import numpy as np

from ..constants import STATE_LABELS
from ..exception import InsufficientHistoryError
from .history import ConstantHistory, HistoryFunction


def hermite_blend(
    theta: np.ndarray,
    left: np.ndarray,
    left_slope: np.ndarray,
    right: np.ndarray,
    right_slope: np.ndarray,
    h: Union[float, np.ndarray],
) -> np.ndarray:
    """Evaluate the cubic Hermite interpolant of segments of length `h` at
    the relative positions `theta` (one per row). `h` is a scalar or holds
    one length per row."""
    theta = theta[:, None]
    h = np.reshape(h, (-1, 1)) if np.ndim(h) else h
    theta2 = theta * theta
    theta3 = theta2 * theta
    return (
        (2.0 * theta3 - 3.0 * theta2 + 1.0) * left
        + (theta3 - 2.0 * theta2 + theta) * h * left_slope
        + (3.0 * theta2 - 2.0 * theta3) * right
        + (theta3 - theta2) * h * right_slope
    )


class Trajectory:
    """States and derivatives at increasing grid times `t_0 < ... < t_N`,
    with the history attached for `t < t_0`.

    While the solver runs only the first `completed + 1` points are valid;
    times beyond the last completed point are extrapolated from the last
    segment. The buffers grow as the solver appends points.
    """

    def __init__(
        self,
        times: np.ndarray,
        states: np.ndarray,
        derivatives: np.ndarray,
        history: HistoryFunction,
        completed: Optional[int] = None,
    ) -> None:
        times = np.asarray(times, dtype=float)
        states = np.asarray(states, dtype=float)
        derivatives = np.asarray(derivatives, dtype=float)
        if states.ndim != 2 or states.shape[1] != 4:
            raise ValueError("States must have shape (N + 1, 4).")
        if derivatives.shape != states.shape:
            raise ValueError("Derivatives must match the states in shape.")
        if times.shape != (len(states),):
            raise ValueError("There must be one time per state.")
        self.completed = len(states) - 1 if completed is None else completed
        if np.any(np.diff(times[: self.completed + 1]) <= 0):
            raise ValueError("Grid times must be strictly increasing.")
        self._times = times
        self._states = states
        self._derivatives = derivatives
        self.history = history

    @classmethod
    def uniform(
        cls,
        t0: float,
        h: float,
        states: np.ndarray,
        derivatives: np.ndarray,
        history: HistoryFunction,
    ) -> "Trajectory":
        """A trajectory on the grid `t0 + i h`."""
        if not h > 0:
            raise ValueError(f"The step must be positive, got {h}.")
        times = t0 + h * np.arange(len(states))
        return cls(times, states, derivatives, history)

    @classmethod
    def start(
        cls,
        t0: float,
        state: np.ndarray,
        derivative: np.ndarray,
        history: HistoryFunction,
        capacity: int = 1024,
    ) -> "Trajectory":
        """An empty trajectory holding only its first point, to be extended
        with `append`."""
        capacity = max(int(capacity), 2)
        times = np.zeros(capacity)
        states = np.zeros((capacity, 4))
        derivatives = np.zeros((capacity, 4))
        times[0], states[0], derivatives[0] = t0, state, derivative
        return cls(times, states, derivatives, history, 0)

    # ------------------------------------------------------------- views

    @property
    def times(self) -> np.ndarray:
        """The completed grid times."""
        return self._times[: self.completed + 1]

    @property
    def states(self) -> np.ndarray:
        """The completed grid states, shape `(N + 1, 4)`."""
        return self._states[: self.completed + 1]

    @property
    def derivatives(self) -> np.ndarray:
        """The right-hand side at the completed grid points."""
        return self._derivatives[: self.completed + 1]

    @property
    def steps(self) -> np.ndarray:
        """The lengths of the completed segments."""
        return np.diff(self.times)

    @property
    def h(self) -> float:
        """The longest completed step."""
        if self.completed == 0:
            return 0.0
        return float(self.steps.max())

    @property
    def t0(self) -> float:
        """The first grid time."""
        return float(self._times[0])

    @property
    def t_end(self) -> float:
        """The last completed time."""
        return float(self._times[self.completed])

    @property
    def final_state(self) -> np.ndarray:
        """The state at `t_end`."""
        return self._states[self.completed].copy()

    @property
    def lower(self) -> float:
        """The lowest time covered, taken from the history."""
        return self.history.lower

    def __len__(self) -> int:
        return self.completed + 1

    # ------------------------------------------------------------ extend

    def append(
        self,
        t: float,
        state: np.ndarray,
        derivative: np.ndarray,
    ) -> None:
        """Complete one more grid point."""
        n = self.completed + 1
        if not t > self._times[self.completed]:
            raise ValueError(
                f"t={t} does not follow the last point "
                f"t={self._times[self.completed]}.",
            )
        if n == len(self._times):
            self._times = np.concatenate([self._times, np.zeros(n)])
            self._states = np.concatenate([self._states, np.zeros((n, 4))])
            self._derivatives = np.concatenate(
                [self._derivatives, np.zeros((n, 4))],
            )
        self._times[n] = t
        self._states[n] = state
        self._derivatives[n] = derivative
        self.completed = n

    def set_last_derivative(self, derivative: np.ndarray) -> None:
        """Overwrite the derivative at the last completed point."""
        self._derivatives[self.completed] = derivative

    # ---------------------------------------------------------- evaluate

    def __call__(self, times: np.ndarray) -> np.ndarray:
        """Evaluate at an array of `m` times, returning `(m, 4)` states."""
        times = np.atleast_1d(np.asarray(times, dtype=float))
        past = times < self._times[0]
        if not np.any(past):
            return self._dense(times)

        out = np.empty((times.size, 4))
        out[past] = self.history(times[past])
        ahead = ~past
        if np.any(ahead):
            out[ahead] = self._dense(times[ahead])
        return out

    def evaluate(self, t: Union[float, np.ndarray]) -> np.ndarray:
        """Evaluate the dense output at a scalar time, giving a state, or at
        an array of times, giving one row per time."""
        if np.ndim(t) == 0:
            return self(np.array([t]))[0]
        return self(np.asarray(t))

    def _dense(self, times: np.ndarray) -> np.ndarray:
        n = self.completed
        if n == 0:
            # no segment yet, extend linearly from the start
            return self._states[0] + np.outer(
                times - self._times[0],
                self._derivatives[0],
            )

        grid = self._times[: n + 1]
        index = np.searchsorted(grid, times, side="right") - 1
        index = np.clip(index, 0, n - 1)
        left = grid[index]
        h = grid[index + 1] - left
        return hermite_blend(
            (times - left) / h,
            self._states[index],
            self._derivatives[index],
            self._states[index + 1],
            self._derivatives[index + 1],
            h,
        )

    def require(self, lower: float, upper: float) -> None:
        """Check that `[lower, upper]` lies inside the covered span."""
        if lower < self.lower:
            raise InsufficientHistoryError(
                f"The window [{lower:.6g}, {upper:.6g}] starts before the "
                f"history at t={self.lower:.6g}",
                requested=lower,
                lower=self.lower,
            )
        if upper > self.t_end + 1e-12 * max(1.0, abs(self.t_end)):
            raise InsufficientHistoryError(
                f"The window [{lower:.6g}, {upper:.6g}] ends after the "
                f"trajectory at t={self.t_end:.6g}",
                requested=upper,
                lower=self.lower,
            )

    # --------------------------------------------------------------- I/O

    def to_csv(self, path: str) -> None:
        """Write the grid as CSV with the header `t,x,y,v,z`."""
        dirname = os.path.dirname(path)
        if dirname:
            os.makedirs(dirname, exist_ok=True)
        np.savetxt(
            path,
            np.column_stack([self.times, self.states]),
            delimiter=",",
            header=",".join(("t",) + STATE_LABELS),
            comments="",
            fmt="%.17g",
        )

    @classmethod
    def read_csv(
        cls,
        path: str,
        history: Optional[HistoryFunction] = None,
    ) -> "Trajectory":
        """Read a trajectory written by `to_csv`. The derivatives are not
        stored and are recovered by finite differences, so dense output of a
        re-read trajectory is an approximation."""
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        times, states = data[:, 0], data[:, 1:]
        if len(times) < 2:
            raise ValueError(f"{path} holds fewer than two grid points.")
        derivatives = np.gradient(states, times, axis=0)
        return cls(
            times,
            states,
            derivatives,
            history or ConstantHistory(states[0]),
        )

    def __repr__(self) -> str:
        return (
            f"Trajectory(t0={self.t0}, t_end={self.t_end}, h={self.h}, "
            f"points={len(self)})"
        )
