# -*- coding: utf-8 -*-
"""Runge-Kutta integration by the method of steps.

Lagged terms are looked up in the dense output of the trajectory computed
so far. The current state of a stage (and any lag of zero) is taken from
the stage itself, other lags past the last completed point are
extrapolated from the last segment.

The classical four-stage scheme is explicit, so its step has to stay
inside the stability interval of the stiffest local mode. That mode is
estimated from the two stages taken at the midpoint of every step,

.. code-block:: text

    rho = |k3 - k2| / |(h / 2) (k2 - k1)|,

and the step is shrunk to `_STABILITY_TARGET / rho` where the system
stiffens, and let grow back to the requested step where it relaxes.
Steps land on the points where the lags of the initial jump sit.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np
from loguru import logger

from ..constants import (
    _BREAKPOINT_DEPTH,
    _DEFAULT_STEP_CAP,
    _DEFAULT_STEP_DIVISOR,
    _MIN_STEP_FRACTION,
    _POSITIVITY_FLOOR,
    _STABILITY_LIMIT,
    _STABILITY_TARGET,
    _STEP_GROWTH,
)
from ..exception import (
    DivergenceError,
    InsufficientHistoryError,
    PositivityBreachError,
)
from ..kernels import DiracKernel, QuadratureSpec
from ..model.rhs import StateEvaluator, rhs
from ..model.spec import ModelSpec
from .history import HistoryFunction
from .trajectory import Trajectory

# stage differences below this share of the state are rounding noise
_STIFFNESS_NOISE = 1e-10


def default_step(model: ModelSpec) -> float:
    """The smallest positive Dirac delay over 50, capped at 0.1."""
    delays = _dirac_delays(model)
    if not delays:
        return _DEFAULT_STEP_CAP
    return min(min(delays) / _DEFAULT_STEP_DIVISOR, _DEFAULT_STEP_CAP)


def _dirac_delays(model: ModelSpec) -> list:
    return [
        kernel.tau
        for kernel in (model.kernel1, model.kernel2, model.kernel3)
        if isinstance(kernel, DiracKernel) and kernel.tau > 0
    ]


def breakpoints(model: ModelSpec, t_end: float) -> np.ndarray:
    """Return the sums of up to four positive Dirac delays inside
    `(0, t_end)`, followed by `t_end`.

    The derivative of a solution jumps where the history meets it at
    `t = 0`; each delay carries that jump forward one derivative
    smoother.
    """
    delays = sorted(set(_dirac_delays(model)))
    points = {
        sum(combination)
        for depth in range(1, _BREAKPOINT_DEPTH + 1)
        for combination in itertools.combinations_with_replacement(
            delays,
            depth,
        )
    }
    inside = sorted(point for point in points if 0.0 < point < t_end)
    return np.array(inside + [t_end])


def _stage_evaluator(
    trajectory: Trajectory,
    t: float,
    state: np.ndarray,
) -> StateEvaluator:
    def evaluate(times: np.ndarray) -> np.ndarray:
        times = np.atleast_1d(times)
        out = trajectory(times)
        out[times == t] = state
        return out

    return evaluate


def _check_state(state: np.ndarray, t: float) -> None:
    if not np.all(np.isfinite(state)):
        raise DivergenceError("The state is not finite", t, state.tolist())
    if float(state.min()) < _POSITIVITY_FLOOR:
        raise PositivityBreachError(
            f"State component {int(state.argmin())} fell to "
            f"{float(state.min()):.6g}",
            t,
            state.tolist(),
        )


def _is_valid(state: np.ndarray) -> bool:
    return bool(
        np.all(np.isfinite(state))
        and float(state.min()) >= _POSITIVITY_FLOOR,
    )


class _Stepper:
    """One RK4 step at a time on a growing trajectory."""

    def __init__(
        self,
        model: ModelSpec,
        history: HistoryFunction,
        quad: QuadratureSpec,
    ) -> None:
        self.model = model
        self.quad = quad
        state = history(np.array([0.0]))[0]
        _check_state(state, 0.0)
        self.trajectory = Trajectory.start(
            0.0,
            state,
            np.zeros(4),
            history,
        )
        self.trajectory.set_last_derivative(self.stage(0.0, state))

    def stage(self, t: float, state: np.ndarray) -> np.ndarray:
        return rhs(
            self.model,
            t,
            _stage_evaluator(self.trajectory, t, state),
            self.quad,
        )

    def attempt(
        self,
        h: float,
    ) -> Tuple[np.ndarray, np.ndarray, Optional[float]]:
        """Return the state after a step of `h`, the slope of the last
        stage and the stiffness estimate, `None` where the stage
        differences are rounding noise."""
        trajectory = self.trajectory
        t = trajectory.t_end
        y = trajectory.final_state
        k1 = trajectory.derivatives[-1]
        k2 = self.stage(t + 0.5 * h, y + 0.5 * h * k1)
        k3 = self.stage(t + 0.5 * h, y + 0.5 * h * k2)
        k4 = self.stage(t + h, y + h * k3)
        y_next = y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)

        spread = 0.5 * h * float(np.max(np.abs(k2 - k1)))
        if spread <= _STIFFNESS_NOISE * max(1.0, float(np.abs(y).max())):
            return y_next, k4, None
        return y_next, k4, float(np.max(np.abs(k3 - k2))) / spread

    def accept(self, t: float, state: np.ndarray, slope: np.ndarray) -> None:
        # the last stage slope stands in until the point is complete
        self.trajectory.append(t, state, slope)
        self.trajectory.set_last_derivative(self.stage(t, state))


def _prepare(
    model: ModelSpec,
    history: HistoryFunction,
    quad: QuadratureSpec,
) -> None:
    tau_max = model.max_horizon(quad)
    if history.lower > -tau_max:
        raise InsufficientHistoryError(
            f"The history starts at t={history.lower:.6g}, the kernels reach "
            f"back to t={-tau_max:.6g}",
            requested=-tau_max,
            lower=history.lower,
        )


def integrate(
    model: ModelSpec,
    history: HistoryFunction,
    t_end: float,
    h: Optional[float] = None,
    quad: Optional[QuadratureSpec] = None,
    adaptive: bool = True,
) -> Trajectory:
    """Integrate the delay system on `[0, t_end]` with classical RK4.

    Args:
        model (`ModelSpec`):
            The model.
        history (`HistoryFunction`):
            The initial function, which has to cover `[-tau_max, 0]`.
        t_end (`float`):
            The final time. The step is shrunk so that it divides `t_end`.
        h (`Optional[float]`, defaults to `None`):
            The step, `default_step(model)` if not given. With `adaptive`
            it is the longest step taken.
        quad (`Optional[QuadratureSpec]`, defaults to `None`):
            The settings of the delay quadrature.
        adaptive (`bool`, defaults to `True`):
            Shrink the step to the stability interval of the stiffest local
            mode, retry steps that break positivity and land on the
            breakpoints of the delays. Otherwise every step is `h`.

    Returns:
        `Trajectory`: The solution with dense output.
    """
    quad = quad or QuadratureSpec()
    h = default_step(model) if h is None else float(h)
    if not h > 0:
        raise ValueError(f"The step must be positive, got {h}.")
    if not t_end >= h:
        raise ValueError(f"t_end must be at least the step {h}, got {t_end}.")
    _prepare(model, history, quad)

    steps = math.ceil(t_end / h - 1e-9)
    if abs(steps * h - t_end) > 1e-12 * t_end:
        logger.debug(f"Step {h:.6g} adjusted to {t_end / steps:.6g}.")
        h = t_end / steps
    if not adaptive:
        return integrate_on_grid(
            model,
            history,
            h * np.arange(steps + 1),
            quad,
        )

    stepper = _Stepper(model, history, quad)
    targets = breakpoints(model, t_end)
    h_min = _MIN_STEP_FRACTION * h
    h_try, rho_last, rejected = h, 0.0, 0
    next_report = 0.1 * t_end

    t, index = 0.0, 0
    while index < len(targets):
        target = targets[index]
        h_step = min(h_try, target - t)
        if target - (t + h_step) <= 1e-9 * max(1.0, target):
            h_step = target - t

        y_next, slope, rho = stepper.attempt(h_step)
        rho = rho_last if rho is None else rho
        if not _is_valid(y_next) or rho * h_step > _STABILITY_LIMIT:
            if h_step <= h_min:
                _check_state(y_next, t + h_step)
                raise DivergenceError(
                    f"The step fell to {h_step:.3g} against a stiffness of "
                    f"{rho:.3g}",
                    t,
                    stepper.trajectory.final_state.tolist(),
                )
            rejected += 1
            h_try = max(h_min, 0.5 * h_step)
            if rho * h_step > _STABILITY_LIMIT:
                h_try = max(h_min, min(h_try, _STABILITY_TARGET / rho))
            rho_last = rho
            continue

        landed = h_step == target - t
        t = float(target) if landed else t + h_step
        index += landed
        stepper.accept(t, y_next, slope)
        rho_last = rho

        h_try = min(h, _STEP_GROWTH * h_step)
        if rho > 0:
            h_try = min(h_try, _STABILITY_TARGET / rho)

        if t >= next_report:
            logger.debug(
                f"t={t:.6g} step={h_step:.3g} state={y_next.tolist()}",
            )
            next_report += 0.1 * t_end

    trajectory = stepper.trajectory
    logger.info(
        f"Integrated {len(trajectory) - 1} steps of h in "
        f"[{float(trajectory.steps.min()):.3g}, {trajectory.h:.3g}] up to "
        f"t={t_end:.6g}, {rejected} rejected.",
    )
    return trajectory


def integrate_on_grid(
    model: ModelSpec,
    history: HistoryFunction,
    grid: Sequence[float],
    quad: Optional[QuadratureSpec] = None,
) -> Trajectory:
    """Integrate with classical RK4 over the given grid, which starts at 0,
    taking exactly one step per grid interval."""
    quad = quad or QuadratureSpec()
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or len(grid) < 2 or grid[0] != 0.0:
        raise ValueError("The grid must start at 0 and hold two times.")
    if np.any(np.diff(grid) <= 0):
        raise ValueError("Grid times must be strictly increasing.")
    _prepare(model, history, quad)
    for kernel in (model.kernel1, model.kernel2, model.kernel3):
        if isinstance(kernel, DiracKernel) and kernel.tau > 0:
            if not np.any(np.abs(grid - kernel.tau) <= 1e-12 * kernel.tau):
                logger.debug(
                    f"Delay {kernel.tau} is off the grid, lags use the "
                    "dense output.",
                )

    stepper = _Stepper(model, history, quad)
    report_every = max((len(grid) - 1) // 10, 1)
    for i, t in enumerate(grid[1:], start=1):
        y_next, slope, _ = stepper.attempt(t - grid[i - 1])
        _check_state(y_next, t)
        stepper.accept(t, y_next, slope)
        if i % report_every == 0:
            logger.debug(f"t={t:.6g} state={y_next.tolist()}")

    logger.info(
        f"Integrated {len(grid) - 1} prescribed steps up to "
        f"t={grid[-1]:.6g}.",
    )
    return stepper.trajectory


def refine(grid: np.ndarray, factor: int) -> np.ndarray:
    """Split every interval of `grid` into `factor` equal parts."""
    grid = np.asarray(grid, dtype=float)
    fractions = np.arange(factor) / factor
    inner = grid[:-1, None] + np.diff(grid)[:, None] * fractions
    return np.append(inner.ravel(), grid[-1])


@dataclass(frozen=True)
class ConvergenceReport:
    """Max-norm differences of successive step halvings."""

    h: float
    coarse_error: float
    """Difference between the `h` and `h / 2` solutions."""

    fine_error: float
    """Difference between the `h / 2` and `h / 4` solutions."""

    @property
    def order(self) -> float:
        """The observed order `log2(coarse_error / fine_error)`."""
        if self.fine_error == 0:
            return math.inf
        return math.log2(self.coarse_error / self.fine_error)


def self_convergence(
    model: ModelSpec,
    history: HistoryFunction,
    t_end: float,
    h: float,
    quad: Optional[QuadratureSpec] = None,
) -> ConvergenceReport:
    """Estimate the order of the integrator from a run with steps up to `h`
    and from runs on its grid with every step halved and quartered,
    compared on the coarse grid."""
    coarse = integrate(model, history, t_end, h, quad)
    grid = coarse.times
    runs = [coarse] + [
        integrate_on_grid(model, history, refine(grid, factor), quad)
        for factor in (2, 4)
    ]
    coarse_error = np.max(np.abs(runs[0].states - runs[1].states[::2]))
    fine_error = np.max(np.abs(runs[1].states[::2] - runs[2].states[::4]))
    report = ConvergenceReport(h, float(coarse_error), float(fine_error))
    logger.info(
        f"Self-convergence from h={h:.6g} over {len(grid) - 1} steps: "
        f"errors {coarse_error:.3g}, {fine_error:.3g}, "
        f"order {report.order:.3f}.",
    )
    return report
