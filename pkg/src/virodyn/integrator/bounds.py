# -*- coding: utf-8 -*-
"""The positively invariant region and the runtime checks against it."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
from loguru import logger

from ..constants import (
    _DEFAULT_BOUNDS_GRID,
    _EVENTUAL_FRACTION,
    _POSITIVITY_FLOOR,
    STATE_LABELS,
)
from ..equilibria import find_xbar
from ..exception import HypothesisError
from ..model.spec import ModelSpec
from .trajectory import Trajectory


@dataclass(frozen=True)
class StateBox:
    """The box `[0, xbar] x [0, y_max] x [0, v_max]` every solution enters,
    with the suprema it is built from."""

    x_max: float
    y_max: float
    v_max: float
    M1: float
    """Supremum of `n` on `[0, xbar]`."""

    M2: float
    """Supremum of `phi1` on `[0, y_max]`."""

    mu_bar: float
    """`min(M1 / xbar, a k1)`."""


def state_box(model: ModelSpec, grid: int = _DEFAULT_BOUNDS_GRID) -> StateBox:
    """Compute the bounds of `x`, `y` and `v` by grid maximization."""
    params = model.params
    xbar = find_xbar(model.growth)

    M1 = float(np.max(model.growth(np.linspace(0.0, xbar, grid))))
    mu_bar = min(M1 / xbar, params.a * model.phi1.k_lower)
    y_max = 2.0 * M1 * model.G1 / mu_bar
    M2 = float(np.max(model.phi1(np.linspace(0.0, y_max, grid))))
    v_max = params.k * M2 * model.G2 / params.u
    return StateBox(xbar, y_max, v_max, M1, M2, mu_bar)


@dataclass(frozen=True)
class GammaBounds:
    """The limit bounds of the four components."""

    x_max: float
    y_max: float
    v_max: float
    z_max: float
    M1: float
    M2: float
    M3: float
    """Supremum of `f(x, y, v) v` on the state box."""

    mu_bar: float
    mu_tilde: float
    """`min(a k1, b k2)`."""

    def as_array(self) -> np.ndarray:
        """The bounds in state order."""
        return np.array([self.x_max, self.y_max, self.v_max, self.z_max])


def gamma_bounds(
    model: ModelSpec,
    grid: int = _DEFAULT_BOUNDS_GRID,
) -> GammaBounds:
    """Compute the region every solution ends up in.

    Args:
        model (`ModelSpec`):
            The model.
        grid (`int`, defaults to `256`):
            Grid points per axis for the suprema of `n`, `phi1` and `f v`.

    Returns:
        `GammaBounds`: The bounds.
    """
    params = model.params
    box = state_box(model, grid)

    ys = np.linspace(0.0, box.y_max, grid)
    vs = np.linspace(0.0, box.v_max, grid)
    y_mesh, v_mesh = np.meshgrid(ys, vs, indexing="ij")
    M3 = 0.0
    # one x at a time keeps the grid in memory small
    for x in np.linspace(0.0, box.x_max, grid):
        flow = np.asarray(
            model.incidence(np.full_like(y_mesh, x), y_mesh, v_mesh),
        ) * v_mesh
        if not np.all(np.isfinite(flow)):
            raise HypothesisError(
                f"f(x, y, v) v is not finite on the state box at x={x:.6g}.",
            )
        M3 = max(M3, float(flow.max()))

    mu_tilde = min(
        params.a * model.phi1.k_lower,
        params.b * model.phi2.k_lower,
    )
    # without CTL killing nothing bounds z
    denominator = params.p * mu_tilde
    z_max = (
        params.c * model.G1 * model.G3 * M3 / denominator
        if denominator > 0
        else math.inf
    )
    bounds = GammaBounds(
        x_max=box.x_max,
        y_max=box.y_max,
        v_max=box.v_max,
        z_max=z_max,
        M1=box.M1,
        M2=box.M2,
        M3=M3,
        mu_bar=box.mu_bar,
        mu_tilde=mu_tilde,
    )
    logger.debug(f"Invariant region bounds: {bounds.as_array().tolist()}")
    return bounds


@dataclass(frozen=True)
class MonitorReport:
    """Positivity and boundedness facts of a trajectory."""

    minima: Tuple[float, ...]
    positive: bool
    """No component fell below the positivity floor."""

    first_excursions: Tuple[Optional[float], ...]
    """The first time each component exceeded its bound, if ever."""

    eventually_bounded: bool
    """All components stay below their bounds over the final stretch."""

    excursions: List[str] = field(default_factory=list)


def monitor(
    trajectory: Trajectory,
    bounds: GammaBounds,
    eventual_fraction: float = _EVENTUAL_FRACTION,
) -> MonitorReport:
    """Check positivity of a trajectory and whether it ends up inside the
    invariant region."""
    times = trajectory.times
    states = trajectory.states
    limits = bounds.as_array()

    minima = states.min(axis=0)
    above = states > limits
    first_excursions = []
    excursions = []
    for i, label in enumerate(STATE_LABELS):
        hits = np.flatnonzero(above[:, i])
        if len(hits):
            first_excursions.append(float(times[hits[0]]))
            excursions.append(
                f"{label} exceeds {limits[i]:.6g} first at "
                f"t={times[hits[0]]:.6g}",
            )
            logger.warning(excursions[-1])
        else:
            first_excursions.append(None)

    tail_start = times[0] + (1.0 - eventual_fraction) * (times[-1] - times[0])
    tail = times >= tail_start
    return MonitorReport(
        minima=tuple(float(_) for _ in minima),
        positive=bool(minima.min() >= _POSITIVITY_FLOOR),
        first_excursions=tuple(first_excursions),
        eventually_bounded=not bool(np.any(above[tail])),
        excursions=excursions,
    )


def distance_series(
    trajectory: Trajectory,
    E: Sequence[float],
) -> Tuple[np.ndarray, np.ndarray]:
    """The max-norm distance to `E` at every grid time."""
    target = np.asarray(E, dtype=float)
    return trajectory.times, np.max(
        np.abs(trajectory.states - target),
        axis=1,
    )


def relative_distance(state: Sequence[float], E: Sequence[float]) -> float:
    """`|state - E|_inf / max(1, |E|_inf)`."""
    target = np.asarray(E, dtype=float)
    return float(
        np.max(np.abs(np.asarray(state, dtype=float) - target))
        / max(1.0, float(np.max(np.abs(target)))),
    )
