# -*- coding: utf-8 -*-
"""Integration of the delay system and the checks of its solutions."""
from .history import ConstantHistory, HistoryFunction, PiecewiseLinearHistory
from .trajectory import Trajectory
from .solver import (
    ConvergenceReport,
    breakpoints,
    default_step,
    integrate,
    integrate_on_grid,
    refine,
    self_convergence,
)
from .bounds import (
    GammaBounds,
    MonitorReport,
    StateBox,
    distance_series,
    gamma_bounds,
    monitor,
    relative_distance,
    state_box,
)

__all__ = [
    "HistoryFunction",
    "ConstantHistory",
    "PiecewiseLinearHistory",
    "Trajectory",
    "integrate",
    "integrate_on_grid",
    "refine",
    "breakpoints",
    "default_step",
    "self_convergence",
    "ConvergenceReport",
    "GammaBounds",
    "MonitorReport",
    "StateBox",
    "gamma_bounds",
    "state_box",
    "monitor",
    "distance_series",
    "relative_distance",
]
