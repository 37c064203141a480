# -*- coding: utf-8 -*-
"""Reproduction numbers, equilibria and the regime classification.

With `G(x) = f(x, y(x), v(x)) - a u / (k G1 G2)` along the curve
`y(x) = phi1^{-1}(n(x) G1 / a)`, `v(x) = k n(x) G1 G2 / (a u)` the
CTL-inactivated equilibrium is the root of `G` in `(0, xbar)`. The
CTL-activated equilibrium sits at the CTL set point
`y_hat = phi1^{-1}(b / (c G3))`, `v_hat = k phi1(y_hat) G2 / u` with `x_hat`
the root of `H(x) = n(x) - f(x, y_hat, v_hat) v_hat`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from loguru import logger
from scipy.optimize import brentq

from .constants import (
    _DEFAULT_BOUNDS_GRID,
    _DEFAULT_ROOT_MAXITER,
    _DEFAULT_ROOT_XTOL,
    _NEAR_THRESHOLD_BAND,
    Regime,
)
from .exception import BracketError, H1ViolationError, SolverError
from .model.functions import GrowthFunction
from .model.spec import ModelSpec, State

_MAX_DOUBLINGS = 64
# |H(xbar)| below this share of max(1, n(0)) is a root at xbar
_ENDPOINT_TOLERANCE = 1e-10


def _bracketed_root(
    func: Callable[[float], float],
    lower: float,
    upper: float,
    name: str,
) -> float:
    """Find the root of `func` in `[lower, upper]` with Brent's method, which
    refines bisection by secant and inverse quadratic steps."""
    values = (float(func(lower)), float(func(upper)))
    if values[0] == 0.0:
        return lower
    if values[1] == 0.0:
        return upper
    if not all(math.isfinite(_) for _ in values) or values[0] * values[1] > 0:
        raise BracketError(
            f"{name} has no sign change on [{lower:.6g}, {upper:.6g}]",
            values,
        )
    try:
        return brentq(
            func,
            lower,
            upper,
            xtol=_DEFAULT_ROOT_XTOL,
            maxiter=_DEFAULT_ROOT_MAXITER,
        )
    except RuntimeError as e:
        raise SolverError(f"{name} root search failed: {e}") from e


def _exceeds_one(value: float, name: str, warnings: List[str]) -> bool:
    """Compare a reproduction number with one by the weak inequality, with a
    warning inside the near-threshold band."""
    if abs(value - 1.0) < _NEAR_THRESHOLD_BAND:
        message = (
            f"{name} = {value:.12g} is within {_NEAR_THRESHOLD_BAND:g} of the "
            "threshold, classified as not exceeding one"
        )
        logger.warning(message)
        warnings.append(message)
        return False
    return value > 1.0


# ============================ infection-free ============================


def find_xbar(growth: GrowthFunction, upper_hint: float = 1.0) -> float:
    """Find the positive root `xbar` of the growth rate.

    Args:
        growth (`GrowthFunction`):
            The growth rate `n(x)`, positive at zero.
        upper_hint (`float`, defaults to `1.0`):
            The first upper end of the bracket, doubled until `n` changes
            sign.

    Returns:
        `float`: The root `xbar`.
    """
    n0 = float(growth(0.0))
    if not n0 > 0:
        raise H1ViolationError(f"n(0) = {n0:.6g} is not positive.")
    if upper_hint <= 0:
        raise ValueError(f"upper_hint must be positive, got {upper_hint}.")

    upper = float(upper_hint)
    for _ in range(_MAX_DOUBLINGS):
        value = float(growth(upper))
        if not math.isfinite(value):
            raise H1ViolationError(f"n({upper:.6g}) is not finite.")
        if value <= 0:
            break
        upper *= 2.0
    else:
        raise H1ViolationError(
            f"n(x) stays positive up to x = {upper:.6g}, no root found.",
        )

    try:
        return _bracketed_root(growth, 0.0, upper, "n(x)")
    except SolverError as e:
        raise H1ViolationError(e.message) from e


def compute_R0(model: ModelSpec, xbar: Optional[float] = None) -> float:
    """The basic reproduction number `k G1 G2 f(xbar, 0, 0) / (a u)`."""
    if xbar is None:
        xbar = find_xbar(model.growth)
    params = model.params
    return (
        params.k
        * model.G1
        * model.G2
        * float(model.incidence(xbar, 0.0, 0.0))
        / (params.a * params.u)
    )


# ============================ CTL-inactivated ============================


def _inactivated_curve(
    model: ModelSpec,
    x: float,
) -> Tuple[float, float]:
    """The `(y, v)` a CTL-free equilibrium with first component `x` must
    have."""
    params = model.params
    # n may dip below zero by rounding at xbar
    source = max(float(model.growth(x)), 0.0)
    y = float(model.phi1.inverse(source * model.G1 / params.a))
    v = params.k * source * model.G1 * model.G2 / (params.a * params.u)
    return y, v


def solve_E1(
    model: ModelSpec,
    R0: Optional[float] = None,
    xbar: Optional[float] = None,
) -> Optional[State]:
    """Solve for the CTL-inactivated infection equilibrium.

    Returns:
        `Optional[State]`: The equilibrium `(x1, y1, v1, 0)`, or `None`
        if `R0 <= 1`.
    """
    if xbar is None:
        xbar = find_xbar(model.growth)
    if R0 is None:
        R0 = compute_R0(model, xbar)
    if not _exceeds_one(R0, "R0", []):
        return None

    params = model.params
    target = params.a * params.u / (params.k * model.G1 * model.G2)

    def curve_gap(x: float) -> float:
        y, v = _inactivated_curve(model, x)
        return float(model.incidence(x, y, v)) - target

    x1 = _bracketed_root(curve_gap, 0.0, xbar, "G(x)")
    y1, _ = _inactivated_curve(model, x1)
    v1 = params.k * model.G2 * float(model.phi1(y1)) / params.u
    return State(x1, y1, v1, 0.0)


def compute_RCTL(model: ModelSpec, E1: Optional[State]) -> float:
    """The CTL reproduction number `c G3 phi1(y1) / b` at `E1`."""
    if E1 is None:
        raise ValueError("R_CTL is defined at an existing E1 only.")
    params = model.params
    return params.c * model.G3 * float(model.phi1(E1.y)) / params.b


# ============================= CTL-activated =============================


@dataclass(frozen=True)
class CtlSetPoint:
    """The point `(x_hat, y_hat, v_hat)` where the CTL response balances."""

    x: float
    y: float
    v: float


def ctl_set_point(
    model: ModelSpec,
    xbar: Optional[float] = None,
) -> Optional[CtlSetPoint]:
    """Locate the CTL set point, or return `None` when `c = 0` leaves the
    CTLs without expansion."""
    if xbar is None:
        xbar = find_xbar(model.growth)
    params = model.params
    if params.c == 0:
        return None

    y_hat = float(model.phi1.inverse(params.b / (params.c * model.G3)))
    v_hat = params.k * float(model.phi1(y_hat)) * model.G2 / params.u

    def balance(x: float) -> float:
        return float(model.growth(x)) - float(
            model.incidence(x, y_hat, v_hat),
        ) * v_hat

    # n(xbar) = 0, so H(xbar) = -f v_hat vanishes without incidence
    scale = max(1.0, abs(float(model.growth(0.0))))
    if abs(balance(xbar)) <= _ENDPOINT_TOLERANCE * scale:
        x_hat = xbar
    else:
        x_hat = _bracketed_root(balance, 0.0, xbar, "H(x)")
    return CtlSetPoint(x_hat, y_hat, v_hat)


def compute_R1(
    model: ModelSpec,
    xbar: Optional[float] = None,
    set_point: Optional[CtlSetPoint] = None,
) -> float:
    """The viral reproduction number `k G1 G2 f(x_hat, y_hat, v_hat) / (a u)`
    at the CTL set point; zero without CTL expansion."""
    if set_point is None:
        set_point = ctl_set_point(model, xbar)
    if set_point is None:
        return 0.0
    params = model.params
    return (
        params.k
        * model.G1
        * model.G2
        * float(model.incidence(set_point.x, set_point.y, set_point.v))
        / (params.a * params.u)
    )


def solve_E2(
    model: ModelSpec,
    R1: Optional[float] = None,
    set_point: Optional[CtlSetPoint] = None,
) -> Optional[State]:
    """Solve for the CTL-activated infection equilibrium.

    Returns:
        `Optional[State]`: The equilibrium, or `None` if `R1 <= 1`.
    """
    if set_point is None:
        set_point = ctl_set_point(model)
    if R1 is None:
        R1 = compute_R1(model, set_point=set_point)
    if set_point is None or not _exceeds_one(R1, "R1", []):
        return None

    params = model.params
    z_hat = float(model.phi2.inverse(params.a * (R1 - 1.0) / params.p))
    return State(set_point.x, set_point.y, set_point.v, z_hat)


# ============================ classification ============================


@dataclass(frozen=True)
class EquilibriumReport:
    """The reproduction numbers, the equilibria and the regime of a
    model."""

    G1: float
    G2: float
    G3: float
    xbar: float
    R0: float
    R1: float
    RCTL: Optional[float]
    """`None` when `E1` does not exist."""

    E0: State
    E1: Optional[State]
    E2: Optional[State]
    regime: Regime
    warnings: Tuple[str, ...] = field(default_factory=tuple)

    def target(self) -> State:
        """The equilibrium the regime makes globally attractive."""
        return {
            Regime.INFECTION_FREE: self.E0,
            Regime.CTL_INACTIVATED: self.E1,
            Regime.CTL_ACTIVATED: self.E2,
        }[self.regime]


def classify(model: ModelSpec) -> EquilibriumReport:
    """Compute every equilibrium and classify the regime:
    infection-free if `R0 <= 1`, CTL-inactivated if `R1 <= 1 < R0` and
    CTL-activated if `R1 > 1`."""
    warnings: List[str] = []
    xbar = find_xbar(model.growth)
    R0 = compute_R0(model, xbar)
    set_point = ctl_set_point(model, xbar)
    R1 = compute_R1(model, xbar, set_point)

    E1 = E2 = None
    regime = Regime.INFECTION_FREE
    if _exceeds_one(R0, "R0", warnings):
        E1 = solve_E1(model, R0, xbar)
        regime = Regime.CTL_INACTIVATED
        if _exceeds_one(R1, "R1", warnings):
            E2 = solve_E2(model, R1, set_point)
            regime = Regime.CTL_ACTIVATED

    if E1 is not None and R1 >= R0:
        message = f"R1 = {R1:.12g} does not stay below R0 = {R0:.12g}"
        logger.warning(message)
        warnings.append(message)

    report = EquilibriumReport(
        G1=model.G1,
        G2=model.G2,
        G3=model.G3,
        xbar=xbar,
        R0=R0,
        R1=R1,
        RCTL=None if E1 is None else compute_RCTL(model, E1),
        E0=State(xbar, 0.0, 0.0, 0.0),
        E1=E1,
        E2=E2,
        regime=regime,
        warnings=tuple(warnings),
    )
    logger.info(
        f"Classified as {regime.label} with R0={R0:.6g}, R1={R1:.6g}.",
    )
    return report


def equilibrium_residuals(model: ModelSpec, E: Sequence[float]) -> np.ndarray:
    """The residuals of the four equilibrium equations at `E`.

    .. code-block:: text

        n(x) - f v
        G1 f v - a phi1(y) - p phi1(y) phi2(z)
        k G2 phi1(y) - u v
        c G3 phi1(y) phi2(z) - b phi2(z)
    """
    x, y, v, z = (float(_) for _ in E)
    params = model.params
    infection = float(model.incidence(x, y, v)) * v
    phi1_y = float(model.phi1(y))
    phi2_z = float(model.phi2(z))
    return np.array(
        [
            float(model.growth(x)) - infection,
            model.G1 * infection
            - params.a * phi1_y
            - params.p * phi1_y * phi2_z,
            params.k * model.G2 * phi1_y - params.u * v,
            params.c * model.G3 * phi1_y * phi2_z - params.b * phi2_z,
        ],
    )


def residual_scale(model: ModelSpec, E: Sequence[float]) -> float:
    """The scale `max(1, |n(0)|, a phi1(y))` of the residual tolerance."""
    return max(
        1.0,
        abs(float(model.growth(0.0))),
        model.params.a * float(model.phi1(float(E[1]))),
    )


# ============================== uniqueness ==============================


@dataclass(frozen=True)
class UniquenessReport:
    """The grid check of the sets that make the equilibria unique."""

    growth_condition: bool
    """`(n(x) - n(x_E)) (x - x_E) < 0` held on the whole grid."""

    incidence_condition: bool
    """`(f(x, y_E, v_E) - f(x_E, y_E, v_E)) (x - x_E) > 0` held on the whole
    grid."""

    growth_witness: Optional[float] = None
    incidence_witness: Optional[float] = None
    note: str = (
        "The incidence set is sometimes stated with a negative product, "
        "which contradicts the increase of f in x; the check tests the "
        "increase."
    )


def check_uniqueness_sets(
    model: ModelSpec,
    E: State,
    grid: int = _DEFAULT_BOUNDS_GRID,
    xbar: Optional[float] = None,
) -> UniquenessReport:
    """Check the sign conditions of the uniqueness sets on `[0, xbar]`.

    Args:
        model (`ModelSpec`):
            The model.
        E (`State`):
            A computed `E1` or `E2`.
        grid (`int`, defaults to `256`):
            The number of grid points.
        xbar (`Optional[float]`, defaults to `None`):
            The root of `n`, computed if not given.

    Returns:
        `UniquenessReport`: Pass or fail with the first violating `x`.
    """
    if xbar is None:
        xbar = find_xbar(model.growth)
    xs = np.linspace(0.0, xbar, grid)
    xs = xs[~np.isclose(xs, E.x, rtol=0.0, atol=1e-12 * max(1.0, xbar))]
    offsets = xs - E.x

    growth_sign = (
        np.asarray(model.growth(xs)) - float(model.growth(E.x))
    ) * offsets
    incidence_sign = (
        np.asarray(
            model.incidence(xs, np.full_like(xs, E.y), np.full_like(xs, E.v)),
        )
        - float(model.incidence(E.x, E.y, E.v))
    ) * offsets

    growth_failures = np.flatnonzero(~(growth_sign < 0))
    incidence_failures = np.flatnonzero(~(incidence_sign > 0))
    return UniquenessReport(
        growth_condition=len(growth_failures) == 0,
        incidence_condition=len(incidence_failures) == 0,
        growth_witness=(
            float(xs[growth_failures[0]]) if len(growth_failures) else None
        ),
        incidence_witness=(
            float(xs[incidence_failures[0]])
            if len(incidence_failures)
            else None
        ),
    )


# =============================== reporting ===============================


def _state_or_none(state: Optional[State]) -> Optional[List[float]]:
    return None if state is None else [float(_) for _ in state]


def report_to_dict(report: EquilibriumReport) -> dict:
    """The machine-readable layout of a report, as written by
    `virodyn equilibria --out`."""
    return {
        "regime": report.regime.label,
        "G1": report.G1,
        "G2": report.G2,
        "G3": report.G3,
        "xbar": report.xbar,
        "R0": report.R0,
        "R1": report.R1,
        "RCTL": report.RCTL,
        "E0": _state_or_none(report.E0),
        "E1": _state_or_none(report.E1),
        "E2": _state_or_none(report.E2),
        "warnings": list(report.warnings),
    }


def reproduction_summary(report: EquilibriumReport) -> str:
    """Render a report as aligned text."""

    def fmt_state(state: Optional[State]) -> str:
        if state is None:
            return "absent"
        return "(" + ", ".join(f"{_:.6f}" for _ in state) + ")"

    rows = [
        ("regime", report.regime.label),
        ("G1", f"{report.G1:.9g}"),
        ("G2", f"{report.G2:.9g}"),
        ("G3", f"{report.G3:.9g}"),
        ("xbar", f"{report.xbar:.6f}"),
        ("R0", f"{report.R0:.9g}"),
        ("R1", f"{report.R1:.9g}"),
        ("R_CTL", "-" if report.RCTL is None else f"{report.RCTL:.9g}"),
        ("E0", fmt_state(report.E0)),
        ("E1", fmt_state(report.E1)),
        ("E2", fmt_state(report.E2)),
    ]
    rows += [("warning", _) for _ in report.warnings]
    width = max(len(name) for name, _ in rows)
    return "\n".join(f"{name:<{width}}  {value}" for name, value in rows)


def locate_threshold(
    model: ModelSpec,
    parameter: str,
    lower: float,
    upper: float,
    which: str = "R0",
) -> float:
    """Find the value of one constant where a reproduction number crosses
    one.

    Args:
        model (`ModelSpec`):
            The model.
        parameter (`str`):
            The constant, as accepted by `ModelSpec.with_param`.
        lower (`float`):
            The lower end of the search bracket.
        upper (`float`):
            The upper end of the search bracket.
        which (`str`, defaults to `"R0"`):
            Either `"R0"` or `"R1"`.

    Returns:
        `float`: The threshold value.
    """
    if which not in ("R0", "R1"):
        raise ValueError(f"which must be R0 or R1, got {which}.")
    number = compute_R0 if which == "R0" else compute_R1

    def excess(value: float) -> float:
        return number(model.with_param(parameter, value)) - 1.0

    threshold = _bracketed_root(
        excess,
        lower,
        upper,
        f"{which}({parameter}) - 1",
    )
    logger.info(f"{which} crosses one at {parameter} = {threshold:.10g}.")
    return threshold
