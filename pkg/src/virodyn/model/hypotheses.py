# -*- coding: utf-8 -*-
"""Grid checks of the standing hypotheses on a model.

The functions are black boxes, so every condition is tested on samples of
the box `[0, xbar] x [0, Y] x [0, V] x [0, Z]` that solutions eventually
enter.
Failures are report entries; `HypothesisReport.raise_for_failures` turns
them into an exception.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
from loguru import logger

from ..constants import _DEFAULT_HYPOTHESIS_GRID, _INVERSE_TOLERANCE
from ..equilibria import find_xbar
from ..exception import HypothesisError, VirodynError
from ..integrator.bounds import gamma_bounds
from .functions import ResponseFunction
from .spec import ModelSpec


@dataclass(frozen=True)
class HypothesisCheck:
    """The outcome of one condition."""

    name: str
    passed: bool
    detail: str = ""
    witness: Optional[Tuple[float, ...]] = None
    """The first violating sample point."""


@dataclass(frozen=True)
class HypothesisReport:
    """The outcome of all conditions."""

    checks: Tuple[HypothesisCheck, ...]

    @property
    def passed(self) -> bool:
        """Whether every condition holds."""
        return all(check.passed for check in self.checks)

    def failures(self) -> List[HypothesisCheck]:
        """The failing conditions."""
        return [check for check in self.checks if not check.passed]

    def __getitem__(self, name: str) -> HypothesisCheck:
        for check in self.checks:
            if check.name == name:
                return check
        raise KeyError(name)

    def raise_for_failures(self) -> None:
        """Raise `HypothesisError` naming every failing condition."""
        failures = self.failures()
        if failures:
            raise HypothesisError(
                "; ".join(f"{_.name}: {_.detail}" for _ in failures),
            )

    def to_text(self) -> str:
        """Render the report with one line per condition."""
        width = max(len(check.name) for check in self.checks)
        return "\n".join(
            f"{check.name:<{width}}  {'pass' if check.passed else 'FAIL'}"
            + (f"  {check.detail}" if check.detail else "")
            for check in self.checks
        )


def _first(mask: np.ndarray, *axes: np.ndarray) -> Tuple[float, ...]:
    """The coordinates of the first `True` entry of `mask`."""
    index = np.unravel_index(int(np.flatnonzero(mask)[0]), mask.shape)
    return tuple(float(axis[i]) for axis, i in zip(axes, index))


def _check_parameters(model: ModelSpec) -> HypothesisCheck:
    params = model.params
    zero = [name for name in ("k", "c") if getattr(params, name) == 0]
    if zero:
        return HypothesisCheck(
            "params",
            False,
            f"{', '.join(zero)} must be strictly positive",
        )
    return HypothesisCheck("params", True)


def _check_growth(
    model: ModelSpec,
    grid: int,
) -> Tuple[HypothesisCheck, Optional[float]]:
    try:
        xbar = find_xbar(model.growth)
    except VirodynError as e:
        return HypothesisCheck("H1", False, e.message), None

    below = np.linspace(0.0, xbar, grid)[:-1]
    above = np.linspace(xbar, 2.0 * xbar, grid)[1:]
    n_below = np.asarray(model.growth(below), dtype=float)
    n_above = np.asarray(model.growth(above), dtype=float)
    if not np.all(n_below > 0):
        x = float(below[np.flatnonzero(~(n_below > 0))[0]])
        return (
            HypothesisCheck("H1", False, "n is not positive below xbar", (x,)),
            xbar,
        )
    if not np.all(n_above < 0):
        x = float(above[np.flatnonzero(~(n_above < 0))[0]])
        return (
            HypothesisCheck("H1", False, "n is not negative above xbar", (x,)),
            xbar,
        )
    return HypothesisCheck("H1", True, f"xbar = {xbar:.9g}"), xbar


def _check_response(
    name: str,
    phi: ResponseFunction,
    upper: float,
    grid: int,
) -> HypothesisCheck:
    label = f"H2[{name}]"
    ys = np.linspace(0.0, upper, grid)
    values = np.asarray(phi(ys), dtype=float)

    if not np.all(np.isfinite(values)):
        return HypothesisCheck(label, False, "phi is not finite")
    if values[0] != 0.0:
        return HypothesisCheck(label, False, f"phi(0) = {values[0]:.6g}")
    increments = np.diff(values)
    if not np.all(increments > 0):
        y = float(ys[1:][np.flatnonzero(~(increments > 0))[0]])
        return HypothesisCheck(label, False, "phi is not increasing", (y,))
    slack = values[1:] - phi.k_lower * ys[1:]
    if not np.all(slack >= -_INVERSE_TOLERANCE * np.maximum(1.0, values[1:])):
        y = float(ys[1:][np.flatnonzero(slack < 0)[0]])
        return HypothesisCheck(
            label,
            False,
            f"phi(y) < {phi.k_lower:.6g} y",
            (y,),
        )
    try:
        roundtrip = np.asarray(phi(phi.inverse(values)), dtype=float)
    except VirodynError as e:
        return HypothesisCheck(label, False, e.message)
    error = np.abs(roundtrip - values)
    if not np.all(error <= _INVERSE_TOLERANCE * np.maximum(1.0, values)):
        w = float(values[np.flatnonzero(error > 0)[0]])
        return HypothesisCheck(
            label,
            False,
            "phi(phi^{-1}(w)) differs from w",
            (w,),
        )
    return HypothesisCheck(label, True, f"k = {phi.k_lower:.6g}")


def _check_activation(
    model: ModelSpec,
    ys: np.ndarray,
    zs: np.ndarray,
) -> HypothesisCheck:
    """`w(y, z) = phi1(y) phi2(z)` vanishes exactly on the axes and rises
    in `z` for `y > 0`."""
    with np.errstate(all="ignore"):
        w = np.outer(
            np.asarray(model.phi1(ys), dtype=float),
            np.asarray(model.phi2(zs), dtype=float),
        )
    if not np.all(np.isfinite(w)):
        return HypothesisCheck(
            "H3",
            False,
            "w is not finite",
            _first(~np.isfinite(w), ys, zs),
        )

    axes = np.zeros_like(w, dtype=bool)
    axes[0, :] = w[0, :] != 0.0
    axes[:, 0] |= w[:, 0] != 0.0
    if axes.any():
        return HypothesisCheck(
            "H3",
            False,
            "w is not zero on the axes",
            _first(axes, ys, zs),
        )
    inside = ~(w[1:, 1:] > 0)
    if inside.any():
        return HypothesisCheck(
            "H3",
            False,
            "w is not positive for y, z > 0",
            _first(inside, ys[1:], zs[1:]),
        )
    flat = ~(np.diff(w[1:], axis=1) > 0)
    if flat.any():
        return HypothesisCheck(
            "H3",
            False,
            "w is not increasing in z",
            _first(flat, ys[1:], zs[1:]),
        )
    return HypothesisCheck("H3", True, "w = phi1(y) phi2(z)")


def _check_incidence(
    model: ModelSpec,
    xs: np.ndarray,
    ys: np.ndarray,
    vs: np.ndarray,
) -> List[HypothesisCheck]:
    x, y, v = np.meshgrid(xs, ys, vs, indexing="ij")
    with np.errstate(all="ignore"):
        values = np.asarray(model.incidence(x, y, v), dtype=float)
    finite = np.isfinite(values)
    checks = []

    if finite.all():
        checks.append(HypothesisCheck("evaluability", True))
    else:
        checks.append(
            HypothesisCheck(
                "evaluability",
                False,
                "f is not finite",
                _first(~finite, xs, ys, vs),
            ),
        )

    at_zero = values[0]
    bad = ~(np.abs(at_zero) <= 1e-12)
    if bad.any():
        checks.append(
            HypothesisCheck(
                "i)",
                False,
                "f(0, y, v) is not zero",
                (0.0,) + _first(bad, ys, vs),
            ),
        )
    else:
        checks.append(HypothesisCheck("i)", True))

    # comparisons between non-finite samples are left to evaluability
    with np.errstate(invalid="ignore"):
        dx = np.diff(values, axis=0)
        dy = np.diff(values, axis=1)
        dv = np.diff(values, axis=2)
    tol = 1e-12 * np.nanmax(np.abs(np.where(finite, values, np.nan)))

    bad = np.isfinite(dx) & ~(dx > 0)
    # ratio-dependent rates are flat in x > 0 along y = 0
    bad[:, 0, :] = np.isfinite(dx[:, 0, :]) & (dx[:, 0, :] < -tol)
    if bad.any():
        checks.append(
            HypothesisCheck(
                "ii)",
                False,
                "f is not increasing in x",
                _first(bad, xs[1:], ys, vs),
            ),
        )
    else:
        checks.append(HypothesisCheck("ii)", True))

    bad_y = np.isfinite(dy) & (dy > tol)
    bad_v = np.isfinite(dv) & (dv > tol)
    if bad_y.any():
        checks.append(
            HypothesisCheck(
                "iii)",
                False,
                "f increases in y",
                _first(bad_y, xs, ys[1:], vs),
            ),
        )
    elif bad_v.any():
        checks.append(
            HypothesisCheck(
                "iii)",
                False,
                "f increases in v",
                _first(bad_v, xs, ys, vs[1:]),
            ),
        )
    else:
        checks.append(HypothesisCheck("iii)", True))
    return checks


def validate_hypotheses(
    model: ModelSpec,
    grid: int = _DEFAULT_HYPOTHESIS_GRID,
) -> HypothesisReport:
    """Check the standing hypotheses of a model on sample grids.

    Args:
        model (`ModelSpec`):
            The model.
        grid (`int`, defaults to `32`):
            Samples per axis, at least 32.

    Returns:
        `HypothesisReport`: One entry per condition, with the first
        violating sample point of each failure.
    """
    grid = max(int(grid), _DEFAULT_HYPOTHESIS_GRID)
    checks = [_check_parameters(model)]

    growth_check, xbar = _check_growth(model, grid)
    checks.append(growth_check)

    y_upper = v_upper = z_upper = 1.0
    if xbar is not None:
        try:
            box = gamma_bounds(model)
            y_upper, v_upper = box.y_max, box.v_max
            if math.isfinite(box.z_max) and box.z_max > 0:
                z_upper = box.z_max
        except VirodynError as e:
            logger.warning(f"Falling back to a unit box: {e.message}")
    else:
        xbar = 1.0

    checks.append(_check_response("phi1", model.phi1, y_upper, grid))
    checks.append(_check_response("phi2", model.phi2, z_upper, grid))
    checks.append(
        _check_activation(
            model,
            np.linspace(0.0, y_upper, grid),
            np.linspace(0.0, z_upper, grid),
        ),
    )
    checks.append(
        HypothesisCheck(
            "H4",
            True,
            "the immune term is phi1(y) phi2(z) by construction",
        ),
    )
    checks.append(
        HypothesisCheck(
            "kernels",
            True,
            f"masses {model.kernel1.mass:.9g}, {model.kernel2.mass:.9g}, "
            f"{model.kernel3.mass:.9g}",
        ),
    )

    xs = np.linspace(0.0, xbar, grid)
    ys = np.linspace(0.0, y_upper, grid)
    vs = np.linspace(0.0, max(v_upper, 1e-12), grid)
    checks.extend(_check_incidence(model, xs, ys, vs))

    report = HypothesisReport(tuple(checks))
    for check in report.failures():
        logger.warning(f"Hypothesis {check.name} fails: {check.detail}")
    return report
