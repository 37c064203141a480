# -*- coding: utf-8 -*-
""" Composite quadrature rules shared by the kernels and the verifier."""
from typing import Callable, Tuple

import numpy as np
from scipy.integrate import simpson


def simpson_coefficients(panels: int) -> np.ndarray:
    """Return the composite Simpson coefficients `1, 4, 2, ..., 4, 1` for an
    even number of panels, without the `h / 3` factor.

    Args:
        panels (`int`):
            The number of sub-intervals, which must be even and positive.

    Returns:
        `np.ndarray`: The `panels + 1` coefficients.
    """
    if panels <= 0 or panels % 2:
        raise ValueError(
            f"Simpson's rule needs an even positive panel count, got "
            f"{panels}.",
        )
    coefficients = np.full(panels + 1, 2.0)
    coefficients[1::2] = 4.0
    coefficients[0] = coefficients[-1] = 1.0
    return coefficients


def simpson_rule(
    lower: float,
    upper: float,
    panels: int,
) -> Tuple[np.ndarray, np.ndarray]:
    """Return the nodes and weights of the composite Simpson rule on
    `[lower, upper]`."""
    nodes = np.linspace(lower, upper, panels + 1)
    step = (upper - lower) / panels
    return nodes, simpson_coefficients(panels) * step / 3.0


def integrate_simpson(
    func: Callable[[np.ndarray], np.ndarray],
    lower: float,
    upper: float,
    panels: int,
) -> float:
    """Integrate a vectorized function on `[lower, upper]` with composite
    Simpson on uniform panels. Reversed limits give the negated value."""
    if upper == lower:
        return 0.0
    nodes = np.linspace(lower, upper, panels + 1)
    return float(simpson(np.asarray(func(nodes), dtype=float), x=nodes))


def integrate_log_simpson(
    func: Callable[[np.ndarray], np.ndarray],
    lower: float,
    upper: float,
    panels: int,
) -> float:
    """Integrate on `[lower, upper]` (both positive) after the substitution
    `s = e^u`, which keeps integrands with a `1/s` singularity at the origin
    smooth for Simpson's rule."""
    if upper == lower:
        return 0.0
    if lower <= 0 or upper <= 0:
        raise ValueError(
            f"Log substitution needs positive limits, got [{lower}, {upper}].",
        )
    log_nodes = np.linspace(np.log(lower), np.log(upper), panels + 1)
    nodes = np.exp(log_nodes)
    values = np.asarray(func(nodes), dtype=float) * nodes
    return float(simpson(values, x=log_nodes))
