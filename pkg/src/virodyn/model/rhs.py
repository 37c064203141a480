# -*- coding: utf-8 -*-
"""The right-hand side of the delay system.

.. code-block:: text

    x' = n(x) - f(x, y, v) v
    y' = int f1(s) e^{-alpha1 s} f(x, y, v) v (t - s) ds
         - a phi1(y) - p phi1(y) phi2(z)
    v' = k int f2(s) e^{-alpha2 s} phi1(y(t - s)) ds - u v
    z' = c int f3(s) phi1(y(t - s)) phi2(z(t - s)) ds - b phi2(z)
"""
from typing import Callable, Optional, Tuple

import numpy as np

from ..kernels import QuadratureSpec
from .spec import ModelSpec

StateEvaluator = Callable[[np.ndarray], np.ndarray]
"""A vectorized history: an array of `m` times maps to an `(m, 4)` array of
states."""


def infection_rate(model: ModelSpec, states: np.ndarray) -> np.ndarray:
    """The new-infection rate `f(x, y, v) v` of an `(m, 4)` state array."""
    x, y, v = states[:, 0], states[:, 1], states[:, 2]
    return np.asarray(model.incidence(x, y, v), dtype=float) * v


def immune_activation(model: ModelSpec, states: np.ndarray) -> np.ndarray:
    """The CTL stimulation `phi1(y) phi2(z)` of an `(m, 4)` state array."""
    return np.asarray(model.phi1(states[:, 1]), dtype=float) * np.asarray(
        model.phi2(states[:, 3]),
        dtype=float,
    )


def _lag_rules(
    model: ModelSpec,
    quad: QuadratureSpec,
) -> Tuple[Tuple[np.ndarray, np.ndarray], ...]:
    params = model.params
    return (
        model.kernel1.quadrature_rule(params.alpha1, quad),
        model.kernel2.quadrature_rule(params.alpha2, quad),
        model.kernel3.quadrature_rule(0.0, quad),
    )


def rhs(
    model: ModelSpec,
    t: float,
    history: StateEvaluator,
    quad: Optional[QuadratureSpec] = None,
) -> np.ndarray:
    """Evaluate `(x', y', v', z')` at time `t`.

    The current state and every lagged state the three convolutions need
    are looked up in a single call of `history`.

    Args:
        model (`ModelSpec`):
            The model.
        t (`float`):
            The current time.
        history (`StateEvaluator`):
            The solution up to and including `t`. It has to be evaluable on
            `[t - tau_max, t]` for the largest kernel horizon.
        quad (`Optional[QuadratureSpec]`, defaults to `None`):
            The settings of the delay quadrature.

    Returns:
        `np.ndarray`: The four derivatives.
    """
    quad = quad or QuadratureSpec()
    params = model.params
    rules = _lag_rules(model, quad)

    sizes = [len(delays) for delays, _ in rules]
    states = np.asarray(
        history(np.concatenate([[t]] + [t - d for d, _ in rules])),
        dtype=float,
    )
    x, y, v, z = states[0]
    lagged = np.split(states[1:], np.cumsum(sizes)[:-1])

    phi1_y = float(model.phi1(y))
    phi2_z = float(model.phi2(z))
    infected_inflow = float(
        np.dot(rules[0][1], infection_rate(model, lagged[0])),
    )
    virion_inflow = float(
        np.dot(
            rules[1][1],
            np.asarray(model.phi1(lagged[1][:, 1]), dtype=float),
        ),
    )
    ctl_inflow = float(
        np.dot(rules[2][1], immune_activation(model, lagged[2])),
    )

    return np.array(
        [
            model.growth(x) - float(model.incidence(x, y, v)) * v,
            infected_inflow - params.a * phi1_y - params.p * phi1_y * phi2_z,
            params.k * virion_inflow - params.u * v,
            params.c * ctl_inflow - params.b * phi2_z,
        ],
    )
