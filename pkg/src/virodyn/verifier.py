# -*- coding: utf-8 -*-
"""Numerical evaluation of the Lyapunov functionals along trajectories and
audits of their decrease.

With `F = f(x, y, v) v`, `P = phi1(y)`, `Q = phi1(y) phi2(z)`, starred values
taken at the target equilibrium and `H(u) = u - 1 - ln u`:

.. code-block:: text

    V_E0 = x - x0 - int_{x0}^{x} f(x0,0,0) / f(s,0,0) ds
           + y / G1 + a v / (k G1 G2) + p z / (c G1 G3)
           + 1/G1           M1[F]
           + a/(G1 G2)      M2[P]
           + p/(G1 G3)      M3[Q]

    V_E1 = x - x* - int_{x*}^{x} f* / f(s,y*,v*) ds
           + 1/G1 int_{y*}^{y} (1 - P*/phi1(s)) ds
           + a/(k G1 G2) (v - v* - v* ln(v/v*)) + p z / (c G1 G3)
           + F*/G1          M1[H(F/F*)]
           + a P*/(G1 G2)   M2[H(P/P*)]
           + p/(G1 G3)      M3[Q]

    V_E2 = x - x* - int_{x*}^{x} f* / f(s,y*,v*) ds
           + 1/G1 int_{y*}^{y} (1 - P*/phi1(s)) ds
           + C/(k G1 G2) (v - v* - v* ln(v/v*))
           + p/(c G1) int_{z*}^{z} (1 - phi2(z*)/phi2(s)) ds
           + F*/G1          M1[H(F/F*)]
           + C P*/(G1 G2)   M2[H(P/P*)]

where `C = a + p phi2(z*)` and `Mi[g] = int fi(r) e^{-alpha_i r}
int_{t-r}^{t} g(s) ds dr`. `V_E2` needs an instantaneous CTL activation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple, Union

import numpy as np
from loguru import logger
from scipy.interpolate import CubicSpline

from .constants import (
    _DEFAULT_AUDIT_SAMPLES,
    _DEFAULT_AUDIT_TOLERANCE,
    _DEFAULT_CONVERGENCE_TOLERANCE,
    _DEFAULT_INNER_PANELS,
    _DEFAULT_TRANSIENT_FRACTION,
    _MIN_AUDIT_SAMPLES,
)
from .exception import AuditConfigError, LyapunovDomainError
from .integrator.bounds import relative_distance
from .integrator.trajectory import Trajectory
from .kernels import DelayKernel, DiracKernel, QuadratureSpec
from .model.rhs import immune_activation, infection_rate
from .model.spec import ModelSpec
from .utils.quadrature import integrate_log_simpson, integrate_simpson

FUNCTIONALS = ("V_E0", "V_E1", "V_E2")

_ALIASES = {"e0": "V_E0", "e1": "V_E1", "e2": "V_E2"}

_NOTED = set()


def functional_name(name: str) -> str:
    """Normalize `e0`, `E1`, `v_e2` and the like to `V_E0`..`V_E2`."""
    key = name.strip().lower()
    if key.startswith("v_"):
        key = key[2:]
    if key not in _ALIASES:
        raise AuditConfigError(
            f"Unknown functional [{name}], expected one of {FUNCTIONALS}.",
        )
    return _ALIASES[key]


def volterra_h(u: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
    """`H(u) = u - 1 - ln u`, nonnegative with its only zero at `u = 1`."""
    arr = np.asarray(u, dtype=float)
    if np.any(~(arr > 0)):
        raise LyapunovDomainError(
            f"H(u) needs u > 0, got {np.min(arr):.6g}",
            "volterra_h",
        )
    # rounding near u = 1 must not turn the value negative
    value = np.maximum(arr - 1.0 - np.log(arr), 0.0)
    return value if value.ndim else float(value)


def _positive(value: float, location: str) -> None:
    if not value > 0:
        raise LyapunovDomainError(
            f"A log or ratio term needs a positive argument, got {value:.6g}",
            location,
        )


def _ratio_term(
    func: Callable[[np.ndarray], np.ndarray],
    anchor: float,
    value: float,
    panels: int,
    location: str,
) -> float:
    """`int_{anchor}^{value} (1 - func(anchor) / func(s)) ds`."""
    _positive(anchor, location)
    _positive(value, location)
    level = float(func(anchor))
    return integrate_log_simpson(
        lambda s: 1.0 - level / np.asarray(func(s), dtype=float),
        anchor,
        value,
        panels,
    )


def _memory(
    kernel: DelayKernel,
    alpha: float,
    g: Callable[[np.ndarray], np.ndarray],
    trajectory: Trajectory,
    t: float,
    quad: QuadratureSpec,
    panels: int,
) -> float:
    """`int f(r) e^{-alpha r} int_{t-r}^{t} g(s) ds dr` over the stored
    solution."""
    if isinstance(kernel, DiracKernel):
        if kernel.tau == 0:
            return 0.0
        trajectory.require(t - kernel.tau, t)
        # at least two Simpson panels per grid step of the window
        count = max(panels, 2 * math.ceil(kernel.tau / trajectory.h))
        count += count % 2
        return math.exp(-alpha * kernel.tau) * integrate_simpson(
            g,
            t - kernel.tau,
            t,
            count,
        )

    # exchanging the order gives int g(t - w) W(w) dw; the inner integrals
    # at the rule's delays come from a spline antiderivative
    delays, weights = kernel.quadrature_rule(alpha, quad)
    lags = delays if delays[0] == 0 else np.concatenate([[0.0], delays])
    trajectory.require(t - lags[-1], t)
    spline = CubicSpline(lags, np.asarray(g(t - lags), dtype=float))
    inner = spline.antiderivative()(delays)
    return float(np.dot(weights, inner))


def _check_model(functional: str, model: ModelSpec) -> None:
    params = model.params
    if params.k == 0 or params.c == 0:
        raise AuditConfigError(
            f"{functional} needs positive k and c, got k={params.k}, "
            f"c={params.c}.",
        )
    if functional == "V_E2" and not model.kernel3.is_instantaneous:
        raise AuditConfigError(
            f"V_E2 is defined for an instantaneous CTL activation only, got "
            f"{model.kernel3!r}.",
        )
    if functional not in _NOTED:
        _NOTED.add(functional)
        logger.info(
            f"{functional} is evaluated with the growth term "
            "x - x* - int f*/f ds and a production-memory coefficient "
            "without the factor 1/k.",
        )


def lyapunov_value(
    functional: str,
    model: ModelSpec,
    E: Sequence[float],
    trajectory: Trajectory,
    t: float,
    quad: Optional[QuadratureSpec] = None,
    panels: int = _DEFAULT_INNER_PANELS,
) -> float:
    """Evaluate a Lyapunov functional at time `t`.

    Args:
        functional (`str`):
            One of `V_E0`, `V_E1`, `V_E2` (or `e0`, `e1`, `e2`).
        model (`ModelSpec`):
            The model.
        E (`Sequence[float]`):
            The equilibrium matching the functional.
        trajectory (`Trajectory`):
            The solution, which together with its history has to cover
            `[t - tau_max, t]`.
        t (`float`):
            The time.
        quad (`Optional[QuadratureSpec]`, defaults to `None`):
            The settings of the delay quadrature.
        panels (`int`, defaults to `128`):
            The Simpson panels of inner single integrals.

    Returns:
        `float`: The value.
    """
    functional = functional_name(functional)
    _check_model(functional, model)
    quad = quad or QuadratureSpec()
    params = model.params
    G1, G2, G3 = model.G1, model.G2, model.G3

    anchor = np.asarray(E, dtype=float)
    x_s, y_s, v_s, z_s = (float(_) for _ in anchor)
    x, y, v, z = (float(_) for _ in trajectory.evaluate(t))

    f_anchor = float(model.incidence(x_s, y_s, v_s))
    growth_term = _ratio_term(
        lambda s: model.incidence(s, y_s, v_s),
        x_s,
        x,
        panels,
        "x",
    )

    def memory(kernel, alpha, g):
        return _memory(kernel, alpha, g, trajectory, t, quad, panels)

    if functional == "V_E0":
        return (
            growth_term
            + y / G1
            + params.a * v / (params.k * G1 * G2)
            + params.p * z / (params.c * G1 * G3)
            + memory(
                model.kernel1,
                params.alpha1,
                lambda s: infection_rate(model, trajectory(s)),
            )
            / G1
            + params.a
            / (G1 * G2)
            * memory(
                model.kernel2,
                params.alpha2,
                lambda s: model.phi1(trajectory(s)[:, 1]),
            )
            + params.p
            / (G1 * G3)
            * memory(
                model.kernel3,
                0.0,
                lambda s: immune_activation(model, trajectory(s)),
            )
        )

    _positive(v, "v")
    _positive(v_s, "v*")
    infection_s = f_anchor * v_s
    phi1_s = float(model.phi1(y_s))
    _positive(infection_s, "f* v*")
    _positive(phi1_s, "phi1(y*)")

    def relative_infection(s: np.ndarray) -> np.ndarray:
        return volterra_h(infection_rate(model, trajectory(s)) / infection_s)

    def relative_response(s: np.ndarray) -> np.ndarray:
        return volterra_h(
            np.asarray(model.phi1(trajectory(s)[:, 1])) / phi1_s,
        )

    shared = (
        growth_term
        + _ratio_term(model.phi1, y_s, y, panels, "y") / G1
        + infection_s
        / G1
        * memory(model.kernel1, params.alpha1, relative_infection)
    )
    virion_gap = v - v_s - v_s * math.log(v / v_s)

    if functional == "V_E1":
        return (
            shared
            + params.a / (params.k * G1 * G2) * virion_gap
            + params.p * z / (params.c * G1 * G3)
            + params.a
            * phi1_s
            / (G1 * G2)
            * memory(model.kernel2, params.alpha2, relative_response)
            + params.p
            / (G1 * G3)
            * memory(
                model.kernel3,
                0.0,
                lambda s: immune_activation(model, trajectory(s)),
            )
        )

    killing = params.a + params.p * float(model.phi2(z_s))
    return (
        shared
        + killing / (params.k * G1 * G2) * virion_gap
        + params.p
        / (params.c * G1)
        * _ratio_term(model.phi2, z_s, z, panels, "z")
        + killing
        * phi1_s
        / (G1 * G2)
        * memory(model.kernel2, params.alpha2, relative_response)
    )


def lyapunov_series(
    functional: str,
    model: ModelSpec,
    E: Sequence[float],
    trajectory: Trajectory,
    times: Optional[Sequence[float]] = None,
    quad: Optional[QuadratureSpec] = None,
    panels: int = _DEFAULT_INNER_PANELS,
) -> Tuple[np.ndarray, np.ndarray]:
    """Evaluate a functional at several times, by default at the audit
    sample times.

    Returns:
        `Tuple[np.ndarray, np.ndarray]`: The times and the values.
    """
    if times is None:
        times = audit_times(model, trajectory, quad)
    times = np.asarray(times, dtype=float)
    values = np.array(
        [
            lyapunov_value(functional, model, E, trajectory, t, quad, panels)
            for t in times
        ],
    )
    return times, values


def audit_times(
    model: ModelSpec,
    trajectory: Trajectory,
    quad: Optional[QuadratureSpec] = None,
    transient_fraction: float = _DEFAULT_TRANSIENT_FRACTION,
    samples: int = _DEFAULT_AUDIT_SAMPLES,
) -> np.ndarray:
    """Evenly spaced times after the transient and at least one delay
    horizon into the trajectory."""
    if samples < _MIN_AUDIT_SAMPLES:
        raise AuditConfigError(
            f"An audit needs at least {_MIN_AUDIT_SAMPLES} samples, got "
            f"{samples}.",
        )
    if not 0.0 <= transient_fraction < 1.0:
        raise AuditConfigError(
            f"transient_fraction must lie in [0, 1), got "
            f"{transient_fraction}.",
        )
    quad = quad or QuadratureSpec()
    span = trajectory.t_end - trajectory.t0
    start = max(
        trajectory.t0 + transient_fraction * span,
        trajectory.t0 + model.max_horizon(quad),
    )
    if start >= trajectory.t_end:
        raise AuditConfigError(
            f"The trajectory ends at t={trajectory.t_end:.6g}, before the "
            f"audit window opens at t={start:.6g}.",
        )
    return np.linspace(start, trajectory.t_end, samples)


@dataclass(frozen=True)
class LyapunovAudit:
    """The sampled functional and the verdict of an audit."""

    functional: str
    target: Tuple[float, ...]
    times: np.ndarray
    values: np.ndarray
    max_increase: float
    """The largest increase between consecutive samples, zero if none."""

    threshold: float
    """`tol (|V(t_first)| + 1)`."""

    final_distance: float
    """Relative max-norm distance of the final state to the target."""

    convergence_tolerance: float

    @property
    def decreasing(self) -> bool:
        """No increase beyond the threshold."""
        return self.max_increase <= self.threshold

    @property
    def converged(self) -> bool:
        """The final state is close to the target."""
        return self.final_distance <= self.convergence_tolerance

    @property
    def passed(self) -> bool:
        """The verdict."""
        return self.decreasing and self.converged

    def to_text(self) -> str:
        """Render the audit as aligned text."""
        rows = [
            ("functional", self.functional),
            ("target", "(" + ", ".join(f"{_:.6f}" for _ in self.target) + ")"),
            ("window", f"[{self.times[0]:.6g}, {self.times[-1]:.6g}]"),
            ("samples", str(len(self.times))),
            ("V first", f"{self.values[0]:.9g}"),
            ("V last", f"{self.values[-1]:.9g}"),
            ("max increase", f"{self.max_increase:.3g}"),
            ("threshold", f"{self.threshold:.3g}"),
            ("final distance", f"{self.final_distance:.3g}"),
            ("verdict", "pass" if self.passed else "FAIL"),
        ]
        width = max(len(name) for name, _ in rows)
        return "\n".join(f"{name:<{width}}  {value}" for name, value in rows)


def audit(
    functional: str,
    model: ModelSpec,
    E: Sequence[float],
    trajectory: Trajectory,
    quad: Optional[QuadratureSpec] = None,
    transient_fraction: float = _DEFAULT_TRANSIENT_FRACTION,
    tol: float = _DEFAULT_AUDIT_TOLERANCE,
    samples: int = _DEFAULT_AUDIT_SAMPLES,
    convergence_tolerance: float = _DEFAULT_CONVERGENCE_TOLERANCE,
) -> LyapunovAudit:
    """Check that a functional decreases along a trajectory and that the
    trajectory reaches its equilibrium.

    Args:
        functional (`str`):
            One of `V_E0`, `V_E1`, `V_E2`.
        model (`ModelSpec`):
            The model.
        E (`Sequence[float]`):
            The equilibrium of the functional.
        trajectory (`Trajectory`):
            A completed solution.
        quad (`Optional[QuadratureSpec]`, defaults to `None`):
            The settings of the delay quadrature.
        transient_fraction (`float`, defaults to `0.3`):
            The leading share of the time span that is skipped.
        tol (`float`, defaults to `1e-4`):
            The allowed increase relative to `|V| + 1` at the first sample.
        samples (`int`, defaults to `200`):
            The number of sample times.
        convergence_tolerance (`float`, defaults to `0.05`):
            The allowed relative distance of the final state to `E`.

    Returns:
        `LyapunovAudit`: The samples and the verdict.
    """
    functional = functional_name(functional)
    times = audit_times(model, trajectory, quad, transient_fraction, samples)
    times, values = lyapunov_series(
        functional,
        model,
        E,
        trajectory,
        times,
        quad,
    )
    if not np.all(np.isfinite(values)):
        raise LyapunovDomainError(
            f"{functional} is not finite along the trajectory",
            "audit",
        )

    increases = np.diff(values)
    result = LyapunovAudit(
        functional=functional,
        target=tuple(float(_) for _ in E),
        times=times,
        values=values,
        max_increase=max(0.0, float(increases.max())),
        threshold=tol * (abs(float(values[0])) + 1.0),
        final_distance=relative_distance(trajectory.final_state, E),
        convergence_tolerance=convergence_tolerance,
    )
    log = logger.info if result.passed else logger.warning
    log(
        f"Audit of {functional}: max increase {result.max_increase:.3g} "
        f"(threshold {result.threshold:.3g}), final distance "
        f"{result.final_distance:.3g}, "
        f"{'pass' if result.passed else 'fail'}.",
    )
    return result
