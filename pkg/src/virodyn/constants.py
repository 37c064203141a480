# -*- coding: utf-8 -*-
""" Some constants used in the project"""
from enum import IntEnum

PACKAGE_NAME = "virodyn"

# for kernels and quadrature
_DEFAULT_TAIL_EPSILON = 1e-8
_DEFAULT_PANELS = 2048
_MIN_PANELS = 16
_DEFAULT_INNER_PANELS = 128
_MASS_TOLERANCE = 1e-9

# for root finding
_DEFAULT_ROOT_XTOL = 1e-12
_DEFAULT_ROOT_MAXITER = 200
_NEAR_THRESHOLD_BAND = 1e-9

# for hypothesis validation and Γ bounds
_DEFAULT_HYPOTHESIS_GRID = 32
_DEFAULT_BOUNDS_GRID = 256
_INVERSE_TOLERANCE = 1e-10

# for the integrator
_POSITIVITY_FLOOR = -1e-9
_DEFAULT_STEP_CAP = 0.1
_DEFAULT_STEP_DIVISOR = 50
# |h lambda| aimed at and tolerated for the stiffest local mode, inside
# the real stability interval (-2.78, 0] of classical RK4
_STABILITY_TARGET = 2.0
_STABILITY_LIMIT = 2.5
_STEP_GROWTH = 2.0
_MIN_STEP_FRACTION = 1e-9
_BREAKPOINT_DEPTH = 4
_EVENTUAL_FRACTION = 0.2

# for the verifier
_DEFAULT_TRANSIENT_FRACTION = 0.3
_DEFAULT_AUDIT_TOLERANCE = 1e-4
_DEFAULT_AUDIT_SAMPLES = 200
_DEFAULT_CONVERGENCE_TOLERANCE = 0.05
_MIN_AUDIT_SAMPLES = 10

# for scenarios and outputs
_DEFAULT_HISTORY = (25.0, 50.0, 10.0, 5.0)
_DEFAULT_LOG_LEVEL = "INFO"
_DEFAULT_CSV_NAME = "trajectory.csv"
_DEFAULT_SVG_NAME = "trajectory.svg"
_DEFAULT_REPORT_NAME = "report.json"
_DEFAULT_LYAPUNOV_CSV_NAME = "lyapunov.csv"
_DEFAULT_SWEEP_CSV_NAME = "sweep.csv"
_SVG_WIDTH = 1000
_SVG_HEIGHT = 600

STATE_LABELS = ("x", "y", "v", "z")


# enums
class Regime(IntEnum):
    """Enum for the equilibrium regime of a model."""

    INFECTION_FREE = 0
    CTL_INACTIVATED = 1
    CTL_ACTIVATED = 2

    @property
    def label(self) -> str:
        """The CamelCase name used in reports."""
        return "".join(part.capitalize() for part in self.name.split("_"))


class ExitStatus(IntEnum):
    """Enum for the exit status of the command line tool."""

    SUCCESS = 0
    NUMERICAL_FAILURE = 1
    CONFIGURATION_ERROR = 2
