# -*- coding: utf-8 -*-
""" Import all modules in the package."""
# the model goes first, its validator reaches into the integrator
from . import model
from . import kernels
from . import equilibria
from . import integrator
from . import verifier
from . import scenario
from . import utils

from .kernels import (
    DelayKernel,
    DiracKernel,
    GammaKernel,
    QuadratureSpec,
    TabulatedKernel,
)
from .model import ModelSpec, Parameters, State, validate_hypotheses
from .equilibria import EquilibriumReport, classify
from .integrator import Trajectory, integrate
from .verifier import LyapunovAudit, audit
from .scenario import Scenario, load_scenario
from .logging import setup_logger
from ._version import __version__

__all__ = [
    "DelayKernel",
    "DiracKernel",
    "GammaKernel",
    "TabulatedKernel",
    "QuadratureSpec",
    "ModelSpec",
    "Parameters",
    "State",
    "validate_hypotheses",
    "EquilibriumReport",
    "classify",
    "Trajectory",
    "integrate",
    "LyapunovAudit",
    "audit",
    "Scenario",
    "load_scenario",
    "setup_logger",
]
