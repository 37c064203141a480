# -*- coding: utf-8 -*-
"""virodyn exception classes."""
from typing import Optional, Sequence


class VirodynError(Exception):
    """The base class for all exceptions raised by virodyn."""

    def __init__(self, message: str) -> None:
        self.message = message
        super().__init__(message)

    def __str__(self) -> str:
        return f"{self.__class__.__name__}: {self.message}"


# - Kernel and History Exceptions


class KernelError(VirodynError):
    """The base class for delay kernel errors."""


class MalformedKernelError(KernelError):
    """The exception class for invalid kernel data or a non-finite kernel
    integral."""


class HistoryError(VirodynError):
    """The base class for history function errors."""


class InsufficientHistoryError(HistoryError):
    """The exception class for evaluating a history or trajectory outside of
    its covered time span."""

    requested: float
    """The time that was requested."""

    lower: float
    """The lowest time covered by the evaluator."""

    def __init__(
        self,
        message: str,
        requested: float = float("nan"),
        lower: float = float("nan"),
    ) -> None:
        """Initialize the exception with the requested time and the covered
        lower bound."""
        super().__init__(message)
        self.requested = requested
        self.lower = lower


# - Model Hypothesis Exceptions


class HypothesisError(VirodynError):
    """The base class for violations of the model hypotheses."""


class H1ViolationError(HypothesisError):
    """The exception class for a growth function without a positive root."""


class ResponseInverseError(HypothesisError):
    """The exception class for evaluating a response inverse outside of its
    domain."""


# - Solver Exceptions


class SolverError(VirodynError):
    """The base class for root-finding errors."""


class BracketError(SolverError):
    """The exception class for a root bracket without a sign change."""

    endpoint_values: Optional[Sequence[float]]
    """The function values at the bracket ends."""

    def __init__(
        self,
        message: str,
        endpoint_values: Optional[Sequence[float]] = None,
    ) -> None:
        """Initialize the exception with the function values at the ends of
        the bracket."""
        if endpoint_values is not None:
            message = (
                f"{message} (values at bracket ends: "
                f"{', '.join(f'{_:.6g}' for _ in endpoint_values)})"
            )
        super().__init__(message)
        self.endpoint_values = endpoint_values


# - Integration Exceptions


class IntegrationError(VirodynError):
    """The base class for integration errors."""

    time: float
    """The time at which the integration failed."""

    state: Optional[Sequence[float]]
    """The offending state."""

    def __init__(
        self,
        message: str,
        time: float,
        state: Optional[Sequence[float]] = None,
    ) -> None:
        """Initialize the exception with the time stamp and the state."""
        super().__init__(f"{message} at t={time:.6g}")
        self.time = time
        self.state = state


class PositivityBreachError(IntegrationError):
    """The exception class for a state component falling below the
    positivity floor."""


class DivergenceError(IntegrationError):
    """The exception class for a non-finite state, or for a step that
    collapses under the stiffness of the system."""


# - Verifier Exceptions


class LyapunovDomainError(VirodynError):
    """The exception class for a nonpositive argument to a logarithmic or
    ratio term of a Lyapunov functional."""

    location: str
    """Where the violation happened."""

    def __init__(self, message: str, location: str = "") -> None:
        """Initialize the exception with the location of the violation."""
        if location:
            message = f"{message} [{location}]"
        super().__init__(message)
        self.location = location


class AuditConfigError(VirodynError):
    """The exception class for an audit that cannot be run on the given
    model or trajectory."""


# - Scenario Exceptions


class ScenarioError(VirodynError):
    """The exception class for malformed scenario configurations."""

    section: str
    """The name of the failing config section."""

    def __init__(self, section: str, message: str) -> None:
        """Initialize the exception with the name of the failing section."""
        super().__init__(f"[{section}] {message}")
        self.section = section
