# -*- coding: utf-8 -*-
"""The model: its ingredients, right-hand side and hypotheses."""
from .functions import (
    BeddingtonDeAngelis,
    Bilinear,
    GrowthFunction,
    Identity,
    IncidenceFunction,
    LinearSource,
    LogisticSource,
    Quadratic,
    RatioDependent,
    ResponseFunction,
    Saturating,
)
from .spec import ModelSpec, Parameters, State
from .rhs import StateEvaluator, immune_activation, infection_rate, rhs

# the validator reaches into the integrator, which needs the names above
from .hypotheses import (  # noqa: E402
    HypothesisCheck,
    HypothesisReport,
    validate_hypotheses,
)

__all__ = [
    "GrowthFunction",
    "LogisticSource",
    "LinearSource",
    "IncidenceFunction",
    "RatioDependent",
    "Saturating",
    "Bilinear",
    "BeddingtonDeAngelis",
    "ResponseFunction",
    "Identity",
    "Quadratic",
    "ModelSpec",
    "Parameters",
    "State",
    "StateEvaluator",
    "rhs",
    "infection_rate",
    "immune_activation",
    "HypothesisCheck",
    "HypothesisReport",
    "validate_hypotheses",
]
