"""Deterministic STRIPS-style planning core with exchangeable kernels."""

from .model import (
    Fluent,
    GroundAction,
    InapplicableActionError,
    Literal,
    NoPlan,
    Plan,
    PlanningError,
    PlanningProblem,
    ProblemValidationError,
    State,
    applicable,
    apply,
    fl,
    validate_plan,
)
from .search import backend_name, search

__all__ = [
    "Fluent",
    "GroundAction",
    "InapplicableActionError",
    "Literal",
    "NoPlan",
    "Plan",
    "PlanningError",
    "PlanningProblem",
    "ProblemValidationError",
    "State",
    "applicable",
    "apply",
    "backend_name",
    "fl",
    "search",
    "validate_plan",
]
