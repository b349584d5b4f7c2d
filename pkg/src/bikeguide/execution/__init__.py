"""Partially-observable execution: beliefs, replanning, policies."""

from .belief import (
    BeliefState,
    ExecutionContext,
    InconsistentBeliefError,
    SensingRule,
    determinize,
    sense_at,
)
from .engine import EpisodeAbortedError, EpisodeEngine
from .policy import Policy, build_policy, load_policy, save_policy

__all__ = [
    "BeliefState",
    "EpisodeAbortedError",
    "EpisodeEngine",
    "ExecutionContext",
    "InconsistentBeliefError",
    "Policy",
    "SensingRule",
    "build_policy",
    "determinize",
    "load_policy",
    "save_policy",
    "sense_at",
]
