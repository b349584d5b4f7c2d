"""Optimal forward search over a planning problem.

The inner loop runs in one of two interchangeable kernels: a compiled
extension (built at install time) and a pure-Python twin. Both implement
the same A* with the same tie-breaking, so plans are identical no matter
which one is active. Set BIKEGUIDE_FORCE_PURE=1 to skip the extension.
"""

from __future__ import annotations

import os
from fractions import Fraction
from typing import Callable, Optional

from .model import (
    Fluent,
    GroundAction,
    NoPlan,
    Plan,
    PlanningProblem,
    State,
)
from .encode import encode

if os.environ.get("BIKEGUIDE_FORCE_PURE"):
    from . import kernel_py as _backend
else:
    try:
        from . import _kernel as _backend  # type: ignore[attr-defined]
    except ImportError:
        from . import kernel_py as _backend


def backend_name() -> str:
    """Name of the active kernel: "compiled" or "pure"."""
    return _backend.BACKEND_NAME


def search(
    problem: PlanningProblem,
    start: Optional[State] = None,
    cost_fn: Optional[Callable[[GroundAction], Fraction]] = None,
    heuristic: str = "hmax",
    goal=None,
):
    """Find a minimum-cost plan from `start` (default: problem initial state).

    `cost_fn` overrides per-action costs without rebuilding the problem;
    it must return a non-negative Fraction for every action. `goal`
    overrides the problem goal for this call. `heuristic` is "hmax" or
    "blind". Returns a Plan on success, else a NoPlan.
    """
    if heuristic not in ("hmax", "blind"):
        raise ValueError(f"unknown heuristic {heuristic!r}")
    if start is None:
        start = problem.initial_true
    enc = encode(problem, start, goal=goal, cost_fn=cost_fn)
    result = _backend.solve(
        enc.num_fluents,
        enc.pre_masks,
        enc.add_masks,
        enc.del_masks,
        enc.scaled_costs,
        enc.start_mask,
        enc.goal_mask,
        use_hmax=(heuristic == "hmax"),
    )
    if result is None:
        return NoPlan(reason="goal unreachable from start state")
    indices, _scaled = result
    actions = tuple(enc.actions[i] for i in indices)
    cost = sum((enc.exact_costs[i] for i in indices), Fraction(0))
    return Plan(actions=actions, cost=cost)
