"""Bitmask encoding of a ground problem for the search kernels.

Fluents are indexed in sorted order and states become Python integers
(bit i set = fluent i true). Costs are scaled to a common integer
denominator so the kernels work in exact int64 arithmetic. Actions are
ordered lexicographically by (name, params); the kernels expand ties in
that order, which fixes the tie-broken plan deterministically.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm

from .model import GroundAction, PlanningProblem, ProblemValidationError, State


@dataclass
class EncodedProblem:
    num_fluents: int
    fluent_index: dict
    actions: tuple  # GroundAction, sorted
    pre_masks: list
    add_masks: list
    del_masks: list
    scaled_costs: list  # int, = cost * cost_scale
    exact_costs: list   # Fraction, per action under the active cost model
    cost_scale: int
    start_mask: int
    goal_mask: int

    def mask_of(self, fluents) -> int:
        m = 0
        for f in fluents:
            m |= 1 << self.fluent_index[f]
        return m

    def state_of(self, mask: int) -> State:
        return frozenset(f for f, i in self.fluent_index.items() if mask >> i & 1)


def encode(problem: PlanningProblem, start: State,
           goal=None, cost_fn=None) -> EncodedProblem:
    """Encode `problem` for kernel search from `start`.

    `cost_fn` overrides the problem's cost model for this encoding only.
    Raises ProblemValidationError if start or goal mention unknown fluents.
    """
    ordered = sorted(problem.fluents)
    index = {f: i for i, f in enumerate(ordered)}
    goal = problem.goal if goal is None else frozenset(goal)
    for f in start | goal:
        if f not in index:
            raise ProblemValidationError(f"fluent {f} outside the universe")

    actions = problem.actions  # already sorted by the problem
    if cost_fn is None:
        exact = [problem.action_cost(a) for a in actions]
    else:
        exact = [Fraction(cost_fn(a)) for a in actions]
    scale = lcm(*(c.denominator for c in exact)) if exact else 1
    scaled = [int(c * scale) for c in exact]
    if any(c < 0 for c in scaled):
        raise ProblemValidationError("negative action cost")

    def mask(fluents) -> int:
        m = 0
        for f in fluents:
            m |= 1 << index[f]
        return m

    return EncodedProblem(
        num_fluents=len(ordered),
        fluent_index=index,
        actions=actions,
        pre_masks=[mask(a.pre) for a in actions],
        add_masks=[mask(a.add) for a in actions],
        del_masks=[mask(a.delete) for a in actions],
        scaled_costs=scaled,
        exact_costs=exact,
        cost_scale=scale,
        start_mask=mask(start),
        goal_mask=mask(goal),
    )
