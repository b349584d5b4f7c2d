"""Compilation of a MapSpec into the planning domain.

The compiled problem carries the ground truth (bike positions) in its
initial state; the agent side starts from the belief built by
`initial_belief_for`, which only knows the base position and the
district reports. Unit move costs by default; "euclidean" divides
coordinate distance into exact thousandths for cost experiments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, FrozenSet, Tuple

from .. import domain
from ..execution.belief import BeliefState, SensingRule, initial_belief
from ..planning.model import GroundAction, Literal, PlanningProblem
from .model import MapSpec


@dataclass(frozen=True)
class CompiledMap:
    spec: MapSpec
    problem: PlanningProblem  # initial_true is the hidden ground truth
    sensing: Tuple[SensingRule, ...]
    candidates: Dict[str, FrozenSet[str]]  # bike -> possible locations

    def initial_belief_for(self) -> BeliefState:
        return initial_belief(self.spec.base, self.candidates)

    def move(self, src: str, dst: str) -> GroundAction:
        for a in self.problem.actions:
            if domain.is_move(a) and a.params == (src, dst):
                return a
        raise KeyError((src, dst))


def _move_cost(spec: MapSpec, src: str, dst: str, model: str) -> Fraction:
    if model == "unit":
        return Fraction(1)
    a, b = spec.landmark(src), spec.landmark(dst)
    dist = math.hypot(a.x - b.x, a.y - b.y)
    return Fraction(round(dist * 1000), 1000)


def compile_map(spec: MapSpec, cost_model: str = "unit") -> CompiledMap:
    """Ground the world into fluents, actions, sensing rules and goal."""
    if cost_model not in ("unit", "euclidean"):
        raise ValueError(f"unknown cost model {cost_model!r}")
    fluents = set()
    for lm in spec.landmarks:
        fluents.add(domain.at(lm.id))
        fluents.add(domain.visited(lm.id))
    candidates: Dict[str, FrozenSet[str]] = {}
    for bike in spec.bikes:
        fluents.add(domain.holding(bike.id))
        fluents.add(domain.delivered(bike.id))
        cands = spec.candidates(bike.id)
        candidates[bike.id] = cands
        for loc in cands | {bike.location}:
            fluents.add(domain.bike_at(bike.id, loc))

    actions = []
    for a, b in spec.roads:
        for src, dst in ((a, b), (b, a)):
            actions.append(GroundAction(
                name=domain.MOVE, params=(src, dst),
                pre=frozenset({domain.at(src)}),
                add=frozenset({domain.at(dst)}),
                delete=frozenset({domain.at(src)}),
                cost=_move_cost(spec, src, dst, cost_model)))
    for bike in spec.bikes:
        actions.append(GroundAction(
            name=domain.PICKUP, params=(bike.id, bike.location),
            pre=frozenset({domain.at(bike.location),
                           domain.bike_at(bike.id, bike.location)}),
            add=frozenset({domain.holding(bike.id)}),
            delete=frozenset({domain.bike_at(bike.id, bike.location)}),
            cost=Fraction(1)))

    sensing = []
    for bike in spec.bikes:
        for loc in sorted(candidates[bike.id]):
            sensing.append(SensingRule(
                trigger=frozenset({domain.at(loc)}),
                observed=domain.bike_at(bike.id, loc)))

    goal = {domain.holding(b.id) for b in spec.bikes}
    goal.add(domain.at(spec.base))
    initial = {domain.at(spec.base)}
    for bike in spec.bikes:
        initial.add(domain.bike_at(bike.id, bike.location))

    problem = PlanningProblem(
        fluents=frozenset(fluents),
        actions=tuple(actions),
        initial_true=frozenset(initial),
        goal=frozenset(goal),
        sensing=tuple(sensing),
        initial_known=frozenset({Literal(domain.at(spec.base), True)}),
    )
    problem.validate()
    return CompiledMap(spec=spec, problem=problem, sensing=tuple(sensing),
                       candidates=candidates)
