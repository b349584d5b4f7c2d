"""Belief states over unknown bike locations, sensing, determinization.

The agent never sees where bikes really are. It tracks, per bike, the
set of still-possible locations (seeded from the district reports) and a
growing set of known literals. Sensing rules fire automatically when the
agent stands on a candidate location, collapsing or pruning the set.
`determinize` turns a belief into a classical problem by letting the
planner commit to one optimistic candidate per bike via zero-cost find
actions.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Dict, FrozenSet, Iterable, Mapping, Optional, Tuple

from .. import domain
from ..planning.model import Fluent, GroundAction, PlanningProblem
from ..planning.search import search


class InconsistentBeliefError(Exception):
    """An observation or update contradicts what is already known."""


@dataclass(frozen=True)
class SensingRule:
    """When every trigger fluent holds, the observed fluent's value is revealed."""

    trigger: FrozenSet[Fluent]
    observed: Fluent


@dataclass(frozen=True)
class BeliefState:
    """The agent's partial state.

    `candidates` maps every uncollected bike to its possible locations;
    collected bikes have no entry. `known_true`/`known_false` hold the
    signed literals accumulated so far (agent position included).
    """

    location: str
    candidates: Mapping[str, FrozenSet[str]]
    collected: FrozenSet[str]
    known_true: FrozenSet[Fluent]
    known_false: FrozenSet[Fluent]

    def __post_init__(self):
        object.__setattr__(
            self, "candidates",
            {b: frozenset(ls) for b, ls in sorted(self.candidates.items())})
        if self.known_true & self.known_false:
            clash = sorted(map(str, self.known_true & self.known_false))
            raise InconsistentBeliefError(
                f"literals both true and false: {', '.join(clash)}")
        for bike, cands in self.candidates.items():
            if not cands:
                raise InconsistentBeliefError(
                    f"bike {bike!r} uncollected with no candidate left")
            if bike in self.collected:
                raise InconsistentBeliefError(
                    f"bike {bike!r} both collected and pending")

    # --- queries ---

    def located(self, bike: str) -> Optional[str]:
        """The bike's position if pinned down by a positive observation."""
        cands = self.candidates.get(bike)
        if cands is not None and len(cands) == 1:
            (loc,) = cands
            if domain.bike_at(bike, loc) in self.known_true:
                return loc
        return None

    def pending_bikes(self) -> Tuple[str, ...]:
        return tuple(sorted(self.candidates))

    def candidate_total(self) -> int:
        return sum(len(c) for c in self.candidates.values())

    def canonical_key(self) -> str:
        """Deterministic text key for policy storage and lookups."""
        parts = [f"at={self.location}"]
        parts.append("col=" + ",".join(sorted(self.collected)))
        parts.append("cand=" + ";".join(
            f"{b}:{'|'.join(sorted(ls))}"
            for b, ls in sorted(self.candidates.items())))
        parts.append("true=" + ",".join(sorted(str(f) for f in self.known_true)))
        parts.append("false=" + ",".join(sorted(str(f) for f in self.known_false)))
        return " ".join(parts)

    # --- updates (all return new beliefs) ---

    def moved_to(self, landmark: str) -> "BeliefState":
        known_true = (self.known_true - {domain.at(self.location)}) | {
            domain.at(landmark)}
        return replace(self, location=landmark, known_true=known_true)

    def picked_up(self, bike: str) -> "BeliefState":
        loc = self.located(bike)
        if loc is None or loc != self.location:
            raise InconsistentBeliefError(
                f"pickup of {bike!r} at {self.location!r} but bike not "
                f"known to be here")
        cands = dict(self.candidates)
        del cands[bike]
        return replace(
            self,
            candidates=cands,
            collected=self.collected | {bike},
            known_true=(self.known_true - {domain.bike_at(bike, loc)})
            | {domain.holding(bike)},
            known_false=self.known_false | {domain.bike_at(bike, loc)},
        )

    def observed(self, fluent: Fluent, value: bool) -> "BeliefState":
        """Fold in one sensing outcome; prunes candidate sets."""
        if value and fluent in self.known_false:
            raise InconsistentBeliefError(f"{fluent} observed true, known false")
        if not value and fluent in self.known_true:
            raise InconsistentBeliefError(f"{fluent} observed false, known true")
        known_true = self.known_true | {fluent} if value else self.known_true
        known_false = self.known_false if value else self.known_false | {fluent}
        cands = dict(self.candidates)
        if fluent.name == "bike-at":
            bike, loc = fluent.args
            if bike in cands:
                if value:
                    if loc not in cands[bike]:
                        raise InconsistentBeliefError(
                            f"bike {bike!r} observed at {loc!r}, not a candidate")
                    cands[bike] = frozenset({loc})
                else:
                    cands[bike] = cands[bike] - {loc}
                    if not cands[bike]:
                        raise InconsistentBeliefError(
                            f"bike {bike!r} ruled out everywhere")
        return replace(self, candidates=cands,
                       known_true=known_true, known_false=known_false)


@dataclass(frozen=True)
class ExecutionContext:
    """Executed history, remaining intention, and the belief in force."""

    history: Tuple[GroundAction, ...]
    intention: Tuple[GroundAction, ...]
    belief: BeliefState
    visited: FrozenSet[str] = frozenset()
    replans: int = 0


def initial_belief(base: str, candidates: Mapping[str, Iterable[str]],
                   known_true: Iterable[Fluent] = ()) -> BeliefState:
    return BeliefState(
        location=base,
        candidates={b: frozenset(ls) for b, ls in candidates.items()},
        collected=frozenset(),
        known_true=frozenset(known_true) | {domain.at(base)},
        known_false=frozenset(),
    )


def sense_at(belief: BeliefState, rules: Iterable[SensingRule],
             true_state: FrozenSet[Fluent]):
    """Fire every rule whose trigger holds in the real current state.

    The observed value is read from the hidden ground truth. Returns
    (new belief, list of (fluent, value) observations actually new).
    """
    observations = []
    for rule in sorted(rules, key=lambda r: str(r.observed)):
        if not rule.trigger <= true_state:
            continue
        fluent = rule.observed
        if fluent in belief.known_true or fluent in belief.known_false:
            continue  # already known; nothing new
        value = fluent in true_state
        belief = belief.observed(fluent, value)
        observations.append((fluent, value))
    return belief, observations


def determinize(belief: BeliefState,
                problem: PlanningProblem) -> PlanningProblem:
    """Compile a belief into a classical problem the planner can solve.

    Moves carry over unchanged. For each unlocated bike the planner gets
    one zero-cost find(b,l) per candidate l, gated on standing at l, and
    a pickup(b,l) per candidate; choosing the cheapest find amounts to an
    optimistic guess about where the bike is.
    """
    moves = tuple(a for a in problem.actions if domain.is_move(a))
    pickup_cost: Dict[str, Fraction] = {
        domain.pickup_bike(a): a.cost
        for a in problem.actions if domain.is_pickup(a)}

    fluents = set(problem.fluents)
    actions = list(moves)
    init = {domain.at(belief.location)}
    for bike in belief.collected:
        init.add(domain.holding(bike))
    for bike, cands in sorted(belief.candidates.items()):
        cost = pickup_cost.get(bike, Fraction(1))
        located = belief.located(bike)
        if located is not None:
            init.add(domain.bike_at(bike, located))
            actions.append(GroundAction(
                name=domain.PICKUP, params=(bike, located),
                pre=frozenset({domain.at(located),
                               domain.bike_at(bike, located)}),
                add=frozenset({domain.holding(bike)}),
                delete=frozenset({domain.bike_at(bike, located)}),
                cost=cost))
            continue
        fluents.add(domain.unfound(bike))
        init.add(domain.unfound(bike))
        for loc in sorted(cands):
            fluents.add(domain.bike_at(bike, loc))
            actions.append(GroundAction(
                name=domain.FIND, params=(bike, loc),
                pre=frozenset({domain.at(loc), domain.unfound(bike)}),
                add=frozenset({domain.bike_at(bike, loc)}),
                delete=frozenset({domain.unfound(bike)}),
                cost=Fraction(0)))
            actions.append(GroundAction(
                name=domain.PICKUP, params=(bike, loc),
                pre=frozenset({domain.at(loc), domain.bike_at(bike, loc)}),
                add=frozenset({domain.holding(bike)}),
                delete=frozenset({domain.bike_at(bike, loc)}),
                cost=cost))
    return PlanningProblem(
        fluents=frozenset(fluents),
        actions=tuple(actions),
        initial_true=frozenset(init),
        goal=problem.goal,
        sensing=problem.sensing,
    )


def plan_from_belief(problem: PlanningProblem, belief: BeliefState,
                     cost_fn=None, cache: Optional[dict] = None):
    """Optimal determinized plan from a belief, as an action tuple.

    Returns None when no plan exists. `cache` maps canonical belief keys
    to results and may be shared by everything planning under the same
    cost model.
    """
    key = belief.canonical_key()
    if cache is not None and key in cache:
        return cache[key]
    det = determinize(belief, problem)
    plan = search(det, start=det.initial_true, cost_fn=cost_fn)
    result = plan.actions if plan else None
    if cache is not None:
        cache[key] = result
    return result
