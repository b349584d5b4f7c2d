"""Bounded-deviation state-action policies over belief states.

A policy pins down, for every belief reachable under it, the action the
agent would plan from scratch. Expansion is breadth-first from the
initial belief and branches over (a) every sensing outcome of the
intended action, (b) user moves compatible with an ambiguous
instruction, and (c) arbitrary single-step deviations, the last kind
drawing down a per-path error budget (default two errors). Lookups
outside the stored domain signal a planner-in-the-loop recovery.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Callable, Dict, FrozenSet, Iterable, List, Optional, Tuple

from .. import domain
from ..planning.model import GroundAction, PlanningProblem
from .belief import BeliefState, plan_from_belief

FORMAT_NAME = "bikeguide-policy"
FORMAT_VERSION = 1


class PolicyError(ValueError):
    pass


@dataclass
class Policy:
    """Belief-key -> action mapping; None marks a goal belief."""

    map_name: str
    budget: int
    entries: Dict[str, Optional[GroundAction]]

    def lookup(self, belief: BeliefState) -> Optional[GroundAction]:
        """The stored action, or None for goal beliefs; KeyError on a miss."""
        return self.entries[belief.canonical_key()]

    def covers(self, belief: BeliefState) -> bool:
        return belief.canonical_key() in self.entries

    def __len__(self) -> int:
        return len(self.entries)


def _user_actions(problem: PlanningProblem,
                  belief: BeliefState) -> List[GroundAction]:
    """Actions the user could take, as implied by a post-sensing belief.

    Moves out of the current landmark are static; a pickup is possible
    exactly when the bike is known to sit at the agent's location (the
    belief has already sensed here, so knowledge equals ground truth).
    """
    out = []
    for a in problem.actions:
        if domain.is_move(a) and domain.move_src(a) == belief.location:
            out.append(a)
    for bike in belief.pending_bikes():
        if belief.located(bike) == belief.location:
            pickup = _pickup_action(problem, bike, belief.location)
            out.append(pickup)
    return out


def _pickup_cost(problem: PlanningProblem, bike: str) -> Fraction:
    for a in problem.actions:
        if domain.is_pickup(a) and domain.pickup_bike(a) == bike:
            return a.cost
    return Fraction(1)


def _pickup_action(problem: PlanningProblem, bike: str,
                   loc: str) -> GroundAction:
    return GroundAction(
        name=domain.PICKUP, params=(bike, loc),
        pre=frozenset({domain.at(loc), domain.bike_at(bike, loc)}),
        add=frozenset({domain.holding(bike)}),
        delete=frozenset({domain.bike_at(bike, loc)}),
        cost=_pickup_cost(problem, bike))


def sense_branches(belief: BeliefState) -> List[BeliefState]:
    """Every way sensing at the current location can resolve.

    Each bike that still counts the location among its candidates is
    observed present or absent, so k unresolved bikes give 2^k branches
    (absence is impossible when only one candidate remains).
    """
    loc = belief.location
    unresolved = [b for b in belief.pending_bikes()
                  if loc in belief.candidates[b] and belief.located(b) is None]
    outcomes = [belief]
    for bike in unresolved:
        nxt = []
        for b0 in outcomes:
            nxt.append(b0.observed(domain.bike_at(bike, loc), True))
            if len(b0.candidates[bike]) > 1:
                nxt.append(b0.observed(domain.bike_at(bike, loc), False))
        outcomes = nxt
    return outcomes


def belief_outcomes(belief: BeliefState,
                    action: GroundAction) -> List[BeliefState]:
    """Every belief that executing `action` can lead to."""
    if domain.is_move(action):
        after = belief.moved_to(domain.move_dst(action))
    elif domain.is_pickup(action):
        after = belief.picked_up(domain.pickup_bike(action))
    else:
        raise PolicyError(f"not a user action: {action}")
    return sense_branches(after)


def _goal_reached(problem: PlanningProblem, belief: BeliefState) -> bool:
    for f in problem.goal:
        if f.name == "at" and f.args[0] != belief.location:
            return False
        if f.name == "holding" and f.args[0] not in belief.collected:
            return False
    return True


def build_policy(problem: PlanningProblem, initial_belief: BeliefState,
                 similar_sets: Optional[Callable[[GroundAction],
                                                 FrozenSet[GroundAction]]] = None,
                 error_budget: int = 2,
                 cost_fn=None,
                 map_name: str = "",
                 plan_cache: Optional[dict] = None) -> Policy:
    """Expand a policy from the initial belief (all sensing outcomes of it)."""
    if error_budget < 0:
        raise PolicyError("error budget must be >= 0")
    similar_sets = similar_sets or (lambda a: frozenset())
    cache = plan_cache if plan_cache is not None else {}
    entries: Dict[str, Optional[GroundAction]] = {}
    best_budget: Dict[str, int] = {}

    # the start belief itself senses at the base before anything happens
    queue = deque((b, error_budget)
                  for b in sense_branches(initial_belief))
    while queue:
        belief, budget = queue.popleft()
        key = belief.canonical_key()
        if key in best_budget and best_budget[key] >= budget:
            continue
        first_visit = key not in best_budget
        best_budget[key] = budget

        if first_visit:
            if _goal_reached(problem, belief):
                entries[key] = None
                continue
            actions = plan_from_belief(problem, belief,
                                       cost_fn=cost_fn, cache=cache)
            if actions is None:
                raise PolicyError(f"unsolvable belief in policy: {key}")
            entries[key] = actions[0] if actions else None
        planned = entries[key]
        if planned is None:
            continue

        seen_children = set()

        def push(child_action: GroundAction, child_budget: int):
            for outcome in belief_outcomes(belief, child_action):
                ck = outcome.canonical_key()
                if (ck, child_budget) in seen_children:
                    continue
                seen_children.add((ck, child_budget))
                queue.append((outcome, child_budget))

        push(planned, budget)
        alternatives = similar_sets(planned)
        for alt in sorted(alternatives, key=lambda a: a.sort_key):
            push(alt, budget)
        if budget > 0:
            for other in _user_actions(problem, belief):
                if other == planned or other in alternatives:
                    continue
                push(other, budget - 1)
    return Policy(map_name=map_name, budget=error_budget, entries=entries)


# --- serialization ---


def save_policy(policy: Policy, path) -> None:
    lines = [json.dumps({
        "format": FORMAT_NAME, "version": FORMAT_VERSION,
        "map": policy.map_name, "budget": policy.budget,
        "entries": len(policy.entries)}, sort_keys=True)]
    for key in sorted(policy.entries):
        action = policy.entries[key]
        record = {"belief": key,
                  "action": None if action is None else
                  {"name": action.name, "params": list(action.params)}}
        lines.append(json.dumps(record, sort_keys=True))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_policy(path, problem: PlanningProblem) -> Policy:
    """Read a policy file back, resolving actions against `problem`."""
    raw = Path(path).read_text(encoding="utf-8").splitlines()
    lines = []
    for lineno, line in enumerate(raw, start=1):
        if not line.strip():
            continue
        try:
            lines.append(json.loads(line))
        except json.JSONDecodeError as exc:
            raise PolicyError(f"line {lineno}: {exc}") from None
    if not lines:
        raise PolicyError("empty policy file")
    header = lines[0]
    if not isinstance(header, dict) or header.get("format") != FORMAT_NAME:
        raise PolicyError(f"not a {FORMAT_NAME} file")
    if header.get("version") != FORMAT_VERSION:
        raise PolicyError(f"unsupported version {header.get('version')!r}")
    moves = {(domain.move_src(a), domain.move_dst(a)): a
             for a in problem.actions if domain.is_move(a)}
    entries: Dict[str, Optional[GroundAction]] = {}
    for i, record in enumerate(lines[1:], start=2):
        action = record["action"]
        if action is None:
            entries[record["belief"]] = None
            continue
        name, params = action["name"], tuple(action["params"])
        if name == domain.MOVE:
            try:
                entries[record["belief"]] = moves[params]
            except KeyError:
                raise PolicyError(f"line {i}: unknown road {params}")
        elif name == domain.PICKUP:
            entries[record["belief"]] = _pickup_action(
                problem, params[0], params[1])
        else:
            raise PolicyError(f"line {i}: unsupported action kind {name!r}")
    if len(entries) != header.get("entries"):
        raise PolicyError("entry count does not match header")
    return Policy(map_name=header.get("map", ""),
                  budget=header.get("budget", 0), entries=entries)
