"""Windowed local-inefficiency detection over the active plan.

A stretch of the plan is locally inefficient when some contiguous piece
inside the window around the current step could be swapped for a
strictly cheaper sequence with the same start and end states. The check
always runs under the plain cost model, even for agents that planned
under a transformed one.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, Optional, Sequence, Tuple

from ..planning.model import (
    GroundAction,
    Plan,
    PlanningProblem,
    apply as apply_action,
)
from ..planning.search import search


@dataclass(frozen=True)
class InefficiencyConfig:
    """Window shape and cost model for the analysis.

    `cost_fn` None means the problem's own action costs, which for this
    package's compiled maps are the untransformed base costs.
    """

    look_back: int = 2
    look_ahead: int = 2
    cost_fn: Optional[Callable[[GroundAction], Fraction]] = None

    def __post_init__(self):
        if self.look_back < 0 or self.look_ahead < 0:
            raise ValueError("window bounds must be non-negative")
        if self.look_back + self.look_ahead < 1:
            raise ValueError("window must span at least one step")


@dataclass(frozen=True)
class InefficiencyWitness:
    """A cheaper replacement for trace[start..end] (inclusive)."""

    start: int
    end: int
    segment_cost: Fraction
    replacement: Tuple[GroundAction, ...]
    replacement_cost: Fraction


def _fold(state: frozenset, actions: Sequence[GroundAction]) -> frozenset:
    for a in actions:
        state = apply_action(state, a)
    return state


def detect_local_inefficiency(
    executed: Sequence[GroundAction],
    intention: Sequence[GroundAction],
    config: InefficiencyConfig,
    problem: PlanningProblem,
    seg_cache: Optional[Dict[tuple, Optional[InefficiencyWitness]]] = None,
    cache_key: Optional[str] = None,
) -> Tuple[bool, Optional[InefficiencyWitness]]:
    """Check the window around the current step for a cheaper rewrite.

    `executed` + `intention` must be the plan in force, starting from
    `problem.initial_true`; the current step is the first intended one.
    Windows sticking out past the plan are clamped. `seg_cache` keyed by
    (cache_key, i, j) memoises per-segment verdicts across calls that
    share the same plan.
    """
    trace = tuple(executed) + tuple(intention)
    if not trace:
        return False, None
    x = min(len(executed), len(trace) - 1)
    lo = max(0, x - config.look_back)
    hi = min(len(trace) - 1, x + config.look_ahead)
    if lo > hi:
        return False, None

    cost = config.cost_fn or (lambda a: a.cost)
    state = _fold(problem.initial_true, trace[:lo])
    states = [state]
    for a in trace[lo:hi + 1]:
        state = apply_action(state, a)
        states.append(state)

    for i in range(lo, hi + 1):
        for j in range(i, hi + 1):
            key = (cache_key, i, j)
            if seg_cache is not None and cache_key is not None \
                    and key in seg_cache:
                witness = seg_cache[key]
                if witness is not None:
                    return True, witness
                continue
            witness = _segment_witness(
                trace[i:j + 1], states[i - lo], states[j - lo + 1],
                i, j, cost, config.cost_fn, problem)
            if seg_cache is not None and cache_key is not None:
                seg_cache[key] = witness
            if witness is not None:
                return True, witness
    return False, None


def enumerate_witnesses(actions, problem,
                        cost_fn=None) -> Tuple[InefficiencyWitness, ...]:
    """Every contiguous segment of `actions` with a cheaper rewrite.

    Unlike the windowed detector this scans the whole sequence and does
    not stop at the first hit; plan inspection and cross-checking use it.
    """
    trace = tuple(actions)
    if not trace:
        return ()
    cost = cost_fn or (lambda a: a.cost)
    states = [problem.initial_true]
    for a in trace:
        states.append(apply_action(states[-1], a))
    out = []
    for i in range(len(trace)):
        for j in range(i, len(trace)):
            witness = _segment_witness(trace[i:j + 1], states[i],
                                       states[j + 1], i, j, cost,
                                       cost_fn, problem)
            if witness is not None:
                out.append(witness)
    return tuple(out)


def _segment_witness(segment, start_state, end_state, i, j, cost,
                     cost_fn, problem) -> Optional[InefficiencyWitness]:
    segment_cost = sum(cost(a) for a in segment)
    if segment_cost <= 0:
        return None  # nothing can strictly beat a free segment
    plan = search(problem, start=start_state, cost_fn=cost_fn,
                  goal=end_state)
    if not isinstance(plan, Plan) or plan.cost >= segment_cost:
        return None
    # Goal satisfaction is subset-based; in this domain a strict
    # superset of a reachable full state is unreachable, so the
    # replacement must land exactly. Check rather than trust.
    final = _fold(start_state, plan.actions)
    if final != end_state:
        raise RuntimeError(
            "replacement search left the segment's end state")
    return InefficiencyWitness(start=i, end=j, segment_cost=segment_cost,
                               replacement=plan.actions,
                               replacement_cost=plan.cost)
