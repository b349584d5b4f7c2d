"""The determinize-plan-execute-observe-replan loop for one episode.

The engine owns the hidden true state and the agent's belief, and keeps
them in sync as user actions come in. Plans are computed over the
determinized belief and followed until the user deviates or sensing
contradicts a committed find, then recomputed. find steps never become
instructions: they dissolve as soon as sensing pins the bike down.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Dict, Optional, Tuple

from .. import domain
from ..planning.model import (
    Fluent,
    GroundAction,
    InapplicableActionError,
    PlanningProblem,
    State,
    apply as apply_action,
)
from ..planning.search import search
from .belief import BeliefState, determinize, sense_at


class EpisodeAbortedError(Exception):
    """The episode could not continue; carries the partial history."""

    def __init__(self, message: str, history: Tuple[GroundAction, ...],
                 replans: int):
        super().__init__(message)
        self.history = history
        self.replans = replans


@dataclass(frozen=True)
class StepResult:
    action: GroundAction
    observations: Tuple[Tuple[Fluent, bool], ...]
    deviated: bool
    replanned: bool
    done: bool


@dataclass(frozen=True)
class PlanEpoch:
    """Snapshot of the plan currently being followed.

    `executed` + `intention` is exactly the plan as it came out of the
    last planning call (consumed find steps count as executed), and
    `base_state` is the determinized state that plan starts from.
    """

    problem: PlanningProblem
    base_state: State
    belief_key: str
    executed: Tuple[GroundAction, ...]
    intention: Tuple[GroundAction, ...]


class EpisodeEngine:
    """Execution state machine for a single episode.

    `cost_fn` is the agent's planning cost model (None = base costs);
    `plan_cache` maps belief keys to planned action tuples and may be
    shared across episodes running the same configuration.
    """

    def __init__(self, problem: PlanningProblem, sensing,
                 belief: BeliefState,
                 cost_fn: Optional[Callable] = None,
                 max_replans: Optional[int] = None,
                 plan_cache: Optional[Dict[str, tuple]] = None):
        self._problem = problem
        self._sensing = tuple(sensing)
        self._belief = belief
        self._cost_fn = cost_fn
        # nominal default 4 x bikes, but never below the termination
        # argument's worst case (every candidate guess wrong once)
        bikes = len(belief.candidates) + len(belief.collected)
        worst = sum(len(c) for c in belief.candidates.values())
        self._max_replans = (max(4 * max(1, bikes), worst + max(1, bikes))
                             if max_replans is None else max_replans)
        self._cache = plan_cache if plan_cache is not None else {}
        self._true: State = problem.initial_true
        self._history: list = []
        self._intention: Tuple[GroundAction, ...] = ()
        self._visited = {belief.location}
        self._planning_calls = 0
        self._began = False
        self._epoch_executed: list = []
        self._epoch_problem: Optional[PlanningProblem] = None
        self._epoch_base: Optional[State] = None
        self._epoch_key = ""

    # --- lifecycle ---

    def begin(self) -> Tuple[Tuple[Fluent, bool], ...]:
        """Sense at the start location and compute the first plan."""
        if self._began:
            raise RuntimeError("episode already begun")
        self._began = True
        self._belief, observations = sense_at(
            self._belief, self._sensing, self._true)
        if not self.goal_reached():
            self._plan()
        return tuple(observations)

    def apply_user_action(self, action: GroundAction) -> StepResult:
        """Advance the episode by one user-executed action."""
        if not self._began:
            raise RuntimeError("call begin() first")
        if action.name == domain.FIND:
            raise InapplicableActionError("find steps are not executable")
        self._true = apply_action(self._true, action)  # raises if illegal
        if domain.is_move(action):
            self._belief = self._belief.moved_to(domain.move_dst(action))
            self._visited.add(domain.move_dst(action))
        elif domain.is_pickup(action):
            self._belief = self._belief.picked_up(domain.pickup_bike(action))
        self._belief, observations = sense_at(
            self._belief, self._sensing, self._true)
        self._history.append(action)

        deviated = not self._intention or action != self._intention[0]
        if not deviated:
            self._intention = self._intention[1:]
            self._epoch_executed.append(action)
            self._consume_finds()
        replanned = False
        if not self.goal_reached():
            if deviated or self._intention_stale() or not self._intention:
                self._plan()
                replanned = True
        else:
            self._intention = ()
        return StepResult(action=action, observations=tuple(observations),
                          deviated=deviated, replanned=replanned,
                          done=self.goal_reached())

    # --- queries ---

    def pending(self) -> Optional[GroundAction]:
        """The action the agent wants executed next (never a find)."""
        return self._intention[0] if self._intention else None

    def goal_reached(self) -> bool:
        return self._problem.goal <= self._true

    def belief(self) -> BeliefState:
        return self._belief

    def true_state(self) -> State:
        return self._true

    def history(self) -> Tuple[GroundAction, ...]:
        return tuple(self._history)

    def intention(self) -> Tuple[GroundAction, ...]:
        return self._intention

    def visited(self) -> frozenset:
        return frozenset(self._visited)

    def plan_epoch(self) -> Optional[PlanEpoch]:
        """The plan in force since the last planning call, or None."""
        if self._epoch_problem is None:
            return None
        return PlanEpoch(problem=self._epoch_problem,
                         base_state=self._epoch_base,
                         belief_key=self._epoch_key,
                         executed=tuple(self._epoch_executed),
                         intention=self._intention)

    @property
    def replans(self) -> int:
        """Planning calls beyond the initial one."""
        return max(0, self._planning_calls - 1)

    def applicable_user_actions(self) -> Tuple[GroundAction, ...]:
        """Real-world actions the user could take right now."""
        out = [a for a in self._problem.actions
               if a.pre <= self._true and not domain.is_find(a)]
        return tuple(out)

    def applicable_moves(self) -> Tuple[GroundAction, ...]:
        return tuple(a for a in self.applicable_user_actions()
                     if domain.is_move(a))

    # --- internals ---

    def _plan(self) -> None:
        if self._planning_calls > self._max_replans:
            raise EpisodeAbortedError(
                f"replan budget {self._max_replans} exhausted",
                self.history(), self.replans)
        self._planning_calls += 1
        det = determinize(self._belief, self._problem)
        key = self._belief.canonical_key()
        if key in self._cache:
            actions = self._cache[key]
        else:
            plan = search(det, start=det.initial_true, cost_fn=self._cost_fn)
            actions = plan.actions if plan else None
            self._cache[key] = actions
        if actions is None:
            raise EpisodeAbortedError(
                "no plan from the current belief",
                self.history(), self.replans)
        self._intention = actions
        self._epoch_problem = det
        self._epoch_base = det.initial_true
        self._epoch_key = key
        self._epoch_executed = []
        self._consume_finds()

    def _consume_finds(self) -> None:
        while self._intention and domain.is_find(self._intention[0]):
            bike = domain.find_bike(self._intention[0])
            loc = domain.find_location(self._intention[0])
            if self._belief.located(bike) == loc:
                self._epoch_executed.append(self._intention[0])
                self._intention = self._intention[1:]
            else:
                break  # stale; the caller replans

    def _intention_stale(self) -> bool:
        """A committed find/pickup no longer matches the belief."""
        for a in self._intention:
            if domain.is_find(a) or domain.is_pickup(a):
                bike, loc = a.params[0], a.params[1]
                if bike in self._belief.collected:
                    return True
                located = self._belief.located(bike)
                if located is not None:
                    if loc != located:
                        return True
                elif loc not in self._belief.candidates.get(bike, ()):
                    return True
        return False
