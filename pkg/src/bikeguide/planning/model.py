"""Ground STRIPS model: fluents, actions, states, problems, plans.

States are closed-world sets of fluents. Costs are exact rationals so that
cost comparisons never suffer float drift.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Optional, Sequence


class PlanningError(Exception):
    """Base class for planning-layer failures."""


class InapplicableActionError(PlanningError):
    """Raised when an action is applied in a state that lacks its preconditions."""


class ProblemValidationError(PlanningError):
    """Raised when a problem instance violates a structural invariant."""


@dataclass(frozen=True, order=True)
class Fluent:
    """A ground atom, e.g. at(tree) or bike-at(bike1, house_blue)."""

    name: str
    args: tuple[str, ...] = ()

    def __str__(self) -> str:
        if not self.args:
            return self.name
        return f"{self.name}({', '.join(self.args)})"


def fl(name: str, *args: str) -> Fluent:
    """Shorthand constructor used heavily in tests and compilers."""
    return Fluent(name, tuple(args))


State = frozenset  # frozenset[Fluent]; closed world


@dataclass(frozen=True)
class Literal:
    """A signed fluent, as used in the agent's known partial state."""

    fluent: Fluent
    positive: bool = True

    def __str__(self) -> str:
        return str(self.fluent) if self.positive else f"not {self.fluent}"


@dataclass(frozen=True)
class GroundAction:
    """A ground action with preconditions, add/delete effects and a base cost."""

    name: str
    params: tuple[str, ...]
    pre: frozenset
    add: frozenset
    delete: frozenset
    cost: Fraction = Fraction(1)

    def __post_init__(self) -> None:
        if self.add & self.delete:
            raise ProblemValidationError(
                f"action {self} has overlapping add and delete effects")
        if self.cost < 0:
            raise ProblemValidationError(f"action {self} has negative cost")

    @property
    def sort_key(self) -> tuple[str, tuple[str, ...]]:
        return (self.name, self.params)

    def __str__(self) -> str:
        return f"{self.name}({', '.join(self.params)})"


def applicable(state: State, action: GroundAction) -> bool:
    """True iff every precondition holds in the state."""
    return action.pre <= state


def apply(state: State, action: GroundAction) -> State:
    """Successor state (state minus deletes, plus adds).

    Raises InapplicableActionError if the preconditions do not hold.
    """
    if not applicable(state, action):
        missing = sorted(map(str, action.pre - state))
        raise InapplicableActionError(
            f"{action} not applicable; missing {missing}")
    return (state - action.delete) | action.add


@dataclass
class PlanningProblem:
    """A ground planning problem over a fixed fluent universe.

    `sensing` carries the sensing rules attached by the world compiler; the
    classical search ignores them. `initial_known` is the agent's signed
    partial view of `initial_true`.
    """

    fluents: frozenset
    actions: tuple
    initial_true: State
    goal: frozenset
    sensing: tuple = ()
    initial_known: frozenset = frozenset()  # frozenset[Literal]
    cost_fn: Optional[Callable[[GroundAction], Fraction]] = None

    def __post_init__(self) -> None:
        self.actions = tuple(sorted(self.actions, key=lambda a: a.sort_key))

    def action_cost(self, action: GroundAction) -> Fraction:
        if self.cost_fn is None:
            return action.cost
        return Fraction(self.cost_fn(action))

    def validate(self) -> None:
        """Check structural invariants; raises ProblemValidationError."""
        for a in self.actions:
            for part, name in ((a.pre, "precondition"), (a.add, "add"),
                               (a.delete, "delete")):
                stray = part - self.fluents
                if stray:
                    raise ProblemValidationError(
                        f"action {a}: {name} uses fluents outside the "
                        f"universe: {sorted(map(str, stray))}")
        if not self.initial_true <= self.fluents:
            raise ProblemValidationError("initial state outside fluent universe")
        if not self.goal <= self.fluents:
            raise ProblemValidationError("goal outside fluent universe")
        for lit in self.initial_known:
            if lit.positive and lit.fluent not in self.initial_true:
                raise ProblemValidationError(
                    f"known literal {lit} contradicts the actual initial state")
            if not lit.positive and lit.fluent in self.initial_true:
                raise ProblemValidationError(
                    f"known literal {lit} contradicts the actual initial state")

    def dump_text(self) -> str:
        """Human-readable dump: one fluent/action per line."""
        out = ["# fluents"]
        out += [f"fluent {f}" for f in sorted(self.fluents)]
        out.append("# actions")
        for a in self.actions:
            out.append(
                f"action {a} cost={self.action_cost(a)} "
                f"pre={{{', '.join(map(str, sorted(a.pre)))}}} "
                f"add={{{', '.join(map(str, sorted(a.add)))}}} "
                f"del={{{', '.join(map(str, sorted(a.delete)))}}}")
        out.append("# initial")
        out += [f"init {f}" for f in sorted(self.initial_true)]
        out.append("# goal")
        out += [f"goal {f}" for f in sorted(self.goal)]
        return "\n".join(out) + "\n"


@dataclass(frozen=True)
class Plan:
    """An action sequence with its total cost under the active cost model."""

    actions: tuple
    cost: Fraction

    def __bool__(self) -> bool:
        return True

    def __len__(self) -> int:
        return len(self.actions)

    def __iter__(self):
        return iter(self.actions)

    @classmethod
    def empty(cls) -> "Plan":
        return cls((), Fraction(0))


@dataclass(frozen=True)
class NoPlan:
    """Explicit unsolvable result; distinct from error conditions."""

    reason: str = "goal unreachable"

    def __bool__(self) -> bool:
        return False


def validate_plan(plan: Sequence[GroundAction] | Plan, start: State,
                  goal: Iterable[Fluent]) -> bool:
    """True iff the plan applies sequentially from start and reaches the goal."""
    actions = plan.actions if isinstance(plan, Plan) else tuple(plan)
    state = start
    for a in actions:
        if not applicable(state, a):
            return False
        state = apply(state, a)
    return frozenset(goal) <= state
