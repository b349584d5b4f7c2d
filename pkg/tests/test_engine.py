from __future__ import annotations

from fractions import Fraction

import pytest

from bikeguide import domain
from bikeguide.execution.belief import SensingRule, initial_belief
from bikeguide.execution.engine import EpisodeAbortedError, EpisodeEngine
from bikeguide.planning.model import (GroundAction, InapplicableActionError,
                                      PlanningProblem)
from bikeguide.world.compile import compile_map

from .conftest import small_maps


def corridor_world(true_loc):
    """B - Y - Z with one bike somewhere on the far side.

    The agent believes either Y or Z holds the bike; `true_loc` decides.
    """
    fluents = {domain.at(l) for l in ("B", "Y", "Z")}
    fluents |= {domain.bike_at("b1", "Y"), domain.bike_at("b1", "Z"),
                domain.holding("b1")}
    actions = []
    for a, b in (("B", "Y"), ("Y", "Z")):
        for src, dst in ((a, b), (b, a)):
            actions.append(GroundAction(
                name=domain.MOVE, params=(src, dst),
                pre=frozenset({domain.at(src)}),
                add=frozenset({domain.at(dst)}),
                delete=frozenset({domain.at(src)}),
                cost=Fraction(1)))
    actions.append(GroundAction(
        name=domain.PICKUP, params=("b1", true_loc),
        pre=frozenset({domain.at(true_loc), domain.bike_at("b1", true_loc)}),
        add=frozenset({domain.holding("b1")}),
        delete=frozenset({domain.bike_at("b1", true_loc)}),
        cost=Fraction(1)))
    problem = PlanningProblem(
        fluents=frozenset(fluents), actions=tuple(actions),
        initial_true=frozenset({domain.at("B"),
                                domain.bike_at("b1", true_loc)}),
        goal=frozenset({domain.holding("b1"), domain.at("B")}),
        sensing=())
    rules = [SensingRule(trigger=frozenset({domain.at(l)}),
                         observed=domain.bike_at("b1", l))
             for l in ("Y", "Z")]
    belief = initial_belief("B", {"b1": ("Y", "Z")})
    return problem, rules, belief


def run_compliant(engine, limit=200):
    """Follow the agent's own instructions until the goal or the limit."""
    steps = 0
    while not engine.goal_reached():
        assert steps < limit, "no progress"
        action = engine.pending()
        assert action is not None
        engine.apply_user_action(action)
        steps += 1
    return steps


def test_correct_guess_needs_no_replan():
    problem, rules, belief = corridor_world("Y")
    engine = EpisodeEngine(problem, rules, belief)
    engine.begin()
    run_compliant(engine)
    assert engine.replans == 0
    assert [a.name for a in engine.history()] == [
        domain.MOVE, domain.PICKUP, domain.MOVE]


def test_wrong_guess_costs_exactly_one_replan():
    problem, rules, belief = corridor_world("Z")
    engine = EpisodeEngine(problem, rules, belief)
    engine.begin()
    run_compliant(engine)
    assert engine.replans == 1
    # Y first (optimistic nearest), then on to Z once ruled out
    assert [(a.name, a.params) for a in engine.history()] == [
        (domain.MOVE, ("B", "Y")),
        (domain.MOVE, ("Y", "Z")),
        (domain.PICKUP, ("b1", "Z")),
        (domain.MOVE, ("Z", "Y")),
        (domain.MOVE, ("Y", "B")),
    ]


def test_singleton_candidate_never_replans():
    problem, rules, belief = corridor_world("Z")
    belief = belief.observed(domain.bike_at("b1", "Y"), False)
    engine = EpisodeEngine(problem, rules, belief)
    engine.begin()
    run_compliant(engine)
    assert engine.replans == 0


def test_deviation_triggers_replanning():
    problem, rules, belief = corridor_world("Y")
    engine = EpisodeEngine(problem, rules, belief)
    engine.begin()
    before = engine.replans
    # walk to Y and straight past the bike to Z
    engine.apply_user_action(engine.pending())
    off_plan = next(a for a in engine.applicable_moves()
                    if a.params == ("Y", "Z"))
    result = engine.apply_user_action(off_plan)
    assert result.deviated and result.replanned
    assert engine.replans == before + 1
    run_compliant(engine)
    assert engine.goal_reached()


def test_budget_abort_carries_partial_history():
    problem, rules, belief = corridor_world("Z")
    engine = EpisodeEngine(problem, rules, belief, max_replans=0)
    engine.begin()
    with pytest.raises(EpisodeAbortedError) as err:
        run_compliant(engine)
    assert err.value.replans == 0
    assert [a.params for a in err.value.history] == [("B", "Y")]


def test_candidate_total_never_grows():
    problem, rules, belief = corridor_world("Z")
    engine = EpisodeEngine(problem, rules, belief)
    engine.begin()
    totals = [engine.belief().candidate_total()]
    while not engine.goal_reached():
        engine.apply_user_action(engine.pending())
        totals.append(engine.belief().candidate_total())
    assert totals == sorted(totals, reverse=True)


def test_epoch_reconstructs_the_full_plan():
    problem, rules, belief = corridor_world("Y")
    engine = EpisodeEngine(problem, rules, belief)
    engine.begin()
    epoch = engine.plan_epoch()
    full = epoch.executed + epoch.intention
    while not engine.goal_reached():
        result = engine.apply_user_action(engine.pending())
        epoch = engine.plan_epoch()
        if result.replanned:
            full = epoch.executed + epoch.intention
        else:
            assert epoch.executed + epoch.intention == full


def test_finds_are_not_executable():
    problem, rules, belief = corridor_world("Y")
    engine = EpisodeEngine(problem, rules, belief)
    engine.begin()
    find = GroundAction(name=domain.FIND, params=("b1", "Y"),
                        pre=frozenset(), add=frozenset(),
                        delete=frozenset(), cost=Fraction(0))
    with pytest.raises(InapplicableActionError):
        engine.apply_user_action(find)


def test_pending_is_never_a_find():
    problem, rules, belief = corridor_world("Z")
    engine = EpisodeEngine(problem, rules, belief)
    engine.begin()
    while not engine.goal_reached():
        assert not domain.is_find(engine.pending())
        engine.apply_user_action(engine.pending())


def test_begin_is_required_and_single_shot():
    problem, rules, belief = corridor_world("Y")
    engine = EpisodeEngine(problem, rules, belief)
    with pytest.raises(RuntimeError):
        engine.apply_user_action(problem.actions[0])
    engine.begin()
    with pytest.raises(RuntimeError):
        engine.begin()


def test_shared_plan_cache_carries_between_episodes():
    problem, rules, belief = corridor_world("Y")
    cache = {}
    first = EpisodeEngine(problem, rules, belief, plan_cache=cache)
    first.begin()
    run_compliant(first)
    assert cache
    filled = dict(cache)
    second = EpisodeEngine(problem, rules, belief, plan_cache=cache)
    second.begin()
    run_compliant(second)
    assert second.history() == first.history()
    assert cache == filled  # nothing new to plan


def test_compliant_episodes_finish_on_generated_maps():
    for spec in small_maps(6, start_seed=300):
        compiled = compile_map(spec)
        engine = EpisodeEngine(compiled.problem, compiled.sensing,
                               compiled.initial_belief_for())
        engine.begin()
        run_compliant(engine)
        worst = sum(len(c) for c in compiled.candidates.values())
        assert engine.replans <= worst
        assert engine.goal_reached()
