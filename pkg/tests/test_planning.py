from __future__ import annotations

from fractions import Fraction

import pytest

from bikeguide import domain
from bikeguide.execution.belief import determinize
from bikeguide.planning import kernel_py
from bikeguide.planning.encode import encode
from bikeguide.planning.model import (
    Fluent,
    GroundAction,
    NoPlan,
    Plan,
    PlanningProblem,
    fl,
)
from bikeguide.planning.search import backend_name, search
from bikeguide.world.compile import compile_map

from .oracles import dijkstra_cost, fold

try:
    from bikeguide.planning import _kernel
except ImportError:
    _kernel = None


def line_problem(n=3):
    """A hand-built corridor: at(L1) .. at(Ln), unit moves both ways."""
    actions = []
    for i in range(1, n):
        a, b = f"L{i}", f"L{i+1}"
        actions.append(GroundAction(
            name="move", params=(a, b), pre=frozenset({fl("at", a)}),
            add=frozenset({fl("at", b)}), delete=frozenset({fl("at", a)}),
            cost=Fraction(1)))
        actions.append(GroundAction(
            name="move", params=(b, a), pre=frozenset({fl("at", b)}),
            add=frozenset({fl("at", a)}), delete=frozenset({fl("at", b)}),
            cost=Fraction(1)))
    fluents = frozenset(fl("at", f"L{i}") for i in range(1, n + 1))
    return PlanningProblem(
        fluents=fluents, actions=tuple(actions),
        initial_true=frozenset({fl("at", "L1")}),
        initial_known=(), goal=frozenset({fl("at", f"L{n}")}), sensing=())


def test_corridor_plan_is_the_obvious_one():
    plan = search(line_problem(4))
    assert isinstance(plan, Plan)
    assert plan.cost == 3
    assert [a.params for a in plan.actions] == [
        ("L1", "L2"), ("L2", "L3"), ("L3", "L4")]


def test_goal_already_satisfied_gives_empty_plan():
    problem = line_problem(3)
    plan = search(problem, goal=frozenset({fl("at", "L1")}))
    assert isinstance(plan, Plan)
    assert plan.actions == () and plan.cost == 0


def test_unreachable_goal_returns_noplan():
    # being at two corridor cells at once is in-universe but impossible
    problem = line_problem(3)
    plan = search(problem, goal=frozenset({fl("at", "L1"), fl("at", "L3")}))
    assert isinstance(plan, NoPlan)
    assert not plan


def test_goal_outside_universe_is_a_validation_error():
    from bikeguide.planning.model import ProblemValidationError
    with pytest.raises(ProblemValidationError):
        search(line_problem(3), goal=frozenset({fl("at", "nowhere")}))


def test_goal_override_hits_exact_state():
    # endpoint override is what segment replacement search relies on
    problem = line_problem(5)
    plan = search(problem, goal=frozenset({fl("at", "L3")}))
    assert fold(problem.initial_true, plan.actions) >= {fl("at", "L3")}
    assert plan.cost == 2


def test_cost_fn_override_changes_route_choice():
    problem = line_problem(3)

    def pricey_forward(action):
        return Fraction(10) if action.params == ("L1", "L2") else action.cost

    plan = search(problem, cost_fn=pricey_forward)
    # only one route exists, so the cost reflects the override exactly
    assert plan.cost == 11


def test_fractional_costs_stay_exact():
    problem = line_problem(4)

    def thirds(action):
        return Fraction(1, 3)

    plan = search(problem, cost_fn=thirds)
    assert plan.cost == Fraction(1)  # 3 steps at 1/3 each, no float drift


def test_blind_and_hmax_agree_on_cost():
    problem = line_problem(6)
    assert search(problem, heuristic="hmax").cost == \
        search(problem, heuristic="blind").cost


def test_unknown_heuristic_rejected():
    with pytest.raises(ValueError):
        search(line_problem(3), heuristic="dijkstra")


def test_search_is_deterministic(bundled_compiled):
    compiled = bundled_compiled["riverside"]
    det = determinize(compiled.initial_belief_for(), compiled.problem)
    first = search(det, start=det.initial_true)
    second = search(det, start=det.initial_true)
    assert first.actions == second.actions
    assert first.cost == second.cost


def test_plan_cost_matches_dijkstra_oracle(oracle_maps):
    # independent uniform-cost search over explicit states
    for spec in oracle_maps[:12]:
        compiled = compile_map(spec)
        det = determinize(compiled.initial_belief_for(), compiled.problem)
        got = search(det, start=det.initial_true)
        want = dijkstra_cost(det.actions, det.initial_true, det.goal)
        assert want is not None
        assert got.cost == want, spec.name


def test_plans_fold_applicably_to_goal(oracle_maps):
    for spec in oracle_maps[:12]:
        compiled = compile_map(spec)
        det = determinize(compiled.initial_belief_for(), compiled.problem)
        plan = search(det, start=det.initial_true)
        final = fold(det.initial_true, plan.actions)
        assert det.goal <= final


@pytest.mark.skipif(_kernel is None, reason="compiled kernel not built")
def test_kernels_return_identical_plans(oracle_maps, bundled_compiled):
    # many small problems, plus one garden-variety 20-landmark map
    compiled = [compile_map(spec) for spec in oracle_maps[:10]]
    compiled.append(bundled_compiled["riverside"])
    for c in compiled:
        det = determinize(c.initial_belief_for(), c.problem)
        enc = encode(det, det.initial_true)
        args = (enc.num_fluents, enc.pre_masks, enc.add_masks,
                enc.del_masks, enc.scaled_costs, enc.start_mask,
                enc.goal_mask)
        assert kernel_py.solve(*args, use_hmax=True) == \
            _kernel.solve(*args, use_hmax=True), c.spec.name


def test_backend_name_is_one_of_the_two():
    assert backend_name() in ("compiled", "pure")


def test_encode_scales_fractions_exactly():
    problem = line_problem(3)

    def mixed(action):
        return Fraction(1, 2) if action.params[0] == "L1" else Fraction(1, 3)

    enc = encode(problem, problem.initial_true, cost_fn=mixed)
    # scaled integer costs must preserve exact ratios
    by_params = {enc.actions[i].params: enc.scaled_costs[i]
                 for i in range(len(enc.actions))}
    assert by_params[("L1", "L2")] * 2 == by_params[("L2", "L3")] * 3


def test_find_actions_cost_nothing(bundled_compiled):
    compiled = bundled_compiled["harbour"]
    det = determinize(compiled.initial_belief_for(), compiled.problem)
    finds = [a for a in det.actions if domain.is_find(a)]
    assert finds and all(a.cost == 0 for a in finds)
