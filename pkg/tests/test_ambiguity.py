from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bikeguide import domain
from bikeguide.ambiguity import AmbiguityCostConfig, AmbiguityIndex
from bikeguide.planning.search import search


def moves_of(compiled):
    return [a for a in compiled.problem.actions if domain.is_move(a)]


def test_similar_relation_is_symmetric(bundled_compiled, bundled_indexes):
    for name, index in bundled_indexes.items():
        for a in moves_of(bundled_compiled[name]):
            for b in index.similar_set(a):
                assert a in index.similar_set(b), (name, a, b)


def test_similar_relation_is_irreflexive(bundled_compiled, bundled_indexes):
    for name, index in bundled_indexes.items():
        for a in moves_of(bundled_compiled[name]):
            assert a not in index.similar_set(a)


def test_similar_means_same_source_and_destination_type(bundled_specs,
                                                        bundled_compiled,
                                                        bundled_indexes):
    for name, index in bundled_indexes.items():
        spec = bundled_specs[name]
        for a in moves_of(bundled_compiled[name]):
            for b in index.similar_set(a):
                assert domain.move_src(a) == domain.move_src(b)
                assert (spec.landmark(domain.move_dst(a)).type
                        == spec.landmark(domain.move_dst(b)).type)


def test_similar_relation_misses_nothing(bundled_specs, bundled_compiled,
                                         bundled_indexes):
    # brute-force the definition pairwise and compare
    for name, index in bundled_indexes.items():
        spec = bundled_specs[name]
        moves = moves_of(bundled_compiled[name])
        for a in moves:
            want = {b for b in moves
                    if b != a
                    and domain.move_src(b) == domain.move_src(a)
                    and spec.landmark(domain.move_dst(b)).type
                    == spec.landmark(domain.move_dst(a)).type}
            assert index.similar_set(a) == want


def test_non_move_actions_are_never_ambiguous(bundled_compiled,
                                              bundled_indexes):
    for name, index in bundled_indexes.items():
        for a in bundled_compiled[name].problem.actions:
            if not domain.is_move(a):
                assert index.similar_set(a) == frozenset()
                assert not index.is_ambiguous(a)


def test_cost_transform_identity_and_shift(bundled_compiled, bundled_indexes):
    # zero similars leaves cost untouched; otherwise the shift is exact
    config = AmbiguityCostConfig(delta=Fraction(1))
    for name, index in bundled_indexes.items():
        for a in bundled_compiled[name].problem.actions:
            got = index.transform_cost(a, config)
            k = index.similar_count(a)
            if k == 0:
                assert got == a.cost
            assert got - a.cost == k


@given(delta=st.fractions(min_value=Fraction(1, 100), max_value=Fraction(10)))
@settings(max_examples=30, deadline=None)
def test_cost_transform_is_linear_in_delta(delta):
    # property checked on one map; the relation itself is map-static
    from bikeguide.world.bundled import load_bundled_map
    from bikeguide.world.compile import compile_map
    compiled = compile_map(load_bundled_map("riverside"))
    index = AmbiguityIndex(compiled.spec, compiled.problem.actions)
    config = AmbiguityCostConfig(delta=delta)
    for a in compiled.problem.actions:
        assert (index.transform_cost(a, config) - a.cost
                == delta * index.similar_count(a))


def test_cost_transform_monotone_in_delta(bundled_compiled, bundled_indexes):
    small = AmbiguityCostConfig(delta=Fraction(1))
    big = AmbiguityCostConfig(delta=Fraction(3))
    for name, index in bundled_indexes.items():
        for a in moves_of(bundled_compiled[name]):
            lo = index.transform_cost(a, small)
            hi = index.transform_cost(a, big)
            if index.is_ambiguous(a):
                assert hi > lo
            else:
                assert hi == lo == a.cost


def test_delta_must_be_positive():
    with pytest.raises(ValueError):
        AmbiguityCostConfig(delta=0)
    with pytest.raises(ValueError):
        AmbiguityCostConfig(delta=Fraction(-1, 2))


def test_inexplicability_counts_ambiguous_steps(bundled_compiled,
                                                bundled_indexes):
    index = bundled_indexes["riverside"]
    problem = bundled_compiled["riverside"].problem
    plan = search(problem, start=problem.initial_true)
    assert plan
    want = sum(1 for a in plan.actions if index.is_ambiguous(a))
    assert index.inexplicability(plan) == want
    assert index.inexplicability(plan.actions) == want  # bare sequences too


def test_less_explicable_is_a_strict_order(bundled_indexes,
                                           bundled_compiled):
    index = bundled_indexes["riverside"]
    moves = moves_of(bundled_compiled["riverside"])
    ambiguous = next(a for a in moves if index.is_ambiguous(a))
    clear = next(a for a in moves if not index.is_ambiguous(a))
    assert index.less_explicable([ambiguous], [clear])
    assert not index.less_explicable([clear], [ambiguous])
    assert not index.less_explicable([clear], [clear])


def test_transformed_search_never_raises_inexplicability(bundled_compiled,
                                                         bundled_indexes):
    # planning under cost' can only make plans easier to explain
    for name, compiled in bundled_compiled.items():
        index = bundled_indexes[name]
        problem = compiled.problem
        base = search(problem, start=problem.initial_true)
        config = AmbiguityCostConfig(delta=Fraction(1))
        shifted = search(problem, start=problem.initial_true,
                         cost_fn=index.cost_fn(config))
        assert base and shifted
        assert (index.inexplicability(shifted)
                <= index.inexplicability(base)), name


def test_bundled_maps_really_contain_ambiguity(bundled_compiled,
                                               bundled_indexes):
    for name, index in bundled_indexes.items():
        ambiguous = [a for a in moves_of(bundled_compiled[name])
                     if index.is_ambiguous(a)]
        assert ambiguous, name


def test_audit_lists_each_ambiguous_move_once(bundled_compiled,
                                              bundled_indexes):
    index = bundled_indexes["hillside"]
    text = index.audit()
    ambiguous = [a for a in moves_of(bundled_compiled["hillside"])
                 if index.is_ambiguous(a)]
    assert len(text.strip().splitlines()) == len(ambiguous)
    for a in ambiguous:
        assert f"move({domain.move_src(a)},{domain.move_dst(a)}) ~" in text
