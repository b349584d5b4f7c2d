from __future__ import annotations

import pytest

from bikeguide.ambiguity import AmbiguityIndex
from bikeguide.world.bundled import bundled_map_names, load_bundled_map
from bikeguide.world.compile import compile_map
from bikeguide.world.generate import GenerationError, generate_map


@pytest.fixture(scope="session")
def bundled_specs():
    return {name: load_bundled_map(name) for name in bundled_map_names()}


@pytest.fixture(scope="session")
def bundled_compiled(bundled_specs):
    return {name: compile_map(spec) for name, spec in bundled_specs.items()}


@pytest.fixture(scope="session")
def bundled_indexes(bundled_specs, bundled_compiled):
    return {
        name: AmbiguityIndex(spec, bundled_compiled[name].problem.actions)
        for name, spec in bundled_specs.items()
    }


def small_maps(count, start_seed=100, landmarks=(6, 7, 8), bikes=(1, 2)):
    """Deterministic stream of tiny generated maps for oracle suites."""
    out = []
    seed = start_seed
    while len(out) < count:
        n = landmarks[seed % len(landmarks)]
        k = bikes[seed % len(bikes)]
        try:
            out.append(generate_map(seed=seed, landmarks=n, bikes=k,
                                    ambiguity_quota=1, visibility_quota=0,
                                    districts=2))
        except GenerationError:
            pass  # some tiny seeds can't meet the quota; skip them
        seed += 1
    return out


@pytest.fixture(scope="session")
def oracle_maps():
    return small_maps(50)
