"""Seeded random map generation with ambiguity and visibility quotas.

Maps for the collection task are not arbitrary graphs: the interaction
only exercises the interesting machinery when some junctions offer two
same-type destinations (ambiguous instructions) and some bikes can be
seen by the user from a neighboring landmark (initiative offers). The
generator retries bounded attempts until the quotas hold, so a returned
map always contains the advertised structure. Deterministic per seed.
"""

from __future__ import annotations

import math
import random
from typing import Dict, List, Tuple

from .model import Bike, Landmark, MapSpec, MapValidationError, PartialReport

TYPE_PALETTE = ("house", "tree", "cafe", "mountain", "shop", "park",
                "statue", "tower")
TYPE_WEIGHTS = (4, 4, 2, 2, 2, 2, 1, 1)
COLOR_PALETTE = ("red", "blue", "green", "yellow", "purple", "orange",
                 "white", "black")

_DISTRICT_NAMES = {
    1: ("central",),
    2: ("western", "eastern"),
    4: ("western", "northern", "eastern", "southern"),
}


class GenerationError(Exception):
    """No attempt satisfied the requested constraints."""


def _positions(rng: random.Random, n: int) -> List[Tuple[float, float]]:
    cols = max(2, math.ceil(math.sqrt(n)))
    pts = []
    for i in range(n):
        r, c = divmod(i, cols)
        pts.append((c * 100 + rng.randint(-30, 30),
                    r * 100 + rng.randint(-30, 30)))
    return pts


def _roads(rng: random.Random, pts, max_degree: int = 4):
    n = len(pts)
    degree = [0] * n
    edges = set()

    def dist(i, j):
        return math.hypot(pts[i][0] - pts[j][0], pts[i][1] - pts[j][1])

    def add(i, j):
        edges.add((min(i, j), max(i, j)))
        degree[i] += 1
        degree[j] += 1

    for i in range(1, n):
        j = min(range(i), key=lambda k: (dist(i, k), k))
        add(i, j)
    target = round(n * 1.35)
    attempts = 0
    while len(edges) < target and attempts < 300:
        attempts += 1
        i = rng.randrange(n)
        if degree[i] >= max_degree:
            continue
        near = sorted((k for k in range(n) if k != i
                       and (min(i, k), max(i, k)) not in edges
                       and degree[k] < max_degree),
                      key=lambda k: (dist(i, k), k))[:3]
        if near:
            add(i, rng.choice(near))
    return sorted(edges)


def _districts(pts, count: int) -> List[str]:
    names = _DISTRICT_NAMES[count]
    n = len(pts)
    if count == 1:
        return [names[0]] * n
    if count == 2:
        order = sorted(range(n), key=lambda i: (pts[i][0], pts[i][1], i))
        half = n // 2
        out = [""] * n
        for rank, i in enumerate(order):
            out[i] = names[0] if rank < half else names[1]
        return out
    cx = sum(p[0] for p in pts) / n
    cy = sum(p[1] for p in pts) / n
    out = []
    for x, y in pts:
        dx, dy = x - cx, y - cy
        if abs(dx) >= abs(dy):
            out.append("western" if dx < 0 else "eastern")
        else:
            out.append("northern" if dy < 0 else "southern")
    return out


def _color_landmarks(types: List[str], adjacency: Dict[int, List[int]]):
    """Color so same-type landmarks near a common junction stay distinct.

    Conflict edges join same-type nodes that share a road neighbor; a
    greedy pass over the conflict graph keeps every neighborhood's
    (type, color) pairs unique. Returns None when 8 colors do not cover.
    """
    n = len(types)
    conflicts: Dict[int, set] = {i: set() for i in range(n)}
    for mid in range(n):
        ns = adjacency[mid]
        for ai in range(len(ns)):
            for bi in range(ai + 1, len(ns)):
                a, b = ns[ai], ns[bi]
                if types[a] == types[b]:
                    conflicts[a].add(b)
                    conflicts[b].add(a)
    colors: List[str] = [""] * n
    for i in range(n):
        used = {colors[j] for j in conflicts[i] if j < i}
        free = [c for c in COLOR_PALETTE if c not in used]
        if not free:
            return None
        colors[i] = free[0]
    return colors


def _ambiguity_sites(types, adjacency) -> int:
    count = 0
    for i, ns in adjacency.items():
        seen = {}
        for j in ns:
            seen[types[j]] = seen.get(types[j], 0) + 1
        if any(v >= 2 for v in seen.values()):
            count += 1
    return count


def generate_map(seed: int, landmarks: int = 20, bikes: int = 5,
                 ambiguity_quota: int = 3, visibility_quota: int = 2,
                 districts: int = 4, name: str = None,
                 max_attempts: int = 80) -> MapSpec:
    """Generate a validated MapSpec; raises GenerationError when quotas fail."""
    if landmarks < 2:
        raise GenerationError("need at least 2 landmarks")
    if bikes >= landmarks:
        raise GenerationError("more bikes than non-base landmarks")
    if districts not in _DISTRICT_NAMES:
        raise GenerationError(f"district count must be one of "
                              f"{sorted(_DISTRICT_NAMES)}")
    if visibility_quota > bikes:
        raise GenerationError("visibility quota exceeds bike count")
    if ambiguity_quota > landmarks:
        raise GenerationError("ambiguity quota exceeds landmark count")

    failure = "no attempt run"
    for attempt in range(max_attempts):
        rng = random.Random(f"{seed}:{attempt}")
        spec = _attempt(rng, seed, landmarks, bikes, ambiguity_quota,
                        visibility_quota, districts, name)
        if isinstance(spec, str):
            failure = spec
            continue
        return spec
    raise GenerationError(
        f"seed {seed}: {failure} after {max_attempts} attempts")


def _attempt(rng, seed, n, n_bikes, ambiguity_quota, visibility_quota,
             district_count, name):
    """One generation attempt; returns a MapSpec or a failure description."""
    pts = _positions(rng, n)
    edges = _roads(rng, pts)
    adjacency: Dict[int, List[int]] = {i: [] for i in range(n)}
    for a, b in edges:
        adjacency[a].append(b)
        adjacency[b].append(a)

    district_of = _districts(pts, district_count)
    by_district: Dict[str, List[int]] = {}
    for i, d in enumerate(district_of):
        by_district.setdefault(d, []).append(i)
    min_size = 2 if n >= 2 * district_count else 1
    if any(len(v) < min_size for v in by_district.values()) \
            or len(by_district) < district_count:
        return "district partition too uneven"

    types = rng.choices(TYPE_PALETTE, weights=TYPE_WEIGHTS, k=n)
    junctions = [i for i in range(n) if len(adjacency[i]) >= 2]
    rng.shuffle(junctions)
    if len(junctions) < ambiguity_quota:
        return "not enough junctions for the ambiguity quota"
    for site in junctions[:ambiguity_quota]:
        a, b = rng.sample(adjacency[site], 2)
        types[b] = types[a]
    colors = _color_landmarks(types, adjacency)
    if colors is None:
        return "color palette exhausted by same-type clusters"
    if _ambiguity_sites(types, adjacency) < ambiguity_quota:
        return "ambiguity quota not reached"

    ids = [f"L{i + 1:02d}" for i in range(n)]
    cx = sum(p[0] for p in pts) / n
    cy = sum(p[1] for p in pts) / n
    base_idx = min(range(n),
                   key=lambda i: (math.hypot(pts[i][0] - cx, pts[i][1] - cy), i))

    # spread bikes round-robin over districts, never on the base
    eligible: Dict[str, List[int]] = {
        d: [i for i in v if i != base_idx] for d, v in by_district.items()}
    district_order = sorted(d for d in eligible if eligible[d])
    bike_specs: List[Bike] = []
    reports: List[PartialReport] = []
    d_idx = 0
    for k in range(n_bikes):
        placed = False
        for _ in range(len(district_order)):
            d = district_order[d_idx % len(district_order)]
            d_idx += 1
            if eligible[d]:
                loc = eligible[d].pop(rng.randrange(len(eligible[d])))
                bike_id = f"bike{k + 1}"
                bike_specs.append(Bike(id=bike_id, location=ids[loc]))
                reports.append(PartialReport(bike=bike_id,
                                             district=district_of[loc]))
                placed = True
                break
        if not placed:
            return "no free landmark left for a bike"

    vis_bikes = list(range(len(bike_specs)))
    rng.shuffle(vis_bikes)
    visibility = []
    for k in vis_bikes[:visibility_quota]:
        loc_id = bike_specs[k].location
        loc_idx = ids.index(loc_id)
        ns = adjacency[loc_idx]
        if not ns:
            return "visible bike has no neighboring landmark"
        for neighbor in rng.sample(ns, min(2, len(ns))):
            visibility.append((ids[neighbor], bike_specs[k].id))

    landmark_specs = [
        Landmark(id=ids[i], type=types[i], color=colors[i],
                 x=float(pts[i][0]), y=float(pts[i][1],),
                 district=district_of[i])
        for i in range(n)]
    try:
        return MapSpec(
            name=name or f"gen-{seed}",
            landmarks=tuple(landmark_specs),
            roads=tuple((ids[a], ids[b]) for a, b in edges),
            base=ids[base_idx],
            bikes=tuple(bike_specs),
            reports=tuple(reports),
            visibility=tuple(visibility),
        )
    except MapValidationError as exc:
        return f"validation failed: {exc.code}"
