"""Map schema: landmarks, roads, districts, bikes, reports, visibility.

A MapSpec is immutable after validation and shared freely between the
planner, the agents and the service. Bike true locations are part of the
spec (they drive sensing outcomes) but are never exposed to the agent's
belief, which only sees the district reports.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Tuple


class MapValidationError(ValueError):
    """A map document violates a structural invariant.

    `code` is a stable machine-readable diagnostic; `detail` is prose.
    """

    def __init__(self, code: str, detail: str):
        super().__init__(f"{code}: {detail}")
        self.code = code
        self.detail = detail


@dataclass(frozen=True)
class Landmark:
    id: str
    type: str
    color: str
    x: float
    y: float
    district: str


@dataclass(frozen=True)
class Bike:
    id: str
    location: str  # ground truth, hidden from the agent


@dataclass(frozen=True)
class PartialReport:
    bike: str
    district: str


@dataclass(frozen=True)
class MapSpec:
    """Validated world description.

    roads are undirected and stored as sorted id pairs; visibility edges
    are (landmark, bike): standing at the landmark lets the USER see the
    bike even though the agent does not know where it is.
    """

    name: str
    landmarks: Tuple[Landmark, ...]
    roads: Tuple[Tuple[str, str], ...]
    base: str
    bikes: Tuple[Bike, ...]
    reports: Tuple[PartialReport, ...]
    visibility: Tuple[Tuple[str, str], ...] = ()
    _by_id: Dict[str, Landmark] = field(init=False, repr=False, compare=False)
    _adjacency: Dict[str, Tuple[str, ...]] = field(init=False, repr=False,
                                                   compare=False)

    def __post_init__(self):
        object.__setattr__(self, "landmarks",
                           tuple(sorted(self.landmarks, key=lambda l: l.id)))
        object.__setattr__(self, "roads", tuple(
            sorted(tuple(sorted(r)) for r in self.roads)))
        object.__setattr__(self, "bikes",
                           tuple(sorted(self.bikes, key=lambda b: b.id)))
        object.__setattr__(self, "reports",
                           tuple(sorted(self.reports, key=lambda r: r.bike)))
        object.__setattr__(self, "visibility",
                           tuple(sorted(self.visibility)))
        by_id = {}
        for lm in self.landmarks:
            if lm.id in by_id:
                raise MapValidationError("duplicate-landmark",
                                         f"landmark id {lm.id!r} repeats")
            by_id[lm.id] = lm
        adjacency: Dict[str, list] = {lid: [] for lid in by_id}
        seen = set()
        for a, b in self.roads:
            if a == b:
                raise MapValidationError("self-loop-road",
                                         f"road {a!r}-{b!r} is a self-loop")
            for end in (a, b):
                if end not in by_id:
                    raise MapValidationError(
                        "unknown-landmark",
                        f"road endpoint {end!r} is not a landmark")
            if (a, b) in seen:
                raise MapValidationError("duplicate-road",
                                         f"road {a!r}-{b!r} repeats")
            seen.add((a, b))
            adjacency[a].append(b)
            adjacency[b].append(a)
        object.__setattr__(self, "_by_id", by_id)
        object.__setattr__(
            self, "_adjacency",
            {lid: tuple(sorted(ns)) for lid, ns in adjacency.items()})
        self._validate(by_id)

    def _validate(self, by_id):
        if self.base not in by_id:
            raise MapValidationError("unknown-base",
                                     f"base {self.base!r} is not a landmark")
        if by_id:
            # connectivity over the road graph
            stack = [next(iter(sorted(by_id)))]
            reached = set(stack)
            while stack:
                cur = stack.pop()
                for n in self._adjacency[cur]:
                    if n not in reached:
                        reached.add(n)
                        stack.append(n)
            if reached != set(by_id):
                missing = sorted(set(by_id) - reached)
                raise MapValidationError(
                    "disconnected-roads",
                    f"unreachable landmarks: {', '.join(missing)}")
        # color disambiguation: neighbors of one junction sharing a type
        # must differ in color, or level-2 elaborations cannot tell them apart
        for lid in by_id:
            seen_pairs = {}
            for n in self._adjacency[lid]:
                lm = by_id[n]
                key = (lm.type, lm.color)
                if key in seen_pairs:
                    raise MapValidationError(
                        "indistinct-neighbors",
                        f"{seen_pairs[key]!r} and {n!r} are both "
                        f"{lm.color} {lm.type}s adjacent to {lid!r}")
                seen_pairs[key] = n
        bike_ids = set()
        for bike in self.bikes:
            if bike.id in bike_ids:
                raise MapValidationError("duplicate-bike",
                                         f"bike id {bike.id!r} repeats")
            bike_ids.add(bike.id)
            if bike.location not in by_id:
                raise MapValidationError(
                    "unknown-landmark",
                    f"bike {bike.id!r} placed at unknown {bike.location!r}")
        districts = self.districts()
        reported = set()
        for rep in self.reports:
            if rep.bike not in bike_ids:
                raise MapValidationError(
                    "unknown-bike", f"report names unknown bike {rep.bike!r}")
            if rep.bike in reported:
                raise MapValidationError(
                    "duplicate-report", f"bike {rep.bike!r} reported twice")
            reported.add(rep.bike)
            if rep.district not in districts:
                raise MapValidationError(
                    "unknown-district",
                    f"report names unknown district {rep.district!r}")
            truth = self.bike(rep.bike).location
            if truth not in districts[rep.district]:
                raise MapValidationError(
                    "report-contradiction",
                    f"bike {rep.bike!r} reported in {rep.district!r} "
                    f"but placed at {truth!r} outside it")
        for lid, bid in self.visibility:
            if lid not in by_id:
                raise MapValidationError(
                    "unknown-landmark",
                    f"visibility edge from unknown landmark {lid!r}")
            if bid not in bike_ids:
                raise MapValidationError(
                    "unknown-bike",
                    f"visibility edge names unknown bike {bid!r}")

    # --- lookups ---

    def landmark(self, lid: str) -> Landmark:
        return self._by_id[lid]

    def neighbors(self, lid: str) -> Tuple[str, ...]:
        return self._adjacency[lid]

    def bike(self, bid: str) -> Bike:
        for b in self.bikes:
            if b.id == bid:
                return b
        raise KeyError(bid)

    def districts(self) -> Dict[str, FrozenSet[str]]:
        """District name -> landmark id set (partition by landmark field)."""
        out: Dict[str, set] = {}
        for lm in self.landmarks:
            out.setdefault(lm.district, set()).add(lm.id)
        return {d: frozenset(ids) for d, ids in out.items()}

    def report_for(self, bike_id: str):
        for rep in self.reports:
            if rep.bike == bike_id:
                return rep
        return None

    def candidates(self, bike_id: str) -> FrozenSet[str]:
        """Locations the agent considers possible for a bike.

        All landmarks of the reported district; every landmark when the
        bike was never reported.
        """
        rep = self.report_for(bike_id)
        if rep is None:
            return frozenset(lm.id for lm in self.landmarks)
        return self.districts()[rep.district]

    def visible_bikes_from(self, lid: str) -> Tuple[str, ...]:
        return tuple(b for l, b in self.visibility if l == lid)
