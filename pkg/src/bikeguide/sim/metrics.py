"""Per-episode metric counting and batch aggregation."""

from __future__ import annotations

import math
from dataclasses import dataclass, fields
from typing import Dict, Iterable, List, Tuple

from ..dialogue.utterances import UtteranceKind
from .episode import EpisodeTrace


@dataclass(frozen=True)
class MetricsRow:
    """Counts for one episode, one row of the batch CSV."""

    episode: int
    seed: int
    moves: int
    pickups: int
    elaborations: int
    pretarget_k: int
    pretarget_pos: int
    target_k: int
    target_pos: int
    inefficiency: int
    initiative: int
    plan_length: int
    similars: int
    replans: int

    @classmethod
    def column_names(cls) -> Tuple[str, ...]:
        return tuple(f.name for f in fields(cls))


def _is_knowledge_subject(subject) -> bool:
    return isinstance(subject, str) and subject.startswith("bike:")


def count_metrics(trace: EpisodeTrace, episode: int) -> MetricsRow:
    moves = pickups = similars = 0
    for event in trace.actions():
        if event.data["move"]:
            moves += 1
        if event.data["pickup"]:
            pickups += 1
        if event.data["complied"]:
            similars += event.data["similar_count"]

    counts = {
        UtteranceKind.ELABORATION: 0,
        UtteranceKind.TARGET_JUSTIFICATION: 0,
        UtteranceKind.POSITION_TARGET: 0,
        UtteranceKind.INEFFICIENCY_JUSTIFICATION: 0,
        UtteranceKind.INITIATIVE_OFFER: 0,
    }
    pretarget_k = pretarget_pos = 0
    for event in trace.utterances():
        kind = event.data["utterance_kind"]
        if kind == UtteranceKind.PRE_TARGET:
            if _is_knowledge_subject(event.data.get("subject")):
                pretarget_k += 1
            else:
                pretarget_pos += 1
        elif kind in counts:
            counts[kind] += 1

    end = trace.events[-1]
    assert end.kind == "end"
    return MetricsRow(
        episode=episode,
        seed=trace.seed,
        moves=moves,
        pickups=pickups,
        elaborations=counts[UtteranceKind.ELABORATION],
        pretarget_k=pretarget_k,
        pretarget_pos=pretarget_pos,
        target_k=counts[UtteranceKind.TARGET_JUSTIFICATION],
        target_pos=counts[UtteranceKind.POSITION_TARGET],
        inefficiency=counts[UtteranceKind.INEFFICIENCY_JUSTIFICATION],
        initiative=counts[UtteranceKind.INITIATIVE_OFFER],
        plan_length=moves + pickups,
        similars=similars,
        replans=end.data["replans"],
    )


class RunningStats:
    """Welford accumulator: numerically stable mean and variance."""

    def __init__(self):
        self.count = 0
        self.mean = 0.0
        self._m2 = 0.0

    def add(self, value: float) -> None:
        self.count += 1
        delta = value - self.mean
        self.mean += delta / self.count
        self._m2 += delta * (value - self.mean)

    @property
    def variance(self) -> float:
        if self.count < 2:
            return 0.0
        return self._m2 / (self.count - 1)  # sample variance

    @property
    def stddev(self) -> float:
        return math.sqrt(self.variance)

    @property
    def stderr(self) -> float:
        if self.count == 0:
            return 0.0
        return self.stddev / math.sqrt(self.count)

    def ci95(self) -> Tuple[float, float]:
        """Normal-approximation 95% confidence interval for the mean."""
        half = 1.96 * self.stderr
        return (self.mean - half, self.mean + half)


AGGREGATED_METRICS = (
    "moves", "pickups", "elaborations", "pretarget_k", "pretarget_pos",
    "target_k", "target_pos", "inefficiency", "initiative",
    "plan_length", "similars", "replans",
)


@dataclass(frozen=True)
class MetricSummary:
    name: str
    mean: float
    stddev: float
    ci_low: float
    ci_high: float
    count: int


def aggregate(rows: Iterable[MetricsRow]) -> Dict[str, MetricSummary]:
    stats = {name: RunningStats() for name in AGGREGATED_METRICS}
    for row in rows:
        for name in AGGREGATED_METRICS:
            stats[name].add(float(getattr(row, name)))
    out = {}
    for name, acc in stats.items():
        low, high = acc.ci95()
        out[name] = MetricSummary(name=name, mean=acc.mean,
                                  stddev=acc.stddev, ci_low=low,
                                  ci_high=high, count=acc.count)
    return out
