"""Simulated-user batch evaluation."""

from .batch import BatchConfig, BatchResult, run_batch
from .episode import EpisodeOverrunError, EpisodeTrace, TraceEvent, run_episode
from .metrics import (
    AGGREGATED_METRICS,
    MetricsRow,
    MetricSummary,
    RunningStats,
    aggregate,
    count_metrics,
)
from .report import rows_from_csv, rows_to_csv, summary_table, summary_to_csv
from .user import SimulatedUser, UserConfig, episode_seed

__all__ = [
    "BatchConfig",
    "BatchResult",
    "run_batch",
    "EpisodeOverrunError",
    "EpisodeTrace",
    "TraceEvent",
    "run_episode",
    "AGGREGATED_METRICS",
    "MetricsRow",
    "MetricSummary",
    "RunningStats",
    "aggregate",
    "count_metrics",
    "rows_from_csv",
    "rows_to_csv",
    "summary_table",
    "summary_to_csv",
    "episode_seed",
    "SimulatedUser",
    "UserConfig",
]
