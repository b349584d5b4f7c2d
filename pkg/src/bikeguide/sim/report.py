"""Batch reports: per-episode CSV and an aligned comparison table."""

from __future__ import annotations

import csv
import io
from typing import Dict, List, Sequence

from .batch import BatchResult
from .metrics import AGGREGATED_METRICS, MetricsRow

# metric -> display label, mirroring the batch comparison tables
DISPLAY_LABELS = {
    "moves": "Move",
    "pickups": "Pickup",
    "elaborations": "Elaborate",
    "pretarget_k": "PreTarget(K)",
    "pretarget_pos": "PreTarget(Pos)",
    "target_k": "Target(K)",
    "target_pos": "Target(Pos)",
    "inefficiency": "Inefficient",
    "initiative": "Initiative",
    "plan_length": "|pi|",
    "similars": "|similars|",
    "replans": "Replans",
}


def rows_to_csv(rows: Sequence[MetricsRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(MetricsRow.column_names())
    for row in rows:
        writer.writerow([getattr(row, name)
                         for name in MetricsRow.column_names()])
    return buf.getvalue()


def rows_from_csv(text: str) -> List[MetricsRow]:
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    expected = list(MetricsRow.column_names())
    if header != expected:
        raise ValueError(f"unexpected CSV header {header!r}")
    out = []
    for record in reader:
        if not record:
            continue
        values = {name: int(value) for name, value in zip(header, record)}
        out.append(MetricsRow(**values))
    return out


SUMMARY_COLUMNS = ("map", "agent", "metric", "mean", "stddev",
                   "ci_low", "ci_high", "episodes")


def summary_to_csv(results: Sequence[BatchResult]) -> str:
    """Aggregated report: one line per (map, agent, metric)."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SUMMARY_COLUMNS)
    for result in results:
        for name in AGGREGATED_METRICS:
            s = result.summary[name]
            writer.writerow([result.map_name, result.agent_kind, name,
                             f"{s.mean:.6f}", f"{s.stddev:.6f}",
                             f"{s.ci_low:.6f}", f"{s.ci_high:.6f}",
                             s.count])
    return buf.getvalue()


def summary_table(results: Sequence[BatchResult]) -> str:
    """Aligned text table: one metric per line, one column per result."""
    headers = [f"{r.agent_kind}@{r.map_name}" for r in results]
    label_width = max(len(v) for v in DISPLAY_LABELS.values())
    col_width = max([len(h) for h in headers] + [18])

    lines = []
    head = "Metric".ljust(label_width) + "  " + "  ".join(
        h.rjust(col_width) for h in headers)
    lines.append(head)
    lines.append("-" * len(head))
    for name in AGGREGATED_METRICS:
        cells = []
        for result in results:
            s = result.summary[name]
            cells.append(f"{s.mean:.2f} ({s.ci_low:.2f},{s.ci_high:.2f})"
                         .rjust(col_width))
        lines.append(DISPLAY_LABELS[name].ljust(label_width) + "  "
                     + "  ".join(cells))
    return "\n".join(lines) + "\n"
