"""Event-log validation and filtering ahead of layout precomputation.

Out-of-range timestamps (clock skew, future commits) are excluded and counted
per artifact; sparse histories can then be dropped by a minimum event count
so the plot stays dense.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .coloring import derive_default_stops
from .eventlog import RawEvent
from .model import (
    ArtifactRecord,
    ChangeKind,
    Dataset,
    Event,
    MetricDescriptor,
    extension_of,
)


class EmptyDatasetError(ValueError):
    pass


@dataclass
class ValidationReport:
    total_events: int = 0
    kept_events: int = 0
    past_count: int = 0  # too old for the sample window
    future_count: int = 0
    duplicate_count: int = 0  # same (path, ts, commit) seen twice
    artifacts_seen: int = 0
    artifacts_dropped: int = 0  # left empty after exclusions
    excluded_per_artifact: dict[str, int] = field(default_factory=dict)

    @property
    def excluded_count(self) -> int:
        return self.past_count + self.future_count

    def summary(self) -> str:
        lines = [
            f"events: {self.kept_events} kept of {self.total_events}"
            f" ({self.past_count} before window, {self.future_count} after,"
            f" {self.duplicate_count} duplicates)",
            f"artifacts: {self.artifacts_seen - self.artifacts_dropped} kept of"
            f" {self.artifacts_seen} ({self.artifacts_dropped} left empty)",
        ]
        return "\n".join(lines)


def default_window(now: int | None = None) -> tuple[int, int]:
    """Anything before the epoch or after "now" counts as out of range."""
    return (0, int(now if now is not None else time.time()))


def validate_events(
    raw_events: list[RawEvent],
    window: tuple[int, int] | None = None,
    dataset_id: str = "dataset",
    metric_descriptors: tuple[MetricDescriptor, ...] | None = None,
) -> tuple[Dataset, ValidationReport]:
    """Group raw events into a validated dataset, excluding out-of-range
    timestamps. Raises EmptyDatasetError when nothing survives."""
    lo, hi = window if window is not None else default_window()
    report = ValidationReport(total_events=len(raw_events))

    by_path: dict[str, dict[tuple[int, str], RawEvent]] = {}
    for ev in raw_events:
        bucket = by_path.setdefault(ev.path, {})
        if ev.ts < lo:
            report.past_count += 1
            report.excluded_per_artifact[ev.path] = report.excluded_per_artifact.get(ev.path, 0) + 1
            continue
        if ev.ts > hi:
            report.future_count += 1
            report.excluded_per_artifact[ev.path] = report.excluded_per_artifact.get(ev.path, 0) + 1
            continue
        key = (ev.ts, ev.commit)
        if key in bucket:
            report.duplicate_count += 1
            continue
        bucket[key] = ev

    report.artifacts_seen = len(by_path)
    kept_paths = sorted(p for p, bucket in by_path.items() if bucket)
    report.artifacts_dropped = len(by_path) - len(kept_paths)
    if not kept_paths:
        raise EmptyDatasetError("empty dataset after validation")

    metric_names: set[str] = set()
    artifacts = []
    for i, path in enumerate(kept_paths):
        events = []
        for (ts, commit), ev in sorted(by_path[path].items()):
            if ev.metrics:
                metric_names.update(ev.metrics)
            events.append(
                Event(
                    artifact_id=i,
                    timestamp=ts,
                    commit_id=commit,
                    author=ev.author,
                    change_kind=ChangeKind(ev.kind),
                    metrics=dict(ev.metrics) if ev.metrics else None,
                )
            )
        artifacts.append(ArtifactRecord(path=path, extension=extension_of(path), events=tuple(events)))
        report.kept_events += len(events)

    if metric_descriptors is None:
        metric_descriptors = tuple(
            _auto_descriptor(name, artifacts) for name in sorted(metric_names)
        )
    dataset = Dataset.build(dataset_id, artifacts, metric_descriptors)
    return dataset, report


def _auto_descriptor(name: str, artifacts: list[ArtifactRecord]) -> MetricDescriptor:
    values = np.asarray(
        [
            ev.metrics[name]
            for art in artifacts
            for ev in art.events
            if ev.metrics and name in ev.metrics
        ],
        dtype=np.float64,
    )
    return MetricDescriptor(name=name, default_color_stops=derive_default_stops(values))


def filter_min_events(dataset: Dataset, k: int) -> Dataset:
    """Drop artifacts with fewer than k events; k=0 is the identity."""
    if k < 0:
        raise ValueError("minimum event count must be non-negative")
    if k <= 1:
        return dataset
    survivors = [
        art for art, st in zip(dataset.artifacts, dataset.stats) if st.n_events >= k
    ]
    if len(survivors) == len(dataset.artifacts):
        return dataset
    return Dataset.build(dataset.id, survivors, dataset.metric_descriptors)
