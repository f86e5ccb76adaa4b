"""Domain model: events, artifact histories, per-artifact stats, datasets.

Everything here is immutable after construction and safe to share across
threads. An artifact is identified by its full repository path (multi-repo
datasets prefix paths with "owner/repo:"); renames therefore show up as two
distinct artifacts.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum

RGB = tuple[int, int, int]


class ChangeKind(Enum):
    ADDED = "A"
    MODIFIED = "M"
    DELETED = "D"


class MetricKind(Enum):
    GAUGE = "gauge"
    COUNT = "count"


@dataclass(frozen=True, slots=True)
class Event:
    """One commit touching one artifact."""

    artifact_id: int  # index into the owning dataset's artifact table
    timestamp: int  # seconds since Unix epoch, UTC
    commit_id: str  # 40 hex chars
    author: str
    change_kind: ChangeKind
    metrics: dict[str, float] | None = None  # a metric may be absent per event


@dataclass(frozen=True)
class ArtifactRecord:
    path: str  # identity of the artifact
    extension: str  # lowercase suffix after the final dot, "" if none
    events: tuple[Event, ...]  # strictly sorted by (timestamp, commit_id)


@dataclass(frozen=True)
class ArtifactStats:
    first_ts: int
    last_ts: int
    median_ts: int  # lower median: sorted timestamps at index (n-1)//2
    n_events: int
    age_s: int  # last_ts - first_ts
    # Per metric name; a metric appears iff at least one event carries it.
    # first/last come from the earliest/latest event where it is present.
    first_metric: dict[str, float] = field(default_factory=dict)
    last_metric: dict[str, float] = field(default_factory=dict)
    delta_metric: dict[str, float] = field(default_factory=dict)


@dataclass(frozen=True)
class MetricDescriptor:
    name: str
    unit: str = ""
    kind: MetricKind = MetricKind.GAUGE
    # (upper threshold, color) pairs, thresholds strictly increasing; a value
    # v falls in the first class with v <= threshold, the final class catches
    # everything above the last finite threshold.
    default_color_stops: tuple[tuple[float, RGB], ...] = ()

    def __post_init__(self) -> None:
        thresholds = [t for t, _ in self.default_color_stops]
        if any(b <= a for a, b in zip(thresholds, thresholds[1:])):
            raise ValueError(f"color stops for {self.name!r} must be strictly increasing")


@dataclass(frozen=True)
class TimeBounds:
    """Dataset-wide denominators shared by all time-axis transforms."""

    t_min: int
    t_max: int
    max_age_s: int  # D: max artifact age
    max_median_dev_s: int  # H: max |ts - median_ts| over all events


def extension_of(path: str) -> str:
    base = path.rsplit("/", 1)[-1]
    if "." not in base:
        return ""
    return base.rsplit(".", 1)[1].lower()


def year_of(timestamp: int) -> int:
    """Calendar year (proleptic Gregorian, UTC) of an epoch timestamp."""
    return datetime.fromtimestamp(timestamp, tz=timezone.utc).year


def compute_stats(artifact: ArtifactRecord) -> ArtifactStats:
    events = artifact.events
    if not events:
        raise ValueError(f"artifact {artifact.path!r} has no events")
    n = len(events)
    first_ts = events[0].timestamp
    last_ts = events[-1].timestamp
    median_ts = events[(n - 1) // 2].timestamp
    first_metric: dict[str, float] = {}
    last_metric: dict[str, float] = {}
    for ev in events:
        if not ev.metrics:
            continue
        for name, value in ev.metrics.items():
            first_metric.setdefault(name, value)
            last_metric[name] = value
    delta_metric = {name: last_metric[name] - first_metric[name] for name in first_metric}
    return ArtifactStats(
        first_ts=first_ts,
        last_ts=last_ts,
        median_ts=median_ts,
        n_events=n,
        age_s=last_ts - first_ts,
        first_metric=first_metric,
        last_metric=last_metric,
        delta_metric=delta_metric,
    )


@dataclass(frozen=True)
class Dataset:
    """Validated, immutable collection of artifact histories."""

    id: str
    artifacts: tuple[ArtifactRecord, ...]  # sorted by path ascending
    stats: tuple[ArtifactStats, ...]  # parallel to artifacts
    metric_descriptors: tuple[MetricDescriptor, ...]
    t_min: int
    t_max: int
    time_bounds: TimeBounds

    @staticmethod
    def build(
        dataset_id: str,
        artifacts: list[ArtifactRecord],
        metric_descriptors: tuple[MetricDescriptor, ...] = (),
    ) -> "Dataset":
        """Assemble a dataset from artifact records, deriving stats and bounds.

        Records are re-ordered by path ascending and event artifact_id fields
        are re-pointed at the sorted positions.
        """
        ordered = []
        for i, art in enumerate(sorted(artifacts, key=lambda a: a.path)):
            if not art.events:
                raise ValueError(f"artifact {art.path!r} has no events")
            for prev, cur in zip(art.events, art.events[1:]):
                if (cur.timestamp, cur.commit_id) <= (prev.timestamp, prev.commit_id):
                    raise ValueError(f"events of {art.path!r} not strictly sorted")
            if any(ev.artifact_id != i for ev in art.events):
                art = ArtifactRecord(
                    path=art.path,
                    extension=art.extension,
                    events=tuple(
                        Event(i, ev.timestamp, ev.commit_id, ev.author, ev.change_kind, ev.metrics)
                        for ev in art.events
                    ),
                )
            ordered.append(art)
        ordered = tuple(ordered)
        stats = tuple(compute_stats(a) for a in ordered)
        if ordered:
            t_min = min(s.first_ts for s in stats)
            t_max = max(s.last_ts for s in stats)
            max_age = max(s.age_s for s in stats)
            max_dev = max(
                abs(ev.timestamp - s.median_ts)
                for a, s in zip(ordered, stats)
                for ev in a.events
            )
        else:
            t_min = t_max = max_age = max_dev = 0
        return Dataset(
            id=dataset_id,
            artifacts=ordered,
            stats=stats,
            metric_descriptors=metric_descriptors,
            t_min=t_min,
            t_max=t_max,
            time_bounds=TimeBounds(t_min, t_max, max_age, max_dev),
        )

    @property
    def n_artifacts(self) -> int:
        return len(self.artifacts)

    @property
    def n_events(self) -> int:
        return sum(s.n_events for s in self.stats)

    def metric_names(self) -> list[str]:
        return [d.name for d in self.metric_descriptors]
