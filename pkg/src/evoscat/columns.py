"""Columnar view of a dataset: parallel numpy arrays instead of per-event
objects, so million-event datasets stay fast to color, lay out and serialize.

Event columns are globally sorted by (ts, commit, path); that total order is
also the draw order, keeping renders deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .model import ChangeKind, Dataset, MetricDescriptor, TimeBounds

KIND_CODES = {ChangeKind.ADDED: 0, ChangeKind.MODIFIED: 1, ChangeKind.DELETED: 2}
KIND_LETTERS = ("A", "M", "D")


@dataclass
class DatasetColumns:
    dataset_id: str
    bounds: TimeBounds
    descriptors: tuple[MetricDescriptor, ...]
    # artifact columns (ordinal = path-ascending rank)
    paths: list[str]
    ext_codes: np.ndarray  # int32 -> ext_table
    ext_table: list[str]
    first_ts: np.ndarray  # int64
    last_ts: np.ndarray
    median_ts: np.ndarray
    age_s: np.ndarray
    n_events: np.ndarray  # int32
    metric_first: dict[str, np.ndarray]  # float64, NaN = absent
    metric_last: dict[str, np.ndarray]
    metric_delta: dict[str, np.ndarray]
    # event columns, (ts, commit, path) ascending
    ev_artifact: np.ndarray  # int32
    ev_ts: np.ndarray  # int64
    ev_kind: np.ndarray  # uint8, KIND_CODES
    ev_author: np.ndarray  # int32 -> author_table
    author_table: list[str]
    ev_commit: np.ndarray  # int32 -> commit_table
    commit_table: list[str]
    ev_metrics: dict[str, np.ndarray]  # float64, NaN = absent
    _variation_cache: dict[str, np.ndarray] = field(default_factory=dict, repr=False)

    @property
    def n_artifacts(self) -> int:
        return len(self.paths)

    @property
    def total_events(self) -> int:
        return len(self.ev_ts)

    @classmethod
    def from_dataset(cls, ds: Dataset) -> "DatasetColumns":
        n_art = len(ds.artifacts)
        n_ev = sum(s.n_events for s in ds.stats)
        metric_names = ds.metric_names()

        ext_table = sorted({a.extension for a in ds.artifacts})
        ext_code = {e: i for i, e in enumerate(ext_table)}
        ext_codes = np.asarray([ext_code[a.extension] for a in ds.artifacts], dtype=np.int32)

        first_ts = np.asarray([s.first_ts for s in ds.stats], dtype=np.int64)
        last_ts = np.asarray([s.last_ts for s in ds.stats], dtype=np.int64)
        median_ts = np.asarray([s.median_ts for s in ds.stats], dtype=np.int64)
        age_s = np.asarray([s.age_s for s in ds.stats], dtype=np.int64)
        n_events = np.asarray([s.n_events for s in ds.stats], dtype=np.int32)

        def stat_column(attr: str, name: str) -> np.ndarray:
            col = np.full(n_art, np.nan)
            for i, s in enumerate(ds.stats):
                v = getattr(s, attr).get(name)
                if v is not None:
                    col[i] = v
            return col

        metric_first = {m: stat_column("first_metric", m) for m in metric_names}
        metric_last = {m: stat_column("last_metric", m) for m in metric_names}
        metric_delta = {m: stat_column("delta_metric", m) for m in metric_names}

        authors: set[str] = set()
        commits: set[str] = set()
        for art in ds.artifacts:
            for ev in art.events:
                authors.add(ev.author)
                commits.add(ev.commit_id)
        author_table = sorted(authors)
        commit_table = sorted(commits)
        author_code = {a: i for i, a in enumerate(author_table)}
        commit_code = {c: i for i, c in enumerate(commit_table)}

        ev_artifact = np.empty(n_ev, dtype=np.int32)
        ev_ts = np.empty(n_ev, dtype=np.int64)
        ev_kind = np.empty(n_ev, dtype=np.uint8)
        ev_author = np.empty(n_ev, dtype=np.int32)
        ev_commit = np.empty(n_ev, dtype=np.int32)
        ev_metrics = {m: np.full(n_ev, np.nan) for m in metric_names}

        pos = 0
        for i, art in enumerate(ds.artifacts):
            for ev in art.events:
                ev_artifact[pos] = i
                ev_ts[pos] = ev.timestamp
                ev_kind[pos] = KIND_CODES[ev.change_kind]
                ev_author[pos] = author_code[ev.author]
                ev_commit[pos] = commit_code[ev.commit_id]
                if ev.metrics:
                    for m, v in ev.metrics.items():
                        if m in ev_metrics:
                            ev_metrics[m][pos] = v
                pos += 1

        # commit codes follow string order and artifact ordinals path order,
        # so this lexsort realizes the (ts, commit, path) total order
        order = np.lexsort((ev_artifact, ev_commit, ev_ts))
        return cls(
            dataset_id=ds.id,
            bounds=ds.time_bounds,
            descriptors=ds.metric_descriptors,
            paths=[a.path for a in ds.artifacts],
            ext_codes=ext_codes,
            ext_table=ext_table,
            first_ts=first_ts,
            last_ts=last_ts,
            median_ts=median_ts,
            age_s=age_s,
            n_events=n_events,
            metric_first=metric_first,
            metric_last=metric_last,
            metric_delta=metric_delta,
            ev_artifact=ev_artifact[order],
            ev_ts=ev_ts[order],
            ev_kind=ev_kind[order],
            ev_author=ev_author[order],
            author_table=author_table,
            ev_commit=ev_commit[order],
            commit_table=commit_table,
            ev_metrics={m: col[order] for m, col in ev_metrics.items()},
        )

    def variation(self, metric: str) -> np.ndarray:
        """Per-event metric change vs. the previous valued event of the same
        artifact (carry-forward); first valued event of an artifact is 0,
        events without the metric are NaN."""
        cached = self._variation_cache.get(metric)
        if cached is not None:
            return cached
        values = self.ev_metrics[metric]
        n = len(values)
        out = np.full(n, np.nan)
        if n:
            order = np.argsort(self.ev_artifact, kind="stable")
            v = values[order]
            ga = self.ev_artifact[order]
            idx = np.arange(n)
            new_group = np.empty(n, dtype=bool)
            new_group[0] = True
            new_group[1:] = ga[1:] != ga[:-1]
            valid = ~np.isnan(v)
            latest_valid = np.maximum.accumulate(np.where(valid, idx, -1))
            prev = np.empty(n, dtype=np.int64)
            prev[0] = -1
            prev[1:] = latest_valid[:-1]
            group_start = np.maximum.accumulate(np.where(new_group, idx, -1))
            prev = np.where(prev >= group_start, prev, -1)
            base = v[np.maximum(prev, 0)]
            delta = np.where(valid, np.where(prev >= 0, v - base, 0.0), np.nan)
            out[order] = delta
        self._variation_cache[metric] = out
        return out
