"""Time-axis transforms: map event timestamps into the unit vertical coordinate.

All modes map every included event to y in [0, 1] and are non-decreasing in
the timestamp within one artifact. Relative modes share one dataset-wide
denominator (max artifact age / max median deviation) so aligned timelines
advance at the same speed on every vertical track.
"""

from __future__ import annotations

from enum import Enum

import numpy as np

from .model import ArtifactStats, TimeBounds


class TimeMode(Enum):
    ABSOLUTE = "absolute"
    REL_START = "relstart"
    REL_END = "relend"
    REL_MEDIAN = "relmedian"
    NORMALIZED = "normtime"

    @classmethod
    def parse(cls, value: str) -> "TimeMode":
        value = value.lower()
        if value == "normage":  # legacy alias
            return cls.NORMALIZED
        for mode in cls:
            if mode.value == value:
                return mode
        raise ValueError(f"unknown time mode {value!r}")


def time_transform(ts: int, stats: ArtifactStats, bounds: TimeBounds, mode: TimeMode) -> float:
    """Unit y coordinate of one event. ts must belong to the artifact."""
    if not stats.first_ts <= ts <= stats.last_ts:
        raise ValueError(
            f"ts {ts} outside artifact range [{stats.first_ts}, {stats.last_ts}]"
        )
    if mode is TimeMode.ABSOLUTE:
        span = bounds.t_max - bounds.t_min
        return (ts - bounds.t_min) / span if span else 0.5
    if mode is TimeMode.REL_START:
        d = bounds.max_age_s
        return (ts - stats.first_ts) / d if d else 0.5
    if mode is TimeMode.REL_END:
        d = bounds.max_age_s
        return 1.0 + (ts - stats.last_ts) / d if d else 0.5
    if mode is TimeMode.REL_MEDIAN:
        h = bounds.max_median_dev_s
        return 0.5 + (ts - stats.median_ts) / (2.0 * h) if h else 0.5
    if mode is TimeMode.NORMALIZED:
        # Single-instant artifacts sit centrally rather than biasing an edge.
        return (ts - stats.first_ts) / stats.age_s if stats.age_s else 0.5
    raise ValueError(f"unhandled time mode {mode!r}")


def transform_column(
    ev_ts: np.ndarray,
    ev_artifact: np.ndarray,
    first_ts: np.ndarray,
    last_ts: np.ndarray,
    median_ts: np.ndarray,
    age_s: np.ndarray,
    bounds: TimeBounds,
    mode: TimeMode,
) -> np.ndarray:
    """Vectorized transform over event columns; same math as time_transform."""
    ts = ev_ts.astype(np.float64)
    if mode is TimeMode.ABSOLUTE:
        span = bounds.t_max - bounds.t_min
        if not span:
            return np.full(ts.shape, 0.5)
        return (ts - bounds.t_min) / span
    if mode is TimeMode.REL_START:
        if not bounds.max_age_s:
            return np.full(ts.shape, 0.5)
        return (ts - first_ts[ev_artifact]) / bounds.max_age_s
    if mode is TimeMode.REL_END:
        if not bounds.max_age_s:
            return np.full(ts.shape, 0.5)
        return 1.0 + (ts - last_ts[ev_artifact]) / bounds.max_age_s
    if mode is TimeMode.REL_MEDIAN:
        if not bounds.max_median_dev_s:
            return np.full(ts.shape, 0.5)
        return 0.5 + (ts - median_ts[ev_artifact]) / (2.0 * bounds.max_median_dev_s)
    if mode is TimeMode.NORMALIZED:
        age = age_s[ev_artifact].astype(np.float64)
        y = np.full(ts.shape, 0.5)
        nz = age > 0
        y[nz] = (ts[nz] - first_ts[ev_artifact][nz]) / age[nz]
        return y
    raise ValueError(f"unhandled time mode {mode!r}")
