"""Artifact axis orderings: composite sort criteria over per-artifact stats.

A criterion is an ordered key list evaluated lexicographically with an
implicit final tie-break of path ascending, so every layout is reproducible.
Artifacts lacking a metric sort after all valued ones regardless of the key
direction.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .model import Dataset


class SortField(Enum):
    NUM_EVENTS = "events"
    FIRST_TS = "first"
    LAST_TS = "last"
    MEDIAN_TS = "mid"
    AGE = "age"
    SIMILARITY = "similarity"
    METRIC_FIRST = "mfirst"
    METRIC_LAST = "mlast"
    METRIC_DELTA = "mdelta"
    PATH = "path"
    EXTENSION = "extension"


_METRIC_FIELDS = {SortField.METRIC_FIRST, SortField.METRIC_LAST, SortField.METRIC_DELTA}
_STRING_FIELDS = {SortField.PATH, SortField.EXTENSION}


class UnknownMetricError(KeyError):
    def __init__(self, name: str):
        super().__init__(name)
        self.metric = name

    def __str__(self) -> str:
        return f"criterion references undeclared metric {self.metric!r}"


@dataclass(frozen=True)
class SortKey:
    field: SortField
    descending: bool = False
    metric: str | None = None

    def __post_init__(self) -> None:
        if self.field in _METRIC_FIELDS and not self.metric:
            raise ValueError(f"{self.field.value} key needs a metric name")
        if self.field not in _METRIC_FIELDS and self.metric:
            raise ValueError(f"{self.field.value} key takes no metric name")

    def spec(self) -> str:
        base = self.field.value
        if self.metric is not None:
            base += f"({self.metric})"
        return base + ("-" if self.descending else "")


@dataclass(frozen=True)
class SortCriterion:
    name: str
    keys: tuple[SortKey, ...]

    def __post_init__(self) -> None:
        if not self.keys:
            raise ValueError("criterion needs at least one key")
        if any(k.field is SortField.SIMILARITY for k in self.keys) and len(self.keys) > 1:
            raise ValueError("similarity may only appear as the sole key")

    @property
    def is_similarity(self) -> bool:
        return self.keys[0].field is SortField.SIMILARITY

    def spec(self) -> str:
        return ",".join(k.spec() for k in self.keys)


_KEY_RE = re.compile(r"^([a-z_]+)(?:\(([^()]*)\))?([+-]?)$")

_FIELD_ALIASES = {f.value: f for f in SortField}
_FIELD_ALIASES.update({"median": SortField.MEDIAN_TS, "ext": SortField.EXTENSION})


def parse_criterion(spec: str) -> SortCriterion:
    """Parse "name=key,key,…" or bare "key,key,…" (name defaults to the spec).

    Keys: events first last mid age path extension similarity
    mfirst(NAME) mlast(NAME) mdelta(NAME); a trailing "-" sorts descending.
    """
    name, _, keyspec = spec.partition("=")
    if not keyspec:
        name, keyspec = spec, spec
    keys = []
    for token in keyspec.split(","):
        token = token.strip()
        m = _KEY_RE.match(token)
        if m is None or m.group(1) not in _FIELD_ALIASES:
            raise ValueError(f"bad sort key {token!r} in criterion {spec!r}")
        field = _FIELD_ALIASES[m.group(1)]
        keys.append(SortKey(field, descending=m.group(3) == "-", metric=m.group(2)))
    return SortCriterion(name=name.strip(), keys=tuple(keys))


def default_criteria(metric_names: list[str] = ()) -> list[SortCriterion]:
    """The stock orderings every bundle gets unless the caller says otherwise."""
    crits = [
        parse_criterion("path"),
        parse_criterion("first"),
        parse_criterion("last"),
        parse_criterion("mid"),
        parse_criterion("events"),
        parse_criterion("age"),
        parse_criterion("extension=extension,last"),
        parse_criterion("similarity"),
    ]
    for m in metric_names:
        crits.append(parse_criterion(f"{m}_first=mfirst({m})"))
        crits.append(parse_criterion(f"{m}_last=mlast({m})"))
        # the delta view groups improving / stable / worsening artifacts
        crits.append(parse_criterion(f"{m}_delta=mdelta({m}),mfirst({m}),mlast({m})"))
    return crits


def _metric_values(dataset: Dataset, key: SortKey) -> list[float | None]:
    if key.metric not in dataset.metric_names():
        raise UnknownMetricError(key.metric)
    attr = {
        SortField.METRIC_FIRST: "first_metric",
        SortField.METRIC_LAST: "last_metric",
        SortField.METRIC_DELTA: "delta_metric",
    }[key.field]
    return [getattr(s, attr).get(key.metric) for s in dataset.stats]


def sort_artifacts(dataset: Dataset, criterion: SortCriterion) -> np.ndarray:
    """Rank artifacts by the criterion; result[rank] = artifact ordinal."""
    if criterion.is_similarity:
        raise ValueError("similarity orderings are computed by similarity_order")
    stats = dataset.stats
    # implicit final tie-break: path ascending (= ordinal order by construction)
    order = sorted(range(len(stats)), key=lambda i: dataset.artifacts[i].path)
    for key in reversed(criterion.keys):
        if key.field in _STRING_FIELDS:
            values = [
                dataset.artifacts[i].path if key.field is SortField.PATH
                else dataset.artifacts[i].extension
                for i in range(len(stats))
            ]
            order.sort(key=lambda i: values[i], reverse=key.descending)
        elif key.field in _METRIC_FIELDS:
            mvals = _metric_values(dataset, key)
            sign = -1.0 if key.descending else 1.0
            # missing metric always sorts last, whatever the direction
            order.sort(
                key=lambda i: (1, 0.0) if mvals[i] is None or math.isnan(mvals[i])
                else (0, sign * mvals[i])
            )
        else:
            attr = {
                SortField.NUM_EVENTS: "n_events",
                SortField.FIRST_TS: "first_ts",
                SortField.LAST_TS: "last_ts",
                SortField.MEDIAN_TS: "median_ts",
                SortField.AGE: "age_s",
            }[key.field]
            order.sort(key=lambda i: getattr(stats[i], attr), reverse=key.descending)
    return np.asarray(order, dtype=np.int32)
