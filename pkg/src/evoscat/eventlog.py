"""The NDJSON event-log format shared by the miner, third-party crawlers and
the preprocessor.

One JSON object per line, UTF-8:

    {"path": str, "ts": int, "commit": str, "author": str, "kind": "A"|"M"|"D",
     "metrics": {name: number, ...}}   # metrics optional

Metrics may also arrive through a side file keyed by (commit, path), so that
domain-specific analyzers stay pluggable:

    {"commit": str, "path": str, "metrics": {name: number, ...}}
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import IO, Iterable

VALID_KINDS = ("A", "M", "D")


class EventLogError(ValueError):
    pass


@dataclass(frozen=True, slots=True)
class RawEvent:
    path: str
    ts: int
    commit: str
    author: str
    kind: str  # "A" | "M" | "D"
    metrics: dict[str, float] | None = None


def _check_metrics(metrics: object, lineno: int) -> dict[str, float] | None:
    if metrics is None:
        return None
    if not isinstance(metrics, dict):
        raise EventLogError(f"line {lineno}: metrics must be an object")
    out = {}
    for name, value in metrics.items():
        if not isinstance(value, (int, float)) or isinstance(value, bool) or not math.isfinite(value):
            raise EventLogError(f"line {lineno}: metric {name!r} is not a finite number")
        out[str(name)] = float(value)
    return out or None


def parse_event_line(line: str, lineno: int = 0) -> RawEvent:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise EventLogError(f"line {lineno}: invalid JSON ({exc.msg})") from exc
    if not isinstance(obj, dict):
        raise EventLogError(f"line {lineno}: expected a JSON object")
    try:
        path = obj["path"]
        ts = obj["ts"]
        commit = obj["commit"]
        kind = obj["kind"]
    except KeyError as exc:
        raise EventLogError(f"line {lineno}: missing key {exc.args[0]!r}") from exc
    if not isinstance(path, str) or not path:
        raise EventLogError(f"line {lineno}: path must be a non-empty string")
    if not isinstance(ts, int) or isinstance(ts, bool):
        raise EventLogError(f"line {lineno}: ts must be an integer")
    if kind not in VALID_KINDS:
        raise EventLogError(f"line {lineno}: kind must be one of {VALID_KINDS}")
    return RawEvent(
        path=path,
        ts=ts,
        commit=str(commit),
        author=str(obj.get("author", "")),
        kind=kind,
        metrics=_check_metrics(obj.get("metrics"), lineno),
    )


def read_events(fp: IO[str]) -> list[RawEvent]:
    events = []
    for lineno, line in enumerate(fp, start=1):
        line = line.strip()
        if not line:
            continue
        events.append(parse_event_line(line, lineno))
    return events


def event_to_line(ev: RawEvent) -> str:
    obj: dict[str, object] = {
        "path": ev.path,
        "ts": ev.ts,
        "commit": ev.commit,
        "author": ev.author,
        "kind": ev.kind,
    }
    if ev.metrics:
        obj["metrics"] = dict(sorted(ev.metrics.items()))
    return json.dumps(obj, ensure_ascii=False, separators=(",", ":"))


def write_events(events: Iterable[RawEvent], fp: IO[str]) -> int:
    n = 0
    for ev in events:
        fp.write(event_to_line(ev))
        fp.write("\n")
        n += 1
    return n


def read_metrics_side_file(fp: IO[str]) -> dict[tuple[str, str], dict[str, float]]:
    """Parse a metrics side file into a (commit, path) -> metrics map."""
    table: dict[tuple[str, str], dict[str, float]] = {}
    for lineno, line in enumerate(fp, start=1):
        line = line.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise EventLogError(f"line {lineno}: invalid JSON ({exc.msg})") from exc
        if not isinstance(obj, dict) or "commit" not in obj or "path" not in obj:
            raise EventLogError(f"line {lineno}: expected object with commit and path")
        metrics = _check_metrics(obj.get("metrics"), lineno)
        if metrics:
            key = (str(obj["commit"]), str(obj["path"]))
            table.setdefault(key, {}).update(metrics)
    return table


def merge_metrics(
    events: Iterable[RawEvent], table: dict[tuple[str, str], dict[str, float]]
) -> list[RawEvent]:
    """Attach side-file metrics to matching events; existing values win."""
    merged = []
    for ev in events:
        extra = table.get((ev.commit, ev.path))
        if extra:
            metrics = dict(extra)
            if ev.metrics:
                metrics.update(ev.metrics)
            ev = RawEvent(ev.path, ev.ts, ev.commit, ev.author, ev.kind, metrics)
        merged.append(ev)
    return merged
