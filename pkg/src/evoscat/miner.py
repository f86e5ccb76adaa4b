"""Turn a local git repository's main-branch history into the event log.

History is read with one pinned invocation (GIT_LOG_ARGS): first-parent
traversal, rename detection disabled, oldest first, name-status output and a
`#%H|%at|%an` commit header. Renames therefore surface as Deleted+Added and
side-branch work only appears through the merge commit's first-parent diff.
The timestamp is the author timestamp (committer time moves under rebases).
"""

from __future__ import annotations

import fnmatch
import logging
import re
import subprocess
from dataclasses import dataclass, field
from typing import IO, Iterable, Iterator

from .eventlog import RawEvent

logger = logging.getLogger(__name__)

# Pinned log invocation; parsing below relies on exactly this shape.
GIT_LOG_ARGS = (
    "log",
    "--first-parent",
    "--diff-merges=first-parent",
    "--no-renames",
    "--reverse",
    "--name-status",
    "--format=#%H|%at|%an",
    "--encoding=UTF-8",
)

_HEADER_RE = re.compile(r"^#([0-9a-f]{40})\|(-?\d+)\|(.*)$")
_FILE_RE = re.compile(r"^([A-Z])\t([^\t]+)$")

# Status letters beyond A/M/D (e.g. T = type change) count as modifications.
_KIND_BY_STATUS = {"A": "A", "D": "D"}


class MinerError(RuntimeError):
    pass


class LogFormatError(MinerError):
    pass


_UNQUOTE = {"n": 0x0A, "t": 0x09, "r": 0x0D, "\\": 0x5C, '"': 0x22}


def _unquote_path(path: str) -> str:
    # git C-quotes paths with unusual characters (core.quotePath default);
    # octal escapes are raw UTF-8 bytes.
    if len(path) < 2 or path[0] != '"' or path[-1] != '"':
        return path
    raw = bytearray()
    i, body = 0, path[1:-1]
    while i < len(body):
        ch = body[i]
        if ch == "\\" and i + 1 < len(body):
            nxt = body[i + 1]
            if nxt in _UNQUOTE:
                raw.append(_UNQUOTE[nxt])
                i += 2
                continue
            octal = body[i + 1 : i + 4]
            if len(octal) == 3 and all(c in "01234567" for c in octal):
                raw.append(int(octal, 8))
                i += 4
                continue
        raw.extend(ch.encode("utf-8"))
        i += 1
    return raw.decode("utf-8", "replace")


@dataclass(frozen=True)
class MineOptions:
    repo_path: str
    branch: str = "HEAD"  # repository's checked-out default branch
    path_glob: str | None = None  # fnmatch pattern over the full path
    follow_renames: bool = False  # fixed; renames are delete+add by contract

    def __post_init__(self) -> None:
        if self.follow_renames:
            raise ValueError("follow_renames is fixed to false")


@dataclass
class MineStats:
    commits: int = 0
    events: int = 0
    skipped_lines: int = 0


def parse_log_stream(lines: Iterable[str], stats: MineStats | None = None) -> Iterator[RawEvent]:
    """Parse the pinned `git log` output into events, in stream order.

    Malformed commit headers abort with the line number; malformed file lines
    (including R/C lines, which the pinned flags suppress) are skipped with a
    counted warning.
    """
    stats = stats if stats is not None else MineStats()
    commit = ts = author = None
    for lineno, line in enumerate(lines, start=1):
        line = line.rstrip("\n")
        if not line:
            continue
        if line.startswith("#"):
            m = _HEADER_RE.match(line)
            if m is None:
                raise LogFormatError(f"line {lineno}: malformed commit header {line!r}")
            commit, ts, author = m.group(1), int(m.group(2)), m.group(3)
            stats.commits += 1
            continue
        if commit is None:
            raise LogFormatError(f"line {lineno}: file entry before any commit header")
        m = _FILE_RE.match(line)
        if m is None:
            stats.skipped_lines += 1
            logger.warning("skipping unparseable file line %d: %r", lineno, line)
            continue
        status, path = m.group(1), m.group(2)
        stats.events += 1
        yield RawEvent(
            path=_unquote_path(path),
            ts=ts,
            commit=commit,
            author=author,
            kind=_KIND_BY_STATUS.get(status, "M"),
        )


def mine_repository(opts: MineOptions, stats: MineStats | None = None) -> list[RawEvent]:
    """Mine one repository into events totally ordered by (ts, commit, path)."""
    proc = subprocess.run(
        ["git", "-C", opts.repo_path, *GIT_LOG_ARGS, opts.branch],
        capture_output=True,
        text=True,
        encoding="utf-8",
        errors="replace",
    )
    if proc.returncode != 0:
        raise MinerError(
            f"git log failed for {opts.repo_path!r} ({opts.branch}): {proc.stderr.strip()}"
        )
    events = list(parse_log_stream(proc.stdout.splitlines(), stats))
    if opts.path_glob is not None:
        events = [ev for ev in events if fnmatch.fnmatchcase(ev.path, opts.path_glob)]
    events.sort(key=lambda ev: (ev.ts, ev.commit, ev.path))
    return events
