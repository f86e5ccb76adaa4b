"""Shared fixtures: compact dataset builders and scripted git repositories."""

from __future__ import annotations

import os
import subprocess
from pathlib import Path

import pytest

from evoscat.eventlog import RawEvent
from evoscat.model import Dataset
from evoscat.preprocess import validate_events

WIDE_WINDOW = (-(2**40), 2**40)


def commit_id(i: int) -> str:
    return f"{i:040x}"


def raw(path: str, ts: int, n: int = 0, kind: str = "M", author: str = "alice",
        metrics: dict[str, float] | None = None) -> RawEvent:
    return RawEvent(path=path, ts=ts, commit=commit_id(n or ts), author=author,
                    kind=kind, metrics=metrics)


def make_dataset(histories: dict[str, list], dataset_id: str = "test") -> Dataset:
    """histories: path -> list of ts | (ts, metrics) | (ts, metrics, author)."""
    events = []
    n = 0
    for path, entries in histories.items():
        for entry in entries:
            metrics = None
            author = "alice"
            if isinstance(entry, tuple):
                ts = entry[0]
                metrics = entry[1] if len(entry) > 1 else None
                author = entry[2] if len(entry) > 2 else "alice"
            else:
                ts = entry
            events.append(RawEvent(path=path, ts=ts, commit=commit_id(n), author=author,
                                   kind="M", metrics=metrics))
            n += 1
    dataset, _ = validate_events(events, WIDE_WINDOW, dataset_id)
    return dataset


class GitRepo:
    """Scripted repository with pinned identities and timestamps."""

    def __init__(self, path: Path):
        self.path = path
        self.path.mkdir(parents=True, exist_ok=True)
        self._t = 1_600_000_000
        self.run("init", "-q", "-b", "main")
        self.run("config", "user.name", "Fixture")
        self.run("config", "user.email", "fixture@example.com")

    def run(self, *args: str, env_extra: dict | None = None) -> str:
        env = dict(os.environ)
        env.update(env_extra or {})
        proc = subprocess.run(
            ["git", "-C", str(self.path), *args],
            check=True, capture_output=True, text=True, env=env,
        )
        return proc.stdout

    def commit(self, files: dict[str, str | None], message: str = "c",
               ts: int | None = None, author: str = "Fixture") -> tuple[str, int]:
        """Apply file contents (None = delete), commit at a fixed timestamp."""
        if ts is None:
            self._t += 3600
            ts = self._t
        for name, content in files.items():
            target = self.path / name
            if content is None:
                self.run("rm", "-q", name)
            else:
                target.parent.mkdir(parents=True, exist_ok=True)
                target.write_text(content)
                self.run("add", name)
        stamp = f"{ts} +0000"
        self.run(
            "commit", "-q", "--allow-empty", "-m", message,
            env_extra={
                "GIT_AUTHOR_DATE": stamp,
                "GIT_COMMITTER_DATE": stamp,
                "GIT_AUTHOR_NAME": author,
                "GIT_AUTHOR_EMAIL": "fixture@example.com",
                "GIT_COMMITTER_NAME": "Fixture",
                "GIT_COMMITTER_EMAIL": "fixture@example.com",
            },
        )
        return self.head(), ts

    def head(self) -> str:
        return self.run("rev-parse", "HEAD").strip()


@pytest.fixture
def git_repo(tmp_path: Path) -> GitRepo:
    return GitRepo(tmp_path / "repo")


def pytest_runtest_logreport(report):
    # one visible pass/fail line per acceptance criterion
    if "test_acceptance.py" in report.nodeid and report.when == "call":
        name = report.nodeid.split("::")[-1]
        verdict = "PASS" if report.passed else "FAIL"
        print(f"\n[ACCEPTANCE] {verdict} {name}", flush=True)
