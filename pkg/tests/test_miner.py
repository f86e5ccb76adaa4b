import subprocess

import pytest

from evoscat.eventlog import RawEvent
from evoscat.miner import (
    LogFormatError,
    MineOptions,
    MineStats,
    MinerError,
    mine_repository,
    parse_log_stream,
)


def events_as_tuples(events):
    return [(ev.path, ev.kind, ev.ts) for ev in events]


def test_single_commit_add(git_repo):
    sha, ts = git_repo.commit({"a.txt": "hello"})
    events = mine_repository(MineOptions(str(git_repo.path)))
    assert events == [RawEvent("a.txt", ts, sha, "Fixture", "A")]


def test_rename_surfaces_as_delete_plus_add(git_repo):
    git_repo.commit({"a.txt": "same content\n" * 50})
    git_repo.run("mv", "a.txt", "b.txt")
    sha, ts = git_repo.commit({}, message="rename")
    # oracle: git itself reports D+A when rename detection is off
    status = git_repo.run("show", "--no-renames", "--name-status", "--format=", sha)
    assert sorted(line.split("\t")[0] for line in status.strip().splitlines()) == ["A", "D"]
    events = mine_repository(MineOptions(str(git_repo.path)))
    at_rename = [(ev.path, ev.kind) for ev in events if ev.ts == ts]
    assert sorted(at_rename) == [("a.txt", "D"), ("b.txt", "A")]


def test_modify_and_delete(git_repo):
    git_repo.commit({"a.txt": "one"})
    _, t2 = git_repo.commit({"a.txt": "two"})
    _, t3 = git_repo.commit({"a.txt": None})
    events = mine_repository(MineOptions(str(git_repo.path)))
    assert events_as_tuples(events)[1:] == [("a.txt", "M", t2), ("a.txt", "D", t3)]


def test_merge_side_branch_changes_appear_only_at_merge(git_repo):
    git_repo.commit({"base.txt": "base"})
    git_repo.run("checkout", "-q", "-b", "side")
    git_repo.commit({"c.txt": "side work"}, ts=1_600_100_000)
    git_repo.run("checkout", "-q", "main")
    git_repo.commit({"main.txt": "main work"}, ts=1_600_200_000)
    merge_ts = 1_600_300_000
    stamp = f"{merge_ts} +0000"
    git_repo.run(
        "merge", "-q", "--no-ff", "-m", "merge side", "side",
        env_extra={"GIT_AUTHOR_DATE": stamp, "GIT_COMMITTER_DATE": stamp},
    )
    merge_sha = git_repo.head()

    events = mine_repository(MineOptions(str(git_repo.path), branch="main"))
    c_events = [ev for ev in events if ev.path == "c.txt"]
    # the side-branch commit itself is invisible; c.txt enters through the
    # merge's first-parent diff
    assert [(ev.kind, ev.ts, ev.commit) for ev in c_events] == [("A", merge_ts, merge_sha)]

    # oracle: first-parent log of main never lists the side commit
    first_parent = git_repo.run("log", "--first-parent", "--format=%H", "main").split()
    assert all(ev.commit in first_parent for ev in events)


def test_mine_is_deterministic(git_repo):
    git_repo.commit({"a.txt": "x", "b.txt": "y"})
    git_repo.commit({"a.txt": "x2", "c.txt": "z"})
    opts = MineOptions(str(git_repo.path))
    assert mine_repository(opts) == mine_repository(opts)


def test_output_totally_ordered(git_repo):
    git_repo.commit({"b.txt": "1", "a.txt": "1"})
    git_repo.commit({"c.txt": "1", "a.txt": "2"})
    events = mine_repository(MineOptions(str(git_repo.path)))
    keys = [(ev.ts, ev.commit, ev.path) for ev in events]
    assert keys == sorted(keys)
    assert len(set(keys)) == len(keys)


def test_path_glob_filters(git_repo):
    git_repo.commit({"src/a.py": "x", "doc/a.md": "y", "src/b.py": "z"})
    events = mine_repository(MineOptions(str(git_repo.path), path_glob="src/*.py"))
    assert {ev.path for ev in events} == {"src/a.py", "src/b.py"}


def test_missing_repository_is_fatal(tmp_path):
    with pytest.raises(MinerError):
        mine_repository(MineOptions(str(tmp_path)))


def test_follow_renames_is_fixed_off():
    with pytest.raises(ValueError):
        MineOptions("/tmp", follow_renames=True)


# --- parse_log_stream on the pinned format ---------------------------------

HEADER = "#" + "ab" * 20 + "|1399530161|Alice"


def test_parse_header_and_file_line():
    events = list(parse_log_stream([HEADER, "A\ta.txt"]))
    assert events == [RawEvent("a.txt", 1399530161, "ab" * 20, "Alice", "A")]


def test_parse_empty_stream():
    assert list(parse_log_stream([])) == []


def test_parse_author_with_pipes_and_unicode():
    header = "#" + "0" * 40 + "|7|We|ird Nämé"
    events = list(parse_log_stream([header, "M\tx"]))
    assert events[0].author == "We|ird Nämé"


def test_parse_rename_line_is_format_error_skipped_with_warning():
    stats = MineStats()
    events = list(parse_log_stream([HEADER, "R100\told\tnew", "M\tkept"], stats))
    assert [ev.path for ev in events] == ["kept"]
    assert stats.skipped_lines == 1


def test_pinned_flags_suppress_rename_lines(git_repo):
    git_repo.commit({"a.txt": "same content\n" * 50})
    git_repo.run("mv", "a.txt", "b.txt")
    git_repo.commit({}, message="rename")
    from evoscat.miner import GIT_LOG_ARGS

    out = git_repo.run(*GIT_LOG_ARGS, "HEAD")
    statuses = [line.split("\t")[0] for line in out.splitlines() if "\t" in line]
    assert statuses and all(s in ("A", "M", "D") for s in statuses)


def test_parse_malformed_header_aborts_with_line_number():
    with pytest.raises(LogFormatError, match="line 2"):
        list(parse_log_stream([HEADER, "#broken"]))


def test_parse_file_line_before_header_aborts():
    with pytest.raises(LogFormatError, match="line 1"):
        list(parse_log_stream(["A\ta.txt"]))


def test_other_status_letters_map_to_modified():
    events = list(parse_log_stream([HEADER, "T\tlink"]))
    assert events[0].kind == "M"


def test_unusual_path_quoting_roundtrip(git_repo):
    name = "späce dir/ümlaut ö.txt"
    git_repo.commit({name: "x"})
    events = mine_repository(MineOptions(str(git_repo.path)))
    assert events[0].path == name
