import json
from pathlib import Path

from click.testing import CliRunner

from evoscat.bundle import load_bundle
from evoscat.cli import main

from conftest import raw
from evoscat import eventlog


def write_log(path: Path, events) -> None:
    with path.open("w", encoding="utf-8") as fp:
        eventlog.write_events(events, fp)


def sizes_fixture_events():
    events = []
    n = 0
    for path, count in (("p1", 1), ("p2", 2), ("p5", 5), ("p6", 6), ("p9", 9)):
        for i in range(count):
            n += 1
            events.append(raw(path, 1000 + i * 10, n))
    return events


def test_mine_preprocess_render_end_to_end(git_repo, tmp_path):
    git_repo.commit({"src/a.py": "one", "doc/x.md": "hi"})
    git_repo.commit({"src/a.py": "two", "src/b.py": "new"})
    git_repo.commit({"src/b.py": None})
    runner = CliRunner()

    log1 = tmp_path / "events.ndjson"
    res = runner.invoke(main, ["mine", str(git_repo.path), "--out", str(log1)])
    assert res.exit_code == 0, res.output
    log2 = tmp_path / "events2.ndjson"
    res = runner.invoke(main, ["mine", str(git_repo.path), "--out", str(log2)])
    assert res.exit_code == 0
    assert log1.read_bytes() == log2.read_bytes()  # miner determinism

    out_dir = tmp_path / "bundles"
    res = runner.invoke(
        main,
        ["preprocess", str(log1), "--id", "demo", "--out", str(out_dir),
         "--window", "0..2000000000"],
    )
    assert res.exit_code == 0, res.output
    bundle_path = out_dir / "demo.evb"
    assert bundle_path.is_file()

    png1 = tmp_path / "a.png"
    png2 = tmp_path / "b.png"
    args = ["render", str(bundle_path), "--time", "absolute", "--artifact", "last",
            "--color", "year", "--size", "120x90"]
    assert runner.invoke(main, args + ["--out", str(png1)]).exit_code == 0
    assert runner.invoke(main, args + ["--out", str(png2)]).exit_code == 0
    assert png1.read_bytes() == png2.read_bytes()
    assert png1.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"


def test_preprocess_min_events_reporting(tmp_path):
    log = tmp_path / "sizes.ndjson"
    write_log(log, sizes_fixture_events())
    runner = CliRunner()
    res = runner.invoke(
        main,
        ["preprocess", str(log), "--id", "sz", "--out", str(tmp_path), "--min-events", "6",
         "--window", "0..10000"],
    )
    assert res.exit_code == 0, res.output
    assert "2 artifacts kept, 3 filtered" in res.output
    bundle = load_bundle((tmp_path / "sz.evb").read_bytes())
    assert bundle.n_artifacts == 2


def test_preprocess_manifest_multiple_datasets(tmp_path):
    log_a = tmp_path / "a.ndjson"
    log_b = tmp_path / "b.ndjson"
    write_log(log_a, [raw("x", 10, 1), raw("x", 20, 2)])
    write_log(log_b, [raw("y", 10, 3, metrics={"size": 5.0})])
    manifest = tmp_path / "manifest.json"
    manifest.write_text(json.dumps({
        "datasets": [
            {"id": "one", "events": ["a.ndjson"], "window": [0, 100]},
            {"id": "two", "events": ["b.ndjson"], "window": [0, 100],
             "criteria": ["path", "first", "size_last=mlast(size)"]},
        ]
    }))
    runner = CliRunner()
    res = runner.invoke(main, ["preprocess", str(manifest), "--out", str(tmp_path)])
    assert res.exit_code == 0, res.output
    one = load_bundle((tmp_path / "one.evb").read_bytes())
    two = load_bundle((tmp_path / "two.evb").read_bytes())
    assert one.n_events == 2
    assert [name for name, _ in two.criteria] == ["path", "first", "size_last"]


def test_preprocess_duplicate_manifest_ids_fatal(tmp_path):
    manifest = tmp_path / "manifest.json"
    manifest.write_text(json.dumps({
        "datasets": [{"id": "dup", "events": []}, {"id": "dup", "events": []}]
    }))
    res = CliRunner().invoke(main, ["preprocess", str(manifest), "--out", str(tmp_path)])
    assert res.exit_code == 1


def test_stats_prints_counts_and_range(tmp_path):
    log = tmp_path / "ds.ndjson"
    events = [raw("a", 1000, 1), raw("a", 2000, 2), raw("a", 3000, 3),
              raw("b", 1500, 4), raw("b", 2500, 5), raw("c", 1000, 6), raw("c", 4000, 7)]
    write_log(log, events)
    runner = CliRunner()
    assert runner.invoke(
        main, ["preprocess", str(log), "--id", "st", "--out", str(tmp_path),
               "--window", "0..100000"]
    ).exit_code == 0
    res = runner.invoke(main, ["stats", str(tmp_path / "st.evb")])
    assert res.exit_code == 0, res.output
    assert "artifacts" in res.output and "3" in res.output
    assert "events" in res.output and "7" in res.output
    assert "1970-01-01 00:16:40" in res.output  # ts=1000
    assert "1970-01-01 01:06:40" in res.output  # ts=4000


def test_stats_report_files(tmp_path):
    log = tmp_path / "ds.ndjson"
    write_log(log, [raw("a.py", 1000, 1, metrics={"size": 1.0}),
                    raw("a.py", 2000, 2, metrics={"size": 3.0})])
    runner = CliRunner()
    runner.invoke(main, ["preprocess", str(log), "--id", "rep", "--out", str(tmp_path),
                         "--window", "0..100000"])
    out_dir = tmp_path / "report"
    res = runner.invoke(main, ["stats", str(tmp_path / "rep.evb"), "--out", str(out_dir)])
    assert res.exit_code == 0, res.output
    assert (out_dir / "stats.tsv").is_file()
    assert (out_dir / "histograms.tsv").is_file()
    figures = list(out_dir.glob("hist_*.png"))
    assert figures, "expected legend figures"
    header = (out_dir / "stats.tsv").read_text().splitlines()[0]
    assert header == "key\tvalue"


def test_mine_empty_result_exit_code(git_repo):
    git_repo.commit({"a.txt": "x"})
    res = CliRunner().invoke(main, ["mine", str(git_repo.path), "--glob", "*.nothing"])
    assert res.exit_code == 2


def test_render_unknown_criterion_fatal(tmp_path):
    log = tmp_path / "ds.ndjson"
    write_log(log, [raw("a", 1000, 1)])
    runner = CliRunner()
    runner.invoke(main, ["preprocess", str(log), "--id", "x", "--out", str(tmp_path),
                         "--window", "0..10000"])
    res = runner.invoke(main, ["render", str(tmp_path / "x.evb"), "--out",
                               str(tmp_path / "o.png"), "--artifact", "bogus"])
    assert res.exit_code == 1
    assert "bogus" in res.output
