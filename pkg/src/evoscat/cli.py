"""Command line entry point: mine -> preprocess -> render/serve/stats.

Exit codes: 0 success, 1 fatal input error, 2 empty-result warning (treated
as success, noticed on stderr) so gallery builds can be scripted.
"""

from __future__ import annotations

import json
import sys
from datetime import datetime, timezone
from pathlib import Path

import click

from . import eventlog
from .bundle import BundleError, build_bundle, load_bundle
from .miner import MineOptions, MineStats, MinerError, mine_repository
from .preprocess import EmptyDatasetError, default_window, filter_min_events, validate_events
from .render import ViewConfig, render as render_png
from .report import stats_table, write_report
from .similarity import DEFAULT_BINS
from .sorting import default_criteria, parse_criterion
from .coloring import ColorMode
from .transforms import TimeMode
from .urlstate import ViewStateError, parse_view_state

EXIT_OK = 0
EXIT_FATAL = 1
EXIT_EMPTY = 2


def _fail(message: str) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(EXIT_FATAL)


def _parse_window(value: str | None) -> tuple[int, int]:
    if not value:
        return default_window()
    lo, sep, hi = value.partition("..")
    if not sep:
        _fail(f"bad --window {value!r}: expected LO..HI")

    def parse_edge(piece: str, default: int) -> int:
        piece = piece.strip()
        if not piece:
            return default
        try:
            return int(piece)
        except ValueError:
            pass
        try:
            dt = datetime.fromisoformat(piece)
        except ValueError:
            _fail(f"bad --window edge {piece!r}: expected epoch seconds or ISO date")
        if dt.tzinfo is None:
            dt = dt.replace(tzinfo=timezone.utc)
        return int(dt.timestamp())

    default_lo, default_hi = default_window()
    return parse_edge(lo, default_lo), parse_edge(hi, default_hi)


def _parse_size(value: str) -> tuple[int, int]:
    try:
        w, h = value.lower().split("x")
        return int(w), int(h)
    except ValueError:
        _fail(f"bad --size {value!r}: expected WxH")


@click.group()
def main() -> None:
    """Precompute and serve evolution density scatterplots."""


@main.command()
@click.argument("repo", type=click.Path(exists=True, file_okay=False))
@click.option("--branch", default="HEAD", show_default=True, help="Branch to mine.")
@click.option("--glob", "path_glob", default=None, help="Only artifacts matching this pattern.")
@click.option("--out", type=click.Path(dir_okay=False), default=None,
              help="Output NDJSON file (default: stdout).")
def mine(repo: str, branch: str, path_glob: str | None, out: str | None) -> None:
    """Mine a git repository into an NDJSON event log."""
    stats = MineStats()
    try:
        events = mine_repository(MineOptions(repo, branch, path_glob), stats)
    except MinerError as exc:
        _fail(str(exc))
    if out:
        with open(out, "w", encoding="utf-8") as fp:
            eventlog.write_events(events, fp)
    else:
        eventlog.write_events(events, sys.stdout)
    click.echo(
        f"mined {stats.commits} commits -> {len(events)} events"
        + (f" ({stats.skipped_lines} lines skipped)" if stats.skipped_lines else ""),
        err=True,
    )
    if not events:
        click.echo("warning: no matching artifacts", err=True)
        sys.exit(EXIT_EMPTY)


def _preprocess_one(entry: dict, out_dir: Path) -> tuple[str, bool]:
    dataset_id = entry["id"]
    raw = []
    for log_path in entry["events"]:
        with open(log_path, encoding="utf-8") as fp:
            raw.extend(eventlog.read_events(fp))
    for side_path in entry.get("metrics_files", []):
        with open(side_path, encoding="utf-8") as fp:
            raw = eventlog.merge_metrics(raw, eventlog.read_metrics_side_file(fp))

    dataset, rep = validate_events(raw, entry.get("window"), dataset_id)
    click.echo(f"[{dataset_id}] {rep.summary()}", err=True)

    k = int(entry.get("min_events", 0))
    before = dataset.n_artifacts
    dataset = filter_min_events(dataset, k)
    if k:
        click.echo(
            f"[{dataset_id}] min-events {k}: {dataset.n_artifacts} artifacts kept,"
            f" {before - dataset.n_artifacts} filtered",
            err=True,
        )
    empty = dataset.n_artifacts == 0
    if empty:
        click.echo(f"[{dataset_id}] warning: no artifacts left after filtering", err=True)

    if "criteria" in entry:
        criteria = [parse_criterion(c) for c in entry["criteria"]]
    else:
        criteria = default_criteria(dataset.metric_names())
    color_modes = entry.get("color_modes")
    if color_modes is not None:
        for mode in color_modes:
            ColorMode.parse(mode)
    bins = int(entry.get("bins", DEFAULT_BINS))

    data = build_bundle(dataset, criteria, color_modes, bins)
    out_path = out_dir / f"{dataset_id}.evb"
    out_path.write_bytes(data)
    click.echo(f"[{dataset_id}] wrote {out_path} ({len(data)} bytes)", err=True)
    return dataset_id, empty


@main.command()
@click.argument("source", type=click.Path(exists=True, dir_okay=False))
@click.option("--id", "dataset_id", default=None, help="Dataset id (default: file stem).")
@click.option("--out", type=click.Path(file_okay=False), default=".", show_default=True,
              help="Directory for .evb bundles.")
@click.option("--min-events", type=int, default=0, show_default=True,
              help="Drop artifacts with fewer events.")
@click.option("--criteria", multiple=True,
              help="Sort criterion spec (repeatable), e.g. 'extension,last' or 'name=mdelta(m)'.")
@click.option("--color-modes", multiple=True, help="Color mode (repeatable), e.g. year, delta:m.")
@click.option("--window", default=None, help="Valid timestamp window LO..HI (epoch or ISO date).")
@click.option("--bins", type=int, default=DEFAULT_BINS, show_default=True,
              help="Histogram bins for the similarity ordering.")
@click.option("--metrics-file", multiple=True, type=click.Path(exists=True, dir_okay=False),
              help="NDJSON metrics side file keyed by (commit, path).")
def preprocess(source, dataset_id, out, min_events, criteria, color_modes, window, bins,
               metrics_file) -> None:
    """Build .evb bundles from an event log or a JSON manifest.

    SOURCE is either one NDJSON event log or a manifest: {"datasets": [{"id",
    "events": [paths], "metrics_files": [...], "min_events", "criteria",
    "color_modes", "window": [lo, hi], "bins"}, ...]}.
    """
    out_dir = Path(out)
    out_dir.mkdir(parents=True, exist_ok=True)
    entries: list[dict] = []
    if source.endswith(".json"):
        try:
            manifest = json.loads(Path(source).read_text(encoding="utf-8"))
            datasets = manifest["datasets"]
        except (ValueError, KeyError) as exc:
            _fail(f"bad manifest {source!r}: {exc}")
        ids = [e.get("id") for e in datasets]
        if len(set(ids)) != len(ids):
            _fail("manifest dataset ids are not unique")
        base = Path(source).parent
        for entry in datasets:
            entry = dict(entry)
            entry["events"] = [str(base / p) for p in entry["events"]]
            entry["metrics_files"] = [str(base / p) for p in entry.get("metrics_files", [])]
            if "window" in entry and entry["window"] is not None:
                entry["window"] = (int(entry["window"][0]), int(entry["window"][1]))
            entries.append(entry)
    else:
        entries.append(
            {
                "id": dataset_id or Path(source).stem,
                "events": [source],
                "metrics_files": list(metrics_file),
                "min_events": min_events,
                "criteria": list(criteria) or None,
                "color_modes": list(color_modes) or None,
                "window": _parse_window(window),
                "bins": bins,
            }
        )
        if entries[0]["criteria"] is None:
            del entries[0]["criteria"]
        if entries[0]["color_modes"] is None:
            del entries[0]["color_modes"]

    any_empty = False
    for entry in entries:
        try:
            _, empty = _preprocess_one(entry, out_dir)
            any_empty = any_empty or empty
        except EmptyDatasetError as exc:
            _fail(f"[{entry.get('id', '?')}] {exc}")
        except (OSError, ValueError, KeyError) as exc:
            _fail(f"[{entry.get('id', '?')}] {exc}")
    sys.exit(EXIT_EMPTY if any_empty else EXIT_OK)


@main.command()
@click.argument("bundle_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--out", type=click.Path(dir_okay=False), required=True, help="Output PNG path.")
@click.option("--time", "time_mode", default=None, help="absolute|relstart|relend|relmedian|normtime.")
@click.option("--artifact", "criterion", default=None, help="Sort criterion name.")
@click.option("--color", default=None, help="year|ext|author|metric[:m]|delta[:m]|#RRGGBB.")
@click.option("--size", default="1280x800", show_default=True, help="Image size WxH.")
@click.option("--alpha", type=float, default=0.2, show_default=True, help="Per-dot opacity.")
@click.option("--density/--no-density", default=True, show_default=True)
@click.option("--radius", type=int, default=1, show_default=True, help="Dot radius in px.")
@click.option("--viewport", default=None, help="x0,x1,y0,y1 in unit layout space.")
def render(bundle_path, out, time_mode, criterion, color, size, alpha, density, radius,
           viewport) -> None:
    """Render one bundle view to a PNG file."""
    try:
        bundle = load_bundle(Path(bundle_path).read_bytes())
    except BundleError as exc:
        _fail(f"cannot load bundle: {exc}")
    w, h = _parse_size(size)
    frag = {
        "time": time_mode,
        "artifact": criterion,
        "color": color,
        "viewport": viewport,
    }
    query = "&".join(f"{k}={v}" for k, v in frag.items() if v is not None)
    try:
        view = parse_view_state(f"?dataset={bundle.dataset_id}#{query}", defaults=bundle.defaults)
        view = ViewConfig(
            dataset_id=view.dataset_id,
            time_mode=view.time_mode,
            criterion=view.criterion,
            color_mode=view.color_mode,
            width=w,
            height=h,
            viewport=view.viewport,
            density=density,
            dot_alpha=alpha,
            dot_radius_px=radius,
        )
        if view.criterion not in bundle.permutations:
            _fail(f"criterion {view.criterion!r} not in bundle"
                  f" (have: {[n for n, _ in bundle.criteria]})")
        png = render_png(bundle, view)
    except (ViewStateError, ValueError, KeyError) as exc:
        _fail(str(exc))
    Path(out).write_bytes(png)
    click.echo(f"wrote {out} ({len(png)} bytes)", err=True)


@main.command()
@click.argument("data_dir", type=click.Path(exists=True, file_okay=False), required=False)
@click.option("--port", type=int, default=8000, show_default=True)
@click.option("--ui", "ui_dir", type=click.Path(file_okay=False), default=None,
              help="Directory with the built web UI to serve at /.")
def serve(data_dir, port, ui_dir) -> None:
    """Serve bundles over HTTP (data dir defaults to $EVOSCAT_DATA_DIR)."""
    from .server import DATA_DIR_ENV, serve as run_server
    import os

    directory = data_dir or os.environ.get(DATA_DIR_ENV)
    if not directory:
        _fail(f"no data directory given and {DATA_DIR_ENV} is unset")
    run_server(directory, port=port, ui_dir=ui_dir)


@main.command()
@click.argument("bundle_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--out", type=click.Path(file_okay=False), default=None,
              help="Also write stats.tsv, histograms.tsv and legend figures here.")
def stats(bundle_path, out) -> None:
    """Print the counts / time-range / criteria table for a bundle."""
    try:
        bundle = load_bundle(Path(bundle_path).read_bytes())
    except BundleError as exc:
        _fail(f"cannot load bundle: {exc}")
    click.echo(stats_table(bundle))
    if out:
        written = write_report(bundle, out)
        click.echo(f"wrote {len(written)} report files to {out}", err=True)


if __name__ == "__main__":
    main()
