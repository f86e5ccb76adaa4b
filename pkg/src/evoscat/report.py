"""Human-readable and machine-readable summaries of a bundle: the counts and
time-range table, a delimited export, and legend histogram figures."""

from __future__ import annotations

from datetime import datetime, timezone
from pathlib import Path

from .bundle import LayoutBundle
from .coloring import format_hex


def _fmt_ts(ts: int) -> str:
    return datetime.fromtimestamp(ts, tz=timezone.utc).strftime("%Y-%m-%d %H:%M:%S")


def stats_rows(bundle: LayoutBundle) -> list[tuple[str, str]]:
    b = bundle.columns.bounds
    span_days = (b.t_max - b.t_min) // 86400
    rows = [
        ("dataset", bundle.dataset_id),
        ("artifacts", str(bundle.n_artifacts)),
        ("commits", str(bundle.n_commits)),
        ("events", str(bundle.n_events)),
        ("time range (days)", str(span_days)),
        ("first timestamp", _fmt_ts(b.t_min)),
        ("last timestamp", _fmt_ts(b.t_max)),
        ("criteria", ", ".join(name for name, _ in bundle.criteria)),
        ("color modes", ", ".join(bundle.color_modes)),
        ("metrics", ", ".join(d.name for d in bundle.columns.descriptors) or "-"),
    ]
    if bundle.similarity_fell_back:
        rows.append(("similarity", "fell back to median order (too many artifacts)"))
    return rows


def stats_table(bundle: LayoutBundle) -> str:
    rows = stats_rows(bundle)
    width = max(len(k) for k, _ in rows)
    return "\n".join(f"{k.ljust(width)}  {v}" for k, v in rows)


def write_report(bundle: LayoutBundle, out_dir: str | Path) -> list[Path]:
    """Write stats.tsv plus one histogram figure per color mode; returns paths."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []

    tsv = out / "stats.tsv"
    with tsv.open("w", encoding="utf-8") as fp:
        fp.write("key\tvalue\n")
        for key, value in stats_rows(bundle):
            fp.write(f"{key}\t{value}\n")
    written.append(tsv)

    hist_tsv = out / "histograms.tsv"
    with hist_tsv.open("w", encoding="utf-8") as fp:
        fp.write("mode\tclass\tevents\tcolor\n")
        for mode, rows in bundle.histograms.items():
            for label, count, rgb in rows:
                fp.write(f"{mode}\t{label or '(none)'}\t{count}\t{format_hex(rgb)}\n")
    written.append(hist_tsv)

    for mode, rows in bundle.histograms.items():
        if not rows:
            continue
        shown = rows[:30]  # author legends can be huge
        labels = [label or "(none)" for label, _, _ in shown]
        counts = [count for _, count, _ in shown]
        colors = [tuple(c / 255 for c in rgb) for _, _, rgb in shown]
        fig, ax = plt.subplots(figsize=(max(4, len(shown) * 0.45), 3.2))
        ax.bar(range(len(shown)), counts, color=colors, edgecolor="black", linewidth=0.4)
        ax.set_xticks(range(len(shown)))
        ax.set_xticklabels(labels, rotation=45, ha="right", fontsize=7)
        ax.set_ylabel("events")
        ax.set_title(f"{bundle.dataset_id}: {mode}")
        fig.tight_layout()
        fname = out / ("hist_" + mode.replace(":", "_").replace("#", "const") + ".png")
        fig.savefig(fname, dpi=100)
        plt.close(fig)
        written.append(fname)
    return written
