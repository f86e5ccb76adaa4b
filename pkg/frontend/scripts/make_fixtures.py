"""Regenerate the frontend test fixtures from the Python pipeline.

Writes fixture.evb plus expected.json (decode counts, per-view dot positions,
hover probes) so the TypeScript client can be checked against the exact
numbers the server-side renderer produces.

Usage: python3 scripts/make_fixtures.py   (from frontend/)
"""

from __future__ import annotations

import json
import random
from pathlib import Path

from evoscat.bundle import assemble_bundle, load_bundle, serialize_bundle
from evoscat.eventlog import RawEvent
from evoscat.preprocess import validate_events
from evoscat.render import layout_points
from evoscat.sorting import default_criteria
from evoscat.spatial import build_spatial_index
from evoscat.transforms import TimeMode

OUT = Path(__file__).resolve().parent.parent / "test" / "fixtures"


def fixture_events() -> list[RawEvent]:
    rng = random.Random(1207)
    events = []
    n = 0
    for i in range(12):
        path = f"pkg{i % 3}/mod{i:02d}.{['ts', 'py', 'md'][i % 3]}"
        k = rng.randint(1, 9)
        base = rng.randint(1_400_000_000, 1_650_000_000)
        for ts in sorted(rng.sample(range(base, base + 200_000_000), k)):
            n += 1
            metrics = {"size": float(rng.randint(0, 40))} if rng.random() < 0.7 else None
            events.append(RawEvent(
                path=path, ts=ts, commit=f"{rng.getrandbits(160):040x}",
                author=rng.choice(["amy", "bob", "cid"]), kind="M", metrics=metrics,
            ))
    return events


def main() -> None:
    OUT.mkdir(parents=True, exist_ok=True)
    dataset, _ = validate_events(fixture_events(), (0, 1_700_000_000), "fixture")
    bundle = assemble_bundle(dataset, default_criteria(dataset.metric_names()))
    data = serialize_bundle(bundle)
    (OUT / "fixture.evb").write_bytes(data)
    bundle = load_bundle(data)

    rng = random.Random(42)
    criteria = [name for name, _ in bundle.criteria]
    views = []
    for _ in range(20):
        mode = rng.choice(list(TimeMode))
        criterion = rng.choice(criteria)
        w = rng.randrange(200, 1600)
        h = rng.randrange(150, 1000)
        pts = layout_points(bundle, mode, criterion)
        views.append({
            "time": mode.value,
            "criterion": criterion,
            "width": w,
            "height": h,
            "cx": [round(float(x) * w, 6) for x in pts.x],
            "cy": [round(h - float(y) * h, 6) for y in pts.y],
        })

    pts = layout_points(bundle, TimeMode.ABSOLUTE, "path")
    index = build_spatial_index(pts.x, pts.y)
    cols = bundle.columns
    probes = []
    for target in (0, len(pts.x) // 2, len(pts.x) - 1):
        x, y = float(pts.x[target]), float(pts.y[target])
        found = index.nearest(x, y, 1e-9)
        probes.append({
            "x": x, "y": y, "r": 1e-9,
            "time": "absolute", "criterion": "path",
            "ordinal": int(found),
            "commit": cols.commit_table[cols.ev_commit[found]],
            "ts": int(cols.ev_ts[found]),
            "path": cols.paths[cols.ev_artifact[found]],
        })

    expected = {
        "dataset_id": bundle.dataset_id,
        "n_artifacts": bundle.n_artifacts,
        "n_events": bundle.n_events,
        "n_commits": bundle.n_commits,
        "t_min": int(cols.bounds.t_min),
        "t_max": int(cols.bounds.t_max),
        "criteria": criteria,
        "color_modes": bundle.color_modes,
        "first_ts": [int(v) for v in cols.first_ts],
        "histogram_year": [
            [label, count] for label, count, _ in bundle.histograms["year"]
        ],
        "views": views,
        "probes": probes,
    }
    (OUT / "expected.json").write_text(json.dumps(expected), encoding="utf-8")
    print(f"wrote {OUT / 'fixture.evb'} ({len(data)} bytes) and expected.json")


if __name__ == "__main__":
    main()
