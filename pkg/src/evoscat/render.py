"""Headless rendering of a bundle view to a PNG density scatterplot.

One dot per event, drawn in global timestamp order so newer events layer on
top. Density mode composites every dot source-over with a fixed alpha, which
makes k exact overlaps reach opacity 1-(1-a)^k; the buffer is then flattened
onto a white background. Rendering is deterministic: the same bundle and view
produce byte-identical PNGs.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, replace

import numpy as np
from PIL import Image

from .bundle import LayoutBundle
from .coloring import RGB, ColorKind, ColorMode, classify_events, UNVALUED_COLOR
from .spatial import GridIndex
from .transforms import TimeMode, transform_column

MAX_IMAGE_SIDE = 16384


@dataclass(frozen=True)
class ViewConfig:
    dataset_id: str
    time_mode: TimeMode = TimeMode.ABSOLUTE
    criterion: str = "path"
    color_mode: ColorMode = ColorMode(ColorKind.YEAR)
    width: int = 1280
    height: int = 800
    viewport: tuple[float, float, float, float] = (0.0, 1.0, 0.0, 1.0)
    density: bool = True
    dot_alpha: float = 0.2
    dot_radius_px: int = 1
    palette: tuple[tuple[str, RGB], ...] = ()  # per-class color overrides

    def __post_init__(self) -> None:
        x0, x1, y0, y1 = self.viewport
        if not (x0 < x1 and y0 < y1):
            raise ValueError(f"degenerate viewport {self.viewport}")
        if not 0.0 < self.dot_alpha <= 1.0:
            raise ValueError("dot_alpha must be in (0, 1]")
        if self.dot_radius_px < 1:
            raise ValueError("dot_radius_px must be >= 1")

    def with_size(self, width: int, height: int) -> "ViewConfig":
        return replace(self, width=width, height=height)


@dataclass
class LayoutPoints:
    x: np.ndarray  # unit layout space, (rank + 0.5) / n_artifacts
    y: np.ndarray  # unit time coordinate
    ordinal: np.ndarray  # event ordinal in bundle column order (= draw order)


@dataclass
class RenderInfo:
    dots_drawn: int = 0
    classes: tuple[str, ...] = ()


def layout_points(bundle: LayoutBundle, time_mode: TimeMode, criterion: str) -> LayoutPoints:
    """Project every event into unit layout space, in draw (ts) order."""
    cols = bundle.columns
    perm = bundle.permutation(criterion)
    n = cols.n_artifacts
    rank_of = np.empty(max(n, 1), dtype=np.int64)
    rank_of[perm] = np.arange(len(perm))
    x = (rank_of[cols.ev_artifact] + 0.5) / n if n else np.empty(0)
    y = transform_column(
        cols.ev_ts,
        cols.ev_artifact,
        cols.first_ts,
        cols.last_ts,
        cols.median_ts,
        cols.age_s,
        cols.bounds,
        time_mode,
    )
    return LayoutPoints(x=x, y=y, ordinal=np.arange(cols.total_events, dtype=np.int64))


def _dot_offsets(radius: int) -> np.ndarray:
    # disc stamp: pixels within radius - 0.5 of the center (radius 1 = 1 px)
    r = radius - 0.5
    span = np.arange(-radius, radius + 1)
    dx, dy = np.meshgrid(span, span)
    keep = dx * dx + dy * dy <= r * r
    return np.stack([dx[keep], dy[keep]], axis=1)


def event_colors(bundle: LayoutBundle, view: ViewConfig) -> tuple[np.ndarray, tuple[str, ...]]:
    """Per-event RGB in [0,1] floats; unclassed events get neutral gray."""
    codes, table = classify_events(bundle.columns, view.color_mode)
    colors = list(table.colors)
    overrides = dict(view.palette)
    for i, label in enumerate(table.labels):
        if label in overrides:
            colors[i] = overrides[label]
    lut = np.asarray([UNVALUED_COLOR] + colors, dtype=np.float64) / 255.0
    return lut[codes + 1], table.labels


def render_with_info(bundle: LayoutBundle, view: ViewConfig) -> tuple[bytes, RenderInfo]:
    w, h = view.width, view.height
    if w < 1 or h < 1 or w > MAX_IMAGE_SIDE or h > MAX_IMAGE_SIDE:
        raise ValueError(f"image size {w}x{h} out of range (max side {MAX_IMAGE_SIDE})")
    x0, x1, y0, y1 = view.viewport

    points = layout_points(bundle, view.time_mode, view.criterion)
    inside = (points.x >= x0) & (points.x <= x1) & (points.y >= y0) & (points.y <= y1)
    xs, ys = points.x[inside], points.y[inside]
    rgb, labels = event_colors(bundle, view)
    rgb = rgb[inside]
    info = RenderInfo(dots_drawn=int(inside.sum()), classes=labels)

    px = np.minimum(((xs - x0) / (x1 - x0) * w).astype(np.int64), w - 1)
    py_up = np.minimum(((ys - y0) / (y1 - y0) * h).astype(np.int64), h - 1)
    row = h - 1 - py_up  # time flows bottom-to-top

    alpha = view.dot_alpha if view.density else 1.0

    if view.dot_radius_px > 1:
        offs = _dot_offsets(view.dot_radius_px)
        k = len(offs)
        px = (px[:, None] + offs[None, :, 0]).ravel()
        row = (row[:, None] + offs[None, :, 1]).ravel()
        rgb = np.repeat(rgb, k, axis=0)
        keep = (px >= 0) & (px < w) & (row >= 0) & (row < h)
        px, row, rgb = px[keep], row[keep], rgb[keep]

    # Source-over of dots c_1..c_k on one pixel gives premultiplied color
    # sum_i c_i * a * (1-a)^(k-i) and coverage 1-(1-a)^k; compute both by
    # grouping stamps per pixel in draw order.
    flat = row * w + px
    order = np.argsort(flat, kind="stable")
    flat_sorted = flat[order]
    boundaries = np.empty(len(flat_sorted), dtype=bool)
    if len(flat_sorted):
        boundaries[0] = True
        boundaries[1:] = flat_sorted[1:] != flat_sorted[:-1]
    group_id = np.cumsum(boundaries) - 1 if len(flat_sorted) else np.empty(0, dtype=np.int64)
    group_start = np.flatnonzero(boundaries)
    group_sizes = np.diff(np.append(group_start, len(flat_sorted)))
    pos_in_group = np.arange(len(flat_sorted)) - np.repeat(group_start, group_sizes)
    exponent = group_sizes[group_id] - 1 - pos_in_group
    weight = alpha * np.power(1.0 - alpha, exponent.astype(np.float64))

    premul = np.zeros((h * w, 3), dtype=np.float64)
    coverage = np.zeros(h * w, dtype=np.float64)
    if len(flat_sorted):
        pixels = flat_sorted[boundaries]
        for ch in range(3):
            premul[:, ch] = np.bincount(
                flat_sorted, weights=rgb[order][:, ch] * weight, minlength=h * w
            )
        coverage[pixels] = 1.0 - np.power(1.0 - alpha, group_sizes.astype(np.float64))

    # flatten onto opaque white
    out = premul + (1.0 - coverage)[:, None]
    img = np.empty((h, w, 4), dtype=np.uint8)
    img[..., :3] = np.clip(np.round(out * 255.0), 0, 255).reshape(h, w, 3).astype(np.uint8)
    img[..., 3] = 255

    buf = io.BytesIO()
    Image.fromarray(img, mode="RGBA").save(buf, format="PNG")
    return buf.getvalue(), info


def render(bundle: LayoutBundle, view: ViewConfig) -> bytes:
    png, _ = render_with_info(bundle, view)
    return png


def build_view_index(bundle: LayoutBundle, time_mode: TimeMode, criterion: str) -> GridIndex:
    points = layout_points(bundle, time_mode, criterion)
    return GridIndex(points.x, points.y)


def event_details(bundle: LayoutBundle, ordinal: int) -> dict:
    """Hover payload for one event ordinal: path, commit, ts, author, metrics."""
    cols = bundle.columns
    art = int(cols.ev_artifact[ordinal])
    metrics = {
        name: float(col[ordinal])
        for name, col in sorted(cols.ev_metrics.items())
        if not np.isnan(col[ordinal])
    }
    return {
        "path": cols.paths[art],
        "commit": cols.commit_table[int(cols.ev_commit[ordinal])],
        "ts": int(cols.ev_ts[ordinal]),
        "author": cols.author_table[int(cols.ev_author[ordinal])],
        "metrics": metrics,
    }
