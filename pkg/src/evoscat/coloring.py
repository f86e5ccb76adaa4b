"""Dot color encodings and the histogram legends that accompany them.

Every mode assigns each event a class code (-1 = no attribute, drawn in
neutral gray and excluded from histogram counts) plus a class table mapping
codes to labels and colors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .columns import DatasetColumns
from .model import RGB, Dataset, MetricDescriptor

# Categorical palette for year/type/author classes, assigned cyclically in
# class order.
CATEGORICAL_PALETTE: tuple[RGB, ...] = (
    (0xFF, 0x4A, 0x46),
    (0xFF, 0x34, 0xFF),
    (0xFF, 0xFF, 0x00),
    (0x00, 0x89, 0x41),
    (0x19, 0x66, 0xFF),
    (0x1C, 0xFF, 0xD9),
    (0xC0, 0x00, 0x69),
    (0xFF, 0xDB, 0xE5),
    (0xFF, 0x99, 0x00),
    (0x81, 0x48, 0xD5),
    (0xFF, 0x00, 0x66),
)

# shrink / stable / grow
VARIATION_COLORS: dict[str, RGB] = {
    "-": (0xFF, 0x4A, 0x46),
    "0": (0x00, 0xAE, 0xFF),
    "+": (0x1F, 0xCB, 0x23),
}

UNVALUED_COLOR: RGB = (0xC0, 0xC0, 0xC0)

# Gradient endpoints used when deriving default stops for an undeclared metric.
_DEFAULT_STOP_COLORS: tuple[RGB, ...] = (
    (0x00, 0xFF, 0x00),
    (0x00, 0xFF, 0xFF),
    (0xFF, 0x00, 0x00),
    (0x00, 0x00, 0x00),
)


def parse_hex(value: str) -> RGB:
    value = value.lstrip("#")
    if len(value) == 3:
        value = "".join(c * 2 for c in value)
    if len(value) != 6:
        raise ValueError(f"bad hex color {value!r}")
    return (int(value[0:2], 16), int(value[2:4], 16), int(value[4:6], 16))


def format_hex(rgb: RGB) -> str:
    return "#{:02X}{:02X}{:02X}".format(*rgb)


class ColorKind(Enum):
    YEAR = "year"
    TYPE = "ext"
    METRIC = "metric"
    VARIATION = "delta"
    AUTHOR = "author"
    CONSTANT = "constant"


@dataclass(frozen=True)
class ColorMode:
    kind: ColorKind
    metric: str | None = None  # METRIC / VARIATION only; None = first declared
    constant: RGB | None = None  # CONSTANT only

    @classmethod
    def parse(cls, value: str) -> "ColorMode":
        value = value.strip()
        if value.startswith("#"):
            return cls(ColorKind.CONSTANT, constant=parse_hex(value))
        head, _, metric = value.partition(":")
        head = head.lower()
        aliases = {"year": ColorKind.YEAR, "ext": ColorKind.TYPE, "type": ColorKind.TYPE,
                   "author": ColorKind.AUTHOR, "metric": ColorKind.METRIC,
                   "delta": ColorKind.VARIATION, "variation": ColorKind.VARIATION}
        if head not in aliases:
            raise ValueError(f"unknown color mode {value!r}")
        kind = aliases[head]
        if metric and kind not in (ColorKind.METRIC, ColorKind.VARIATION):
            raise ValueError(f"color mode {head!r} takes no metric name")
        return cls(kind, metric=metric or None)

    def spec(self) -> str:
        if self.kind is ColorKind.CONSTANT:
            return format_hex(self.constant or (0, 0, 0))
        if self.metric:
            return f"{self.kind.value}:{self.metric}"
        return self.kind.value

    def resolve_metric(self, descriptors: tuple[MetricDescriptor, ...]) -> str | None:
        if self.kind not in (ColorKind.METRIC, ColorKind.VARIATION):
            return None
        if self.metric is not None:
            return self.metric
        if not descriptors:
            raise ValueError(f"color mode {self.kind.value!r} needs a metric but none declared")
        return descriptors[0].name


@dataclass(frozen=True)
class ClassTable:
    labels: tuple[str, ...]
    colors: tuple[RGB, ...]


def years_of_column(ts: np.ndarray) -> np.ndarray:
    """Vectorized UTC calendar year (days-from-epoch civil calendar math)."""
    days = np.floor_divide(ts, 86400)
    z = days + 719468
    era = np.floor_divide(z, 146097)
    doe = z - era * 146097
    yoe = (doe - doe // 1460 + doe // 36524 - doe // 146096) // 365
    y = yoe + era * 400
    doy = doe - (365 * yoe + yoe // 4 - yoe // 100)
    mp = (5 * doy + 2) // 153
    month = np.where(mp < 10, mp + 3, mp - 9)
    return (y + (month <= 2)).astype(np.int64)


def _stop_label(threshold: float, prev: float | None) -> str:
    def fmt(x: float) -> str:
        return str(int(x)) if float(x).is_integer() else f"{x:g}"

    if math.isinf(threshold):
        return f"> {fmt(prev)}" if prev is not None else "all"
    return fmt(threshold)


def derive_default_stops(values: np.ndarray) -> tuple[tuple[float, RGB], ...]:
    """Quantile-based stops (plus a catch-all) for metrics declared without any."""
    finite = values[np.isfinite(values)]
    if finite.size == 0:
        return ((math.inf, _DEFAULT_STOP_COLORS[-1]),)
    qs = [float(np.quantile(finite, q)) for q in (0.25, 0.5, 0.9)]
    stops: list[tuple[float, RGB]] = []
    for q, color in zip(qs, _DEFAULT_STOP_COLORS):
        if not stops or q > stops[-1][0]:
            stops.append((q, color))
    stops.append((math.inf, _DEFAULT_STOP_COLORS[-1]))
    return tuple(stops)


def classify_events(cols: DatasetColumns, mode: ColorMode) -> tuple[np.ndarray, ClassTable]:
    """Per-event class codes plus the class table for one color mode."""
    n = cols.total_events
    if mode.kind is ColorKind.CONSTANT:
        return (
            np.zeros(n, dtype=np.int32),
            ClassTable(("all",), (mode.constant or (0, 0, 0),)),
        )
    if mode.kind is ColorKind.YEAR:
        years = years_of_column(cols.ev_ts)
        present = np.unique(years)
        codes = np.searchsorted(present, years).astype(np.int32)
        base = int(present[0]) if present.size else 0
        colors = tuple(
            CATEGORICAL_PALETTE[(int(y) - base) % len(CATEGORICAL_PALETTE)] for y in present
        )
        return codes, ClassTable(tuple(str(int(y)) for y in present), colors)
    if mode.kind is ColorKind.TYPE:
        codes = cols.ext_codes[cols.ev_artifact].astype(np.int32)
        colors = tuple(
            CATEGORICAL_PALETTE[i % len(CATEGORICAL_PALETTE)] for i in range(len(cols.ext_table))
        )
        return codes, ClassTable(tuple(cols.ext_table), colors)
    if mode.kind is ColorKind.AUTHOR:
        counts = np.bincount(cols.ev_author, minlength=len(cols.author_table))
        # legend orders busiest authors first
        class_order = sorted(
            range(len(cols.author_table)), key=lambda i: (-counts[i], cols.author_table[i])
        )
        remap = np.empty(len(cols.author_table), dtype=np.int32)
        for rank, author_idx in enumerate(class_order):
            remap[author_idx] = rank
        codes = remap[cols.ev_author] if n else np.empty(0, dtype=np.int32)
        labels = tuple(cols.author_table[i] for i in class_order)
        colors = tuple(
            CATEGORICAL_PALETTE[i % len(CATEGORICAL_PALETTE)] for i in range(len(labels))
        )
        return codes.astype(np.int32), ClassTable(labels, colors)

    metric = mode.resolve_metric(cols.descriptors)
    if metric not in cols.ev_metrics:
        raise KeyError(f"unknown metric {metric!r}")
    if mode.kind is ColorKind.VARIATION:
        deltas = cols.variation(metric)
        codes = np.full(n, -1, dtype=np.int32)
        valued = ~np.isnan(deltas)
        codes[valued & (deltas < 0)] = 0
        codes[valued & (deltas == 0)] = 1
        codes[valued & (deltas > 0)] = 2
        return codes, ClassTable(
            ("-", "0", "+"),
            (VARIATION_COLORS["-"], VARIATION_COLORS["0"], VARIATION_COLORS["+"]),
        )
    # METRIC: color-stop intervals; value v lands in the first class with
    # v <= threshold, the final class absorbs anything beyond the last stop
    descriptor = next((d for d in cols.descriptors if d.name == metric), None)
    stops = descriptor.default_color_stops if descriptor else ()
    if not stops:
        stops = derive_default_stops(cols.ev_metrics[metric])
    thresholds = np.asarray([t for t, _ in stops])
    values = cols.ev_metrics[metric]
    codes = np.full(n, -1, dtype=np.int32)
    valued = ~np.isnan(values)
    placed = np.searchsorted(thresholds, values[valued], side="left")
    codes[valued] = np.minimum(placed, len(stops) - 1)
    labels = tuple(
        _stop_label(t, stops[i - 1][0] if i else None) for i, (t, _) in enumerate(stops)
    )
    return codes, ClassTable(labels, tuple(c for _, c in stops))


def histogram_from_codes(codes: np.ndarray, table: ClassTable) -> list[tuple[str, int, RGB]]:
    valued = codes[codes >= 0]
    counts = np.bincount(valued, minlength=len(table.labels))
    return [
        (label, int(counts[i]), table.colors[i]) for i, label in enumerate(table.labels)
    ]


def compute_histogram(dataset: Dataset, mode: ColorMode) -> list[tuple[str, int, RGB]]:
    """Events per class for one color mode: the legend of the scatterplot."""
    cols = DatasetColumns.from_dataset(dataset)
    codes, table = classify_events(cols, mode)
    return histogram_from_codes(codes, table)
