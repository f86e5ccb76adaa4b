"""Uniform grid over unit layout space for nearest-dot lookups.

The grid resolution is picked so mean cell occupancy stays at or below
MEAN_OCCUPANCY; queries expand cell rings outward and therefore agree exactly
with a linear scan (nearest by Euclidean distance, ties to the lower ordinal).
"""

from __future__ import annotations

import math

import numpy as np

MEAN_OCCUPANCY = 8


class GridIndex:
    def __init__(self, xs: np.ndarray, ys: np.ndarray):
        self.xs = np.asarray(xs, dtype=np.float64)
        self.ys = np.asarray(ys, dtype=np.float64)
        n = len(self.xs)
        min_cells = max(1, (n + MEAN_OCCUPANCY - 1) // MEAN_OCCUPANCY)
        self.dim = math.isqrt(min_cells - 1) + 1  # ceil(sqrt(min_cells))
        self.cell = 1.0 / self.dim
        cx = np.clip((self.xs * self.dim).astype(np.int64), 0, self.dim - 1)
        cy = np.clip((self.ys * self.dim).astype(np.int64), 0, self.dim - 1)
        flat = cx * self.dim + cy
        order = np.argsort(flat, kind="stable")  # stable keeps ordinal order per cell
        self._sorted = order.astype(np.int64)
        self._flat_sorted = flat[order]
        self._starts = np.searchsorted(self._flat_sorted, np.arange(self.dim * self.dim + 1))

    def __len__(self) -> int:
        return len(self.xs)

    def _cell_points(self, cx: int, cy: int) -> np.ndarray:
        flat = cx * self.dim + cy
        return self._sorted[self._starts[flat] : self._starts[flat + 1]]

    def nearest(self, x: float, y: float, radius: float) -> int | None:
        """Ordinal of the point minimizing Euclidean distance within radius."""
        if len(self.xs) == 0 or radius <= 0:
            return None
        cx = min(max(int(x * self.dim), 0), self.dim - 1)
        cy = min(max(int(y * self.dim), 0), self.dim - 1)
        best_d2 = radius * radius
        best: int | None = None
        max_ring = self.dim  # probe may lie outside the unit square
        for ring in range(max_ring + 1):
            # any point in a ring-k cell is at least (k-1) cells away
            lower = (ring - 1) * self.cell
            if ring > 1 and lower * lower > best_d2:
                break
            for gx in range(cx - ring, cx + ring + 1):
                if not 0 <= gx < self.dim:
                    continue
                for gy in range(cy - ring, cy + ring + 1):
                    if not 0 <= gy < self.dim:
                        continue
                    if max(abs(gx - cx), abs(gy - cy)) != ring:
                        continue
                    idx = self._cell_points(gx, gy)
                    if idx.size == 0:
                        continue
                    dx = self.xs[idx] - x
                    dy = self.ys[idx] - y
                    d2 = dx * dx + dy * dy
                    pos = int(np.argmin(d2))  # first minimum = lowest ordinal
                    if d2[pos] < best_d2 or (d2[pos] == best_d2 and (best is None or idx[pos] < best)):
                        best_d2 = float(d2[pos])
                        best = int(idx[pos])
        return best


def build_spatial_index(xs: np.ndarray, ys: np.ndarray) -> GridIndex:
    return GridIndex(xs, ys)


def nearest_event(index: GridIndex, x: float, y: float, radius: float) -> int | None:
    return index.nearest(x, y, radius)
