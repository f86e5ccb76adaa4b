"""Timestamp-similarity ordering: place artifacts with similar event-time
distributions next to each other so clone groups show up as repeated columns.

Each artifact gets a B-bin histogram of its normalized timeline (mass 1);
ordering is a greedy nearest-neighbor chain under L1 distance, seeded at the
artifact with the earliest first event. O(n^2 * B) time, O(n * B) memory.
Above N_MAX artifacts this falls back to the median-timestamp ordering.
"""

from __future__ import annotations

import logging

import numpy as np

from .model import Dataset
from .sorting import parse_criterion, sort_artifacts

logger = logging.getLogger(__name__)

DEFAULT_BINS = 64
N_MAX = 20_000


def histogram_signatures(dataset: Dataset, bins: int = DEFAULT_BINS) -> np.ndarray:
    """(n_artifacts, bins) matrix of per-artifact normalized-time histograms."""
    sigs = np.zeros((len(dataset.artifacts), bins), dtype=np.float64)
    for i, (art, st) in enumerate(zip(dataset.artifacts, dataset.stats)):
        for ev in art.events:
            t = (ev.timestamp - st.first_ts) / st.age_s if st.age_s else 0.5
            sigs[i, min(int(t * bins), bins - 1)] += 1.0
        sigs[i] /= st.n_events
    return sigs


def similarity_fallback(n_artifacts: int, n_max: int = N_MAX) -> bool:
    return n_artifacts > n_max


def similarity_order(
    dataset: Dataset, bins: int = DEFAULT_BINS, n_max: int = N_MAX
) -> np.ndarray:
    """Deterministic ordering with small pairwise distances adjacent."""
    n = len(dataset.artifacts)
    if n == 0:
        return np.empty(0, dtype=np.int32)
    if similarity_fallback(n, n_max):
        logger.warning(
            "similarity ordering skipped for %d artifacts (> %d); using median order", n, n_max
        )
        return sort_artifacts(dataset, parse_criterion("mid"))

    sigs = histogram_signatures(dataset, bins)
    # seed: earliest first event; artifact ordinals are path-ascending, so the
    # argmin ordinal is also the path tie-break
    first_ts = np.asarray([s.first_ts for s in dataset.stats])
    current = int(np.argmin(first_ts))

    order = np.empty(n, dtype=np.int32)
    remaining = np.ones(n, dtype=bool)
    order[0] = current
    remaining[current] = False
    for pos in range(1, n):
        dists = np.abs(sigs[remaining] - sigs[current]).sum(axis=1)
        candidates = np.flatnonzero(remaining)
        current = int(candidates[np.argmin(dists)])  # argmin keeps lowest ordinal on ties
        order[pos] = current
        remaining[current] = False
    return order


def chain_cost(signatures: np.ndarray, order: np.ndarray) -> float:
    """Total adjacent L1 distance of an ordering; the quantity greedy minimizes."""
    return float(np.abs(signatures[order[1:]] - signatures[order[:-1]]).sum())
