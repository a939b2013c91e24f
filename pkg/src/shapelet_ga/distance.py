"""Sliding-window shapelet distances and DTW.

The distance of a shapelet ``s`` to a series ``t`` is the minimum, over all
``len(t) - len(s) + 1`` windows, of the length-normalised Euclidean distance
``sqrt(sum((s - w)**2) / len(s))``. Squared differences are accumulated
left to right along the shapelet so results are bitwise reproducible against
a scalar loop.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Sequence

import numpy as np

from .exceptions import ShapeletTooLong


def pad_series(series: Sequence[np.ndarray]) -> np.ndarray:
    """Stack series into an ``(N, max_len)`` array padded with ``+inf``.

    A window that touches padding has infinite distance, so it never wins
    the minimum.
    """
    width = max(len(s) for s in series)
    out = np.full((len(series), width), np.inf)
    for i, s in enumerate(series):
        out[i, : len(s)] = s
    return out


def _min_dist_same_length(shapelets: np.ndarray, padded: np.ndarray) -> np.ndarray:
    """(N, K) distances for K shapelets that all share one length."""
    n_shp, length = shapelets.shape
    n_windows = padded.shape[1] - length + 1
    acc = np.zeros((padded.shape[0], n_shp, n_windows))
    for k in range(length):
        diff = padded[:, None, k:k + n_windows] - shapelets[None, :, k, None]
        acc += diff * diff
    with np.errstate(invalid="ignore"):
        best = acc.min(axis=2)
    return np.sqrt(best / length)


def subsequence_distance(shapelet, series) -> float:
    s = np.asarray(shapelet, dtype=float)
    t = np.asarray(series, dtype=float)
    if len(s) > len(t):
        raise ShapeletTooLong(f"shapelet of length {len(s)} exceeds series of length {len(t)}")
    return float(_min_dist_same_length(s[None, :], t[None, :])[0, 0])


def _check_lengths(shapelets, shortest):
    for j, s in enumerate(shapelets):
        if len(s) > shortest:
            raise ShapeletTooLong(
                f"shapelet {j} has length {len(s)} but the shortest series has {shortest}")


def distance_matrix(shapelets: Sequence, series: Sequence, n_jobs: int = 1,
                    padded: np.ndarray | None = None) -> np.ndarray:
    """Distance of every series (rows) to every shapelet (columns).

    ``padded`` may be passed to reuse a ``pad_series`` result across calls.
    Rows are split across ``n_jobs`` threads; the split does not change any
    value.
    """
    shapelets = [np.asarray(s, dtype=float) for s in shapelets]
    if padded is None:
        _check_lengths(shapelets, min(len(t) for t in series))
        padded = pad_series(series)
    else:
        _check_lengths(shapelets, int(np.isfinite(padded).sum(axis=1).min()))
    out = np.empty((padded.shape[0], len(shapelets)))
    groups: dict[int, list[int]] = {}
    for j, s in enumerate(shapelets):
        groups.setdefault(len(s), []).append(j)

    def fill(rows):
        block = padded[rows]
        for length, cols in groups.items():
            out[rows[:, None], np.array(cols)[None, :]] = _min_dist_same_length(
                np.stack([shapelets[j] for j in cols]), block)

    if n_jobs <= 1 or padded.shape[0] < 2 * n_jobs:
        fill(np.arange(padded.shape[0]))
    else:
        chunks = np.array_split(np.arange(padded.shape[0]), n_jobs)
        with ThreadPoolExecutor(n_jobs) as pool:
            list(pool.map(fill, chunks))
    return out


def dtw_distance(a, b) -> float:
    """Unconstrained DTW with squared pointwise cost; returns the root of the total cost."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    cost = (a[:, None] - b[None, :]) ** 2
    acc = np.full((len(a) + 1, len(b) + 1), np.inf)
    acc[0, 0] = 0.0
    for i in range(1, len(a) + 1):
        for j in range(1, len(b) + 1):
            acc[i, j] = cost[i - 1, j - 1] + min(acc[i - 1, j - 1], acc[i - 1, j], acc[i, j - 1])
    return float(np.sqrt(acc[-1, -1]))


def pairwise_dtw(first: Sequence, second: Sequence) -> np.ndarray:
    return np.array([[dtw_distance(a, b) for b in second] for a in first]).reshape(len(first), len(second))
