"""Exhaustive shapelet search scored one candidate at a time.

Used as a correctness oracle for the genetic search and as the naive
"rank candidates independently, keep the top k" baseline.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .data import MIN_LENGTH, Dataset
from .distance import _min_dist_same_length, pad_series
from .exceptions import InsufficientCandidates, DataError

GAIN_DECIMALS = 12


def entropy(labels, n_classes: int | None = None) -> float:
    """Shannon entropy in bits."""
    counts = np.bincount(np.asarray(labels, dtype=int), minlength=n_classes or 0)
    p = counts[counts > 0] / counts.sum()
    return float(-(p * np.log2(p)).sum())


def information_gain_split(distances, y) -> tuple[float, float]:
    """Best threshold on ``distances`` by information gain.

    Candidate thresholds are midpoints between consecutive distinct sorted
    values; series with a distance below the threshold go left. Ties go to
    the split with the most even sizes, then to the smaller threshold.
    Returns ``(threshold, gain)``; with a single distinct value the gain is 0.
    """
    d = np.asarray(distances, dtype=float)
    y = np.asarray(y, dtype=int)
    if len(d) < 2:
        raise DataError("need at least two distances to split")
    n_classes = int(y.max()) + 1
    parent = entropy(y, n_classes)
    values = np.unique(d)
    if len(values) == 1:
        return float(values[0]), 0.0
    best = None
    for lo, hi in zip(values[:-1], values[1:]):
        threshold = (lo + hi) / 2.0
        left = d < threshold
        n_left = int(left.sum())
        n_right = len(d) - n_left
        child = (n_left * entropy(y[left], n_classes) + n_right * entropy(y[~left], n_classes)) / len(d)
        gain = round(parent - child, GAIN_DECIMALS)
        key = (-gain, abs(n_left - n_right), threshold)
        if best is None or key < best[0]:
            best = (key, threshold, gain)
    return float(best[1]), max(0.0, float(best[2]))


def split_errors(distances, y, threshold: float) -> int:
    """Misclassifications when each side of the threshold predicts its majority class."""
    d = np.asarray(distances, dtype=float)
    y = np.asarray(y, dtype=int)
    errors = 0
    for side in (d < threshold, d >= threshold):
        if side.any():
            errors += int(side.sum() - np.bincount(y[side]).max())
    return errors


def perfectly_separable(distances, y) -> bool:
    """True when some threshold puts each of two classes entirely on its own side."""
    d = np.asarray(distances, dtype=float)
    y = np.asarray(y, dtype=int)
    a, b = d[y == 0], d[y == 1]
    return bool(a.max() < b.min() or b.max() < a.min())


def batch_information_gain(D, y) -> tuple[np.ndarray, np.ndarray]:
    """Column-wise :func:`information_gain_split` for an ``(N, K)`` distance matrix."""
    D = np.asarray(D, dtype=float)
    y = np.asarray(y, dtype=int)
    n, k = D.shape
    n_classes = int(y.max()) + 1
    parent = entropy(y, n_classes)
    order = np.argsort(D, axis=0, kind="stable")
    ds = np.take_along_axis(D, order, axis=0)
    onehot = np.eye(n_classes)[y[order]]                    # (N, K, C)
    left = np.cumsum(onehot, axis=0)[:-1]                   # split after row p
    right = onehot.sum(axis=0)[None] - left
    n_left = np.arange(1, n)[:, None]
    n_right = n - n_left

    def weighted_entropy(counts, size):
        p = counts / size[..., None]
        with np.errstate(divide="ignore", invalid="ignore"):
            terms = np.where(p > 0, p * np.log2(p), 0.0)
        return -terms.sum(axis=2) * size

    child = (weighted_entropy(left, n_left) + weighted_entropy(right, n_right)) / n
    gain = np.round(parent - child, GAIN_DECIMALS)
    thresholds = (ds[:-1] + ds[1:]) / 2.0
    valid = ds[:-1] < ds[1:]
    gain = np.where(valid, gain, -np.inf)
    best = valid & (gain == gain.max(axis=0))
    imbalance = np.where(best, np.abs(n_left - n_right), np.iinfo(np.int64).max)
    best &= imbalance == imbalance.min(axis=0)
    pick = np.where(best, thresholds, np.inf).argmin(axis=0)
    cols = np.arange(k)
    out_thr = thresholds[pick, cols] if n > 1 else np.zeros(k)
    out_gain = np.maximum(gain[pick, cols], 0.0)
    constant = ~valid.any(axis=0)
    out_thr = np.where(constant, ds[0], out_thr)
    out_gain = np.where(constant, 0.0, out_gain)
    return out_thr, out_gain


@dataclass
class CandidateScore:
    shapelet: np.ndarray
    gain: float
    threshold: float
    series_index: int
    start: int

    @property
    def length(self) -> int:
        return len(self.shapelet)


def _resolve_lengths(dataset: Dataset, lengths: Iterable[int] | None) -> list[int]:
    if lengths is None:
        return list(range(MIN_LENGTH, dataset.min_length + 1))
    lengths = sorted(set(int(x) for x in lengths))
    if not lengths or lengths[0] < MIN_LENGTH or lengths[-1] > dataset.min_length:
        raise DataError(f"lengths must lie in [{MIN_LENGTH}, {dataset.min_length}]")
    return lengths


def score_candidates(dataset: Dataset, lengths: Iterable[int] | None = None) -> list[CandidateScore]:
    """Score every window of every series at every requested length, in enumeration order.

    Enumeration runs over lengths (ascending), then series, then start offset.
    """
    padded = pad_series(dataset.series)
    scores = []
    for length in _resolve_lengths(dataset, lengths):
        origins = [(i, start) for i, t in enumerate(dataset.series)
                   for start in range(len(t) - length + 1)]
        windows = np.stack([dataset.series[i][start:start + length] for i, start in origins])
        thresholds, gains = batch_information_gain(_min_dist_same_length(windows, padded),
                                                   dataset.labels)
        for col, (i, start) in enumerate(origins):
            scores.append(CandidateScore(windows[col], float(gains[col]), float(thresholds[col]),
                                         i, start))
    return scores


def _ranked(scores: list[CandidateScore]) -> list[CandidateScore]:
    # sorted() is stable, so enumeration order breaks the remaining ties
    return sorted(scores, key=lambda c: (-c.gain, c.length))


def brute_force_best_shapelet(dataset: Dataset, lengths: Iterable[int] | None = None) -> CandidateScore:
    return _ranked(score_candidates(dataset, lengths))[0]


def top_k_independent(dataset: Dataset, k: int, lengths: Iterable[int] | None = None) -> list[np.ndarray]:
    """The ``k`` best candidates by individual gain, with no diversity constraint."""
    if k < 1:
        raise ValueError("k must be >= 1")
    ranked = _ranked(score_candidates(dataset, lengths))
    if len(ranked) < k:
        raise InsufficientCandidates(f"only {len(ranked)} candidates for k={k}")
    return [c.shapelet for c in ranked[:k]]
