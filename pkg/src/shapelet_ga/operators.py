"""Initialisation, crossover, mutation and selection operators.

Operators never modify their inputs. When an operator decides to leave a
set untouched it returns the very same object, so a cached fitness survives;
any structural change yields a fresh ``ShapeletSet`` with no fitness.
"""
from __future__ import annotations

from typing import Sequence

import numpy as np

from .data import MIN_LENGTH
from .exceptions import InsufficientData
from .fitness import Fitness


class ShapeletSet:
    """An ordered list of shapelets plus its cached fitness."""

    __slots__ = ("shapelets", "fitness")

    def __init__(self, shapelets: Sequence, fitness: Fitness | None = None):
        self.shapelets = [np.asarray(s, dtype=float) for s in shapelets]
        self.fitness = fitness

    def __len__(self):
        return len(self.shapelets)

    def __iter__(self):
        return iter(self.shapelets)

    def __getitem__(self, i):
        return self.shapelets[i]

    @property
    def complexity(self) -> int:
        return sum(len(s) for s in self.shapelets)

    def copy(self) -> "ShapeletSet":
        return ShapeletSet(list(self.shapelets), self.fitness)

    def __repr__(self):
        lengths = [len(s) for s in self.shapelets]
        return f"ShapeletSet(lengths={lengths}, fitness={self.fitness})"


# --------------------------------------------------------------------------
# initialisation

def init_random(series: Sequence[np.ndarray], k: int, max_len: int, rng) -> ShapeletSet:
    """``k`` verbatim windows of random series, offsets and lengths."""
    out = []
    for _ in range(k):
        t = series[rng.integers(len(series))]
        length = int(rng.integers(MIN_LENGTH, min(max_len, len(t)) + 1))
        start = int(rng.integers(0, len(t) - length + 1))
        out.append(t[start:start + length].copy())
    return ShapeletSet(out)


def lloyd_kmeans(points: np.ndarray, centroids: np.ndarray, n_iter: int = 10) -> np.ndarray:
    centroids = centroids.copy()
    assign = None
    for _ in range(n_iter):
        d2 = ((points[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
        new_assign = d2.argmin(axis=1)
        if assign is not None and np.array_equal(new_assign, assign):
            break
        assign = new_assign
        for c in range(len(centroids)):
            members = points[assign == c]
            if len(members):
                centroids[c] = members.mean(axis=0)
    return centroids


def init_kmeans(series: Sequence[np.ndarray], k: int, max_len: int, rng,
                n_sub: int | None = None, n_iter: int = 10) -> ShapeletSet:
    """Centroids of ``k``-means over random windows of one shared random length."""
    shortest = min(len(t) for t in series)
    length = int(rng.integers(MIN_LENGTH, min(max_len, shortest) + 1))
    n_sub = n_sub or max(10 * k, 50)
    windows = np.empty((n_sub, length))
    for i in range(n_sub):
        t = series[rng.integers(len(series))]
        start = rng.integers(0, len(t) - length + 1)
        windows[i] = t[start:start + length]
    distinct = np.unique(windows, axis=0)
    if len(distinct) < k:
        raise InsufficientData(f"only {len(distinct)} distinct windows for {k} clusters")
    start_rows = distinct[np.sort(rng.choice(len(distinct), size=k, replace=False))]
    return ShapeletSet(list(lloyd_kmeans(windows, start_rows, n_iter)))


# --------------------------------------------------------------------------
# crossover

def one_point_sets(a: Sequence, b: Sequence, i: int):
    """Swap the tails after position ``i``."""
    return list(a[:i]) + list(b[i:]), list(b[:i]) + list(a[i:])


def two_point_sets(a: Sequence, b: Sequence, lo: int, hi: int):
    """Swap the segments ``lo:hi``."""
    return (list(a[:lo]) + list(b[lo:hi]) + list(a[hi:]),
            list(b[:lo]) + list(a[lo:hi]) + list(b[hi:]))


def crossover_set_point(a: ShapeletSet, b: ShapeletSet, rng):
    """One- or two-point crossover on the shapelet lists themselves.

    Cut points are shared by both parents and lie in ``0..min(|a|, |b|)``,
    so the children have the sizes of the parents and are never empty.
    """
    limit = min(len(a), len(b))
    if rng.random() < 0.5:
        c1, c2 = one_point_sets(a.shapelets, b.shapelets, int(rng.integers(0, limit + 1)))
    else:
        lo, hi = sorted(int(c) for c in rng.integers(0, limit + 1, size=2))
        c1, c2 = two_point_sets(a.shapelets, b.shapelets, lo, hi)
    return ShapeletSet(c1), ShapeletSet(c2)


def splice_one_point(s: np.ndarray, u: np.ndarray, cut: int) -> np.ndarray:
    """Head of ``s`` up to ``cut`` followed by the rest of ``u``; length ``len(u)``."""
    return np.concatenate([s[:cut], u[cut:]])


def splice_two_point(s: np.ndarray, u: np.ndarray, lo: int, hi: int) -> np.ndarray:
    """``s`` with positions ``lo:hi`` taken from ``u``; length ``len(s)``."""
    return np.concatenate([s[:lo], u[lo:hi], s[hi:]])


def _splice_pass(first: ShapeletSet, second: ShapeletSet, rng) -> ShapeletSet:
    out = []
    for s in first:
        u = second[rng.integers(len(second))]
        limit = min(len(s), len(u))
        if rng.random() < 0.5:
            out.append(splice_one_point(s, u, int(rng.integers(0, limit + 1))))
        else:
            lo, hi = sorted(int(c) for c in rng.integers(0, limit + 1, size=2))
            out.append(splice_two_point(s, u, lo, hi))
    return ShapeletSet(out)


def crossover_shapelet_point(a: ShapeletSet, b: ShapeletSet, rng):
    """Point crossover between each shapelet and a random partner from the other set.

    Cuts are shared by both shapelets and lie within the shorter one, so a
    child always has the length of one of its parents.
    """
    return _splice_pass(a, b, rng), _splice_pass(b, a, rng)


def merge_shapelets(s: np.ndarray, u: np.ndarray, offset: int = 0) -> np.ndarray:
    """Mean of the shorter shapelet and the window of the longer one at ``offset``."""
    short, long_ = (s, u) if len(s) <= len(u) else (u, s)
    return (short + long_[offset:offset + len(short)]) / 2.0


def _merge_pass(first: ShapeletSet, second: ShapeletSet, rng) -> ShapeletSet:
    out = []
    for s in first:
        u = second[rng.integers(len(second))]
        slack = abs(len(s) - len(u))
        offset = int(rng.integers(0, slack + 1)) if slack else 0
        out.append(merge_shapelets(s, u, offset))
    return ShapeletSet(out)


def crossover_merge(a: ShapeletSet, b: ShapeletSet, rng):
    return _merge_pass(a, b, rng), _merge_pass(b, a, rng)


# --------------------------------------------------------------------------
# mutation

def mutate_mask(s: ShapeletSet, rng) -> ShapeletSet:
    """Trim a random number of points from the head or tail of one shapelet."""
    idx = int(rng.integers(len(s)))
    target = s[idx]
    if len(target) <= MIN_LENGTH:
        return s
    n_drop = int(rng.integers(1, len(target) - MIN_LENGTH + 1))
    trimmed = target[n_drop:] if rng.random() < 0.5 else target[:-n_drop]
    shapelets = list(s.shapelets)
    shapelets[idx] = trimmed
    return ShapeletSet(shapelets)


def mutate_remove(s: ShapeletSet, rng) -> ShapeletSet:
    if len(s) < 2:
        return s
    idx = int(rng.integers(len(s)))
    return ShapeletSet(s.shapelets[:idx] + s.shapelets[idx + 1:])


def mutate_add(s: ShapeletSet, series, max_len: int, rng, max_total: int | None = None) -> ShapeletSet:
    if max_total is not None and len(s) >= max_total:
        return s
    return ShapeletSet(s.shapelets + init_random(series, 1, max_len, rng).shapelets)


# --------------------------------------------------------------------------
# selection

def tournament_select(population: Sequence[ShapeletSet], size: int, rng) -> ShapeletSet:
    """Sample a tournament, then pick a member with probability proportional to ``size - rank``.

    The sampled order is random, and the sort is stable, so tied members get
    their ranks in random order.
    """
    members = rng.choice(len(population), size=size, replace=size > len(population))
    ranked = sorted(members, key=lambda i: population[i].fitness.key)
    weights = np.arange(size, 0, -1, dtype=float)
    pick = rng.choice(size, p=weights / weights.sum())
    return population[ranked[pick]]
