import math

import numpy as np
import pytest

from shapelet_ga.baseline import (
    batch_information_gain,
    brute_force_best_shapelet,
    entropy,
    information_gain_split,
    perfectly_separable,
    score_candidates,
    split_errors,
    top_k_independent,
)
from shapelet_ga.data import from_arrays, gen_twoclass_quad
from shapelet_ga.exceptions import InsufficientCandidates


def hand_gain(d, y, threshold):
    def h(labels):
        if not labels:
            return 0.0
        out = 0.0
        for c in set(labels):
            p = labels.count(c) / len(labels)
            out -= p * math.log2(p)
        return out
    left = [lab for v, lab in zip(d, y) if v < threshold]
    right = [lab for v, lab in zip(d, y) if v >= threshold]
    return h(list(y)) - (len(left) * h(left) + len(right) * h(right)) / len(y)


def test_entropy():
    assert entropy([0, 1]) == 1.0
    assert entropy([0, 0, 0]) == 0.0
    assert entropy([0, 1, 2, 3]) == 2.0


def test_gain_matches_hand_enumeration(rng):
    for _ in range(100):
        n = int(rng.integers(2, 10))
        d = rng.integers(0, 5, n).astype(float)
        y = rng.integers(0, 3, n)
        if len(set(d)) == 1:
            continue
        values = sorted(set(d))
        gains = [hand_gain(d, y, (a + b) / 2) for a, b in zip(values, values[1:])]
        threshold, gain = information_gain_split(d, y)
        assert gain == pytest.approx(max(gains), abs=1e-12)
        assert threshold in [(a + b) / 2 for a, b in zip(values, values[1:])]


def test_gain_hand_example():
    threshold, gain = information_gain_split([0.1, 0.2, 0.9, 1.0], [0, 0, 1, 1])
    assert (threshold, gain) == (pytest.approx(0.55), 1.0)
    assert split_errors([0.1, 0.2, 0.9, 1.0], [0, 0, 1, 1], 0.55) == 0
    assert information_gain_split([1.0, 1.0, 1.0], [0, 1, 0])[1] == 0.0


def test_batch_matches_scalar(rng):
    for trial in range(100):
        n = int(rng.integers(2, 12))
        D = rng.integers(0, 4, size=(n, 6)).astype(float) if trial % 2 else rng.random((n, 6))
        y = rng.integers(0, 3, n)
        thresholds, gains = batch_information_gain(D, y)
        for j in range(6):
            t, g = information_gain_split(D[:, j], y)
            assert thresholds[j] == t and gains[j] == pytest.approx(g, abs=1e-12)


def test_candidate_enumeration_order():
    d = from_arrays([np.arange(6.0), np.arange(6.0)[::-1]], [0, 1])
    scores = score_candidates(d, lengths=[4, 5])
    keys = [(c.length, c.series_index, c.start) for c in scores]
    assert keys == sorted(keys)
    assert len(scores) == 2 * 3 + 2 * 2


def test_quad_brute_force_fails():
    quad = gen_twoclass_quad()
    best = brute_force_best_shapelet(quad)
    from shapelet_ga.distance import distance_matrix
    d = distance_matrix([best.shapelet], quad.series)[:, 0]
    assert split_errors(d, quad.labels, best.threshold) >= 1
    assert not perfectly_separable(d, quad.labels)


def test_top_k(motif_data):
    top = top_k_independent(motif_data, 3, lengths=[6])
    assert len(top) == 3 and all(len(s) == 6 for s in top)
    with pytest.raises(InsufficientCandidates):
        top_k_independent(from_arrays([np.zeros(4), np.ones(4)], [0, 1]), 3)
