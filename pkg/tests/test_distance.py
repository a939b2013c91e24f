import math

import numpy as np
import pytest

from shapelet_ga.distance import distance_matrix, dtw_distance, pad_series, pairwise_dtw, subsequence_distance
from shapelet_ga.exceptions import ShapeletTooLong


def naive_distance(s, t):
    best = math.inf
    for start in range(len(t) - len(s) + 1):
        acc = 0.0
        for k in range(len(s)):
            diff = t[start + k] - s[k]
            acc += diff * diff
        best = min(best, acc)
    return math.sqrt(best / len(s))


def test_exact_match_is_zero():
    assert subsequence_distance([1, 2, 3, 4], [0, 1, 2, 3, 4, 5]) == 0.0


def test_hand_value():
    # windows of [0,0,0,3,0] vs [1,1,1,1]: best is the first, squared sum 4
    assert subsequence_distance([1, 1, 1, 1], [0, 0, 0, 0, 3]) == pytest.approx(1.0)
    assert subsequence_distance([0, 0, 0, 0], [2, 2, 2, 2]) == pytest.approx(2.0)


def test_matches_naive_loop_bitwise(rng):
    for _ in range(50):
        series = [rng.normal(size=rng.integers(8, 40)) for _ in range(rng.integers(1, 8))]
        shortest = min(len(t) for t in series)
        shapelets = [rng.normal(size=rng.integers(4, shortest + 1)) for _ in range(rng.integers(1, 6))]
        D = distance_matrix(shapelets, series)
        expected = np.array([[naive_distance(s, t) for s in shapelets] for t in series])
        assert np.array_equal(D, expected)


def test_threads_do_not_change_values(rng):
    series = [rng.normal(size=50) for _ in range(40)]
    shapelets = [rng.normal(size=n) for n in (4, 9, 9, 20)]
    assert np.array_equal(distance_matrix(shapelets, series, n_jobs=1),
                          distance_matrix(shapelets, series, n_jobs=4))


def test_variable_length_padding():
    series = [np.arange(6.0), np.arange(10.0)]
    padded = pad_series(series)
    assert padded.shape == (2, 10) and np.isinf(padded[0, 6:]).all()
    D = distance_matrix([np.array([6.0, 7.0, 8.0, 9.0])], series)
    assert D[1, 0] == 0.0
    assert D[0, 0] == pytest.approx(naive_distance([6, 7, 8, 9], np.arange(6.0)))


def test_too_long():
    with pytest.raises(ShapeletTooLong):
        subsequence_distance(np.zeros(6), np.zeros(5))
    with pytest.raises(ShapeletTooLong):
        distance_matrix([np.zeros(6)], [np.zeros(10), np.zeros(5)])


def dtw_oracle(a, b):
    """Memoised recursion, independent of the table fill order."""
    from functools import lru_cache

    @lru_cache(maxsize=None)
    def cost(i, j):
        here = (a[i] - b[j]) ** 2
        if i == 0 and j == 0:
            return here
        options = []
        if i > 0:
            options.append(cost(i - 1, j))
        if j > 0:
            options.append(cost(i, j - 1))
        if i > 0 and j > 0:
            options.append(cost(i - 1, j - 1))
        return here + min(options)

    return math.sqrt(cost(len(a) - 1, len(b) - 1))


def test_dtw_against_recursion(rng):
    for _ in range(30):
        a = rng.normal(size=rng.integers(1, 12))
        b = rng.normal(size=rng.integers(1, 12))
        assert dtw_distance(a, b) == pytest.approx(dtw_oracle(tuple(a), tuple(b)), abs=1e-12)


def test_dtw_properties(rng):
    a = rng.normal(size=8)
    assert dtw_distance(a, a) == 0.0
    assert dtw_distance([0, 1, 2], [0, 1, 1, 2]) == 0.0
    b = rng.normal(size=5)
    assert dtw_distance(a, b) == pytest.approx(dtw_distance(b, a))
    M = pairwise_dtw([a, b], [b])
    assert M.shape == (2, 1) and M[1, 0] == 0.0
