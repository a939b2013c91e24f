import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from shapelet_ga.data import (
    Dataset,
    align_labels,
    concatenate,
    from_arrays,
    gen_imbalanced_threeclass,
    gen_twoclass_noisy,
    gen_twoclass_quad,
    load_delimited,
    save_delimited,
    stratified_resplit,
)
from shapelet_ga.exceptions import DataError, EmptyFile, IncompatibleDatasets, ParseError


def test_load_label_first(tmp_path):
    p = tmp_path / "a.txt"
    p.write_text("2,1,2,3,4\n1,0.5,0.5,0.5,0.5,0.5\n")
    d = load_delimited(p)
    assert d.classes == (1, 2)
    assert d.labels.tolist() == [1, 0]
    assert len(d.series[0]) == 4 and len(d.series[1]) == 5


def test_load_label_last_whitespace(tmp_path):
    p = tmp_path / "a.txt"
    p.write_text("1 2 3 4  a\n\n5 6 7 8 b\n")
    d = load_delimited(p, delimiter=None, label_position="last")
    assert d.classes == ("a", "b")
    np.testing.assert_array_equal(d.series[1], [5, 6, 7, 8])


def test_load_errors(tmp_path):
    p = tmp_path / "a.txt"
    p.write_text("")
    with pytest.raises(EmptyFile):
        load_delimited(p)
    p.write_text("1,2,x,4,5\n")
    with pytest.raises(ParseError):
        load_delimited(p)
    p.write_text("1,2,3\n")
    with pytest.raises(ParseError):
        load_delimited(p)
    p.write_text("1,2,3,nan,5\n")
    with pytest.raises(ParseError):
        load_delimited(p)


def test_save_load_round_trip(tmp_path, rng):
    d = from_arrays([rng.normal(size=n) for n in (6, 9, 7)], ["x", "y", "x"])
    save_delimited(d, tmp_path / "d.txt")
    back = load_delimited(tmp_path / "d.txt")
    assert back.fingerprint() == d.fingerprint()
    assert back.classes == d.classes


def test_dataset_validation():
    with pytest.raises(DataError):
        Dataset((np.zeros(3), np.zeros(5)), np.array([0, 1]), 2)
    with pytest.raises(DataError):
        Dataset((np.zeros(5),), np.array([0]), 1)
    with pytest.raises(DataError):
        Dataset((np.zeros(5), np.array([0, 1, np.inf, 2, 3])), np.array([0, 1]), 2)


def test_align_labels():
    train = from_arrays([np.zeros(5)] * 3, ["a", "b", "c"])
    test = from_arrays([np.ones(5)] * 2, ["c", "a"])
    aligned = align_labels(test, train)
    assert aligned.labels.tolist() == [2, 0] and aligned.n_classes == 3
    with pytest.raises(IncompatibleDatasets):
        align_labels(from_arrays([np.ones(5)] * 2, ["a", "z"]), train)


def test_concatenate_rejects_other_classes():
    a = from_arrays([np.zeros(5)] * 2, [0, 1])
    b = from_arrays([np.zeros(5)] * 2, [0, 2])
    with pytest.raises(IncompatibleDatasets):
        concatenate(a, b)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(0, 2), min_size=6, max_size=30), st.integers(0, 10**6))
def test_resplit_preserves_multiset_and_counts(labels, seed):
    labels = labels + [0, 1, 2]
    series = [np.full(5, float(i)) for i in range(len(labels))]
    pooled = from_arrays(series, labels)
    cut = len(labels) // 2
    train, test = pooled.subset(range(cut)), pooled.subset(range(cut, len(labels)))
    new_train, new_test = stratified_resplit(train, test, seed)
    before = sorted((s[0], y) for d in (train, test) for s, y in zip(d.series, d.labels))
    after = sorted((s[0], y) for d in (new_train, new_test) for s, y in zip(d.series, d.labels))
    assert before == after
    np.testing.assert_array_equal(new_train.class_counts, train.class_counts)
    assert len(new_test) == len(test)


def test_threeclass_generator():
    train, test = gen_imbalanced_threeclass(np.random.default_rng(0))
    for d in (train, test):
        assert len(d) == 35
        assert d.class_counts.tolist() == [25, 5, 5]
        assert {len(s) for s in d.series} == {60}
    again, _ = gen_imbalanced_threeclass(np.random.default_rng(0))
    assert again.fingerprint() == train.fingerprint()


def test_quad_generator():
    d = gen_twoclass_quad()
    assert len(d) == 4 and d.labels.tolist() == [0, 0, 1, 1]
    peaks = [s.max() for s in d.series]
    assert np.argsort(peaks).tolist() == [2, 0, 1, 3]


def test_noisy_generator_shape():
    train, test = gen_twoclass_noisy(np.random.default_rng(0))
    assert (len(train), len(test)) == (27, 953)
    assert {len(s) for s in train.series} == {65}
    assert set(train.labels) == {0, 1}
