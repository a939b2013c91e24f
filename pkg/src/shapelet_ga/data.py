"""Labeled time-series collections: loading, saving, resplitting and synthetic data.

Series may have different lengths; each one is kept as its own 1-D float
array. Labels are always contiguous integers ``0..C-1``; the raw labels read
from disk are kept in ``Dataset.classes`` so files can be written back.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .exceptions import EmptyFile, IncompatibleDatasets, ParseError, DataError

MIN_LENGTH = 4


def as_generator(rng) -> np.random.Generator:
    """Accept a seed, ``None`` or an existing generator."""
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


@dataclass(frozen=True)
class Dataset:
    series: tuple[np.ndarray, ...]
    labels: np.ndarray
    n_classes: int
    classes: tuple = field(default=())

    def __post_init__(self):
        series = tuple(np.asarray(s, dtype=float) for s in self.series)
        labels = np.asarray(self.labels, dtype=int)
        object.__setattr__(self, "series", series)
        object.__setattr__(self, "labels", labels)
        if not self.classes:
            object.__setattr__(self, "classes", tuple(range(self.n_classes)))
        if len(series) != len(labels):
            raise DataError(f"{len(series)} series but {len(labels)} labels")
        if len(series) < 2:
            raise DataError("a dataset needs at least two series")
        for i, s in enumerate(series):
            if s.ndim != 1 or len(s) < MIN_LENGTH:
                raise DataError(f"series {i} must be 1-D with at least {MIN_LENGTH} points")
            if not np.all(np.isfinite(s)):
                raise DataError(f"series {i} contains NaN or Inf")
        if labels.min() < 0 or labels.max() >= self.n_classes:
            raise DataError("labels must lie in 0..n_classes-1")

    def __len__(self):
        return len(self.series)

    @property
    def min_length(self) -> int:
        """The usable series length M: the shortest series in the collection."""
        return min(len(s) for s in self.series)

    @property
    def class_counts(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.n_classes)

    def subset(self, index) -> "Dataset":
        index = np.asarray(index, dtype=int)
        return Dataset(tuple(self.series[i] for i in index), self.labels[index],
                       self.n_classes, self.classes)

    def fingerprint(self) -> str:
        """Stable SHA-256 over values and labels."""
        h = hashlib.sha256()
        for s, y in zip(self.series, self.labels):
            h.update(np.int64(y).tobytes())
            h.update(np.int64(len(s)).tobytes())
            h.update(np.ascontiguousarray(s, dtype="<f8").tobytes())
        return h.hexdigest()


def from_arrays(series: Sequence, labels: Sequence) -> Dataset:
    """Build a dataset from raw labels of any sortable alphabet."""
    raw = list(labels)
    classes = sorted(set(raw))
    lookup = {c: i for i, c in enumerate(classes)}
    return Dataset(tuple(series), np.array([lookup[c] for c in raw]), len(classes), tuple(classes))


def _parse_label(token: str):
    try:
        value = float(token)
    except ValueError:
        return token
    return int(value) if value.is_integer() else value


def load_delimited(path, delimiter: str | None = ",", label_position: str = "first") -> Dataset:
    """Read a UCR-style file: one series per line with its label in the first or last field.

    ``delimiter=None`` splits on runs of whitespace.
    """
    if label_position not in ("first", "last"):
        raise ValueError("label_position must be 'first' or 'last'")
    series, labels = [], []
    text = Path(path).read_text()
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        fields = [f.strip() for f in line.strip().split(delimiter)]
        if len(fields) < MIN_LENGTH + 1:
            raise ParseError(f"{path}:{lineno}: expected a label and at least {MIN_LENGTH} values")
        label, values = (fields[0], fields[1:]) if label_position == "first" else (fields[-1], fields[:-1])
        try:
            row = np.array([float(v) for v in values])
        except ValueError as exc:
            raise ParseError(f"{path}:{lineno}: {exc}") from None
        if not np.all(np.isfinite(row)):
            raise ParseError(f"{path}:{lineno}: non-finite value")
        series.append(row)
        labels.append(_parse_label(label))
    if not series:
        raise EmptyFile(f"{path} contains no rows")
    if len({type(lab) for lab in labels}) > 1 and any(isinstance(lab, str) for lab in labels):
        raise ParseError(f"{path}: mixed numeric and text labels")
    return from_arrays(series, labels)


def save_delimited(dataset: Dataset, path, delimiter: str = ",") -> None:
    # repr() round-trips float64 exactly
    lines = []
    for s, y in zip(dataset.series, dataset.labels):
        fields = [str(dataset.classes[y])] + [repr(float(v)) for v in s]
        lines.append(delimiter.join(fields))
    Path(path).write_text("\n".join(lines) + "\n")


def concatenate(a: Dataset, b: Dataset) -> Dataset:
    if a.n_classes != b.n_classes or tuple(a.classes) != tuple(b.classes):
        raise IncompatibleDatasets(f"class sets differ: {a.classes} vs {b.classes}")
    return Dataset(a.series + b.series, np.concatenate([a.labels, b.labels]), a.n_classes, a.classes)


def align_labels(dataset: Dataset, reference: Dataset) -> Dataset:
    """Re-encode ``dataset`` with the class order of ``reference``."""
    lookup = {c: i for i, c in enumerate(reference.classes)}
    unseen = [c for c in dataset.classes if c not in lookup]
    if unseen:
        raise IncompatibleDatasets(f"labels {unseen} do not occur in the reference data")
    codes = np.array([lookup[dataset.classes[y]] for y in dataset.labels])
    return Dataset(dataset.series, codes, reference.n_classes, reference.classes)


def stratified_resplit(train: Dataset, test: Dataset, rng=None) -> tuple[Dataset, Dataset]:
    """Pool both splits and redraw them with the original sizes and per-class train counts."""
    rng = as_generator(rng)
    pooled = concatenate(train, test)
    want = train.class_counts
    train_idx, test_idx = [], []
    for c in range(pooled.n_classes):
        members = rng.permutation(np.flatnonzero(pooled.labels == c))
        train_idx.extend(members[: want[c]])
        test_idx.extend(members[want[c]:])
    train_idx = rng.permutation(np.array(train_idx, dtype=int))
    test_idx = rng.permutation(np.array(test_idx, dtype=int))
    return pooled.subset(train_idx), pooled.subset(test_idx)


# --------------------------------------------------------------------------
# synthetic data

THREECLASS_LENGTH = 60
THREECLASS_COUNTS = (25, 5, 5)
_PULSE_WIDTH = 8
_PULSE_HEIGHT = 3.0


def _threeclass_split(rng: np.random.Generator) -> Dataset:
    t = np.arange(THREECLASS_LENGTH)
    base = np.sin(2 * np.pi * t / 8 + 0.4)
    series, labels = [], []
    for label, count in enumerate(THREECLASS_COUNTS):
        for _ in range(count):
            if label == 0:
                s = base + rng.normal(0.0, 0.05, THREECLASS_LENGTH)
            else:
                # pulse values are 0 or +-3 so a class-0 window is always closest to the flat part
                s = np.zeros(THREECLASS_LENGTH)
                start = rng.integers(4, THREECLASS_LENGTH - _PULSE_WIDTH - 4)
                sign = 1.0 if label == 1 else -1.0
                s[start:start + _PULSE_WIDTH] = sign * _PULSE_HEIGHT
            series.append(s)
            labels.append(label)
    order = rng.permutation(len(series))
    return Dataset(tuple(series[i] for i in order), np.array(labels)[order], 3)


def gen_imbalanced_threeclass(rng=None) -> tuple[Dataset, Dataset]:
    """Three classes with 25/5/5 members in both train and test.

    Class 0 is one sine wave repeated with small noise. Classes 1 and 2 are
    flat with a single up (class 1) or down (class 2) plateau at a random
    position, so only their plateaus tell them apart.
    """
    rng = as_generator(rng)
    return _threeclass_split(rng), _threeclass_split(rng)


QUAD_LENGTH = 20
_BUMP_WIDTH = 8
_BUMP_START = 6


def gen_twoclass_quad() -> Dataset:
    """Two series per class where only an out-of-data shapelet separates the classes.

    Every series is flat apart from one half-sine bump at the same place.
    Class 0 bumps have amplitude 2 and 4, class 1 bumps amplitude 1 and 5.
    A bump of amplitude 3 is nearer to both class-0 series than to either
    class-1 series, while any window of the data is not.
    """
    bump = np.sin(np.pi * np.arange(1, _BUMP_WIDTH + 1) / (_BUMP_WIDTH + 1))
    series = []
    for amplitude in (2.0, 4.0, 1.0, 5.0):
        s = np.zeros(QUAD_LENGTH)
        s[_BUMP_START:_BUMP_START + _BUMP_WIDTH] = amplitude * bump
        series.append(s)
    return Dataset(tuple(series), np.array([0, 0, 1, 1]), 2)


def gen_twoclass_noisy(rng=None, n_train: int = 27, n_test: int = 953,
                       length: int = 65) -> tuple[Dataset, Dataset]:
    """Noisy binary data sized like SonyAIBORobotSurface2 by default.

    Each class owns two motifs; a series carries each of its own class's
    motifs with probability 0.75 and each of the other class's with 0.25,
    on top of white noise. No single motif decides the class, so sets of
    several shapelets beat single ones.
    """
    rng = as_generator(rng)
    motif_len = 10
    grid = np.linspace(0, np.pi, motif_len)
    motifs = [2.0 * np.sin(grid), -2.0 * np.sin(grid),
              np.linspace(-2, 2, motif_len), np.r_[np.full(5, 2.0), np.full(5, -2.0)]]
    owner = [0, 0, 1, 1]

    def draw(n):
        labels = np.array([i % 2 for i in range(n)])
        labels = rng.permutation(labels)
        series = []
        for y in labels:
            s = rng.normal(0.0, 0.3, length)
            for m, c in zip(motifs, owner):
                if rng.random() < (0.75 if c == y else 0.25):
                    start = rng.integers(0, length - motif_len)
                    s[start:start + motif_len] += m
            series.append(s)
        return Dataset(tuple(series), labels, 2)

    return draw(n_train), draw(n_test)
