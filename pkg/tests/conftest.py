from pathlib import Path

import numpy as np
import pytest

from shapelet_ga.data import from_arrays

DATA_DIR = Path(__file__).resolve().parent.parent / "data"


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def motif_data():
    """Two classes told apart by a sharp spike present only in class 1."""
    gen = np.random.default_rng(7)
    series, labels = [], []
    for i in range(40):
        s = gen.normal(0.0, 0.1, 30)
        if i % 2:
            start = gen.integers(0, 24)
            s[start:start + 6] += np.array([0, 2, 4, 4, 2, 0])
        series.append(s)
        labels.append(i % 2)
    return from_arrays(series, labels)


_ACCEPTANCE_LINES = []


@pytest.fixture
def report():
    """Record one PASS/FAIL line for the acceptance summary, then assert."""
    def _report(name, ok, detail):
        line = f"{'PASS' if ok else 'FAIL'} {name}: {detail}"
        _ACCEPTANCE_LINES.append(line)
        assert ok, line
    return _report


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
