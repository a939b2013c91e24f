import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from shapelet_ga.exceptions import DegenerateInput, ShapeMismatch
from shapelet_ga.fitness import (
    TUNING_GRID,
    Fitness,
    SoftmaxRegression,
    compare_fitness,
    evaluate_fitness,
    fitness_from_distances,
    log_loss,
    objective,
    round_robin_folds,
    train_logreg,
    tune_and_evaluate,
)


def finite_difference(coef, intercept, X, y, C, h=1e-6):
    g_coef = np.zeros_like(coef)
    g_int = np.zeros_like(intercept)
    for idx in np.ndindex(coef.shape):
        up, down = coef.copy(), coef.copy()
        up[idx] += h
        down[idx] -= h
        g_coef[idx] = (objective(up, intercept, X, y, C)[0] - objective(down, intercept, X, y, C)[0]) / (2 * h)
    for c in range(len(intercept)):
        up, down = intercept.copy(), intercept.copy()
        up[c] += h
        down[c] -= h
        g_int[c] = (objective(coef, up, X, y, C)[0] - objective(coef, down, X, y, C)[0]) / (2 * h)
    return g_coef, g_int


@pytest.mark.parametrize("C", [0.1, 1.0, 10.0])
def test_gradient_matches_finite_differences(rng, C):
    X = rng.normal(size=(5, 3))
    y = np.array([0, 1, 2, 1, 0])
    coef = rng.normal(size=(3, 3))
    intercept = rng.normal(size=3)
    _, g_coef, g_int = objective(coef, intercept, X, y, C)
    fd_coef, fd_int = finite_difference(coef, intercept, X, y, C)
    assert np.abs(g_coef - fd_coef).max() < 1e-5
    assert np.abs(g_int - fd_int).max() < 1e-5


def test_zero_model_loss_is_log_classes(rng):
    X = rng.normal(size=(9, 2))
    y = np.array([0, 1, 2] * 3)
    loss, _, _ = objective(np.zeros((3, 2)), np.zeros(3), X, y, 1.0)
    assert loss == pytest.approx(math.log(3))
    model = SoftmaxRegression(max_iter=0).fit(X, y)
    np.testing.assert_allclose(model.predict_proba(X), 1 / 3)


def test_separable_one_feature():
    X = np.r_[np.zeros(10), np.full(10, 10.0)][:, None]
    y = np.r_[np.zeros(10, int), np.ones(10, int)]
    model = train_logreg(X, y)
    assert (model.predict(X) == y).mean() == 1.0


def test_loss_curve_non_increasing(rng):
    X = rng.normal(size=(40, 4))
    y = (X[:, 0] + 0.5 * rng.normal(size=40) > 0).astype(int)
    model = SoftmaxRegression(max_iter=300, tol=0).fit(X, y)
    assert np.all(np.diff(model.loss_curve_) <= 0)
    assert np.all(np.isfinite(model.coef_))
    np.testing.assert_allclose(model.predict_proba(X).sum(axis=1), 1.0, atol=1e-9)


def test_model_errors(rng):
    with pytest.raises(DegenerateInput):
        SoftmaxRegression().fit(rng.normal(size=(4, 2)), np.zeros(4, int))
    model = SoftmaxRegression().fit(rng.normal(size=(4, 2)), np.array([0, 1, 0, 1]))
    with pytest.raises(ShapeMismatch):
        model.predict_proba(np.zeros((3, 5)))


def test_model_json_round_trip(rng):
    X = rng.normal(size=(12, 3))
    y = np.arange(12) % 2
    model = SoftmaxRegression().fit(X, y)
    back = SoftmaxRegression.from_dict(model.to_dict())
    np.testing.assert_array_equal(back.predict_proba(X), model.predict_proba(X))


def test_log_loss_values():
    assert log_loss(np.full((4, 3), 1 / 3), [0, 1, 2, 0]) == pytest.approx(1.0986122886681098)
    assert log_loss([[0.8, 0.2]], [0]) == pytest.approx(0.22314355131420976)
    assert log_loss(np.eye(3), [0, 1, 2]) <= 1e-14
    with pytest.raises(ShapeMismatch):
        log_loss(np.eye(3), [0, 1])


def test_compare_fitness_examples():
    assert compare_fitness(Fitness(0.10, 40), Fitness(0.20, 10)) == -1
    assert compare_fitness(Fitness(0.10, 40), Fitness(0.10, 30)) == 1
    assert compare_fitness(Fitness(0.10, 30), Fitness(0.10, 30)) == 0
    assert compare_fitness(Fitness(0.1, 30), Fitness(0.1 + 1e-12, 50)) == -1


errors = st.floats(0, 5, allow_nan=False) | st.sampled_from([0.1, 0.1 + 4e-10, 0.1 + 6e-10, 0.1 + 1.2e-9])
fitnesses = st.builds(Fitness, errors, st.integers(4, 60))


@given(fitnesses, fitnesses, fitnesses)
def test_compare_fitness_is_total_order(a, b, c):
    assert compare_fitness(a, b) == -compare_fitness(b, a)
    if compare_fitness(a, b) <= 0 and compare_fitness(b, c) <= 0:
        assert compare_fitness(a, c) <= 0
    if compare_fitness(a, b) == 0 and compare_fitness(b, c) == 0:
        assert compare_fitness(a, c) == 0


def test_motif_shapelet_scores_low(motif_data):
    spike = np.array([0, 2, 4, 4, 2, 0], dtype=float)
    fit = evaluate_fitness([spike], motif_data.series, motif_data.labels)
    assert fit.error < 0.05 and fit.complexity == 6


def test_duplicate_shapelet_is_less_fit(motif_data):
    spike = np.array([0, 2, 4, 4, 2, 0], dtype=float)
    other = motif_data.series[0][:5]
    one = evaluate_fitness([spike, other], motif_data.series, motif_data.labels)
    two = evaluate_fitness([spike, other, spike], motif_data.series, motif_data.labels)
    assert abs(one.error - two.error) <= 1e-9
    assert two.complexity == one.complexity + 6
    assert compare_fitness(one, two) == -1


def test_fitness_deterministic(motif_data, rng):
    shapelets = [rng.normal(size=5), rng.normal(size=8)]
    a = evaluate_fitness(shapelets, motif_data.series, motif_data.labels)
    b = evaluate_fitness(shapelets, motif_data.series, motif_data.labels)
    assert a.error == b.error


def test_cv_fitness_option(rng):
    D = rng.normal(size=(30, 3))
    y = np.arange(30) % 3
    train_err = fitness_from_distances(D, y, 10).error
    cv_err = fitness_from_distances(D, y, 10, cv_folds=3).error
    assert cv_err > train_err
    assert fitness_from_distances(D, y, 10, metric="accuracy").error <= 1.0


def test_round_robin_folds():
    folds = round_robin_folds([0, 0, 0, 1, 1, 1, 1], 3)
    assert folds.tolist() == [0, 1, 2, 0, 1, 2, 0]


def test_tuning_grid_and_evaluation(motif_data):
    assert len(TUNING_GRID) == 14
    assert {p for p, _ in TUNING_GRID} == {"l1", "l2"}
    spike = np.array([0, 2, 4, 4, 2, 0], dtype=float)
    first = tune_and_evaluate([spike], motif_data, motif_data)
    second = tune_and_evaluate([spike], motif_data, motif_data)
    assert first.accuracy == 1.0
    assert (first.penalty, first.C) == (second.penalty, second.C)
