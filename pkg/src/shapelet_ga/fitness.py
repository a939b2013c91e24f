"""Scoring shapelet sets with logistic regression.

The genetic search ranks a candidate set by the log loss of a softmax
regression fitted on the set's distance matrix, breaking ties on total
shapelet length. By default the loss is measured on the training rows
themselves; held-out folds are available as an option. The same module holds the regularisation-tuned
logistic regression used to report test accuracy once discovery is done.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import Sequence

import numba
import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.linear_model import LogisticRegression
from sklearn.metrics import log_loss as _sk_log_loss
from sklearn.model_selection import StratifiedKFold
from sklearn.multiclass import OneVsRestClassifier
from sklearn.pipeline import make_pipeline
from sklearn.preprocessing import StandardScaler

from .distance import distance_matrix
from .exceptions import DegenerateInput, ShapeMismatch

PROBA_CLIP = 1e-15
ERROR_TOLERANCE = 1e-9
STD_FLOOR = 1e-12


def softmax(logits: np.ndarray) -> np.ndarray:
    z = logits - logits.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


@numba.njit(cache=True)
def objective(coef, intercept, X, y, C):
    """Regularised mean cross-entropy and its gradient.

    The penalty is ``||coef||^2 / (2 C N)``, i.e. the scikit-learn objective
    divided by ``C N``; the intercept is not penalised.
    """
    n, n_features = X.shape
    n_classes = coef.shape[0]
    grad_coef = np.zeros_like(coef)
    grad_intercept = np.zeros_like(intercept)
    logits = np.empty(n_classes)
    ce = 0.0
    for i in range(n):
        top = -np.inf
        for c in range(n_classes):
            z = intercept[c]
            for k in range(n_features):
                z += X[i, k] * coef[c, k]
            logits[c] = z
            if z > top:
                top = z
        total = 0.0
        for c in range(n_classes):
            total += np.exp(logits[c] - top)
        lse = top + np.log(total)
        ce += lse - logits[y[i]]
        for c in range(n_classes):
            resid = np.exp(logits[c] - lse)
            if c == y[i]:
                resid -= 1.0
            grad_intercept[c] += resid
            for k in range(n_features):
                grad_coef[c, k] += resid * X[i, k]
    penalty = 0.0
    for c in range(n_classes):
        grad_intercept[c] /= n
        for k in range(n_features):
            penalty += coef[c, k] * coef[c, k]
            grad_coef[c, k] = grad_coef[c, k] / n + coef[c, k] / (C * n)
    return ce / n + penalty / (2.0 * C * n), grad_coef, grad_intercept


@numba.njit(cache=True)
def _descend(X, y, n_classes, C, max_iter, tol):
    coef = np.zeros((n_classes, X.shape[1]))
    intercept = np.zeros(n_classes)
    loss, g_coef, g_int = objective(coef, intercept, X, y, C)
    losses = np.empty(max_iter + 1)
    losses[0] = loss
    step = 1.0
    n_iter = 0
    while n_iter < max_iter:
        accepted = False
        for _ in range(60):
            cand_coef = coef - step * g_coef
            cand_int = intercept - step * g_int
            cand_loss, cand_g_coef, cand_g_int = objective(cand_coef, cand_int, X, y, C)
            if cand_loss <= loss:
                accepted = True
                break
            step *= 0.5
        if not accepted:
            break
        n_iter += 1
        decrease = loss - cand_loss
        coef, intercept = cand_coef, cand_int
        loss, g_coef, g_int = cand_loss, cand_g_coef, cand_g_int
        losses[n_iter] = loss
        if decrease < tol:
            break
    return coef, intercept, losses[: n_iter + 1], n_iter


class SoftmaxRegression(ClassifierMixin, BaseEstimator):
    """Multinomial logistic regression fitted by full-batch gradient descent.

    Weights start at zero and the step size is halved until the loss does not
    increase, so the recorded loss curve is non-increasing. Fitting is fully
    deterministic.

    Parameters
    ----------
    C : float
        Inverse L2 regularisation strength.
    max_iter : int
        Maximum number of accepted gradient steps.
    tol : float
        Stop once an accepted step lowers the loss by less than this.
    standardize : bool
        Scale each column to zero mean and unit variance before fitting.
    n_classes : int or None
        Number of classes; inferred from ``y`` when None.
    """

    def __init__(self, C=1.0, max_iter=200, tol=1e-6, standardize=True, n_classes=None):
        self.C = C
        self.max_iter = max_iter
        self.tol = tol
        self.standardize = standardize
        self.n_classes = n_classes

    def fit(self, X, y):
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=int)
        if X.ndim != 2 or X.shape[0] != len(y):
            raise ShapeMismatch(f"X has shape {X.shape} but y has {len(y)} labels")
        if np.isnan(X).any():
            raise ValueError("X contains NaN")
        if len(np.unique(y)) < 2:
            raise DegenerateInput("need at least two classes to fit a classifier")
        n_classes = self.n_classes or int(y.max()) + 1
        self.classes_ = np.arange(n_classes)
        if self.standardize:
            self.mean_ = X.mean(axis=0)
            self.scale_ = np.maximum(X.std(axis=0), STD_FLOOR)
        else:
            self.mean_ = np.zeros(X.shape[1])
            self.scale_ = np.ones(X.shape[1])
        Xs = (X - self.mean_) / self.scale_

        coef, intercept, losses, n_iter = _descend(
            np.ascontiguousarray(Xs), y, n_classes, float(self.C), int(self.max_iter), float(self.tol))
        self.coef_ = coef
        self.intercept_ = intercept
        self.n_iter_ = n_iter
        self.loss_curve_ = losses
        return self

    def decision_function(self, X):
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[1] != self.coef_.shape[1]:
            raise ShapeMismatch(f"expected {self.coef_.shape[1]} columns, got shape {X.shape}")
        return ((X - self.mean_) / self.scale_) @ self.coef_.T + self.intercept_

    def predict_proba(self, X):
        return softmax(self.decision_function(X))

    def predict(self, X):
        return self.classes_[np.argmax(self.decision_function(X), axis=1)]

    def to_dict(self) -> dict:
        return {
            "coef": self.coef_.tolist(),
            "intercept": self.intercept_.tolist(),
            "mean": self.mean_.tolist(),
            "scale": self.scale_.tolist(),
            "n_iter": int(self.n_iter_),
            "final_loss": float(self.loss_curve_[-1]),
            "params": self.get_params(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SoftmaxRegression":
        model = cls(**data["params"])
        model.coef_ = np.array(data["coef"], dtype=float)
        model.intercept_ = np.array(data["intercept"], dtype=float)
        model.mean_ = np.array(data["mean"], dtype=float)
        model.scale_ = np.array(data["scale"], dtype=float)
        model.classes_ = np.arange(model.coef_.shape[0])
        model.n_iter_ = data.get("n_iter", 0)
        model.loss_curve_ = np.array([data.get("final_loss", np.nan)])
        return model


def train_logreg(D, y, C=1.0, max_iter=200, tol=1e-6, n_classes=None) -> SoftmaxRegression:
    """Fit a softmax regression on raw (unstandardised) distances."""
    return SoftmaxRegression(C=C, max_iter=max_iter, tol=tol, standardize=False,
                             n_classes=n_classes).fit(D, y)


def predict_proba(model: SoftmaxRegression, D) -> np.ndarray:
    return model.predict_proba(D)


def log_loss(proba, y) -> float:
    """Mean negative log-likelihood of the true class, with clipping."""
    proba = np.asarray(proba, dtype=float)
    y = np.asarray(y, dtype=int)
    if proba.ndim != 2 or proba.shape[0] != len(y) or y.max(initial=0) >= proba.shape[1]:
        raise ShapeMismatch(f"probabilities {proba.shape} do not match {len(y)} labels")
    p = np.clip(proba[np.arange(len(y)), y], PROBA_CLIP, 1.0 - PROBA_CLIP)
    return float(-np.mean(np.log(p)))


@functools.total_ordering
@dataclass(frozen=True)
class Fitness:
    """Lower is fitter: error first, then total shapelet length.

    Errors are bucketed at ``ERROR_TOLERANCE`` so that near-equal losses fall
    through to the complexity comparison while the order stays transitive.
    """

    error: float
    complexity: int

    @property
    def key(self) -> tuple[int, int]:
        return (math.floor(self.error / ERROR_TOLERANCE + 0.5), self.complexity)

    def __lt__(self, other: "Fitness") -> bool:
        return self.key < other.key

    def __eq__(self, other) -> bool:
        if not isinstance(other, Fitness):
            return NotImplemented
        return self.key == other.key

    def __hash__(self):
        return hash(self.key)


def compare_fitness(a: Fitness, b: Fitness) -> int:
    """-1 if ``a`` is fitter, 1 if ``b`` is fitter, 0 if they tie."""
    if a.key < b.key:
        return -1
    if a.key > b.key:
        return 1
    return 0


def unique_columns(D: np.ndarray) -> np.ndarray:
    """Drop exact duplicate columns, keeping first occurrences in order."""
    _, first = np.unique(D, axis=1, return_index=True)
    return D[:, np.sort(first)]


def round_robin_folds(y, n_folds: int) -> np.ndarray:
    """Fold id per sample: the i-th member of each class goes to fold ``i % n_folds``."""
    y = np.asarray(y)
    folds = np.empty(len(y), dtype=int)
    for c in np.unique(y):
        members = np.flatnonzero(y == c)
        folds[members] = np.arange(len(members)) % n_folds
    return folds


def fitness_from_distances(D, y, complexity, C=1.0, max_iter=200, tol=1e-6,
                           n_classes=None, metric="logloss", cv_folds=0) -> Fitness:
    """Score a distance matrix.

    With ``cv_folds >= 2`` the error is measured on held-out predictions
    from deterministic stratified folds (capped by the smallest class size);
    otherwise on the training predictions.
    """
    y = np.asarray(y, dtype=np.int64)
    n_classes = n_classes or int(y.max()) + 1
    # duplicated shapelets would otherwise halve their own L2 penalty and look fitter
    X = unique_columns(np.asarray(D, dtype=float))
    n_folds = min(cv_folds, int(np.bincount(y).min()))
    if n_folds >= 2:
        folds = round_robin_folds(y, n_folds)
        proba = np.empty((len(y), n_classes))
        for f in range(n_folds):
            held = folds == f
            model = SoftmaxRegression(C=C, max_iter=max_iter, tol=tol, n_classes=n_classes)
            proba[held] = model.fit(X[~held], y[~held]).predict_proba(X[held])
    else:
        model = SoftmaxRegression(C=C, max_iter=max_iter, tol=tol, n_classes=n_classes)
        proba = model.fit(X, y).predict_proba(X)
    if metric == "logloss":
        error = log_loss(proba, y)
    elif metric == "accuracy":
        error = 1.0 - float(np.mean(proba.argmax(axis=1) == y))
    else:
        raise ValueError(f"unknown fitness metric {metric!r}")
    return Fitness(error, int(complexity))


def evaluate_fitness(shapelets: Sequence, series, y, C=1.0, max_iter=200, tol=1e-6,
                     n_classes=None, metric="logloss", cv_folds=0, padded=None) -> Fitness:
    D = distance_matrix(shapelets, series, padded=padded)
    return fitness_from_distances(D, y, sum(len(s) for s in shapelets), C=C,
                                  max_iter=max_iter, tol=tol, n_classes=n_classes,
                                  metric=metric, cv_folds=cv_folds)


# --------------------------------------------------------------------------
# tuned evaluation classifier

PENALTIES = ("l1", "l2")
C_GRID = (0.001, 0.01, 0.1, 1.0, 10.0, 100.0, 1000.0)
TUNING_GRID = tuple((p, c) for p in PENALTIES for c in C_GRID)


def _tuned_model(penalty, C):
    return make_pipeline(
        StandardScaler(),
        OneVsRestClassifier(LogisticRegression(penalty=penalty, C=C, solver="liblinear", max_iter=1000,
                                               random_state=0)),
    )


def cv_log_loss(X, y, model_factory, n_splits=3, fold_seed=0) -> float:
    """Mean held-out log loss over stratified folds.

    The fold count shrinks to the smallest class size when a class has fewer
    than ``n_splits`` members.
    """
    y = np.asarray(y)
    labels = np.unique(y)
    n_splits = max(2, min(n_splits, int(np.bincount(y).min())))
    folds = StratifiedKFold(n_splits=n_splits, shuffle=True, random_state=fold_seed)
    losses = []
    for tr, va in folds.split(X, y):
        model = model_factory().fit(X[tr], y[tr])
        proba = np.zeros((len(va), len(labels)))
        proba[:, np.searchsorted(labels, model.classes_)] = model.predict_proba(X[va])
        losses.append(_sk_log_loss(y[va], np.clip(proba, PROBA_CLIP, 1.0), labels=labels))
    return float(np.mean(losses))


@dataclass
class TunedEvaluation:
    accuracy: float
    penalty: str
    C: float
    cv_loss: float
    predictions: np.ndarray
    fold_seed: int


def tune_and_evaluate(shapelets: Sequence, train, test, fold_seed: int = 0) -> TunedEvaluation:
    """Pick penalty type and strength by 3-fold CV log loss, refit, score on test."""
    if len(np.unique(train.labels)) < 2:
        raise DegenerateInput("training data has a single class")
    X_train = distance_matrix(shapelets, train.series)
    X_test = distance_matrix(shapelets, test.series)
    best = None
    for penalty, C in TUNING_GRID:
        loss = cv_log_loss(X_train, train.labels, lambda: _tuned_model(penalty, C),
                           fold_seed=fold_seed)
        if best is None or loss < best[0]:
            best = (loss, penalty, C)
    loss, penalty, C = best
    model = _tuned_model(penalty, C).fit(X_train, train.labels)
    pred = model.predict(X_test)
    return TunedEvaluation(float(np.mean(pred == test.labels)), penalty, C, loss, pred, fold_seed)
