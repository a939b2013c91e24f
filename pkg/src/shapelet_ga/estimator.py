"""scikit-learn style wrapper around the evolutionary search."""
from __future__ import annotations

import dataclasses

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .data import MIN_LENGTH, Dataset
from .distance import distance_matrix
from .evolution import GaConfig, RunLog, evolve
from .exceptions import ConfigError, DataError, ShapeMismatch
from .fitness import SoftmaxRegression, cv_log_loss


def check_collection(X) -> list[np.ndarray]:
    """Turn a 2-D array or a list of 1-D arrays into a list of float series."""
    if isinstance(X, np.ndarray) and X.ndim == 2:
        series = [row.astype(float) for row in X]
    elif isinstance(X, Dataset):
        series = list(X.series)
    else:
        try:
            series = [np.asarray(s, dtype=float) for s in X]
        except (TypeError, ValueError) as exc:
            raise DataError(f"cannot read time series: {exc}") from None
    if not series:
        raise DataError("no time series given")
    for i, s in enumerate(series):
        if s.ndim != 1:
            raise ShapeMismatch(f"series {i} is not one-dimensional")
        if len(s) < MIN_LENGTH:
            raise DataError(f"series {i} is shorter than {MIN_LENGTH}")
        if not np.all(np.isfinite(s)):
            raise DataError(f"series {i} contains NaN or Inf")
    return series


def check_labels(y, n_series: int) -> tuple[np.ndarray, np.ndarray]:
    """Encode labels as ``0..C-1``; returns ``(classes, codes)``."""
    y = np.asarray(y)
    if y.ndim != 1 or len(y) != n_series:
        raise ShapeMismatch(f"expected {n_series} labels, got shape {y.shape}")
    classes, codes = np.unique(y, return_inverse=True)
    return classes, codes


def max_len_grid(min_length: int) -> list[int]:
    """Quarter, half, three quarters and all of ``min_length``, floored at 4."""
    grid = {max(MIN_LENGTH, (min_length * q) // 4) for q in (1, 2, 3, 4)}
    return sorted(v for v in grid if v <= min_length)


def score_max_len(shapelets, dataset: Dataset, cfg: GaConfig, fold_seed: int = 0) -> float:
    D = distance_matrix(shapelets, dataset.series)
    return cv_log_loss(D, dataset.labels,
                       lambda: SoftmaxRegression(C=cfg.fitness_C, max_iter=cfg.fitness_max_iter,
                                                 tol=cfg.fitness_tol, n_classes=dataset.n_classes),
                       n_splits=3, fold_seed=fold_seed)


def search_max_len(dataset: Dataset, cfg: GaConfig, n_jobs: int = 1, fold_seed: int = 0):
    """Run one search per grid value and keep the one with the lowest 3-fold CV log loss.

    Every run uses the same seed. Ties go to the shorter ``max_len``.
    Returns ``(max_len, best_set, runlog, scores)`` where ``scores`` maps
    each grid value to its CV loss.
    """
    scores = {}
    chosen = None
    for max_len in max_len_grid(dataset.min_length):
        best, log = evolve(dataset, dataclasses.replace(cfg, max_len=max_len), n_jobs=n_jobs)
        scores[max_len] = score_max_len(best.shapelets, dataset, cfg, fold_seed)
        if chosen is None or scores[max_len] < scores[chosen[0]]:
            chosen = (max_len, best, log)
    return chosen + (scores,)


class GeneticShapeletTransform(TransformerMixin, BaseEstimator):
    """Discover a shapelet set by evolution and map series to shapelet distances.

    Parameters
    ----------
    population_size, max_generations, patience, p_crossover, p_mutation,
    max_shapelets, tournament_size, initializations, crossovers, mutations,
    max_total_shapelets
        Passed to :class:`GaConfig`.
    max_len : int, None or "grid"
        Longest shapelet allowed. None uses the shortest training series;
        "grid" tries four fractions of it and keeps the best by CV log loss.
    random_state : int
        Seed of the search. Required to be an integer so runs repeat.
    n_jobs : int
        Worker threads for fitness evaluation and distance computation.
    """

    def __init__(self, population_size=100, max_generations=100, patience=10,
                 p_crossover=0.4, p_mutation=0.1, max_shapelets=None, max_len=None,
                 tournament_size=3, initializations=(1, 2), crossovers=(1, 2, 3),
                 mutations=(1, 2, 3), max_total_shapelets=None, random_state=0, n_jobs=1):
        self.population_size = population_size
        self.max_generations = max_generations
        self.patience = patience
        self.p_crossover = p_crossover
        self.p_mutation = p_mutation
        self.max_shapelets = max_shapelets
        self.max_len = max_len
        self.tournament_size = tournament_size
        self.initializations = initializations
        self.crossovers = crossovers
        self.mutations = mutations
        self.max_total_shapelets = max_total_shapelets
        self.random_state = random_state
        self.n_jobs = n_jobs

    def _config(self) -> GaConfig:
        if not isinstance(self.random_state, (int, np.integer)):
            raise ConfigError("random_state must be an integer")
        grid = isinstance(self.max_len, str)
        if grid and self.max_len != "grid":
            raise ConfigError(f"max_len must be an integer, None or 'grid', not {self.max_len!r}")
        return GaConfig(
            population_size=self.population_size, max_generations=self.max_generations,
            patience=self.patience, p_crossover=self.p_crossover, p_mutation=self.p_mutation,
            max_shapelets=self.max_shapelets, max_len=None if grid else self.max_len,
            tournament_size=self.tournament_size, seed=int(self.random_state),
            initializations=tuple(self.initializations), crossovers=tuple(self.crossovers),
            mutations=tuple(self.mutations), max_total_shapelets=self.max_total_shapelets,
        )

    def fit(self, X, y):
        series = check_collection(X)
        self.classes_, codes = check_labels(y, len(series))
        dataset = Dataset(tuple(series), codes, len(self.classes_), tuple(self.classes_.tolist()))
        cfg = self._config()
        if self.max_len == "grid":
            max_len, best, log, self.grid_scores_ = search_max_len(dataset, cfg, self.n_jobs)
        else:
            best, log = evolve(dataset, cfg, n_jobs=self.n_jobs)
            max_len, self.grid_scores_ = cfg.resolve(dataset.min_length).max_len, {}
        self.config_ = dataclasses.replace(cfg, max_len=max_len).resolve(dataset.min_length)
        self.shapelets_ = [s.copy() for s in best.shapelets]
        self.fitness_ = best.fitness
        self.runlog_: RunLog = log
        return self

    def transform(self, X):
        check_is_fitted(self, "shapelets_")
        return distance_matrix(self.shapelets_, check_collection(X), n_jobs=self.n_jobs)
