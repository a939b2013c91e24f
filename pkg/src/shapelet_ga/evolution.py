"""The generational loop that evolves shapelet sets."""
from __future__ import annotations

import csv
import dataclasses
import io
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .data import MIN_LENGTH, Dataset
from .distance import pad_series
from .exceptions import ConfigError, DegenerateInput, InsufficientData
from .fitness import evaluate_fitness
from .operators import (
    ShapeletSet,
    crossover_merge,
    crossover_set_point,
    crossover_shapelet_point,
    init_kmeans,
    init_random,
    mutate_add,
    mutate_mask,
    mutate_remove,
    tournament_select,
)

RUNLOG_SCHEMA = "runlog/1"


@dataclass(frozen=True)
class GaConfig:
    """Hyper-parameters of one evolutionary run.

    ``max_len`` and ``max_shapelets`` default to the data-dependent values
    ``M`` and ``floor(sqrt(M))``; call :meth:`resolve` with the dataset's
    minimum series length to fill them in.
    """

    population_size: int = 100
    max_generations: int = 100
    patience: int = 10
    p_crossover: float = 0.4
    p_mutation: float = 0.1
    max_shapelets: int | None = None
    max_len: int | None = None
    tournament_size: int = 3
    seed: int = 0
    initializations: tuple[int, ...] = (1, 2)
    crossovers: tuple[int, ...] = (1, 2, 3)
    mutations: tuple[int, ...] = (1, 2, 3)
    max_total_shapelets: int | None = None
    single_shapelet: bool = False
    fitness_C: float = 1.0
    fitness_max_iter: int = 200
    fitness_tol: float = 1e-6
    fitness_metric: str = "logloss"
    fitness_cv_folds: int = 0

    def validate(self, min_length: int | None = None) -> None:
        checks = [
            (self.population_size >= 2, "population_size must be >= 2"),
            (self.max_generations >= 1, "max_generations must be >= 1"),
            (self.patience >= 1, "patience must be >= 1"),
            (0.0 <= self.p_crossover <= 1.0, "p_crossover must lie in [0, 1]"),
            (0.0 <= self.p_mutation <= 1.0, "p_mutation must lie in [0, 1]"),
            (self.tournament_size >= 1, "tournament_size must be >= 1"),
            (self.max_shapelets is None or self.max_shapelets >= 2, "max_shapelets must be >= 2"),
            (self.max_len is None or self.max_len >= MIN_LENGTH, f"max_len must be >= {MIN_LENGTH}"),
            (self.max_total_shapelets is None or self.max_total_shapelets >= 1,
             "max_total_shapelets must be >= 1"),
            (bool(self.initializations) and set(self.initializations) <= {1, 2},
             "initializations must be a non-empty subset of {1, 2}"),
            (set(self.crossovers) <= {1, 2, 3}, "crossovers must be a subset of {1, 2, 3}"),
            (set(self.mutations) <= {1, 2, 3}, "mutations must be a subset of {1, 2, 3}"),
            (self.fitness_metric in ("logloss", "accuracy"), "fitness_metric must be logloss or accuracy"),
            (self.fitness_cv_folds >= 0, "fitness_cv_folds must be >= 0"),
            (0 <= self.seed < 2**64, "seed must be a 64-bit unsigned integer"),
        ]
        if min_length is not None:
            checks.append((self.max_len is None or self.max_len <= min_length,
                           f"max_len {self.max_len} exceeds the shortest series ({min_length})"))
        for ok, message in checks:
            if not ok:
                raise ConfigError(message)

    def resolve(self, min_length: int) -> "GaConfig":
        """Fill in data-dependent defaults and validate against ``min_length``."""
        self.validate(min_length)
        max_len = self.max_len if self.max_len is not None else min_length
        width = self.max_shapelets
        if width is None:
            width = max(2, math.isqrt(min_length))
        if self.max_total_shapelets is not None:
            width = max(2, min(width, self.max_total_shapelets))
        return dataclasses.replace(self, max_len=max_len, max_shapelets=width)

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        for key in ("initializations", "crossovers", "mutations"):
            d[key] = list(d[key])
        return d


@dataclass(frozen=True)
class GenerationRecord:
    generation: int
    best_error: float
    best_complexity: int
    mean_error: float
    mean_complexity: float
    mean_k: float
    seconds: float


@dataclass
class RunLog:
    records: list[GenerationRecord] = field(default_factory=list)

    COLUMNS = ("generation", "best_error", "best_complexity", "mean_error",
               "mean_complexity", "mean_k", "seconds")

    def __len__(self):
        return len(self.records)

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.records])

    def to_csv(self, path=None) -> str:
        buf = io.StringIO()
        buf.write(f"# schema={RUNLOG_SCHEMA}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.COLUMNS)
        for r in self.records:
            writer.writerow([r.generation, repr(r.best_error), r.best_complexity, repr(r.mean_error),
                             repr(r.mean_complexity), repr(r.mean_k), f"{r.seconds:.3f}"])
        text = buf.getvalue()
        if path is not None:
            with open(path, "w") as fh:
                fh.write(text)
        return text


def _check_dataset(dataset: Dataset) -> None:
    if len(np.unique(dataset.labels)) < 2:
        raise DegenerateInput("evolution needs at least two classes")


def init_population(dataset: Dataset, cfg: GaConfig, rng) -> list[ShapeletSet]:
    """``cfg`` must already be resolved."""
    series = dataset.series
    population = []
    for _ in range(cfg.population_size):
        k = 1 if cfg.single_shapelet else int(rng.integers(2, cfg.max_shapelets + 1))
        strategy = cfg.initializations[int(rng.integers(len(cfg.initializations)))]
        if strategy == 1:
            try:
                population.append(init_kmeans(series, k, cfg.max_len, rng))
                continue
            except InsufficientData:
                pass
        population.append(init_random(series, k, cfg.max_len, rng))
    return population


class _Evaluator:
    def __init__(self, dataset: Dataset, cfg: GaConfig, n_jobs: int):
        self.series = dataset.series
        self.labels = dataset.labels
        self.n_classes = dataset.n_classes
        self.padded = pad_series(dataset.series)
        self.cfg = cfg
        self.n_jobs = n_jobs

    def score(self, individual: ShapeletSet):
        cfg = self.cfg
        return evaluate_fitness(individual.shapelets, self.series, self.labels, C=cfg.fitness_C,
                                max_iter=cfg.fitness_max_iter, tol=cfg.fitness_tol,
                                n_classes=self.n_classes, metric=cfg.fitness_metric,
                                cv_folds=cfg.fitness_cv_folds, padded=self.padded)

    def __call__(self, individuals) -> None:
        todo = [ind for ind in individuals if ind.fitness is None]
        # one object may sit in several slots; score it once
        todo = list({id(ind): ind for ind in todo}.values())
        if self.n_jobs > 1 and len(todo) > 1:
            with ThreadPoolExecutor(self.n_jobs) as pool:
                results = list(pool.map(self.score, todo))
        else:
            results = [self.score(ind) for ind in todo]
        for ind, fit in zip(todo, results):
            ind.fitness = fit


def _breed(population, dataset, cfg, rng) -> list[ShapeletSet]:
    pool = [population[i] for i in rng.permutation(len(population))]
    cap = cfg.max_total_shapelets
    crossovers = [c for c in (1, 2, 3) if c in cfg.crossovers]
    if cfg.single_shapelet:
        crossovers = [c for c in crossovers if c != 1]
    for i in range(0, len(pool) - 1, 2):
        a, b = pool[i], pool[i + 1]
        for op in crossovers:
            if rng.random() < cfg.p_crossover:
                if op == 1:
                    a, b = crossover_set_point(a, b, rng)
                elif op == 2:
                    a, b = crossover_shapelet_point(a, b, rng)
                else:
                    a, b = crossover_merge(a, b, rng)
        pool[i], pool[i + 1] = a, b
    mutations = [m for m in (1, 2, 3) if m in cfg.mutations]
    if cfg.single_shapelet:
        mutations = [m for m in mutations if m != 3]
    for i, ind in enumerate(pool):
        for op in mutations:
            if rng.random() < cfg.p_mutation:
                if op == 1:
                    ind = mutate_mask(ind, rng)
                elif op == 2:
                    ind = mutate_remove(ind, rng)
                else:
                    ind = mutate_add(ind, dataset.series, cfg.max_len, rng, max_total=cap)
        pool[i] = ind
    return pool


def _best(individuals) -> ShapeletSet:
    return min(individuals, key=lambda ind: ind.fitness.key)


def _record(generation, population, best, started) -> GenerationRecord:
    return GenerationRecord(
        generation=generation,
        best_error=float(best.fitness.error),
        best_complexity=int(best.fitness.complexity),
        mean_error=float(np.mean([ind.fitness.error for ind in population])),
        mean_complexity=float(np.mean([ind.fitness.complexity for ind in population])),
        mean_k=float(np.mean([len(ind) for ind in population])),
        seconds=time.perf_counter() - started,
    )


def evolve(dataset: Dataset, cfg: GaConfig | None = None, n_jobs: int = 1,
           callback=None) -> tuple[ShapeletSet, RunLog]:
    """Evolve a shapelet set on ``dataset`` and return the elite and the per-generation log.

    Every random decision comes from one generator seeded with ``cfg.seed``
    and is drawn before the fitness evaluations of its generation, so the
    result does not depend on ``n_jobs``. ``callback(population, record)``
    is called after each generation is scored.
    """
    _check_dataset(dataset)
    cfg = (cfg or GaConfig()).resolve(dataset.min_length)
    rng = np.random.default_rng(cfg.seed)
    evaluate = _Evaluator(dataset, cfg, n_jobs)
    started = time.perf_counter()
    log = RunLog()

    population = init_population(dataset, cfg, rng)
    evaluate(population)
    best = _best(population)
    log.records.append(_record(0, population, best, started))
    if callback is not None:
        callback(population, log.records[-1])
    stale = 0
    for generation in range(1, cfg.max_generations):
        offspring = _breed(population, dataset, cfg, rng)
        evaluate(offspring)
        elite = _best(population + offspring)
        selected = [tournament_select(offspring, cfg.tournament_size, rng)
                    for _ in range(cfg.population_size - 1)]
        population = [elite] + selected
        current = _best(population)
        log.records.append(_record(generation, population, current, started))
        if callback is not None:
            callback(population, log.records[-1])
        if current.fitness < best.fitness:
            best, stale = current, 0
        else:
            stale += 1
            if stale >= cfg.patience:
                break
    return best.copy(), log


def evolve_single(dataset: Dataset, cfg: GaConfig | None = None, n_jobs: int = 1) -> np.ndarray:
    """Evolve a single shapelet: sets start with one member and never grow."""
    cfg = dataclasses.replace(cfg or GaConfig(), single_shapelet=True)
    best, _ = evolve(dataset, cfg, n_jobs=n_jobs)
    return best.shapelets[0]
