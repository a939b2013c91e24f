"""Evolutionary discovery of shapelet sets for time-series classification."""
from .baseline import brute_force_best_shapelet, information_gain_split, top_k_independent
from .data import (
    Dataset,
    align_labels,
    from_arrays,
    gen_imbalanced_threeclass,
    gen_twoclass_noisy,
    gen_twoclass_quad,
    load_delimited,
    save_delimited,
    stratified_resplit,
)
from .distance import distance_matrix, dtw_distance, pairwise_dtw, subsequence_distance
from .estimator import GeneticShapeletTransform, max_len_grid, search_max_len
from .evolution import GaConfig, RunLog, evolve, evolve_single
from .exceptions import ConfigError, DataError, InvariantViolation, ShapeletError
from .fitness import Fitness, SoftmaxRegression, compare_fitness, evaluate_fitness, tune_and_evaluate
from .operators import ShapeletSet

__version__ = "0.1.0"

__all__ = [
    "ConfigError", "DataError", "Dataset", "Fitness", "GaConfig", "GeneticShapeletTransform",
    "InvariantViolation", "RunLog", "ShapeletError", "ShapeletSet", "SoftmaxRegression",
    "align_labels", "brute_force_best_shapelet", "compare_fitness", "distance_matrix",
    "dtw_distance", "evaluate_fitness", "evolve", "evolve_single", "from_arrays",
    "gen_imbalanced_threeclass", "gen_twoclass_noisy", "gen_twoclass_quad",
    "information_gain_split", "load_delimited", "max_len_grid", "pairwise_dtw",
    "save_delimited", "search_max_len", "stratified_resplit", "subsequence_distance",
    "top_k_independent", "tune_and_evaluate",
]
