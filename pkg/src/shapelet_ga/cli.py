"""Command-line front end.

Settings come from an optional flat ``key = value`` file (``--config``) and
are overridden by command-line flags of the same name. Exit status is 0 on
success, 1 for usage or configuration errors, 2 for data errors and 3 when
an internal check fails.
"""
from __future__ import annotations

import argparse
import configparser
import dataclasses
import datetime
import json
import sys
import time
import traceback
from pathlib import Path

import numpy as np
from sklearn.metrics import precision_recall_fscore_support

from . import __version__
from .artifacts import (
    DTW_SCHEMA,
    read_shapelets,
    write_distances,
    write_manifest,
    write_matrix_csv,
    write_metrics,
    write_shapelets,
)
from .baseline import brute_force_best_shapelet, information_gain_split, split_errors, top_k_independent
from .data import (
    MIN_LENGTH,
    Dataset,
    align_labels,
    gen_imbalanced_threeclass,
    gen_twoclass_noisy,
    gen_twoclass_quad,
    load_delimited,
    save_delimited,
)
from .distance import distance_matrix, pairwise_dtw
from .estimator import search_max_len
from .evolution import GaConfig, evolve
from .exceptions import ConfigError, DataError, InvariantViolation, ShapeletError
from .fitness import SoftmaxRegression, tune_and_evaluate


def _int_list(text: str) -> tuple[int, ...]:
    parts = [p for p in text.replace(",", " ").split() if p]
    return tuple(int(p) for p in parts)


def _optional_int(text: str):
    return None if text.strip().lower() in ("", "none") else int(text)


def _bool(text: str) -> bool:
    value = text.strip().lower()
    if value in ("1", "true", "yes", "on"):
        return True
    if value in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _delimiter(text: str):
    named = {"whitespace": None, "tab": "\t", "comma": ",", "space": " "}
    return named.get(text.strip().lower(), text)


_GA_TYPES = {
    "population_size": int, "max_generations": int, "patience": int,
    "p_crossover": float, "p_mutation": float, "max_shapelets": _optional_int,
    "max_len": _optional_int, "tournament_size": int, "seed": int,
    "initializations": _int_list, "crossovers": _int_list, "mutations": _int_list,
    "max_total_shapelets": _optional_int, "single_shapelet": _bool, "fitness_C": float,
    "fitness_max_iter": int, "fitness_tol": float, "fitness_metric": str,
    "fitness_cv_folds": int,
}
assert set(_GA_TYPES) == {f.name for f in dataclasses.fields(GaConfig)}

_RUN_TYPES = {
    "train": str, "test": str, "delimiter": _delimiter, "label_position": str,
    "max_len_grid": _bool, "out_dir": str, "threads": int, "fold_seed": int,
}
CONFIG_TYPES = {**_GA_TYPES, **_RUN_TYPES}
_BOOLEAN_KEYS = ("single_shapelet", "max_len_grid")


def convert(key: str, raw: str):
    try:
        return CONFIG_TYPES[key](raw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad value for {key}: {exc}") from None


def read_config(path) -> dict:
    """Parse a flat ``key = value`` file; ``#`` starts a comment line."""
    parser = configparser.ConfigParser(interpolation=None, strict=True)
    parser.optionxform = str
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    try:
        parser.read_string("[run]\n" + text, source=str(path))
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from None
    if len(parser.sections()) != 1:
        raise ConfigError(f"{path}: sections are not supported")
    values = {}
    for key, raw in parser.items("run"):
        if key not in CONFIG_TYPES:
            raise ConfigError(f"{path}: unknown key {key!r}")
        values[key] = convert(key, raw)
    return values


def settings(args) -> dict:
    values = read_config(args.config) if getattr(args, "config", None) else {}
    for key in CONFIG_TYPES:
        raw = getattr(args, key, None)
        if raw is not None:
            values[key] = convert(key, raw)
    values.setdefault("delimiter", ",")
    values.setdefault("label_position", "first")
    values.setdefault("threads", 1)
    values.setdefault("fold_seed", 0)
    values.setdefault("max_len_grid", False)
    if values["threads"] < 1:
        raise ConfigError("threads must be >= 1")
    return values


def ga_config(values: dict) -> GaConfig:
    if "seed" not in values:
        raise ConfigError("a seed is required (--seed or 'seed = ...' in the config)")
    cfg = GaConfig(**{k: v for k, v in values.items() if k in _GA_TYPES})
    cfg.validate()
    return cfg


def _require(values: dict, key: str):
    if not values.get(key):
        raise ConfigError(f"missing required setting {key!r}")
    return values[key]


def _load(path, values) -> Dataset:
    try:
        return load_delimited(path, values["delimiter"], values["label_position"])
    except FileNotFoundError:
        raise DataError(f"no such file: {path}") from None
    except ValueError as exc:
        if isinstance(exc, ShapeletError):
            raise
        raise ConfigError(str(exc)) from None


def _out_dir(values: dict, default: str = ".") -> Path:
    out = Path(values.get("out_dir") or default)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _now() -> str:
    return datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds")


def _check_elite(shapelets, max_len: int) -> None:
    if not shapelets:
        raise InvariantViolation("the search returned an empty shapelet set")
    for s in shapelets:
        if not MIN_LENGTH <= len(s) <= max_len or not np.all(np.isfinite(s)):
            raise InvariantViolation(f"elite shapelet of length {len(s)} breaks the length bounds")


def _discovery_metadata(cfg: GaConfig, dataset: Dataset, best, extra: dict) -> dict:
    return {
        "config": cfg.to_dict(),
        "seed": cfg.seed,
        "dataset_sha256": dataset.fingerprint(),
        "classes": [c.item() if isinstance(c, np.generic) else c for c in dataset.classes],
        "n_shapelets": len(best.shapelets),
        "fitness": {"error": float(best.fitness.error), "complexity": int(best.fitness.complexity)},
        "version": __version__,
        **extra,
    }


# --------------------------------------------------------------------------
# commands

def cmd_fit(args) -> int:
    values = settings(args)
    cfg = ga_config(values)
    train = _load(_require(values, "train"), values)
    out = _out_dir(values)
    threads = values["threads"]
    started = time.perf_counter()
    extra = {}
    if values["max_len_grid"]:
        max_len, best, log, scores = search_max_len(train, cfg, threads, values["fold_seed"])
        extra["max_len_grid"] = {str(k): v for k, v in scores.items()}
        extra["fold_seed"] = values["fold_seed"]
    else:
        best, log = evolve(train, cfg, n_jobs=threads)
        max_len = cfg.resolve(train.min_length).max_len
    cfg = dataclasses.replace(cfg, max_len=max_len).resolve(train.min_length)
    _check_elite(best.shapelets, cfg.max_len)
    elapsed = time.perf_counter() - started

    write_shapelets(out / "shapelets.json", best.shapelets,
                    _discovery_metadata(cfg, train, best, extra))
    log.to_csv(out / "runlog.csv")
    model = SoftmaxRegression(C=cfg.fitness_C, max_iter=cfg.fitness_max_iter, tol=cfg.fitness_tol,
                              n_classes=train.n_classes)
    model.fit(distance_matrix(best.shapelets, train.series, n_jobs=threads), train.labels)
    with open(out / "model.json", "w") as fh:
        json.dump({"schema": "model/1", **model.to_dict()}, fh, indent=2, sort_keys=True)
        fh.write("\n")
    write_manifest(out, {"command": "fit", "seed": cfg.seed, "threads": threads,
                         "max_len": cfg.max_len, "generations": len(log),
                         "wall_time_s": f"{elapsed:.3f}", "created": _now(),
                         "train": values["train"], "version": __version__},
                   ["shapelets.json", "runlog.csv", "model.json"])
    print(f"{len(best.shapelets)} shapelets, max_len={cfg.max_len}, "
          f"error={best.fitness.error:.6f}, {len(log)} generations, {elapsed:.1f}s -> {out}")
    return 0


def cmd_transform(args) -> int:
    values = settings(args)
    shapelets, _ = read_shapelets(args.shapelets)
    data = _load(args.data, values)
    out = _out_dir(values)
    D = distance_matrix(shapelets, data.series, n_jobs=values["threads"])
    write_distances(out / "distances.csv", D)
    write_manifest(out, {"command": "transform", "shapelets": args.shapelets, "data": args.data,
                         "rows": D.shape[0], "columns": D.shape[1], "created": _now()},
                   ["distances.csv"])
    print(f"{D.shape[0]}x{D.shape[1]} distances -> {out / 'distances.csv'}")
    return 0


def _metrics(shapelets, train: Dataset, test: Dataset, fold_seed: int) -> dict:
    result = tune_and_evaluate(shapelets, train, test, fold_seed=fold_seed)
    labels = np.arange(train.n_classes)
    precision, recall, _, support = precision_recall_fscore_support(
        test.labels, result.predictions, labels=labels, zero_division=0)
    per_class = {str(train.classes[c]): {"precision": float(precision[c]), "recall": float(recall[c]),
                                         "support": int(support[c])} for c in labels}
    return {"accuracy": result.accuracy, "n_test": len(test), "penalty": result.penalty,
            "C": result.C, "cv_log_loss": result.cv_loss, "fold_seed": fold_seed,
            "n_shapelets": len(shapelets), "per_class": per_class}


def cmd_evaluate(args) -> int:
    values = settings(args)
    shapelets, _ = read_shapelets(args.shapelets)
    train = _load(_require(values, "train"), values)
    test = align_labels(_load(_require(values, "test"), values), train)
    out = _out_dir(values)
    metrics = _metrics(shapelets, train, test, values["fold_seed"])
    write_metrics(out / "metrics.json", metrics)
    write_manifest(out, {"command": "evaluate", "shapelets": args.shapelets, "created": _now()},
                   ["metrics.json"])
    print(f"accuracy={metrics['accuracy']:.4f} penalty={metrics['penalty']} C={metrics['C']} "
          f"n_shapelets={metrics['n_shapelets']}")
    return 0


def cmd_baseline(args) -> int:
    values = settings(args)
    train = _load(_require(values, "train"), values)
    out = _out_dir(values)
    lengths = None
    if args.min_length is not None or args.max_length is not None:
        lengths = range(args.min_length or MIN_LENGTH, (args.max_length or train.min_length) + 1)
    if args.k == 1:
        shapelets = [brute_force_best_shapelet(train, lengths).shapelet]
    else:
        shapelets = top_k_independent(train, args.k, lengths)
    D = distance_matrix(shapelets, train.series)
    summary = []
    for j in range(len(shapelets)):
        threshold, gain = information_gain_split(D[:, j], train.labels)
        summary.append({"gain": gain, "threshold": threshold,
                        "train_errors": split_errors(D[:, j], train.labels, threshold)})
    write_shapelets(out / "shapelets.json", shapelets,
                    {"method": "top_k_independent", "k": args.k, "splits": summary,
                     "dataset_sha256": train.fingerprint(), "version": __version__})
    files = ["shapelets.json"]
    if values.get("test"):
        test = align_labels(_load(values["test"], values), train)
        write_metrics(out / "metrics.json", _metrics(shapelets, train, test, values["fold_seed"]))
        files.append("metrics.json")
    write_manifest(out, {"command": "baseline", "k": args.k, "created": _now()}, files)
    for row in summary:
        print(f"gain={row['gain']:.6f} threshold={row['threshold']:.6f} "
              f"train_errors={row['train_errors']}")
    return 0


STUDIES = {
    "initialization": ("initializations", 75,
                       {"init1": (1,), "init2": (2,), "all": (1, 2)}),
    "crossover": ("crossovers", 200,
                  {"cx1": (1,), "cx2": (2,), "cx3": (3,), "all": (1, 2, 3)}),
    "mutation": ("mutations", 75,
                 {"mut1": (1,), "mut2": (2,), "mut3": (3,), "all": (1, 2, 3), "no_mut3": (1, 2)}),
}


def run_study(dataset: Dataset, cfg: GaConfig, study: str, n_jobs: int = 1) -> dict:
    """One run per operator subset, all with ``cfg.seed``; returns ``{label: RunLog}``."""
    field, _, subsets = STUDIES[study]
    logs = {}
    for label, ops in subsets.items():
        _, log = evolve(dataset, dataclasses.replace(cfg, **{field: ops}), n_jobs=n_jobs)
        logs[label] = log
    return logs


def cmd_benchmark_operators(args) -> int:
    values = settings(args)
    _, generations, _ = STUDIES[args.study]
    values.setdefault("population_size", 25)
    values.setdefault("max_generations", generations)
    # patience defaults to the whole run so every curve has the same length
    values.setdefault("patience", values["max_generations"])
    cfg = ga_config(values)
    train = _load(_require(values, "train"), values)
    out = _out_dir(values)
    started = time.perf_counter()
    logs = run_study(train, cfg, args.study, values["threads"])
    files, rows = [], []
    for label, log in logs.items():
        name = f"runlog_{args.study}_{label}.csv"
        log.to_csv(out / name)
        files.append(name)
        last = log.records[-1]
        rows.append(f"{label},{len(log)},{last.mean_error!r},{last.best_error!r},{last.mean_k!r}")
    summary = f"summary_{args.study}.csv"
    (out / summary).write_text("# schema=benchmark-summary/1\n"
                               "config,generations,final_mean_error,final_best_error,final_mean_k\n"
                               + "\n".join(rows) + "\n")
    files.append(summary)
    write_manifest(out, {"command": "benchmark-operators", "study": args.study, "seed": cfg.seed,
                         "population_size": cfg.population_size,
                         "max_generations": cfg.max_generations,
                         "wall_time_s": f"{time.perf_counter() - started:.3f}", "created": _now()},
                   files)
    for row in rows:
        print(row)
    return 0


STABILITY_CAP = 10


def cmd_stability(args) -> int:
    values = settings(args)
    values.setdefault("seed", args.seed_a)
    cap = values.get("max_total_shapelets")
    values["max_total_shapelets"] = STABILITY_CAP if cap is None else min(cap, STABILITY_CAP)
    cfg = ga_config(values)
    train = _load(_require(values, "train"), values)
    out = _out_dir(values)
    elites = []
    for tag, seed in (("a", args.seed_a), ("b", args.seed_b)):
        run_cfg = dataclasses.replace(cfg, seed=seed)
        best, _ = evolve(train, run_cfg, n_jobs=values["threads"])
        _check_elite(best.shapelets, run_cfg.resolve(train.min_length).max_len)
        write_shapelets(out / f"shapelets_{tag}.json", best.shapelets,
                        _discovery_metadata(run_cfg.resolve(train.min_length), train, best, {}))
        elites.append(best.shapelets)
    dtw = pairwise_dtw(*elites)
    write_matrix_csv(out / "dtw.csv", dtw, DTW_SCHEMA, "b")
    write_manifest(out, {"command": "stability", "seed_a": args.seed_a, "seed_b": args.seed_b,
                         "cap": values["max_total_shapelets"], "created": _now()},
                   ["shapelets_a.json", "shapelets_b.json", "dtw.csv"])
    print(f"{dtw.shape[0]}x{dtw.shape[1]} DTW matrix -> {out / 'dtw.csv'}")
    return 0


def cmd_synth(args) -> int:
    out = Path(args.out_dir or ".")
    out.mkdir(parents=True, exist_ok=True)
    if args.which != "quad" and args.seed is None:
        raise ConfigError(f"synth {args.which} needs --seed")
    seed = None if args.seed is None else int(args.seed)
    if args.which == "threeclass":
        parts = dict(zip(("TRAIN", "TEST"), gen_imbalanced_threeclass(np.random.default_rng(seed))))
    elif args.which == "noisy":
        parts = dict(zip(("TRAIN", "TEST"), gen_twoclass_noisy(np.random.default_rng(seed))))
    else:
        parts = {"": gen_twoclass_quad()}
    files = []
    for suffix, dataset in parts.items():
        name = f"{args.which}_{suffix}.txt" if suffix else f"{args.which}.txt"
        save_delimited(dataset, out / name)
        files.append(name)
    write_manifest(out, {"command": "synth", "which": args.which, "seed": seed,
                         "format": "ucr-delimited/1", "created": _now()}, files)
    print(" ".join(str(out / f) for f in files))
    return 0


# --------------------------------------------------------------------------
# argument parsing

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _add_settings(p, keys) -> None:
    p.add_argument("--config", help="flat key = value settings file")
    for key in keys:
        flag = "--" + key.replace("_", "-")
        if key in _BOOLEAN_KEYS:
            p.add_argument(flag, dest=key, action="store_const", const="true", default=None)
        else:
            p.add_argument(flag, dest=key, default=None, metavar=key.upper())


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="shapelet-ga", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    io_keys = ["delimiter", "label_position", "out_dir", "threads"]
    run_keys = list(_GA_TYPES) + ["train", "max_len_grid", "fold_seed"] + io_keys

    p = sub.add_parser("fit", help="discover shapelets on a training file")
    _add_settings(p, run_keys)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("transform", help="write the distance matrix of a dataset")
    p.add_argument("--shapelets", required=True)
    p.add_argument("--data", required=True)
    _add_settings(p, io_keys)
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("evaluate", help="tuned logistic regression on shapelet distances")
    p.add_argument("--shapelets", required=True)
    _add_settings(p, ["train", "test", "fold_seed"] + io_keys)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("baseline", help="best shapelets scored one at a time by information gain")
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--min-length", type=int, help="shortest candidate length (default 4)")
    p.add_argument("--max-length", type=int, help="longest candidate length (default M)")
    _add_settings(p, ["train", "test", "fold_seed"] + io_keys)
    p.set_defaults(func=cmd_baseline)

    p = sub.add_parser("benchmark-operators", help="fitness curves for operator subsets")
    p.add_argument("--study", choices=sorted(STUDIES), required=True)
    _add_settings(p, run_keys)
    p.set_defaults(func=cmd_benchmark_operators)

    p = sub.add_parser("stability", help="DTW between the elites of two seeds")
    p.add_argument("--seed-a", type=int, required=True)
    p.add_argument("--seed-b", type=int, required=True)
    _add_settings(p, run_keys)
    p.set_defaults(func=cmd_stability)

    p = sub.add_parser("synth", help="write a synthetic dataset")
    p.add_argument("--which", choices=["threeclass", "quad", "noisy"], required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--out-dir", dest="out_dir")
    p.set_defaults(func=cmd_synth)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ShapeletError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return DataError.exit_code
    except Exception:
        traceback.print_exc()
        return InvariantViolation.exit_code


if __name__ == "__main__":
    sys.exit(main())
