"""Reading and writing run artifacts.

Every CSV starts with a ``# schema=<name>/<version>`` line; JSON files carry
a top-level ``schema`` key. Nothing here records wall-clock time except the
manifest, so the other files are byte-identical across repeated runs.
"""
from __future__ import annotations

import csv
import hashlib
import io
import json
from pathlib import Path

import numpy as np

from .exceptions import EmptyFile, ParseError

SHAPELETS_SCHEMA = "shapelets/1"
DISTANCES_SCHEMA = "distances/1"
METRICS_SCHEMA = "metrics/1"
MANIFEST_SCHEMA = "manifest/1"
DTW_SCHEMA = "dtw/1"


def _dump(obj, path) -> None:
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def write_shapelets(path, shapelets, metadata: dict) -> None:
    _dump({"schema": SHAPELETS_SCHEMA,
           "shapelets": [[float(v) for v in s] for s in shapelets],
           "metadata": metadata}, path)


def read_shapelets(path) -> tuple[list[np.ndarray], dict]:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: not valid JSON ({exc})") from None
    if not isinstance(doc, dict) or doc.get("schema") != SHAPELETS_SCHEMA:
        raise ParseError(f"{path}: expected schema {SHAPELETS_SCHEMA}")
    raw = doc.get("shapelets")
    if not raw:
        raise EmptyFile(f"{path} holds no shapelets")
    try:
        shapelets = [np.asarray(s, dtype=float) for s in raw]
    except (TypeError, ValueError) as exc:
        raise ParseError(f"{path}: {exc}") from None
    if any(s.ndim != 1 or len(s) == 0 or not np.all(np.isfinite(s)) for s in shapelets):
        raise ParseError(f"{path}: every shapelet must be a non-empty list of finite numbers")
    return shapelets, doc.get("metadata", {})


def _csv(schema: str, header, rows) -> str:
    buf = io.StringIO()
    buf.write(f"# schema={schema}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def write_matrix_csv(path, matrix, schema: str, prefix: str) -> None:
    matrix = np.asarray(matrix, dtype=float)
    header = [f"{prefix}_{j}" for j in range(matrix.shape[1])]
    Path(path).write_text(_csv(schema, header, [[repr(float(v)) for v in row] for row in matrix]))


def write_distances(path, D) -> None:
    write_matrix_csv(path, D, DISTANCES_SCHEMA, "shapelet")


def read_matrix_csv(path) -> np.ndarray:
    lines = [line for line in Path(path).read_text().splitlines() if not line.startswith("#")]
    rows = list(csv.reader(lines))[1:]
    return np.array([[float(v) for v in row] for row in rows])


def write_metrics(path, metrics: dict) -> None:
    _dump({"schema": METRICS_SCHEMA, **metrics}, path)


def sha256_file(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def write_manifest(out_dir, entries: dict, files) -> Path:
    """``key=value`` lines followed by one ``file=<name> sha256=<hex>`` line per artifact."""
    out_dir = Path(out_dir)
    lines = [f"schema={MANIFEST_SCHEMA}"]
    lines += [f"{key}={value}" for key, value in entries.items()]
    for name in files:
        lines.append(f"file={name} sha256={sha256_file(out_dir / name)}")
    path = out_dir / "manifest.txt"
    path.write_text("\n".join(lines) + "\n")
    return path
