"""Dataset loading, min-max normalization, ball-set and report files."""

from __future__ import annotations

import csv
import json
import os
import tempfile
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import Dataset, GranularBall
from .granulation import GranulationConfig, GranulationResult

BALL_FORMAT = "gbgpp.balls"
BALL_FORMAT_VERSION = 1


class DatasetFormatError(ValueError):
    """A dataset file could not be parsed; the message names the offending line."""


def _as_number(text: str) -> float | None:
    try:
        return float(text)
    except ValueError:
        return None


def _encode_labels(raw: list[str]) -> tuple[np.ndarray, list[str]]:
    numeric = [_as_number(r) for r in raw]
    if all(v is not None for v in numeric):
        values = sorted(set(numeric))
        names = [str(int(v)) if float(v).is_integer() else repr(v) for v in values]
        lookup = {v: i for i, v in enumerate(values)}
        return np.array([lookup[v] for v in numeric], dtype=np.int64), names
    names = sorted(set(raw))
    lookup = {v: i for i, v in enumerate(names)}
    return np.array([lookup[v] for v in raw], dtype=np.int64), names


def _read_csv(path: Path, label_column, header: bool | None) -> tuple[np.ndarray, list[str]]:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [(i + 1, r) for i, r in enumerate(csv.reader(fh)) if any(c.strip() for c in r)]
    if not rows:
        raise DatasetFormatError(f"{path}: empty file")
    first_line, first = rows[0]
    if header is None:
        # a header row is one with any non-numeric cell outside the label column
        col = label_column if isinstance(label_column, int) else None
        cells = [c for j, c in enumerate(first) if col is None or j != col % len(first)]
        header = isinstance(label_column, str) or any(_as_number(c) is None for c in cells)
    names = [c.strip() for c in first] if header else None
    body = rows[1:] if header else rows
    if not body:
        raise DatasetFormatError(f"{path}: no data rows")
    width = len(first)
    if isinstance(label_column, str):
        if names is None or label_column not in names:
            raise DatasetFormatError(f"{path}: label column {label_column!r} not found in header")
        col = names.index(label_column)
    else:
        if not -width <= label_column < width:
            raise DatasetFormatError(f"{path}: label column {label_column} out of range for {width} columns")
        col = label_column % width
    X = np.empty((len(body), width - 1), dtype=np.float64)
    labels = []
    for r, (line, row) in enumerate(body):
        if len(row) != width:
            raise DatasetFormatError(f"{path}:{line}: expected {width} fields, found {len(row)}")
        feats = row[:col] + row[col + 1:]
        for j, cell in enumerate(feats):
            v = _as_number(cell.strip())
            if v is None:
                raise DatasetFormatError(f"{path}:{line}: non-numeric feature value {cell!r}")
            X[r, j] = v
        labels.append(row[col].strip())
    return X, labels


def _read_libsvm(path: Path, q: int | None) -> tuple[np.ndarray, list[str]]:
    entries = []
    width = 0
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            text = line.split("#", 1)[0].strip()
            if not text:
                continue
            label, *pairs = text.split()
            feats = {}
            for pair in pairs:
                idx, sep, val = pair.partition(":")
                if not sep or not idx.isdigit() or int(idx) < 1 or _as_number(val) is None:
                    raise DatasetFormatError(f"{path}:{line_no}: malformed feature {pair!r}")
                feats[int(idx)] = float(val)
            if feats:
                width = max(width, max(feats))
            entries.append((line_no, label, feats))
    if not entries:
        raise DatasetFormatError(f"{path}: empty file")
    if q is not None:
        if width > q:
            raise DatasetFormatError(f"{path}: feature index {width} exceeds declared q={q}")
        width = q
    X = np.zeros((len(entries), width), dtype=np.float64)
    for r, (_, _, feats) in enumerate(entries):
        for idx, val in feats.items():
            X[r, idx - 1] = val
    return X, [label for _, label, _ in entries]


def load_dataset(
    path,
    format: str | None = None,
    label_column: int | str = -1,
    header: bool | None = None,
    q: int | None = None,
    name: str | None = None,
) -> Dataset:
    """Read a CSV or LIBSVM file into a :class:`Dataset`.

    Parameters
    ----------
    path : str or Path
    format : {"csv", "libsvm"}, optional
        Guessed from the extension when omitted (``.csv`` is CSV, anything
        else LIBSVM).
    label_column : int or str
        CSV only. Column index (negative counts from the end) or header name.
    header : bool, optional
        CSV only. ``None`` treats the first row as a header when it holds a
        non-numeric feature cell.
    q : int, optional
        LIBSVM only. Declared dimensionality; inferred from the largest index
        otherwise.

    Labels are mapped to dense ids ``0..C-1`` in sorted order (numeric order
    when every label parses as a number); ``Dataset.label_names`` keeps the
    mapping. Row order is preserved and ``Dataset.index`` is the 0-based row
    number among data rows.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(path)
    fmt = (format or ("csv" if path.suffix.lower() == ".csv" else "libsvm")).lower()
    if fmt == "csv":
        X, raw = _read_csv(path, label_column, header)
    elif fmt == "libsvm":
        X, raw = _read_libsvm(path, q)
    else:
        raise ValueError(f"unknown format {format!r}")
    if not np.all(np.isfinite(X)):
        raise DatasetFormatError(f"{path}: non-finite feature value")
    y, names = _encode_labels(raw)
    return Dataset(X, y, label_names=names, name=name or path.stem)


@dataclass(frozen=True)
class NormalizationParams:
    minimum: np.ndarray
    maximum: np.ndarray

    @property
    def constant(self) -> np.ndarray:
        return self.maximum == self.minimum

    def apply(self, dataset: Dataset) -> Dataset:
        if dataset.normalized:
            raise ValueError(f"dataset {dataset.name!r} is already normalized")
        span = np.where(self.constant, 1.0, self.maximum - self.minimum)
        X = (dataset.X - self.minimum) / span
        X[:, self.constant] = 0.0
        return Dataset(X, dataset.y, dataset.index, dataset.label_names, dataset.name, normalized=True)

    def to_dict(self) -> dict:
        return {"min": self.minimum.tolist(), "max": self.maximum.tolist()}


def fit_minmax(train: Dataset) -> NormalizationParams:
    if train.n == 0:
        raise ValueError("cannot fit normalization on an empty dataset")
    return NormalizationParams(train.X.min(axis=0), train.X.max(axis=0))


def fit_apply_minmax(train: Dataset, others=()) -> tuple[Dataset, list[Dataset], NormalizationParams]:
    """Scale features to [0, 1] with the training min/max; constant features map to 0.

    ``others`` (e.g. the test fold) reuse the training parameters, so their
    values may fall outside [0, 1].
    """
    params = fit_minmax(train)
    return params.apply(train), [params.apply(o) for o in others], params


# ---------------------------------------------------------------------------
# ball-set files


def _atomic_write(path: Path, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _ball_record(b: GranularBall) -> dict:
    return {
        "type": "ball",
        "ball_id": int(b.ball_id),
        "generation": int(b.generation),
        "label": int(b.label),
        "purity": float(b.purity),
        "radius": float(b.radius),
        "size": b.size,
        "contained": bool(b.contained),
        "center": [float(v) for v in b.center],
        "members": [int(m) for m in b.members],
    }


def dumps_balls(result: GranulationResult) -> str:
    header = {
        "type": "header",
        "format": BALL_FORMAT,
        "version": BALL_FORMAT_VERSION,
        "n_samples": int(result.n_samples),
        "n_balls": len(result.balls),
        "iterations": int(result.iterations),
        "distance_evaluations": int(result.distance_evaluations),
        "wall_time": float(result.wall_time),
        "config": result.config.to_dict(),
        "outliers": [int(o) for o in result.outliers],
    }
    lines = [json.dumps(header)] + [json.dumps(_ball_record(b)) for b in result.balls]
    return "\n".join(lines) + "\n"


def export_balls(result: GranulationResult, path) -> Path:
    """Write a ball set as JSON lines: one header record, then one record per ball.

    Floats are written with ``repr`` precision, so :func:`import_balls`
    restores every center and radius bit for bit.
    """
    path = Path(path)
    _atomic_write(path, dumps_balls(result))
    return path


def import_balls(path) -> GranulationResult:
    with open(path, encoding="utf-8") as fh:
        records = [json.loads(line) for line in fh if line.strip()]
    if not records or records[0].get("type") != "header" or records[0].get("format") != BALL_FORMAT:
        raise ValueError(f"{path}: not a ball-set file")
    head = records[0]
    if head["version"] != BALL_FORMAT_VERSION:
        raise ValueError(f"{path}: unsupported version {head['version']}")
    balls = [
        GranularBall(
            center=np.array(r["center"], dtype=np.float64),
            radius=r["radius"],
            members=np.array(r["members"], dtype=np.int64),
            label=r["label"],
            purity=r["purity"],
            generation=r["generation"],
            ball_id=r["ball_id"],
            contained=r["contained"],
        )
        for r in records[1:]
    ]
    if len(balls) != head["n_balls"]:
        raise ValueError(f"{path}: header announces {head['n_balls']} balls, found {len(balls)}")
    return GranulationResult(
        balls=balls,
        outliers=np.array(head["outliers"], dtype=np.int64),
        iterations=head["iterations"],
        distance_evaluations=head["distance_evaluations"],
        wall_time=head["wall_time"],
        config=GranulationConfig(**head["config"]),
        n_samples=head["n_samples"],
    )


def write_json(obj, path) -> Path:
    path = Path(path)
    _atomic_write(path, json.dumps(obj, indent=2, sort_keys=True, default=_jsonable) + "\n")
    return path


def _jsonable(o):
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.floating):
        return float(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, Path):
        return str(o)
    raise TypeError(f"not JSON serializable: {type(o).__name__}")
