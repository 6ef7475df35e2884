"""Labelled feature-vector datasets: ingestion, outlier removal, splitting."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from ..labels import EMOTIONS, Emotion

# FER-2013 integer codes happen to follow the canonical emotion order
FER_LABELS: dict[int, Emotion] = {i: e for i, e in enumerate(EMOTIONS)}

FORMATS = ("fer-csv", "generic-csv")


class DatasetError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


@dataclass(frozen=True)
class LabeledSample:
    features: tuple[float, ...]
    label: Emotion


@dataclass(frozen=True)
class Dataset:
    X: np.ndarray
    y: np.ndarray
    provenance: str = ""

    def __post_init__(self):
        X = np.asarray(self.X, dtype=np.float64)
        y = np.asarray(self.y, dtype=np.intp)
        if X.ndim != 2:
            raise DatasetError("features must be a 2-D array")
        if y.shape != (X.shape[0],):
            raise DatasetError("one label per sample required")
        if X.shape[0] and X.shape[1] < 1:
            raise DatasetError("feature dimension must be at least 1")
        if not np.isfinite(X).all():
            raise DatasetError("features must be finite")
        if y.size and (y.min() < 0 or y.max() >= len(EMOTIONS)):
            raise DatasetError("labels must be emotion indices 0-6")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)

    @classmethod
    def from_samples(cls, samples: Iterable[LabeledSample], provenance: str = "") -> "Dataset":
        samples = list(samples)
        if not samples:
            return cls(np.empty((0, 0)), np.empty(0, dtype=np.intp), provenance)
        dims = {len(s.features) for s in samples}
        if len(dims) != 1:
            raise DatasetError("samples must share one feature dimension")
        X = np.array([s.features for s in samples], dtype=np.float64)
        y = np.array([s.label.index for s in samples], dtype=np.intp)
        return cls(X, y, provenance)

    def __len__(self) -> int:
        return self.X.shape[0]

    @property
    def dimension(self) -> int:
        return self.X.shape[1]

    @property
    def samples(self) -> list[LabeledSample]:
        return [LabeledSample(tuple(map(float, x)), EMOTIONS[int(c)]) for x, c in zip(self.X, self.y)]

    def subset(self, idx) -> "Dataset":
        idx = np.asarray(idx, dtype=np.intp)
        return Dataset(self.X[idx], self.y[idx], self.provenance)

    def class_counts(self) -> np.ndarray:
        return np.bincount(self.y, minlength=len(EMOTIONS))


def _parse_float(text: str, line: int) -> float:
    try:
        v = float(text)
    except ValueError:
        raise DatasetError(f"not a number: {text!r}", line) from None
    if not math.isfinite(v):
        raise DatasetError(f"non-finite feature value {text!r}", line)
    return v


def ingest_dataset(source: bytes | str, format: str = "generic-csv", provenance: str = "") -> Dataset:
    """Read a ``fer-csv`` or ``generic-csv`` document into a Dataset.

    fer-csv: header ``emotion,pixels,Usage``, integer emotion code, pixels as
    one space-separated field. generic-csv: ``label,f1,...,fD`` with textual
    labels and an optional header row starting with ``label``.
    """
    if format not in FORMATS:
        raise DatasetError(f"unknown dataset format {format!r}")
    if isinstance(source, bytes):
        source = source.decode("utf-8")
    rows = [(n, r) for n, r in enumerate(csv.reader(io.StringIO(source)), start=1) if r]
    if format == "fer-csv":
        if rows and rows[0][1] and rows[0][1][0].strip().lower() == "emotion":
            rows = rows[1:]
    elif rows and rows[0][1][0].strip().lower() == "label":
        rows = rows[1:]
    if not rows:
        raise DatasetError("empty dataset")

    X: list[list[float]] = []
    y: list[int] = []
    dim = None
    for line, row in rows:
        if format == "fer-csv":
            if len(row) < 2:
                raise DatasetError("expected emotion,pixels[,Usage]", line)
            try:
                code = int(row[0])
            except ValueError:
                raise DatasetError(f"emotion code must be an integer, got {row[0]!r}", line) from None
            if code not in FER_LABELS:
                raise DatasetError(f"unknown label code {code}", line)
            label = FER_LABELS[code]
            feats = [_parse_float(t, line) for t in row[1].split()]
        else:
            try:
                label = Emotion.parse(row[0])
            except ValueError:
                raise DatasetError(f"unknown label {row[0]!r}", line) from None
            feats = [_parse_float(t, line) for t in row[1:]]
        if not feats:
            raise DatasetError("row has no features", line)
        if dim is None:
            dim = len(feats)
        elif len(feats) != dim:
            raise DatasetError(f"ragged row: {len(feats)} features, expected {dim}", line)
        X.append(feats)
        y.append(label.index)
    return Dataset(np.array(X, dtype=np.float64), np.array(y, dtype=np.intp), provenance or format)


def write_generic_csv(ds: Dataset) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["label"] + [f"f{j + 1}" for j in range(ds.dimension)])
    for x, c in zip(ds.X, ds.y):
        w.writerow([EMOTIONS[int(c)].value] + [repr(float(v)) for v in x])
    return buf.getvalue()


def read_feature_rows(source: bytes | str) -> np.ndarray:
    """Unlabelled feature vectors, one per line (row numbers start at 0)."""
    if isinstance(source, bytes):
        source = source.decode("utf-8")
    rows = [r for r in csv.reader(io.StringIO(source)) if r]
    out = []
    for n, r in enumerate(rows, start=1):
        out.append([_parse_float(t, n) for t in r])
    if out and len({len(r) for r in out}) != 1:
        raise DatasetError("ragged feature file")
    return np.array(out, dtype=np.float64)


def zscores(X: np.ndarray) -> np.ndarray:
    mean = X.mean(axis=0)
    std = X.std(axis=0)
    z = np.zeros_like(X)
    nz = std > 0
    z[:, nz] = (X[:, nz] - mean[nz]) / std[nz]
    return z


def remove_outliers(ds: Dataset, z_max: float = 4.0) -> Dataset:
    """Drop samples having any feature with ``|z| > z_max`` (single pass).

    z uses the population standard deviation of each feature; a constant
    feature never triggers removal.
    """
    if len(ds) == 0:
        raise DatasetError("cannot remove outliers from an empty dataset")
    if not z_max > 0:
        raise ValueError("z_max must be positive")
    keep = (np.abs(zscores(ds.X)) <= z_max).all(axis=1)
    return ds.subset(np.flatnonzero(keep))


def _allocate(class_counts: np.ndarray, n_train: int) -> np.ndarray:
    n = class_counts.sum()
    quota = class_counts * (n_train / n)
    take = np.floor(quota).astype(np.int64)
    take = np.minimum(take, class_counts)
    rest = n_train - int(take.sum())
    order = sorted(range(len(class_counts)), key=lambda c: (-(quota[c] - take[c]), c))
    while rest > 0:
        for c in order:
            if rest == 0:
                break
            if take[c] < class_counts[c]:
                take[c] += 1
                rest -= 1
    return take


def split(ds: Dataset, train_fraction: float = 0.8, seed: int = 0) -> tuple[Dataset, Dataset]:
    """Seeded stratified train/test split.

    The train size is ``round(n * train_fraction)``, clamped so both sides
    are nonempty, and is spread over classes by largest remainder.
    """
    if not 0.0 < train_fraction < 1.0:
        raise ValueError("train_fraction must be in (0,1)")
    n = len(ds)
    if n < 2:
        raise DatasetError("need at least two samples to split")
    n_train = min(n - 1, max(1, math.floor(n * train_fraction + 0.5)))
    counts = ds.class_counts()
    take = _allocate(counts, n_train)
    rng = np.random.default_rng(seed)
    train_idx: list[np.ndarray] = []
    test_idx: list[np.ndarray] = []
    for c in range(len(EMOTIONS)):
        members = np.flatnonzero(ds.y == c)
        if members.size == 0:
            continue
        perm = rng.permutation(members)
        train_idx.append(perm[:take[c]])
        test_idx.append(perm[take[c]:])
    tr = np.sort(np.concatenate(train_idx))
    te = np.sort(np.concatenate(test_idx))
    return ds.subset(tr), ds.subset(te)


def gaussian_blobs(n_per_class: int = 100, dimension: int = 16, n_classes: int = 7,
                   spread: float = 1.0, separation: float = 1.0, seed: int = 0) -> Dataset:
    """Synthetic stand-in for facial feature data: one Gaussian blob per emotion."""
    if not 1 <= n_classes <= len(EMOTIONS):
        raise ValueError("n_classes must be between 1 and 7")
    rng = np.random.default_rng(seed)
    centers = rng.normal(0.0, separation, size=(n_classes, dimension))
    X = np.concatenate([rng.normal(centers[c], spread, size=(n_per_class, dimension))
                        for c in range(n_classes)])
    y = np.repeat(np.arange(n_classes), n_per_class)
    return Dataset(X, y, f"gaussian-blobs(n={n_per_class},D={dimension},seed={seed})")
