"""Loading, validation, standardization and stratified folds for binary tabular data."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .seeding import rng_for


class DatasetError(ValueError):
    """Raised for malformed or unsupported input data."""


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Dataset:
    """Immutable feature matrix with labels in {-1, +1}.

    ``class_names`` records the original label strings mapped to -1 and +1.
    """

    features: np.ndarray
    labels: np.ndarray
    feature_names: tuple[str, ...]
    class_names: tuple[str, str] = ("-1", "1")

    def __post_init__(self):
        x = np.asarray(self.features, dtype=np.float64)
        y = np.asarray(self.labels)
        if x.ndim != 2:
            raise DatasetError("features must be a 2-d matrix")
        n, d = x.shape
        if n < 2 or d < 1:
            raise DatasetError(f"need at least 2 samples and 1 feature, got {n}x{d}")
        if not np.all(np.isfinite(x)):
            raise DatasetError("features contain NaN or infinite values")
        if y.shape != (n,):
            raise DatasetError(f"expected {n} labels, got shape {y.shape}")
        if not np.all((y == 1) | (y == -1)):
            raise DatasetError("labels must be -1 or +1")
        if not (np.any(y == 1) and np.any(y == -1)):
            raise DatasetError("both classes must be present")
        names = tuple(str(s) for s in self.feature_names)
        if len(names) != d:
            raise DatasetError(f"{len(names)} feature names for {d} columns")
        if len(set(names)) != d:
            dupes = sorted({s for s in names if names.count(s) > 1})
            raise DatasetError(f"duplicate feature names: {dupes}")
        object.__setattr__(self, "features", _frozen(x))
        object.__setattr__(self, "labels", _frozen(y.astype(np.int64)))
        object.__setattr__(self, "feature_names", names)
        object.__setattr__(self, "class_names", tuple(self.class_names))

    @property
    def n_samples(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    def class_counts(self) -> tuple[int, int]:
        """(count of -1, count of +1)."""
        pos = int(np.count_nonzero(self.labels == 1))
        return self.n_samples - pos, pos

    def majority_rate(self) -> float:
        return max(self.class_counts()) / self.n_samples

    def select_columns(self, columns) -> "Dataset":
        columns = list(columns)
        return Dataset(
            self.features[:, columns],
            self.labels,
            [self.feature_names[c] for c in columns],
            self.class_names,
        )


def _label_order(values: set[str]) -> list[str]:
    try:
        return sorted(values, key=float)
    except ValueError:
        return sorted(values)


def load_csv(path, label_column: str = "last") -> Dataset:
    """Read a comma-separated file with a header row.

    The label column is chosen by name, or the last column when ``label_column``
    is ``"last"``. The two label values are sorted (numerically if both parse
    as numbers) and mapped to -1 and +1 in that order.
    """
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"data file not found: {path}")
    with path.open(newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh) if r and not (len(r) == 1 and not r[0].strip())]
    if not rows:
        raise DatasetError(f"{path}: empty file")
    header = [h.strip() for h in rows[0]]
    body = rows[1:]
    if label_column == "last":
        label_idx = len(header) - 1
    elif label_column in header:
        label_idx = header.index(label_column)
    else:
        raise DatasetError(f"{path}: no column named {label_column!r}")

    feature_idx = [j for j in range(len(header)) if j != label_idx]
    names = [header[j] for j in feature_idx]
    x = np.empty((len(body), len(feature_idx)), dtype=np.float64)
    raw_labels = []
    for i, row in enumerate(body):
        line = i + 2
        if len(row) != len(header):
            raise DatasetError(f"{path}: line {line} has {len(row)} fields, expected {len(header)}")
        for k, j in enumerate(feature_idx):
            cell = row[j].strip()
            try:
                value = float(cell)
            except ValueError:
                raise DatasetError(
                    f"{path}: non-numeric value {cell!r} at line {line}, column {header[j]!r}"
                ) from None
            if not math.isfinite(value):
                raise DatasetError(f"{path}: non-finite value {cell!r} at line {line}, column {header[j]!r}")
            x[i, k] = value
        raw_labels.append(row[label_idx].strip())

    classes = set(raw_labels)
    if len(classes) != 2:
        raise DatasetError(f"{path}: label column must hold exactly 2 classes, found {len(classes)}")
    neg, pos = _label_order(classes)
    y = np.array([1 if v == pos else -1 for v in raw_labels], dtype=np.int64)
    return Dataset(x, y, names, (neg, pos))


def write_csv(data: Dataset, path, label_name: str = "label") -> None:
    """Write ``data`` in the format ``load_csv`` reads; labels use the stored class names."""
    if label_name in data.feature_names:
        raise DatasetError(f"label column name {label_name!r} collides with a feature name")
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([*data.feature_names, label_name])
        neg, pos = data.class_names
        for row, label in zip(data.features, data.labels):
            w.writerow([*(repr(float(v)) for v in row), pos if label == 1 else neg])


@dataclass(frozen=True, eq=False)
class StandardizationParams:
    means: np.ndarray
    std_devs: np.ndarray
    constant: np.ndarray

    @classmethod
    def fit(cls, x: np.ndarray) -> "StandardizationParams":
        x = np.asarray(x, dtype=np.float64)
        means = x.mean(axis=0)
        std = x.std(axis=0)
        # Columns whose spread is pure rounding noise are treated as constant.
        constant = std <= 1e-12 * np.maximum(1.0, np.abs(means))
        return cls(_frozen(means), _frozen(np.where(constant, 1.0, std)), _frozen(constant))

    def transform(self, x: np.ndarray) -> np.ndarray:
        z = (np.asarray(x, dtype=np.float64) - self.means) / self.std_devs
        z[:, self.constant] = 0.0
        return z

    def inverse_transform(self, z: np.ndarray) -> np.ndarray:
        return np.asarray(z, dtype=np.float64) * self.std_devs + self.means


def standardize(data: Dataset) -> tuple[Dataset, StandardizationParams]:
    """Zero-mean, unit-variance (population convention) columns; constant columns become 0."""
    params = StandardizationParams.fit(data.features)
    scaled = Dataset(params.transform(data.features), data.labels, data.feature_names, data.class_names)
    return scaled, params


@dataclass(frozen=True, eq=False)
class FoldPlan:
    fold_assignments: np.ndarray
    n_folds: int

    def split(self, fold: int) -> tuple[np.ndarray, np.ndarray]:
        """(train indices, held-out indices) for ``fold``."""
        held = self.fold_assignments == fold
        return np.flatnonzero(~held), np.flatnonzero(held)

    def __iter__(self):
        return (self.split(k) for k in range(self.n_folds))


def make_folds(data: Dataset, folds: int, seed: int) -> FoldPlan:
    """Stratified assignment of samples to ``folds`` folds.

    Each class is shuffled and dealt round-robin; the dealing position carries
    over between classes so fold sizes stay within one sample of each other.
    """
    minority = min(data.class_counts())
    if folds < 2:
        raise DatasetError(f"need at least 2 folds, got {folds}")
    if folds > minority:
        raise DatasetError(f"{folds} folds exceed the minority class count ({minority})")
    rng = rng_for(seed, "folds")
    assignments = np.empty(data.n_samples, dtype=np.int64)
    offset = 0
    for cls in (-1, 1):
        members = rng.permutation(np.flatnonzero(data.labels == cls))
        assignments[members] = (np.arange(members.size) + offset) % folds
        offset = (offset + members.size) % folds
    return FoldPlan(_frozen(assignments), folds)


def generate_synthetic(n_samples: int, n_informative: int, n_noise: int, seed: int,
                       separation: float = 2.0, max_noise_corr: float = 0.25) -> Dataset:
    """Balanced two-class data whose label depends only on the first ``n_informative`` columns.

    Informative columns are N(+-separation/2, 1) by class; noise columns are
    N(0, 1) independent of the label. A noise column whose sample correlation
    with the label reaches ``max_noise_corr`` is redrawn.
    """
    if n_samples < 20:
        raise DatasetError(f"n_samples must be >= 20, got {n_samples}")
    if n_informative < 1:
        raise DatasetError(f"n_informative must be >= 1, got {n_informative}")
    if n_noise < 0:
        raise DatasetError(f"n_noise must be >= 0, got {n_noise}")
    if separation < 2.0:
        raise DatasetError("class means must be separated by at least 2 within-class std")
    rng = rng_for(seed, "generator")
    y = np.where(np.arange(n_samples) < n_samples // 2, -1, 1)
    y = rng.permutation(y)
    informative = rng.standard_normal((n_samples, n_informative)) + (separation / 2) * y[:, None]
    noise = np.empty((n_samples, n_noise))
    yc = (y - y.mean()) / y.std()
    for j in range(n_noise):
        while True:
            col = rng.standard_normal(n_samples)
            r = np.mean((col - col.mean()) * yc) / col.std()
            if abs(r) < max_noise_corr:
                break
        noise[:, j] = col
    names = [f"f{i}" for i in range(n_informative + n_noise)]
    return Dataset(np.hstack([informative, noise]), y, names, ("-1", "1"))
