"""Cross-validated accuracy of feature subsets, memoized per subset."""

from __future__ import annotations

import csv
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from . import svm
from .dataset import Dataset, FoldPlan, StandardizationParams, make_folds
from .seeding import seed_sequence
from .subset import FeatureSubset


@dataclass(frozen=True, eq=False)
class SubsetEvaluation:
    subset: FeatureSubset
    mean_accuracy: float
    std_accuracy: float
    fold_accuracies: tuple[float, ...]
    converged: bool

    def __eq__(self, other):
        if not isinstance(other, SubsetEvaluation):
            return NotImplemented
        return (self.subset == other.subset and self.mean_accuracy == other.mean_accuracy
                and self.std_accuracy == other.std_accuracy
                and self.fold_accuracies == other.fold_accuracies and self.converged == other.converged)

    __hash__ = None


class EvalCache:
    """Thread-safe map from subset to evaluation.

    Lookups and inserts share one lock. If two threads compute the same subset,
    the first insert wins and both callers receive that stored value.
    """

    def __init__(self):
        self._entries: dict[FeatureSubset, SubsetEvaluation] = {}
        self._lock = threading.Lock()
        self.hits = 0
        self.misses = 0

    def get(self, subset: FeatureSubset) -> Optional[SubsetEvaluation]:
        with self._lock:
            found = self._entries.get(subset)
            if found is None:
                self.misses += 1
            else:
                self.hits += 1
            return found

    def put(self, evaluation: SubsetEvaluation) -> SubsetEvaluation:
        with self._lock:
            return self._entries.setdefault(evaluation.subset, evaluation)

    def __len__(self):
        with self._lock:
            return len(self._entries)

    def __contains__(self, subset):
        with self._lock:
            return subset in self._entries

    def values(self) -> list[SubsetEvaluation]:
        with self._lock:
            return list(self._entries.values())

    def stats(self) -> dict:
        return {"entries": len(self), "hits": self.hits, "misses": self.misses}

    def dump_csv(self, path) -> None:
        """Write (bitmask, mean, std) rows ordered by bitmask."""
        rows = sorted(self.values(), key=lambda e: e.subset.bits)
        with Path(path).open("w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["subset_hex", "mean_accuracy", "std_accuracy"])
            for e in rows:
                w.writerow([e.subset.hex(), repr(e.mean_accuracy), repr(e.std_accuracy)])


def _fold_seed(seed: int, subset: FeatureSubset, fold: int) -> int:
    return int(seed_sequence(seed, "svm", subset.bits, fold).generate_state(1)[0])


def _compute(data: Dataset, subset: FeatureSubset, folds: FoldPlan, config: svm.SvmConfig,
             seed: int) -> SubsetEvaluation:
    if subset.cardinality == 0:
        rate = data.majority_rate()
        return SubsetEvaluation(subset, rate, 0.0, (rate,) * folds.n_folds, True)
    columns = subset.indices()
    x = data.features[:, columns]
    y = data.labels
    scores = []
    converged = True
    for k, (train_idx, test_idx) in enumerate(folds):
        scaler = StandardizationParams.fit(x[train_idx])
        x_train = scaler.transform(x[train_idx])
        x_test = scaler.transform(x[test_idx])
        if np.all(y[train_idx] == y[train_idx][0]):
            # A single-class training fold can only predict that class.
            scores.append(float(np.mean(y[test_idx] == y[train_idx][0])))
            continue
        model = svm.train(x_train, y[train_idx], config, seed=_fold_seed(seed, subset, k),
                          active_features=subset)
        converged &= model.converged
        scores.append(svm.accuracy(model, x_test, y[test_idx]))
    acc = np.array(scores)
    return SubsetEvaluation(subset, float(acc.mean()), float(acc.std()), tuple(scores), converged)


def evaluate_subset(data: Dataset, subset: FeatureSubset, folds: FoldPlan,
                    svm_config: svm.SvmConfig = svm.SvmConfig(),
                    cache: Optional[EvalCache] = None, seed: int = 0) -> SubsetEvaluation:
    """Mean stratified-CV accuracy of an SVM trained on ``subset``'s columns.

    Each training fold is standardized on its own statistics. The empty subset
    scores the majority-class rate without training anything.
    """
    if subset.n_features != data.n_features:
        raise IndexError(f"subset spans {subset.n_features} features, dataset has {data.n_features}")
    if folds.fold_assignments.shape[0] != data.n_samples:
        raise ValueError("fold plan does not cover the dataset")
    if cache is not None:
        found = cache.get(subset)
        if found is not None:
            return found
    result = _compute(data, subset, folds, svm_config, seed)
    return cache.put(result) if cache is not None else result


def reward(prev: SubsetEvaluation, next: SubsetEvaluation) -> float:
    """Accuracy gained by the single feature that turns ``prev.subset`` into ``next.subset``."""
    prev.subset.added_feature(next.subset)
    return next.mean_accuracy - prev.mean_accuracy


class SubsetEvaluator:
    """Evaluation context bound to one dataset, fold plan, SVM config and seed."""

    def __init__(self, data: Dataset, folds: int | FoldPlan = 5, svm_config: svm.SvmConfig = svm.SvmConfig(),
                 seed: int = 0, cache: Optional[EvalCache] = None):
        self.data = data
        self.folds = folds if isinstance(folds, FoldPlan) else make_folds(data, folds, seed)
        self.svm_config = svm_config
        self.seed = seed
        self.cache = EvalCache() if cache is None else cache

    @property
    def n_features(self) -> int:
        return self.data.n_features

    def __call__(self, subset: FeatureSubset) -> SubsetEvaluation:
        return evaluate_subset(self.data, subset, self.folds, self.svm_config, self.cache, self.seed)

    def indices(self, indices) -> SubsetEvaluation:
        return self(FeatureSubset.from_indices(indices, self.n_features))
