"""Serialization of search results, sweeps and rankings to JSON/CSV."""

from __future__ import annotations

import csv
import json
from pathlib import Path

from .agent import SearchResult
from .dataset import Dataset
from .evaluator import SubsetEvaluation


def subset_record(e: SubsetEvaluation, data: Dataset) -> dict:
    idx = e.subset.indices()
    return {
        "indices": idx,
        "names": [data.feature_names[i] for i in idx],
        "bitmask": e.subset.hex(),
        "cardinality": e.subset.cardinality,
    }


def search_report(result: SearchResult, data: Dataset, config: dict) -> dict:
    best = result.best
    return {
        "config": config,
        "dataset": {"n_samples": data.n_samples, "n_features": data.n_features,
                    "class_names": list(data.class_names)},
        "best_subset": None if best is None else subset_record(best, data),
        "best_accuracy": None if best is None else best.mean_accuracy,
        "best_accuracy_std": None if best is None else best.std_accuracy,
        "best_fold_accuracies": None if best is None else list(best.fold_accuracies),
        "aor": [
            {"feature": f, "name": data.feature_names[f], "count": int(result.aor.counts[f]),
             "average_reward": float(result.aor.averages[f])}
            for f in range(data.n_features)
        ],
        "aor_ranking": result.ranking(),
        "max_value_curve": result.max_value_curve,
        "max_accuracy_curve": result.max_accuracy_curve,
        "states_visited": result.states_visited,
        "episodes": len(result.traces),
        "cache": result.cache_stats,
    }


def write_json(path, payload) -> None:
    Path(path).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")


def write_rows(path, header, rows) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([repr(v) if isinstance(v, float) else v for v in row])


def curve_rows(result: SearchResult):
    return [
        (i + 1, v, a, n)
        for i, (v, a, n) in enumerate(zip(result.max_value_curve, result.max_accuracy_curve,
                                          result.states_visited_curve))
    ]
