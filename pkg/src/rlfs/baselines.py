"""Filter rankings (Pearson, Fisher, Welch t) and top-k accuracy curves."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .agent import AorTable, rank_features_by_aor
from .dataset import Dataset, DatasetError
from .subset import FeatureSubset

METHODS = ("rl-aor", "pearson", "fisher", "ttest")


@dataclass(frozen=True, eq=False)
class FeatureRanking:
    method: str
    scores: np.ndarray
    order: tuple[int, ...]

    @classmethod
    def from_scores(cls, method: str, scores) -> "FeatureRanking":
        scores = np.asarray(scores, dtype=np.float64)
        # Stable sort on the negated scores keeps the lowest index first among ties.
        order = tuple(int(i) for i in np.argsort(-scores, kind="stable"))
        return cls(method, scores, order)

    def top(self, k: int) -> list[int]:
        return list(self.order[:k])


def _class_split(data: Dataset):
    pos = data.features[data.labels == 1]
    neg = data.features[data.labels == -1]
    if pos.shape[0] < 2 or neg.shape[0] < 2:
        raise DatasetError("each class needs at least 2 samples")
    return pos, neg


def _ratio(num: np.ndarray, den: np.ndarray) -> np.ndarray:
    """num / den with 0/0 -> 0 and x/0 -> +inf."""
    out = np.zeros_like(num)
    ok = den > 0
    out[ok] = num[ok] / den[ok]
    out[~ok & (num > 0)] = np.inf
    return out


def score_pearson(data: Dataset) -> FeatureRanking:
    """|corr(feature, label)|; constant columns score 0."""
    x = data.features - data.features.mean(axis=0)
    y = data.labels - data.labels.mean()
    num = np.abs(y @ x)
    den = np.sqrt((x * x).sum(axis=0) * (y @ y))
    scores = np.where(den > 0, num / np.where(den > 0, den, 1.0), 0.0)
    return FeatureRanking.from_scores("pearson", np.minimum(scores, 1.0))


def score_fisher(data: Dataset) -> FeatureRanking:
    """(mean+ - mean-)^2 / (var+ + var-), sample variances."""
    pos, neg = _class_split(data)
    num = (pos.mean(axis=0) - neg.mean(axis=0)) ** 2
    den = pos.var(axis=0, ddof=1) + neg.var(axis=0, ddof=1)
    return FeatureRanking.from_scores("fisher", _ratio(num, den))


def score_ttest(data: Dataset) -> FeatureRanking:
    """Absolute Welch t-statistic between the two classes."""
    pos, neg = _class_split(data)
    num = np.abs(pos.mean(axis=0) - neg.mean(axis=0))
    den = np.sqrt(pos.var(axis=0, ddof=1) / pos.shape[0] + neg.var(axis=0, ddof=1) / neg.shape[0])
    return FeatureRanking.from_scores("ttest", _ratio(num, den))


def ranking_from_aor(aor: AorTable) -> FeatureRanking:
    """AOR scores in the agent's own order (never-selected features go last)."""
    return FeatureRanking("rl-aor", aor.averages.copy(), tuple(rank_features_by_aor(aor)))


FILTERS = {"pearson": score_pearson, "fisher": score_fisher, "ttest": score_ttest}


def evaluate_topk_curve(data: Dataset, ranking: FeatureRanking, k_max: int, evaluator):
    """[(k, evaluation of the first k ranked features)] for k = 1..k_max."""
    if not 1 <= k_max <= data.n_features:
        raise ValueError(f"k_max must be in [1, {data.n_features}], got {k_max}")
    return [(k, evaluator(FeatureSubset.from_indices(ranking.top(k), data.n_features)))
            for k in range(1, k_max + 1)]
