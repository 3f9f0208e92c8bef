"""Wrapper feature selection with a tabular TD(0) agent scored by an RBF-kernel SVM."""

from .agent import AgentConfig, AorTable, SearchResult, StateValueTable, rank_features_by_aor, run_search
from .baselines import FeatureRanking, evaluate_topk_curve, score_fisher, score_pearson, score_ttest
from .dataset import Dataset, generate_synthetic, load_csv, make_folds, standardize
from .evaluator import EvalCache, SubsetEvaluation, SubsetEvaluator, evaluate_subset
from .subset import FeatureSubset
from .svm import SvmConfig, SvmModel

__all__ = [
    "AgentConfig", "AorTable", "Dataset", "EvalCache", "FeatureRanking", "FeatureSubset",
    "SearchResult", "StateValueTable", "SubsetEvaluation", "SubsetEvaluator", "SvmConfig", "SvmModel",
    "evaluate_subset", "evaluate_topk_curve", "generate_synthetic", "load_csv", "make_folds",
    "rank_features_by_aor", "run_search", "score_fisher", "score_pearson", "score_ttest", "standardize",
]
