"""TD(0) search over the lattice of feature subsets.

States are feature subsets, an action adds one unused feature, and the reward
for that action is the change in cross-validated accuracy it causes. Each
feature keeps a running average of the rewards it has earned (its AOR score);
at a previously visited state the agent follows the best AOR score with
probability ``1 - epsilon`` and explores uniformly otherwise. States seen for
the first time always get a uniformly random action.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .dataset import Dataset
from .evaluator import SubsetEvaluation, SubsetEvaluator, reward
from .seeding import rng_for
from .subset import FeatureSubset
from .svm import SvmConfig

START_MODES = ("empty", "random-subset")
PHASES = ("random", "greedy", "explore")

Evaluator = Callable[[FeatureSubset], SubsetEvaluation]


@dataclass(frozen=True)
class AgentConfig:
    alpha: float = 0.1
    gamma: float = 0.9
    epsilon: float = 0.5
    episodes: int = 100
    start_mode: str = "random-subset"
    max_subset_size: Optional[int] = None
    seed: int = 0

    def __post_init__(self):
        if not 0 < self.alpha <= 1:
            raise ValueError(f"alpha must be in (0, 1], got {self.alpha}")
        if not 0 <= self.gamma <= 1:
            raise ValueError(f"gamma must be in [0, 1], got {self.gamma}")
        if not 0 <= self.epsilon <= 1:
            raise ValueError(f"epsilon must be in [0, 1], got {self.epsilon}")
        if self.episodes < 0:
            raise ValueError(f"episodes must be >= 0, got {self.episodes}")
        if self.start_mode not in START_MODES:
            raise ValueError(f"start_mode must be one of {START_MODES}, got {self.start_mode!r}")
        if self.max_subset_size is not None and self.max_subset_size < 1:
            raise ValueError(f"max_subset_size must be >= 1, got {self.max_subset_size}")


class StateValueTable:
    """V(S) for visited states; anything never updated reads as 0."""

    def __init__(self):
        self.values: dict[FeatureSubset, float] = {}
        self.visits: dict[FeatureSubset, int] = {}

    def __getitem__(self, state: FeatureSubset) -> float:
        return self.values.get(state, 0.0)

    def __contains__(self, state: FeatureSubset) -> bool:
        return state in self.values

    def __len__(self):
        return len(self.values)

    def max_value(self) -> float:
        return max(self.values.values(), default=0.0)


class AorTable:
    """Per-feature selection counts and average rewards, both starting at zero."""

    def __init__(self, n_features: int):
        self.counts = np.zeros(n_features, dtype=np.int64)
        self.averages = np.zeros(n_features, dtype=np.float64)

    @property
    def n_features(self) -> int:
        return self.counts.size


def td_update(table: StateValueTable, s: FeatureSubset, s_next: FeatureSubset, r: float,
              alpha: float, gamma: float) -> float:
    """V(s) <- V(s) + alpha * (r + gamma * V(s_next) - V(s))."""
    s.added_feature(s_next)
    v = table[s]
    v += alpha * (r + gamma * table[s_next] - v)
    table.values[s] = v
    table.visits[s] = table.visits.get(s, 0) + 1
    return v


def update_aor(table: AorTable, f: int, r: float) -> float:
    if not 0 <= f < table.n_features:
        raise IndexError(f"feature index {f} out of range for {table.n_features} features")
    table.counts[f] += 1
    k = table.counts[f]
    table.averages[f] = ((k - 1) * table.averages[f] + r) / k
    return float(table.averages[f])


def select_action(state: FeatureSubset, aor: AorTable, value_table: StateValueTable,
                  epsilon: float, rng) -> tuple[int, str]:
    """Pick the next feature to add, returning (feature, phase)."""
    available = state.available()
    if available.size == 0:
        raise ValueError(f"no feature left to add to {state}")
    if state not in value_table:
        return int(rng.choice(available)), "random"
    if rng.random() < epsilon:
        return int(rng.choice(available)), "explore"
    # argmax returns the first maximum, i.e. the lowest index among ties.
    return int(available[np.argmax(aor.averages[available])]), "greedy"


@dataclass(frozen=True)
class Step:
    state: FeatureSubset
    feature: int
    reward: float
    value: float
    phase: str
    evaluation: Optional[SubsetEvaluation] = field(default=None, compare=False, repr=False)

    @property
    def next_state(self) -> FeatureSubset:
        return self.state.add(self.feature)


@dataclass
class EpisodeTrace:
    start_state: FeatureSubset
    steps: list[Step] = field(default_factory=list)
    terminal: bool = False
    start_evaluation: Optional[SubsetEvaluation] = field(default=None, repr=False)

    @property
    def final_state(self) -> FeatureSubset:
        return self.steps[-1].next_state if self.steps else self.start_state

    def states(self) -> list[FeatureSubset]:
        return [self.start_state] + [s.next_state for s in self.steps]

    def evaluations(self) -> list[SubsetEvaluation]:
        return [self.start_evaluation] + [s.evaluation for s in self.steps]


def _size_limit(config: AgentConfig, n_features: int) -> int:
    if config.max_subset_size is None:
        return n_features
    return min(config.max_subset_size, n_features)


def initial_state(config: AgentConfig, n_features: int, rng) -> FeatureSubset:
    """Empty set, or a uniformly sized random subset of at most half the features.

    The random size is also kept below the subset-size limit so every episode
    takes at least one step.
    """
    if config.start_mode == "empty":
        return FeatureSubset.empty(n_features)
    top = min(n_features // 2, _size_limit(config, n_features) - 1)
    k = int(rng.integers(0, top + 1))
    chosen = rng.choice(np.arange(n_features), size=k, replace=False) if k else []
    return FeatureSubset.from_indices(chosen, n_features)


def run_episode(config: AgentConfig, values: StateValueTable, aor: AorTable, evaluator: Evaluator,
                rng) -> EpisodeTrace:
    """Add features one at a time until the subset is full or hits the size limit."""
    limit = _size_limit(config, aor.n_features)
    state = initial_state(config, aor.n_features, rng)
    current = evaluator(state)
    trace = EpisodeTrace(state, start_evaluation=current)
    while state.cardinality < limit:
        feature, phase = select_action(state, aor, values, config.epsilon, rng)
        nxt = state.add(feature)
        evaluated = evaluator(nxt)
        r = reward(current, evaluated)
        v = td_update(values, state, nxt, r, config.alpha, config.gamma)
        update_aor(aor, feature, r)
        trace.steps.append(Step(state, feature, r, v, phase, evaluated))
        state, current = nxt, evaluated
    trace.terminal = True
    return trace


def rank_features_by_aor(aor: AorTable) -> list[int]:
    """Selected features by descending AOR (lowest index first on ties), then never-selected ones by index."""
    selected = [f for f in range(aor.n_features) if aor.counts[f] > 0]
    unselected = [f for f in range(aor.n_features) if aor.counts[f] == 0]
    selected.sort(key=lambda f: (-aor.averages[f], f))
    return selected + unselected


@dataclass
class SearchResult:
    config: AgentConfig
    values: StateValueTable
    aor: AorTable
    traces: list[EpisodeTrace]
    max_value_curve: list[float]
    max_accuracy_curve: list[float]
    states_visited_curve: list[int]
    best: Optional[SubsetEvaluation]
    cache_stats: dict

    @property
    def best_subset(self) -> Optional[FeatureSubset]:
        return None if self.best is None else self.best.subset

    @property
    def states_visited(self) -> int:
        return self.states_visited_curve[-1] if self.states_visited_curve else 0

    def ranking(self) -> list[int]:
        return rank_features_by_aor(self.aor)


def best_evaluation(evaluations) -> Optional[SubsetEvaluation]:
    """Highest accuracy; ties go to the smaller subset, then the smaller bitmask."""
    return min(evaluations, key=lambda e: (-e.mean_accuracy, e.subset.cardinality, e.subset.bits), default=None)


def run_search(config: AgentConfig, data: Dataset, evaluator: Optional[SubsetEvaluator] = None,
               folds: int = 5, svm_config: SvmConfig = SvmConfig()) -> SearchResult:
    """Run ``config.episodes`` episodes sharing one value table, AOR table and evaluation cache.

    Pass ``evaluator`` to reuse a cache across runs; otherwise one is built from
    ``folds``, ``svm_config`` and ``config.seed``.
    """
    if evaluator is None:
        evaluator = SubsetEvaluator(data, folds, svm_config, seed=config.seed)
    if evaluator.n_features != data.n_features:
        raise ValueError("evaluator is bound to a different feature space")
    rng = rng_for(config.seed, "agent")
    values = StateValueTable()
    aor = AorTable(data.n_features)
    traces: list[EpisodeTrace] = []
    visited: dict[FeatureSubset, SubsetEvaluation] = {}
    max_values: list[float] = []
    max_accuracy: list[float] = []
    n_visited: list[int] = []
    running = -np.inf
    for _ in range(config.episodes):
        trace = run_episode(config, values, aor, evaluator, rng)
        traces.append(trace)
        for e in trace.evaluations():
            visited.setdefault(e.subset, e)
        running = max(running, max(values[s] for s in visited))
        max_values.append(float(running))
        max_accuracy.append(max(e.mean_accuracy for e in visited.values()))
        n_visited.append(len(visited))
    cache = getattr(evaluator, "cache", None)
    return SearchResult(
        config=config,
        values=values,
        aor=aor,
        traces=traces,
        max_value_curve=max_values,
        max_accuracy_curve=max_accuracy,
        states_visited_curve=n_visited,
        best=best_evaluation(visited.values()),
        cache_stats=cache.stats() if cache is not None else {},
    )
