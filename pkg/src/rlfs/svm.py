"""Soft-margin SVM with a Gaussian kernel, trained by SMO."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
from scipy.spatial.distance import cdist

from ._smo import smo_solve
from .seeding import rng_for
from .subset import FeatureSubset

# Relative step threshold below which a pair update counts as no progress.
_STEP_EPS = 1e-8
_N_STARTS = 64


@dataclass(frozen=True)
class SvmConfig:
    c: float = 1.0
    kernel_gamma: Union[float, str] = "auto"
    tolerance: float = 1e-3
    max_passes: int = 10
    max_iterations: Optional[int] = None

    def __post_init__(self):
        if not self.c > 0:
            raise ValueError(f"C must be positive, got {self.c}")
        if isinstance(self.kernel_gamma, str):
            if self.kernel_gamma != "auto":
                raise ValueError(f"kernel_gamma must be a positive number or 'auto', got {self.kernel_gamma!r}")
        elif not self.kernel_gamma > 0:
            raise ValueError(f"kernel_gamma must be positive, got {self.kernel_gamma}")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        if self.max_passes < 1:
            raise ValueError("max_passes must be >= 1")

    def resolve_gamma(self, n_features: int) -> float:
        return 1.0 / n_features if self.kernel_gamma == "auto" else float(self.kernel_gamma)

    def iteration_cap(self, n_samples: int) -> int:
        if self.max_iterations is not None:
            return int(self.max_iterations)
        return min(10 * n_samples * n_samples, 10**6)


@dataclass(frozen=True, eq=False)
class SvmModel:
    """Trained model. The decision value is ``dual_coefs @ K(sv, x) + bias``."""

    support_vectors: np.ndarray
    dual_coefs: np.ndarray
    support_indices: np.ndarray
    bias: float
    kernel_gamma: float
    c: float
    converged: bool
    active_features: Optional[FeatureSubset] = None

    @property
    def n_features(self) -> int:
        return self.support_vectors.shape[1]

    def decision_function(self, x: np.ndarray) -> np.ndarray:
        x = _as_matrix(x)
        if x.shape[1] != self.n_features:
            raise ValueError(f"model expects {self.n_features} columns, got {x.shape[1]}")
        return self.dual_coefs @ rbf_kernel(self.support_vectors, x, self.kernel_gamma) + self.bias


def _as_matrix(x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 1:
        x = x[:, None]
    if x.ndim != 2:
        raise ValueError("expected a 2-d feature matrix")
    return x


def rbf_kernel(u: np.ndarray, v: np.ndarray, gamma: float) -> np.ndarray:
    """Gram matrix exp(-gamma * ||u_i - v_j||^2)."""
    return np.exp(-gamma * cdist(_as_matrix(u), _as_matrix(v), "sqeuclidean"))


def _check_training_input(x, y):
    x = _as_matrix(x)
    y = np.asarray(y)
    if x.shape[0] != y.shape[0]:
        raise ValueError(f"{x.shape[0]} rows but {y.shape[0]} labels")
    if x.shape[0] < 2 or x.shape[1] < 1:
        raise ValueError("need at least 2 samples and 1 feature")
    if not np.all(np.isfinite(x)):
        raise ValueError("features contain NaN or infinite values")
    if not np.all((y == 1) | (y == -1)):
        raise ValueError("labels must be -1 or +1")
    if not (np.any(y == 1) and np.any(y == -1)):
        raise ValueError("training data must contain both classes")
    return x, y.astype(np.float64)


def dual_objective(alpha: np.ndarray, y: np.ndarray, K: np.ndarray) -> float:
    """sum(alpha) - 1/2 sum_ij alpha_i alpha_j y_i y_j K_ij."""
    ay = alpha * y
    return float(alpha.sum() - 0.5 * ay @ K @ ay)


def kkt_violations(alpha, y, K, bias, c, tol) -> np.ndarray:
    """Indices of training points breaking the KKT conditions by more than ``tol``."""
    margin = y * ((alpha * y) @ K + bias)
    at_zero = alpha <= 0.0
    at_c = alpha >= c
    free = ~(at_zero | at_c)
    bad = (at_zero & (margin < 1 - tol)) | (at_c & (margin > 1 + tol)) | (free & (np.abs(margin - 1) > tol))
    return np.flatnonzero(bad)


def _bias_interval(alpha, g, y, c, slack):
    """Range of biases meeting every KKT condition to within ``slack``."""
    target = y - g
    free = (alpha > 0) & (alpha < c)
    # y_i (g_i + b) >= 1 - slack at alpha = 0 and <= 1 + slack at alpha = C.
    lower_side = ~free & (((alpha <= 0) & (y > 0)) | ((alpha >= c) & (y < 0)))
    upper_side = ~free & ~lower_side
    lo = max(target[lower_side].max(initial=-np.inf) - slack, target[free].max(initial=-np.inf) - slack)
    hi = min(target[upper_side].min(initial=np.inf) + slack, target[free].min(initial=np.inf) + slack)
    return lo, hi


def _refit_bias(alpha, y, K, c, tol) -> float:
    """Bias consistent with the KKT conditions for fixed multipliers.

    Free multipliers pin the bias and their mean is the starting point; with
    every multiplier at a bound the midpoint of the exact bracket is used. The
    result is then clipped into the range where all conditions hold within ``tol``.
    """
    g = (alpha * y) @ K
    free = (alpha > 0) & (alpha < c)
    if np.any(free):
        b = float(np.mean((y - g)[free]))
    else:
        lo, hi = _bias_interval(alpha, g, y, c, 0.0)
        if np.isfinite(lo) and np.isfinite(hi):
            b = 0.5 * (lo + hi)
        elif np.isfinite(lo) or np.isfinite(hi):
            b = lo if np.isfinite(lo) else hi
        else:
            b = 0.0
    lo, hi = _bias_interval(alpha, g, y, c, tol)
    if lo <= hi:
        b = min(max(b, lo), hi)
    return float(b)


def train(features, labels, config: SvmConfig = SvmConfig(), seed: int = 0,
          active_features: Optional[FeatureSubset] = None) -> SvmModel:
    """Fit the SVM dual with SMO.

    Hitting the step cap or stalling does not raise; the model comes back with
    ``converged=False``. ``converged`` is also cleared if the post-training KKT
    check finds a violator.
    """
    x, y = _check_training_input(features, labels)
    gamma = config.resolve_gamma(x.shape[1])
    K = rbf_kernel(x, x, gamma)
    starts = rng_for(seed, "svm").integers(0, x.shape[0], size=_N_STARTS)
    alpha, _b, _steps, status = smo_solve(
        K, y, float(config.c), float(config.tolerance), _STEP_EPS,
        int(config.max_passes), config.iteration_cap(x.shape[0]), starts,
    )
    bias = _refit_bias(alpha, y, K, config.c, config.tolerance)
    # Small numerical slack on top of tol: E is accumulated incrementally.
    ok = status == 0 and kkt_violations(alpha, y, K, bias, config.c, config.tolerance + 1e-9).size == 0
    sv = np.flatnonzero(alpha > 0)
    return SvmModel(
        support_vectors=x[sv],
        dual_coefs=alpha[sv] * y[sv],
        support_indices=sv,
        bias=float(bias),
        kernel_gamma=gamma,
        c=float(config.c),
        converged=bool(ok),
        active_features=active_features,
    )


def predict(model: SvmModel, features) -> np.ndarray:
    """Labels in {-1, +1}; a decision value of exactly zero maps to +1."""
    return np.where(model.decision_function(features) >= 0, 1, -1)


def accuracy(model: SvmModel, features, labels) -> float:
    labels = np.asarray(labels)
    if labels.size == 0:
        raise ValueError("cannot score an empty evaluation set")
    predicted = predict(model, features)
    if predicted.shape != labels.shape:
        raise ValueError(f"{predicted.shape[0]} predictions for {labels.shape[0]} labels")
    return float(np.count_nonzero(predicted == labels)) / labels.size
