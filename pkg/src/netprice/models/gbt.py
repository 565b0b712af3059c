"""Gradient-boosted regression trees under squared-error loss."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_features, check_training_data
from .binning import compute_bins
from .tree import TreeModel, fit_tree


@dataclass(frozen=True, eq=False)
class GbtModel:
    base_prediction: float
    stages: tuple[TreeModel, ...]
    learning_rates: tuple[float, ...]
    n_features: int

    def predict(self, X) -> np.ndarray:
        X = check_features(X, self.n_features)
        out = np.full(X.shape[0], self.base_prediction)
        for tree, lr in zip(self.stages, self.learning_rates):
            out += lr * tree.predict(X)
        return out

    def staged_predict(self, X):
        """Yield predictions after 0, 1, ..., len(stages) boosting stages."""
        X = check_features(X, self.n_features)
        out = np.full(X.shape[0], self.base_prediction)
        yield out.copy()
        for tree, lr in zip(self.stages, self.learning_rates):
            out += lr * tree.predict(X)
            yield out.copy()

    def used_features(self) -> set[int]:
        return set().union(*(t.used_features() for t in self.stages))


def fit_gbt(X, y, *, max_iter: int = 20, learning_rate: float = 0.1, max_depth: int = 5,
            max_bins: int = 32, min_info_gain: float = 0.0) -> GbtModel:
    """Boost ``max_iter`` trees, each fit to the current residuals."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    bins = compute_bins(X, max_bins)
    codes = bins.transform(X)
    base = float(np.mean(y))
    current = np.full(y.shape, base)
    stages = []
    for _ in range(max_iter):
        tree = fit_tree(X, y - current, bins, max_depth=max_depth,
                        min_info_gain=min_info_gain, codes=codes)
        current = current + learning_rate * tree.predict(X)
        stages.append(tree)
    return GbtModel(base, tuple(stages), (float(learning_rate),) * len(stages), X.shape[1])


class GBTRegressor(RegressorMixin, BaseEstimator):
    """Stagewise additive trees with shrinkage ``learning_rate``."""

    def __init__(self, max_iter=20, learning_rate=0.1, max_depth=5, max_bins=32,
                 min_info_gain=0.0, seed=42):
        self.max_iter = max_iter
        self.learning_rate = learning_rate
        self.max_depth = max_depth
        self.max_bins = max_bins
        self.min_info_gain = min_info_gain
        self.seed = seed

    def fit(self, X, y):
        X, y = check_training_data(X, y)
        self.model_ = fit_gbt(X, y, max_iter=self.max_iter, learning_rate=self.learning_rate,
                              max_depth=self.max_depth, max_bins=self.max_bins,
                              min_info_gain=self.min_info_gain)
        self.n_features_in_ = X.shape[1]
        return self

    def predict(self, X):
        check_is_fitted(self, "model_")
        return self.model_.predict(X)
