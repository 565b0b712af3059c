"""Random forest regression: bagged trees with per-node feature sampling."""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_features, check_training_data
from .binning import compute_bins
from .tree import TreeModel, fit_tree


@dataclass(frozen=True, eq=False)
class ForestModel:
    trees: tuple[TreeModel, ...]
    tree_seeds: tuple[int, ...]
    n_features: int

    def predict(self, X) -> np.ndarray:
        X = check_features(X, self.n_features)
        return np.mean([t.predict(X) for t in self.trees], axis=0)

    def used_features(self) -> set[int]:
        return set().union(*(t.used_features() for t in self.trees))


def tree_seeds(seed: int, n_estimators: int) -> tuple[int, ...]:
    """Per-tree seeds derived from the master seed, independent of scheduling."""
    state = np.random.SeedSequence(seed).generate_state(n_estimators, dtype=np.uint32)
    return tuple(int(s) for s in state)


def fit_forest(X, y, *, n_estimators: int = 20, max_depth: int = 5, max_bins: int = 32,
               min_info_gain: float = 0.0, feature_subset: str = "onethird",
               bootstrap: bool = True, seed: int = 42, n_jobs: int = 1) -> ForestModel:
    """Fit ``n_estimators`` trees on bootstrap resamples of size ``n``.

    Thresholds are computed once on the full training matrix and shared by
    all trees.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    n = X.shape[0]
    bins = compute_bins(X, max_bins)
    codes = bins.transform(X)
    seeds = tree_seeds(seed, n_estimators)

    def grow(tree_seed):
        rng = np.random.default_rng(tree_seed)
        weight = None
        if bootstrap:
            weight = np.bincount(rng.integers(0, n, size=n), minlength=n).astype(float)
        return fit_tree(X, y, bins, max_depth=max_depth, min_info_gain=min_info_gain,
                        sample_weight=weight, feature_subset=feature_subset,
                        rng=rng, codes=codes)

    if n_jobs is not None and n_jobs > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            trees = list(pool.map(grow, seeds))
    else:
        trees = [grow(s) for s in seeds]
    return ForestModel(tuple(trees), seeds, X.shape[1])


class RandomForestRegressor(RegressorMixin, BaseEstimator):
    """Bagged regression trees averaged at prediction time.

    ``feature_subset`` is one of ``"all"``, ``"onethird"`` (rounded up) or
    ``"sqrt"`` and is resampled at every node.
    """

    def __init__(self, n_estimators=20, max_depth=5, max_bins=32, min_info_gain=0.0,
                 feature_subset="onethird", bootstrap=True, seed=42, n_jobs=1):
        self.n_estimators = n_estimators
        self.max_depth = max_depth
        self.max_bins = max_bins
        self.min_info_gain = min_info_gain
        self.feature_subset = feature_subset
        self.bootstrap = bootstrap
        self.seed = seed
        self.n_jobs = n_jobs

    def fit(self, X, y):
        X, y = check_training_data(X, y)
        self.model_ = fit_forest(
            X, y, n_estimators=self.n_estimators, max_depth=self.max_depth,
            max_bins=self.max_bins, min_info_gain=self.min_info_gain,
            feature_subset=self.feature_subset, bootstrap=self.bootstrap,
            seed=self.seed, n_jobs=self.n_jobs)
        self.n_features_in_ = X.shape[1]
        return self

    def predict(self, X):
        check_is_fitted(self, "model_")
        return self.model_.predict(X)
