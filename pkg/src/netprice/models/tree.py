"""Regression trees grown by variance reduction over binned thresholds.

Growth is level-wise: every open node at a given depth is scored with a
single weighted histogram keyed by (node, feature, bin), which keeps the
Python overhead proportional to depth rather than node count.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_is_fitted

from ..exceptions import ShapeError
from ._validation import check_features, check_training_data
from .binning import BinningSpec, compute_bins

# Splits whose gain is below this fraction of the node variance are
# rounding noise, not structure.
_REL_GAIN_FLOOR = 1e-12


@dataclass(frozen=True, eq=False)
class TreeModel:
    """Array-backed binary tree; ``feature == -1`` marks a leaf."""

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray
    n_train: np.ndarray
    gain: np.ndarray
    node_depth: np.ndarray
    n_features: int

    def __post_init__(self):
        for name in ("feature", "threshold", "left", "right", "value",
                     "n_train", "gain", "node_depth"):
            arr = np.array(getattr(self, name))
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)

    @property
    def depth(self) -> int:
        return int(self.node_depth.max()) if self.node_depth.size else 0

    @property
    def n_nodes(self) -> int:
        return int(self.feature.size)

    @property
    def n_leaves(self) -> int:
        return int(np.sum(self.feature < 0))

    def used_features(self) -> set[int]:
        return {int(f) for f in self.feature if f >= 0}

    def apply(self, X: np.ndarray) -> np.ndarray:
        """Index of the leaf each row of ``X`` lands in."""
        X = check_features(X, self.n_features)
        node = np.zeros(X.shape[0], dtype=np.intp)
        rows = np.arange(X.shape[0])
        while True:
            f = self.feature[node]
            inner = f >= 0
            if not inner.any():
                return node
            r, n, f = rows[inner], node[inner], f[inner]
            go_left = X[r, f] <= self.threshold[n]
            node[r] = np.where(go_left, self.left[n], self.right[n])

    def predict(self, X: np.ndarray) -> np.ndarray:
        return self.value[self.apply(X)]


def _subset_size(rule, d: int) -> int:
    if rule is None or rule == "all":
        return d
    if rule == "onethird":
        return max(1, math.ceil(d / 3))
    if rule == "sqrt":
        return max(1, math.ceil(math.sqrt(d)))
    if isinstance(rule, int) and 1 <= rule:
        return min(rule, d)
    raise ValueError(f"unknown feature subset rule {rule!r}")


def fit_tree(X, y, bins: BinningSpec | None = None, *, max_depth: int = 5,
             max_bins: int = 32, min_info_gain: float = 0.0, sample_weight=None,
             feature_subset=None, rng: np.random.Generator | None = None,
             codes: np.ndarray | None = None) -> TreeModel:
    """Grow a regression tree greedily.

    At each node the split ``x[f] <= t`` over candidate thresholds from
    ``bins`` maximizing the variance gain is taken, unless the node is at
    ``max_depth``, is pure, has no admissible split, or its best gain is
    below ``min_info_gain``. Ties go to the lowest feature index, then the
    lowest threshold. ``feature_subset`` ("all", "onethird", "sqrt") draws a
    fresh random feature subset at every node from ``rng``.

    ``codes`` may carry ``bins.transform(X)`` precomputed by the caller.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    n, d = X.shape
    if bins is None:
        bins = compute_bins(X, max_bins)
    if bins.n_features != d:
        raise ShapeError(f"binning has {bins.n_features} features, data has {d}")
    if codes is None:
        codes = bins.transform(X)
    w = np.ones(n) if sample_weight is None else np.asarray(sample_weight, dtype=float)
    m = _subset_size(feature_subset, d)
    if m < d and rng is None:
        rng = np.random.default_rng(0)

    nb = max(bins.max_bins, 1 + max((t.size for t in bins.thresholds), default=0))
    n_thr = np.array([t.size for t in bins.thresholds], dtype=np.intp)
    # valid[j, b]: bin b of feature j is a real threshold index
    valid_bin = np.arange(nb)[None, :] < n_thr[:, None]
    key_base = (np.arange(d) * nb)[None, :]

    feature, threshold, left, right = [], [], [], []
    value, n_train, gain_out, node_depth = [], [], [], []

    def new_node(depth):
        feature.append(-1)
        threshold.append(np.nan)
        left.append(-1)
        right.append(-1)
        value.append(0.0)
        n_train.append(0.0)
        gain_out.append(0.0)
        node_depth.append(depth)
        return len(feature) - 1

    rows = np.flatnonzero(w > 0)
    if rows.size == 0:
        raise ValueError("fit_tree needs at least one row with positive weight")
    level_nodes = [new_node(0)]
    slot = np.zeros(rows.size, dtype=np.intp)
    depth = 0

    while level_nodes:
        L = len(level_nodes)
        wr, yr = w[rows], y[rows]
        W = np.bincount(slot, weights=wr, minlength=L)
        mean = np.bincount(slot, weights=wr * yr, minlength=L) / W
        for s, node in enumerate(level_nodes):
            value[node] = float(mean[s])
            n_train[node] = float(W[s])
        if depth >= max_depth:
            break

        order = np.argsort(slot, kind="stable")
        starts = np.searchsorted(slot[order], np.arange(L))
        ys = yr[order]
        pure = np.maximum.reduceat(ys, starts) == np.minimum.reduceat(ys, starts)

        r = yr - mean[slot]
        var = np.bincount(slot, weights=wr * r * r, minlength=L) / W
        keys = (slot[:, None] * (d * nb) + key_base + codes[rows]).ravel()
        size = L * d * nb
        hw = np.bincount(keys, weights=np.repeat(wr, d), minlength=size).reshape(L, d, nb)
        hs = np.bincount(keys, weights=np.repeat(wr * r, d), minlength=size).reshape(L, d, nb)
        hc = np.bincount(keys, minlength=size).reshape(L, d, nb)
        WL = np.cumsum(hw, axis=2)
        SL = np.cumsum(hs, axis=2)
        CL = np.cumsum(hc, axis=2)
        counts = np.bincount(slot, minlength=L)
        WR = W[:, None, None] - WL
        ok = valid_bin[None] & (CL > 0) & (CL < counts[:, None, None])
        with np.errstate(divide="ignore", invalid="ignore"):
            gains = np.where(ok, SL * SL / (WL * WR), -np.inf)

        if m < d:
            allowed = np.zeros((L, d), dtype=bool)
            for s in range(L):
                allowed[s, rng.choice(d, size=m, replace=False)] = True
            gains = np.where(allowed[:, :, None], gains, -np.inf)

        flat = gains.reshape(L, d * nb)
        best = np.argmax(flat, axis=1)
        best_gain = flat[np.arange(L), best]
        split = (~pure & np.isfinite(best_gain) & (best_gain >= min_info_gain)
                 & (best_gain > _REL_GAIN_FLOOR * var))

        next_nodes = []
        child_slot = np.full(L, -1, dtype=np.intp)
        best_f, best_b = best // nb, best % nb
        for s, node in enumerate(level_nodes):
            if not split[s]:
                continue
            f, b = int(best_f[s]), int(best_b[s])
            feature[node] = f
            threshold[node] = float(bins.thresholds[f][b])
            gain_out[node] = float(best_gain[s])
            left[node] = new_node(depth + 1)
            right[node] = new_node(depth + 1)
            child_slot[s] = len(next_nodes)
            next_nodes.extend([left[node], right[node]])

        keep = split[slot]
        rows, slot = rows[keep], slot[keep]
        if rows.size:
            f_row = best_f[slot]
            goes_right = codes[rows, f_row] > best_b[slot]
            slot = child_slot[slot] + goes_right
        level_nodes = next_nodes
        depth += 1

    return TreeModel(
        feature=np.array(feature, dtype=np.intp),
        threshold=np.array(threshold, dtype=float),
        left=np.array(left, dtype=np.intp),
        right=np.array(right, dtype=np.intp),
        value=np.array(value, dtype=float),
        n_train=np.array(n_train, dtype=float),
        gain=np.array(gain_out, dtype=float),
        node_depth=np.array(node_depth, dtype=np.intp),
        n_features=d,
    )


class DecisionTreeRegressor(RegressorMixin, BaseEstimator):
    """Single regression tree on quantile-binned features.

    Parameters
    ----------
    max_depth : int, default=5
    max_bins : int, default=32
        Upper bound on bins per feature; at most ``max_bins - 1`` thresholds.
    min_info_gain : float, default=0.0
        Minimum variance reduction required to split a node.
    seed : int, default=42
        Unused by a plain tree; kept so every estimator shares the key.
    """

    def __init__(self, max_depth=5, max_bins=32, min_info_gain=0.0, seed=42):
        self.max_depth = max_depth
        self.max_bins = max_bins
        self.min_info_gain = min_info_gain
        self.seed = seed

    def fit(self, X, y, sample_weight=None):
        X, y = check_training_data(X, y)
        self.bins_ = compute_bins(X, self.max_bins)
        self.model_ = fit_tree(X, y, self.bins_, max_depth=self.max_depth,
                               min_info_gain=self.min_info_gain,
                               sample_weight=sample_weight)
        self.n_features_in_ = X.shape[1]
        return self

    def predict(self, X):
        check_is_fitted(self, "model_")
        return self.model_.predict(X)
