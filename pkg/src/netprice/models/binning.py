"""Quantile binning of continuous features into candidate split thresholds."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class BinningSpec:
    """Per-feature ascending thresholds; a split reads ``x <= threshold``."""

    thresholds: tuple[np.ndarray, ...]
    max_bins: int

    @property
    def n_features(self) -> int:
        return len(self.thresholds)

    def transform(self, X: np.ndarray) -> np.ndarray:
        """Map each value to its bin code.

        The code is the number of thresholds strictly below the value, so
        ``x <= thresholds[k]`` holds exactly when ``code <= k``.
        """
        X = np.asarray(X, dtype=float)
        codes = np.empty(X.shape, dtype=np.intp)
        for j, t in enumerate(self.thresholds):
            codes[:, j] = np.searchsorted(t, X[:, j], side="left")
        return codes


def _feature_thresholds(values: np.ndarray, max_bins: int) -> np.ndarray:
    distinct = np.unique(values)
    if distinct.size <= 1:
        return np.empty(0)
    if distinct.size <= max_bins:
        return (distinct[:-1] + distinct[1:]) / 2.0
    # Equal-frequency cut: the k-th cut sits just above the order statistic
    # at position ceil(k n / B) - 1, halfway to the next distinct value.
    sorted_vals = np.sort(values)
    n = sorted_vals.size
    cuts = []
    for k in range(1, max_bins):
        pos = int(np.ceil(k * n / max_bins)) - 1
        lo = sorted_vals[pos]
        nxt = np.searchsorted(distinct, lo, side="right")
        if nxt < distinct.size:
            cuts.append((lo + distinct[nxt]) / 2.0)
    return np.unique(np.array(cuts))


def compute_bins(X: np.ndarray, max_bins: int = 32) -> BinningSpec:
    """Candidate thresholds for every column of ``X``.

    A feature with at most ``max_bins`` distinct values gets every midpoint
    between consecutive distinct values; otherwise at most ``max_bins - 1``
    equal-frequency cuts are used. Constant features get no thresholds.
    """
    if max_bins < 2:
        raise ValueError("max_bins must be >= 2")
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[0] == 0:
        raise ValueError("compute_bins needs a non-empty 2-D array")
    thresholds = []
    for column in X.T:
        t = _feature_thresholds(column, max_bins)
        t.flags.writeable = False
        thresholds.append(t)
    return BinningSpec(tuple(thresholds), max_bins)
