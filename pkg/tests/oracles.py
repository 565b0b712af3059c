"""Independent reference computations used by the test-suite.

Nothing here imports the code paths it checks.
"""
import math

import numpy as np


def direct_rmse(y, yhat):
    total = 0.0
    for a, b in zip(y, yhat):
        total += (a - b) * (a - b)
    return math.sqrt(total / len(y))


def direct_r2(y, yhat):
    mean = math.fsum(y) / len(y)
    ss_res = math.fsum((a - b) ** 2 for a, b in zip(y, yhat))
    ss_tot = math.fsum((a - mean) ** 2 for a in y)
    return 1.0 - ss_res / ss_tot


def _sse(values):
    if len(values) == 0:
        return 0.0
    return float(np.sum((values - values.mean()) ** 2))


def exhaustive_tree_sse(X, y, thresholds, max_depth, min_info_gain=0.0, rel_floor=1e-12):
    """Training SSE of a greedy tree found by brute-force split enumeration.

    Every (feature, threshold) pair is tried by physically partitioning the
    node's rows and summing squared deviations; ties keep the first pair in
    (feature, threshold) order.
    """
    leaves = []

    def grow(rows, depth):
        yn = y[rows]
        n = len(rows)
        parent = _sse(yn)
        if depth >= max_depth or yn.max() == yn.min():
            leaves.append(parent)
            return
        best = None
        for j, ts in enumerate(thresholds):
            for t in ts:
                mask = X[rows, j] <= t
                nl = int(mask.sum())
                if nl == 0 or nl == n:
                    continue
                gain = (parent - _sse(yn[mask]) - _sse(yn[~mask])) / n
                if best is None or gain > best[0]:
                    best = (gain, j, t)
        if best is None or best[0] < min_info_gain or best[0] <= rel_floor * parent / n:
            leaves.append(parent)
            return
        _, j, t = best
        mask = X[rows, j] <= t
        grow(rows[mask], depth + 1)
        grow(rows[~mask], depth + 1)

    grow(np.arange(len(y)), 0)
    return float(sum(leaves))


def ridge_closed_form(X, y, reg_param):
    """(XᵀX + n λ I)⁻¹ Xᵀy on centered data; returns (weights, intercept)."""
    n, d = X.shape
    xm, ym = X.mean(axis=0), y.mean()
    Xc, yc = X - xm, y - ym
    w = np.linalg.solve(Xc.T @ Xc + n * reg_param * np.eye(d), Xc.T @ yc)
    return w, ym - w @ xm


def exact_quantile_positions(values, n_bins):
    """Sorted-sample indices of the exact k/n_bins quantiles."""
    n = len(values)
    return [int(math.ceil(k * n / n_bins)) - 1 for k in range(1, n_bins)]
