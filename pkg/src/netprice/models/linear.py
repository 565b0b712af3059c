"""Elastic-net linear regression solved by cyclic coordinate descent.

Objective, with intercept ``b`` left unpenalized::

    1/(2n) * sum_i (y_i - b - w.x_i)^2
        + reg_param * (alpha * |w|_1 + (1 - alpha) / 2 * |w|_2^2)

where ``alpha`` is ``elastic_net_param``.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_features, check_training_data

logger = logging.getLogger(__name__)

TOL = 1e-7


@dataclass(frozen=True, eq=False)
class LinearModel:
    """Affine predictor; ``weights`` are always in original feature units."""

    weights: np.ndarray
    intercept: float
    standardized_fit: bool
    converged: bool
    n_sweeps: int

    def __post_init__(self):
        w = np.array(self.weights, dtype=float)
        if not (np.all(np.isfinite(w)) and np.isfinite(self.intercept)):
            raise ValueError("linear model coefficients must be finite")
        w.flags.writeable = False
        object.__setattr__(self, "weights", w)

    @property
    def n_features(self) -> int:
        return self.weights.size

    def predict(self, X) -> np.ndarray:
        X = check_features(X, self.n_features)
        return X @ self.weights + self.intercept

    def used_features(self) -> set[int]:
        return {int(j) for j in np.flatnonzero(self.weights)}


def soft_threshold(x: float, t: float) -> float:
    if x > t:
        return x - t
    if x < -t:
        return x + t
    return 0.0


def fit_linear(X, y, *, reg_param: float = 0.0, elastic_net_param: float = 0.0,
               max_iter: int = 100, standardization: bool = True,
               tol: float = TOL) -> LinearModel:
    """Minimize the elastic-net objective by coordinate descent.

    Runs up to ``max_iter`` full sweeps, stopping early once the largest
    coefficient change in a sweep falls below ``tol``. With
    ``standardization`` the penalty applies to coefficients of unit-variance
    features and the result is mapped back to original units.
    Non-convergence is reported through ``converged`` rather than raised.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    n, d = X.shape
    x_mean = X.mean(axis=0)
    y_mean = float(y.mean())
    Z = X - x_mean
    yc = y - y_mean

    scale = Z.std(axis=0)
    active = scale > 0
    if not standardization:
        scale = np.ones(d)
    else:
        scale = np.where(active, scale, 1.0)
    Z = Z / scale

    gram = Z.T @ Z / n
    corr = Z.T @ yc / n
    l1 = reg_param * elastic_net_param
    l2 = reg_param * (1.0 - elastic_net_param)

    beta = np.zeros(d)
    converged = d == 0 or not active.any()
    sweeps = 0
    while not converged and sweeps < max_iter:
        sweeps += 1
        max_delta = 0.0
        for j in np.flatnonzero(active):
            rho = corr[j] - gram[j] @ beta + gram[j, j] * beta[j]
            new = soft_threshold(rho, l1) / (gram[j, j] + l2)
            max_delta = max(max_delta, abs(new - beta[j]))
            beta[j] = new
        converged = max_delta < tol
    if not converged:
        logger.info("coordinate descent stopped after %d sweeps without converging", sweeps)

    weights = beta / scale
    intercept = y_mean - float(weights @ x_mean)
    return LinearModel(weights, intercept, bool(standardization), bool(converged), sweeps)


class LinearRegression(RegressorMixin, BaseEstimator):
    """Elastic-net regularized least squares.

    Parameters
    ----------
    reg_param : float, default=0.0
        Overall penalty strength.
    elastic_net_param : float, default=0.0
        Mix between ridge (0) and lasso (1).
    max_iter : int, default=100
        Maximum coordinate-descent sweeps.
    standardization : bool, default=True
        Penalize coefficients of standardized features.
    """

    def __init__(self, reg_param=0.0, elastic_net_param=0.0, max_iter=100,
                 standardization=True, seed=42):
        self.reg_param = reg_param
        self.elastic_net_param = elastic_net_param
        self.max_iter = max_iter
        self.standardization = standardization
        self.seed = seed

    def fit(self, X, y):
        X, y = check_training_data(X, y)
        self.model_ = fit_linear(X, y, reg_param=self.reg_param,
                                 elastic_net_param=self.elastic_net_param,
                                 max_iter=self.max_iter,
                                 standardization=self.standardization)
        self.coef_ = self.model_.weights
        self.intercept_ = self.model_.intercept
        self.converged_ = self.model_.converged
        self.n_features_in_ = X.shape[1]
        return self

    def predict(self, X):
        check_is_fitted(self, "model_")
        return self.model_.predict(X)
