"""Regression metrics, permutation importance and the overfitting check."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .exceptions import DegenerateVarianceError, ShapeError


def _pair(y, yhat) -> tuple[np.ndarray, np.ndarray]:
    y = np.asarray(y, dtype=float).ravel()
    yhat = np.asarray(yhat, dtype=float).ravel()
    if y.shape != yhat.shape:
        raise ShapeError(f"length mismatch: {y.size} labels vs {yhat.size} predictions")
    if y.size == 0:
        raise ShapeError("cannot score an empty vector")
    if not (np.all(np.isfinite(y)) and np.all(np.isfinite(yhat))):
        raise ValueError("metrics need finite values")
    return y, yhat


def rmse(y, yhat) -> float:
    """Root mean squared error."""
    y, yhat = _pair(y, yhat)
    return math.sqrt(float(np.mean((y - yhat) ** 2)))


def r2(y, yhat) -> float:
    """Coefficient of determination ``1 - SS_res / SS_tot``.

    Raises :class:`DegenerateVarianceError` for constant ``y`` instead of
    returning NaN.
    """
    y, yhat = _pair(y, yhat)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    if ss_tot == 0.0:
        raise DegenerateVarianceError("R² is undefined for constant labels")
    return 1.0 - float(np.sum((y - yhat) ** 2)) / ss_tot


@dataclass(frozen=True)
class MetricPair:
    rmse: float
    r2: float
    n: int

    @classmethod
    def score(cls, y, yhat) -> "MetricPair":
        return cls(rmse(y, yhat), r2(y, yhat), int(np.size(y)))


@dataclass(frozen=True)
class FeatureImportance:
    name: str
    importance: float
    std: float


@dataclass(frozen=True)
class ImportanceReport:
    features: tuple[FeatureImportance, ...]
    baseline_rmse: float
    repeats: int
    seed: int

    def to_dict(self) -> dict:
        return {
            "baseline_rmse": self.baseline_rmse,
            "repeats": self.repeats,
            "seed": self.seed,
            "features": [asdict(f) for f in self.features],
        }

    def to_text(self) -> str:
        width = max([len("Feature")] + [len(f.name) for f in self.features])
        lines = [f"{'Rank':>4}  {'Feature':<{width}}  {'RMSE increase':>14}  {'Std':>10}"]
        for rank, f in enumerate(self.features, 1):
            lines.append(f"{rank:>4}  {f.name:<{width}}  {f.importance:>14.4f}  {f.std:>10.4f}")
        return "\n".join(lines) + "\n"


def permutation_importance(model, X, y, repeats: int = 5, seed: int = 42,
                           feature_names=None) -> ImportanceReport:
    """Mean RMSE increase when one column at a time is shuffled.

    Feature ``j`` draws its shuffles from a generator seeded with
    ``(seed, j)``, so results do not depend on evaluation order and the
    first ``k`` repeats are the same for any ``repeats >= k``.
    """
    if repeats < 1:
        raise ValueError("repeats must be >= 1")
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.shape[0] == 0:
        raise ShapeError("permutation importance needs at least one row")
    names = list(feature_names) if feature_names is not None else [f"x{j}" for j in range(X.shape[1])]
    if len(names) != X.shape[1]:
        raise ShapeError("feature_names length does not match X")

    baseline = rmse(y, model.predict(X))
    results = []
    for j, name in enumerate(names):
        rng = np.random.default_rng([seed, j])
        deltas = np.empty(repeats)
        column = X[:, j]
        for k in range(repeats):
            shuffled = X.copy()
            shuffled[:, j] = column[rng.permutation(X.shape[0])]
            deltas[k] = rmse(y, model.predict(shuffled)) - baseline
        results.append(FeatureImportance(name, float(deltas.mean()), float(deltas.std())))
    # Stable sort keeps column order among equal importances.
    results.sort(key=lambda f: -f.importance)
    return ImportanceReport(tuple(results), baseline, repeats, seed)


@dataclass(frozen=True)
class OverfitReport:
    train: MetricPair
    test: MetricPair
    r2_gap: float
    threshold: float
    flagged: bool

    def to_dict(self) -> dict:
        return {"train": asdict(self.train), "test": asdict(self.test),
                "r2_gap": self.r2_gap,
                "threshold": None if math.isinf(self.threshold) else self.threshold,
                "flagged": self.flagged}


def overfit_check(model, train, test, threshold: float = 0.05) -> OverfitReport:
    """Compare train and test R²; flag when the gap exceeds ``threshold``.

    ``train`` and ``test`` are :class:`~netprice.features.Dataset` objects
    (anything with ``X`` and ``y``).
    """
    if train.X.shape[1] != test.X.shape[1]:
        raise ShapeError("train and test widths differ")
    tr = MetricPair.score(train.y, model.predict(train.X))
    te = MetricPair.score(test.y, model.predict(test.X))
    gap = tr.r2 - te.r2
    return OverfitReport(tr, te, gap, threshold, bool(gap > threshold))
