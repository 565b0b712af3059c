"""Leakage-safe feature engineering and the outer train/test split.

:class:`TabularTransformer` follows the scikit-learn transformer protocol
but consumes :class:`~netprice.ingest.LabeledTable` rows rather than arrays,
because imputation and one-hot encoding need the per-cell missingness that
a float matrix would already have lost.
"""
from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from .exceptions import FitError, SchemaError, ShapeError, SplitError
from .ingest import CATEGORICAL, NUMERIC, LabeledTable, Numeric, Text

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class Dataset:
    """Dense numeric design matrix with its label vector."""

    X: np.ndarray
    y: np.ndarray
    feature_names: tuple[str, ...]

    def __post_init__(self):
        X = np.array(self.X, dtype=float, ndmin=2)
        y = np.array(self.y, dtype=float).ravel()
        if X.shape[0] != y.shape[0]:
            raise ShapeError(f"X has {X.shape[0]} rows but y has {y.shape[0]}")
        if X.shape[1] != len(self.feature_names):
            raise ShapeError(f"X has {X.shape[1]} columns but {len(self.feature_names)} names")
        if len(set(self.feature_names)) != len(self.feature_names):
            raise SchemaError("feature names must be unique")
        if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
            raise ValueError("Dataset values must be finite")
        X.flags.writeable = False
        y.flags.writeable = False
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "feature_names", tuple(self.feature_names))

    @property
    def n_rows(self) -> int:
        return self.X.shape[0]

    @property
    def n_features(self) -> int:
        return self.X.shape[1]

    def take(self, rows) -> "Dataset":
        rows = np.asarray(rows, dtype=int)
        return Dataset(self.X[rows], self.y[rows], self.feature_names)


@dataclass(frozen=True)
class FittedTransform:
    """Train-time statistics needed to turn labeled rows into a matrix."""

    numeric: dict[str, float]
    categorical: dict[str, tuple[str, ...]]
    standardize: bool = False
    means: dict[str, float] = field(default_factory=dict)
    stds: dict[str, float] = field(default_factory=dict)
    dropped: tuple[str, ...] = ()

    @property
    def input_columns(self) -> list[str]:
        return list(self.numeric) + list(self.categorical)

    @property
    def encoded_names(self) -> list[str]:
        names = list(self.numeric)
        for col, cats in self.categorical.items():
            names.extend(f"{col}={c}" for c in cats)
        return names

    @property
    def feature_names(self) -> list[str]:
        return [n for n in self.encoded_names if n not in self.dropped]

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "numeric_impute": dict(self.numeric),
            "categories": {k: list(v) for k, v in self.categorical.items()},
            "standardize": self.standardize,
            "means": dict(self.means),
            "stds": dict(self.stds),
            "dropped": list(self.dropped),
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "FittedTransform":
        if payload.get("schema_version") != SCHEMA_VERSION:
            raise SchemaError(f"unsupported transform schema {payload.get('schema_version')!r}")
        return cls(
            numeric=dict(payload["numeric_impute"]),
            categorical={k: tuple(v) for k, v in payload["categories"].items()},
            standardize=bool(payload["standardize"]),
            means=dict(payload["means"]),
            stds=dict(payload["stds"]),
            dropped=tuple(payload["dropped"]),
        )


def _numeric_values(cells) -> list[float]:
    return [c.value for c in cells if isinstance(c, Numeric)]


def _encode(spec: FittedTransform, rows: LabeledTable) -> np.ndarray:
    table = rows.table
    absent = [c for c in spec.input_columns if c not in table.columns]
    if absent:
        raise SchemaError(f"columns missing from rows: {absent}")
    blocks = []
    for col, fill in spec.numeric.items():
        blocks.append(np.array([c.value if isinstance(c, Numeric) else fill
                                for c in table.columns[col]], dtype=float))
    for col, cats in spec.categorical.items():
        index = {c: j for j, c in enumerate(cats)}
        onehot = np.zeros((rows.n_rows, len(cats)))
        for i, cell in enumerate(table.columns[col]):
            # Missing and unseen categories both encode as all zeros.
            j = index.get(_category_key(cell))
            if j is not None:
                onehot[i, j] = 1.0
        blocks.extend(onehot.T)
    if not blocks:
        return np.zeros((rows.n_rows, 0))
    return np.column_stack(blocks)


def _category_key(cell) -> str | None:
    if isinstance(cell, Text):
        return cell.value
    if isinstance(cell, Numeric):
        v = cell.value
        return str(int(v)) if v.is_integer() else repr(v)
    return None


def fit_transform_spec(train_rows: LabeledTable, standardize: bool = False) -> FittedTransform:
    """Compute imputation medians, category lists and (optionally) scaling.

    Zero-variance output columns are dropped when ``standardize`` is set.
    """
    if train_rows.n_rows == 0:
        raise FitError("cannot fit a transform on zero rows")
    table = train_rows.table
    numeric, categorical = {}, {}
    for col, kind in table.kinds.items():
        cells = table.columns[col]
        if kind == NUMERIC:
            observed = _numeric_values(cells)
            if not observed:
                raise FitError(f"numeric column {col!r} has no observed values")
            numeric[col] = float(np.median(observed))
        else:
            cats = sorted({k for k in map(_category_key, cells) if k is not None})
            if not cats:
                raise FitError(f"categorical column {col!r} has no observed values")
            categorical[col] = tuple(cats)

    spec = FittedTransform(numeric, categorical, standardize)
    if not standardize:
        return spec

    M = _encode(spec, train_rows)
    means, stds, dropped = {}, {}, []
    for name, column in zip(spec.encoded_names, M.T):
        std = float(column.std())
        if std <= 0.0 or not math.isfinite(std):
            logger.warning("dropping zero-variance column %s", name)
            dropped.append(name)
            continue
        means[name] = float(column.mean())
        stds[name] = std
    return FittedTransform(numeric, categorical, True, means, stds, tuple(dropped))


def apply_transform(spec: FittedTransform, rows: LabeledTable) -> Dataset:
    """Encode ``rows`` using only statistics stored in ``spec``."""
    M = _encode(spec, rows)
    names = spec.encoded_names
    keep = [j for j, n in enumerate(names) if n not in spec.dropped]
    M = M[:, keep]
    kept = [names[j] for j in keep]
    if spec.standardize:
        mu = np.array([spec.means[n] for n in kept])
        sd = np.array([spec.stds[n] for n in kept])
        M = (M - mu) / sd
    return Dataset(M, rows.label, tuple(kept))


class TabularTransformer(TransformerMixin, BaseEstimator):
    """Median imputation, one-hot encoding and optional standardization.

    Parameters
    ----------
    standardize : bool, default=False
        Scale every encoded column to zero mean and unit variance using
        training statistics. Constant columns are dropped.
    """

    def __init__(self, standardize=False):
        self.standardize = standardize

    def fit(self, X: LabeledTable, y=None):
        self.spec_ = fit_transform_spec(X, self.standardize)
        self.feature_names_out_ = np.array(self.spec_.feature_names, dtype=object)
        return self

    def transform(self, X: LabeledTable) -> np.ndarray:
        return self.transform_dataset(X).X

    def transform_dataset(self, X: LabeledTable) -> Dataset:
        if not hasattr(self, "spec_"):
            raise NotFittedError("TabularTransformer is not fitted yet")
        return apply_transform(self.spec_, X)

    def get_feature_names_out(self, input_features=None):
        return self.feature_names_out_

    def save(self, path):
        Path(path).write_text(json.dumps(self.spec_.to_dict(), indent=2, sort_keys=True))

    @classmethod
    def load(cls, path) -> "TabularTransformer":
        spec = FittedTransform.from_dict(json.loads(Path(path).read_text()))
        obj = cls(standardize=spec.standardize)
        obj.spec_ = spec
        obj.feature_names_out_ = np.array(spec.feature_names, dtype=object)
        return obj


@dataclass(frozen=True)
class SplitPair:
    """Disjoint train/test row partitions (before any transform)."""

    train: LabeledTable
    test: LabeledTable
    train_index: np.ndarray
    test_index: np.ndarray
    ratio: float
    seed: int


def split_sizes(n: int, ratio: float) -> tuple[int, int]:
    """Train/test sizes with round-half-up on ``ratio * n``."""
    if not 0.0 < ratio < 1.0:
        raise SplitError(f"ratio must lie in (0, 1), got {ratio}")
    n_train = int(math.floor(ratio * n + 0.5))
    n_test = n - n_train
    if n_train == 0 or n_test == 0:
        raise SplitError(f"ratio {ratio} on {n} rows leaves an empty partition")
    return n_train, n_test


def permuted_split(n: int, ratio: float, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Seeded permutation of ``range(n)`` cut at the rounded ratio."""
    n_train, _ = split_sizes(n, ratio)
    order = np.random.default_rng(seed).permutation(n)
    return order[:n_train], order[n_train:]


def train_test_split(data: LabeledTable, ratio: float = 0.7, seed: int = 42) -> SplitPair:
    if data.n_rows < 2:
        raise SplitError("need at least two rows to split")
    train_idx, test_idx = permuted_split(data.n_rows, ratio, seed)
    return SplitPair(data.take(train_idx), data.take(test_idx), train_idx, test_idx, ratio, seed)
