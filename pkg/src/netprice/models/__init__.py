"""From-scratch regressors sharing one estimator contract."""
from __future__ import annotations

import numpy as np

from .binning import BinningSpec, compute_bins
from .forest import ForestModel, RandomForestRegressor, fit_forest
from .gbt import GBTRegressor, GbtModel, fit_gbt
from .linear import LinearModel, LinearRegression, fit_linear
from .params import DEFAULTS, estimator_kwargs, resolve_params
from .persistence import load_model, model_from_dict, model_to_dict, save_model
from .tree import DecisionTreeRegressor, TreeModel, fit_tree
from ._validation import check_features

ESTIMATORS = {
    "LR": LinearRegression,
    "DT": DecisionTreeRegressor,
    "RF": RandomForestRegressor,
    "GBT": GBTRegressor,
}


def make_estimator(kind: str, params: dict | None = None, n_jobs: int = 1):
    """Build an unfitted estimator from a ParamMap (either key spelling)."""
    kwargs = estimator_kwargs(resolve_params(kind, params))
    if kind == "RF":
        kwargs["n_jobs"] = n_jobs
    return ESTIMATORS[kind](**kwargs)


def predict(model, features) -> float:
    """Predict a single row with any fitted model."""
    row = np.asarray(features, dtype=float)
    if row.ndim != 1:
        raise ValueError("predict expects one row of features")
    return float(model.predict(check_features(row, model.n_features))[0])


__all__ = [
    "BinningSpec", "compute_bins", "TreeModel", "fit_tree", "DecisionTreeRegressor",
    "ForestModel", "fit_forest", "RandomForestRegressor", "GbtModel", "fit_gbt",
    "GBTRegressor", "LinearModel", "fit_linear", "LinearRegression", "ESTIMATORS",
    "DEFAULTS", "make_estimator", "resolve_params", "predict", "model_to_dict",
    "model_from_dict", "save_model", "load_model",
]
