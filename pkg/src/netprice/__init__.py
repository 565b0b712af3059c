"""Tabular regression toolkit for predicting college net price."""
from .evaluation import overfit_check, permutation_importance, r2, rmse
from .features import Dataset, TabularTransformer, train_test_split
from .models import (DecisionTreeRegressor, GBTRegressor, LinearRegression,
                     RandomForestRegressor, make_estimator)
from .tuning import cv_fit, expand_grid, tvs_fit

__version__ = "0.1.0"

__all__ = [
    "Dataset", "TabularTransformer", "train_test_split",
    "DecisionTreeRegressor", "RandomForestRegressor", "GBTRegressor", "LinearRegression",
    "make_estimator", "expand_grid", "tvs_fit", "cv_fit",
    "rmse", "r2", "permutation_importance", "overfit_check",
]
