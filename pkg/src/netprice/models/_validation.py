"""Input checks shared by the estimators."""
import numpy as np
from sklearn.utils.validation import check_array, check_X_y

from ..exceptions import ShapeError


def check_training_data(X, y):
    X, y = check_X_y(X, y, dtype=np.float64, y_numeric=True)
    if X.shape[0] == 0:
        raise ValueError("training data is empty")
    return X, y


def check_features(X, n_features):
    """Validate a prediction matrix (a 1-D input is one row)."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X.reshape(1, -1)
    X = check_array(X, dtype=np.float64, ensure_min_features=0)
    if X.shape[1] != n_features:
        raise ShapeError(f"model expects {n_features} features, got {X.shape[1]}")
    return X
