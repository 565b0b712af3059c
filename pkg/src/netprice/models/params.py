"""Hyperparameter names, defaults and validation.

Run specs and reports use the Spark-style names (``maxBins``,
``regParam`` ...); estimator constructors use snake_case. ``ALIASES`` maps
the former onto the latter.
"""
from __future__ import annotations

import math

from ..exceptions import GridError

ALIASES = {
    "n_estimators": "n_estimators",
    "max_depth": "max_depth",
    "maxBins": "max_bins",
    "minInfoGain": "min_info_gain",
    "maxIter": "max_iter",
    "regParam": "reg_param",
    "elasticNetParam": "elastic_net_param",
    "standardization": "standardization",
    "learning_rate": "learning_rate",
    "feature_subset": "feature_subset",
    "bootstrap": "bootstrap",
    "seed": "seed",
}
SPARK_NAMES = {v: k for k, v in ALIASES.items()}

FEATURE_SUBSETS = ("all", "onethird", "sqrt")

# Keys each estimator kind accepts, in ParamMap spelling.
RELEVANT = {
    "DT": ("max_depth", "maxBins", "minInfoGain", "seed"),
    "RF": ("n_estimators", "max_depth", "maxBins", "minInfoGain",
           "feature_subset", "bootstrap", "seed"),
    "GBT": ("maxIter", "max_depth", "maxBins", "minInfoGain", "learning_rate", "seed"),
    "LR": ("maxIter", "regParam", "elasticNetParam", "standardization", "seed"),
}

DEFAULTS = {
    "DT": {"max_depth": 5, "maxBins": 32, "minInfoGain": 0.0, "seed": 42},
    "RF": {"n_estimators": 20, "max_depth": 5, "maxBins": 32, "minInfoGain": 0.0,
           "feature_subset": "onethird", "bootstrap": True, "seed": 42},
    "GBT": {"maxIter": 20, "max_depth": 5, "maxBins": 32, "minInfoGain": 0.0,
            "learning_rate": 0.1, "seed": 42},
    "LR": {"maxIter": 100, "regParam": 0.0, "elasticNetParam": 0.0,
           "standardization": True, "seed": 42},
}


def _is_int(v) -> bool:
    return isinstance(v, int) and not isinstance(v, bool)


def _is_real(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool) and not math.isnan(v)


def _check(name, value):
    if name == "max_depth":
        ok = _is_int(value) and value >= 1
    elif name == "maxBins":
        ok = _is_int(value) and value >= 2
    elif name == "n_estimators":
        ok = _is_int(value) and value >= 1
    elif name == "maxIter":
        ok = _is_int(value) and value >= 0
    elif name in ("minInfoGain", "regParam"):
        ok = _is_real(value) and value >= 0
    elif name == "elasticNetParam":
        ok = _is_real(value) and 0 <= value <= 1
    elif name == "learning_rate":
        ok = _is_real(value) and 0 < value <= 1
    elif name in ("standardization", "bootstrap"):
        ok = isinstance(value, bool)
    elif name == "feature_subset":
        ok = value in FEATURE_SUBSETS
    elif name == "seed":
        ok = _is_int(value)
    else:
        raise GridError(f"unknown hyperparameter {name!r}")
    if not ok:
        raise GridError(f"invalid value for {name}: {value!r}")


def to_param_map(params: dict) -> dict:
    """Normalize keys to ParamMap spelling (accepts either spelling)."""
    out = {}
    for key, value in params.items():
        name = SPARK_NAMES.get(key, key)
        if name not in ALIASES:
            raise GridError(f"unknown hyperparameter {key!r}")
        out[name] = value
    return out


def resolve_params(kind: str, params: dict | None = None) -> dict:
    """Validate ``params`` for estimator ``kind`` and fill defaults."""
    if kind not in RELEVANT:
        raise GridError(f"unknown estimator kind {kind!r}; expected one of {sorted(RELEVANT)}")
    params = to_param_map(params or {})
    extra = sorted(set(params) - set(RELEVANT[kind]))
    if extra:
        raise GridError(f"{kind} does not take {extra}")
    full = {**DEFAULTS[kind], **params}
    for name, value in full.items():
        _check(name, value)
    return full


def estimator_kwargs(param_map: dict) -> dict:
    return {ALIASES[k]: v for k, v in param_map.items()}
