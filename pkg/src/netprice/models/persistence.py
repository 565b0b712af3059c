"""Self-describing JSON documents for fitted models."""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from ..exceptions import SchemaError
from .forest import ForestModel
from .gbt import GbtModel
from .linear import LinearModel
from .tree import TreeModel

FORMAT_VERSION = 1

_TREE_FIELDS = ("feature", "threshold", "left", "right", "value", "n_train", "gain", "node_depth")


def _tree_to_dict(tree: TreeModel) -> dict:
    out = {"n_features": tree.n_features}
    for name in _TREE_FIELDS:
        arr = getattr(tree, name)
        # NaN thresholds on leaves are not valid JSON.
        out[name] = [None if isinstance(v, float) and np.isnan(v) else v for v in arr.tolist()]
    return out


def _tree_from_dict(d: dict) -> TreeModel:
    kw = {}
    for name in _TREE_FIELDS:
        values = d[name]
        if name == "threshold":
            kw[name] = np.array([np.nan if v is None else v for v in values], dtype=float)
        elif name in ("value", "n_train", "gain"):
            kw[name] = np.array(values, dtype=float)
        else:
            kw[name] = np.array(values, dtype=np.intp)
    return TreeModel(n_features=int(d["n_features"]), **kw)


def model_to_dict(model, params: dict | None = None, feature_names=None) -> dict:
    doc = {"format_version": FORMAT_VERSION, "params": dict(params or {}),
           "feature_names": list(feature_names) if feature_names is not None else None}
    if isinstance(model, TreeModel):
        doc.update(kind="tree", tree=_tree_to_dict(model))
    elif isinstance(model, ForestModel):
        doc.update(kind="forest", n_features=model.n_features,
                   tree_seeds=list(model.tree_seeds),
                   trees=[_tree_to_dict(t) for t in model.trees])
    elif isinstance(model, GbtModel):
        doc.update(kind="gbt", n_features=model.n_features,
                   base_prediction=model.base_prediction,
                   learning_rates=list(model.learning_rates),
                   stages=[_tree_to_dict(t) for t in model.stages])
    elif isinstance(model, LinearModel):
        doc.update(kind="linear", weights=model.weights.tolist(), intercept=model.intercept,
                   standardized_fit=model.standardized_fit, converged=model.converged,
                   n_sweeps=model.n_sweeps)
    else:
        raise TypeError(f"cannot serialize {type(model).__name__}")
    return doc


def model_from_dict(doc: dict):
    if doc.get("format_version") != FORMAT_VERSION:
        raise SchemaError(f"unsupported model format {doc.get('format_version')!r}")
    kind = doc.get("kind")
    if kind == "tree":
        return _tree_from_dict(doc["tree"])
    if kind == "forest":
        return ForestModel(tuple(_tree_from_dict(t) for t in doc["trees"]),
                           tuple(doc["tree_seeds"]), int(doc["n_features"]))
    if kind == "gbt":
        return GbtModel(float(doc["base_prediction"]),
                        tuple(_tree_from_dict(t) for t in doc["stages"]),
                        tuple(doc["learning_rates"]), int(doc["n_features"]))
    if kind == "linear":
        return LinearModel(np.array(doc["weights"], dtype=float), float(doc["intercept"]),
                           bool(doc["standardized_fit"]), bool(doc["converged"]),
                           int(doc["n_sweeps"]))
    raise SchemaError(f"unknown model kind {kind!r}")


def save_model(path, model, params=None, feature_names=None):
    Path(path).write_text(json.dumps(model_to_dict(model, params, feature_names), sort_keys=True))


def load_model(path):
    """Return ``(model, document)``."""
    doc = json.loads(Path(path).read_text())
    return model_from_dict(doc), doc
