"""Run specs and the end-to-end stages behind the command line.

Each ``run_*`` function is a plain function of a :class:`RunSpec` so the
whole workflow can be driven from Python as well as from the CLI.
"""
from __future__ import annotations

import json
import logging
import os
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .evaluation import MetricPair, overfit_check, permutation_importance
from .exceptions import ConfigError, ShapeError
from .features import TabularTransformer, train_test_split
from .ingest import (LabeledTable, build_labeled, concat_years, drop_sparse_columns,
                     filter_label_source, labeled_from_dict, labeled_to_dict,
                     load_column_spec, load_table)
from .models import ESTIMATORS, load_model, save_model
from .models.params import resolve_params
from .tuning import CV, TVS, cv_fit, expand_grid, tvs_fit

logger = logging.getLogger(__name__)

SPEC_VERSION = 1
ALGORITHMS = ("RF", "GBT", "DT", "LR")
VALIDATORS = (TVS, CV)
LABEL_POLICIES = ("combined", "public_only", "private_only")


@dataclass
class RunSpec:
    """Declarative description of one benchmark run.

    Relative paths are resolved against ``base_dir`` (the directory of the
    spec file).
    """

    inputs: list[tuple[Path, int]]
    output_dir: Path
    column_spec: Path | None = None
    label_policy: str = "combined"
    max_missing_fraction: float = 0.5
    split_ratio: float = 0.7
    seed: int = 42
    standardize_features: bool = False
    estimators: dict[str, dict] = field(default_factory=dict)
    validators: dict[str, dict] = field(default_factory=dict)
    importance_repeats: int = 5
    overfit_threshold: float = 0.05

    @property
    def snapshot_path(self) -> Path:
        return self.output_dir / "snapshot.json"

    @property
    def ingest_report_path(self) -> Path:
        return self.output_dir / "ingest_report.json"

    @property
    def transform_path(self) -> Path:
        return self.output_dir / "transform.json"

    @property
    def report_path(self) -> Path:
        return self.output_dir / "report.json"

    @property
    def models_dir(self) -> Path:
        return self.output_dir / "models"


def _require(payload, key, kind):
    if key not in payload:
        raise ConfigError(f"run spec is missing {key!r}")
    if not isinstance(payload[key], kind):
        raise ConfigError(f"run spec field {key!r} has the wrong type")
    return payload[key]


def parse_run_spec(payload: dict, base_dir: Path | str = ".", check_paths: bool = True) -> RunSpec:
    base_dir = Path(base_dir)
    version = payload.get("spec_version")
    if version != SPEC_VERSION:
        raise ConfigError(f"unsupported spec_version {version!r} (expected {SPEC_VERSION})")

    inputs = []
    for entry in _require(payload, "inputs", list):
        if not isinstance(entry, dict) or "path" not in entry or "year" not in entry:
            raise ConfigError(f"input entries need 'path' and 'year': {entry!r}")
        inputs.append((base_dir / entry["path"], int(entry["year"])))
    column_spec = payload.get("column_spec")
    column_spec = base_dir / column_spec if column_spec else None
    if check_paths:
        for path in [p for p, _ in inputs] + ([column_spec] if column_spec else []):
            if not path.exists():
                raise ConfigError(f"path does not exist: {path}")

    estimators = _require(payload, "estimators", dict)
    for name, grid in estimators.items():
        if name not in ESTIMATORS:
            raise ConfigError(f"unknown estimator {name!r}; expected one of {list(ESTIMATORS)}")
        try:
            for params in expand_grid(grid or {}):
                resolve_params(name, params)
        except Exception as exc:
            raise ConfigError(f"bad grid for {name}: {exc}") from exc
    validators = _require(payload, "validators", dict)
    for name in validators:
        if name not in VALIDATORS:
            raise ConfigError(f"unknown validator {name!r}; expected one of {list(VALIDATORS)}")
    if not estimators or not validators:
        raise ConfigError("enable at least one estimator and one validator")

    policy = payload.get("label_policy", "combined")
    if policy not in LABEL_POLICIES:
        raise ConfigError(f"label_policy must be one of {LABEL_POLICIES}")
    split = payload.get("split", {})
    return RunSpec(
        inputs=inputs,
        output_dir=base_dir / payload.get("output_dir", "out"),
        column_spec=column_spec,
        label_policy=policy,
        max_missing_fraction=float(payload.get("max_missing_fraction", 0.5)),
        split_ratio=float(split.get("ratio", 0.7)),
        seed=int(payload.get("seed", 42)),
        standardize_features=bool(payload.get("standardize_features", False)),
        estimators={k: dict(v or {}) for k, v in estimators.items()},
        validators={k: dict(v or {}) for k, v in validators.items()},
        importance_repeats=int(payload.get("importance", {}).get("repeats", 5)),
        overfit_threshold=float(payload.get("overfit_threshold", 0.05)),
    )


def load_run_spec(path, seed: int | None = None, check_paths: bool = True) -> RunSpec:
    path = Path(path)
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read run spec {path}: {exc}") from exc
    spec = parse_run_spec(payload, path.parent, check_paths)
    if seed is not None:
        spec.seed = seed
    return spec


def _atomic_write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


def dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


# -- ingest ------------------------------------------------------------------

def run_ingest(spec: RunSpec, n_jobs: int = 1) -> tuple[LabeledTable, dict]:
    """Load, concatenate, prune and label the inputs; persist snapshot and report."""
    columns = load_column_spec(spec.column_spec)
    kinds = {c["name"]: c["kind"] for c in columns}

    def load(item):
        path, year = item
        return load_table(path, year, kinds)

    if n_jobs > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            tables = list(pool.map(load, spec.inputs))
    else:
        tables = [load(item) for item in spec.inputs]
    table = concat_years(tables)
    rows_read = table.n_rows
    missing_by_reason = dict(sorted(table.missing_counts().items()))

    table, dropped_cols = drop_sparse_columns(table, spec.max_missing_fraction)
    features = [c["name"] for c in columns if c["name"] in table.columns]
    absent = [c["name"] for c in columns
              if c["name"] not in table.columns and c["name"] not in dropped_cols]
    if absent:
        logger.warning("declared columns absent from every input: %s", absent)
    labeled = build_labeled(table, features)
    n_labeled = labeled.n_rows
    labeled = filter_label_source(labeled, spec.label_policy)

    report = {
        "rows_read": rows_read,
        "rows_dropped_no_label": labeled.n_dropped,
        "rows_filtered_by_policy": n_labeled - labeled.n_rows,
        "rows_kept": labeled.n_rows,
        "label_policy": spec.label_policy,
        "warnings": dict(sorted(table.warnings.items())),
        "missing_by_reason": missing_by_reason,
        "columns_dropped_for_missingness": dropped_cols,
        "columns_absent": absent,
        "feature_columns": features,
        "sources": [{"path": Path(p).name, "year": y} for p, y in table.provenance],
    }
    _atomic_write(spec.snapshot_path, json.dumps(labeled_to_dict(labeled), sort_keys=True))
    _atomic_write(spec.ingest_report_path, dump_json(report))
    return labeled, report


def load_snapshot(spec: RunSpec) -> LabeledTable:
    return labeled_from_dict(json.loads(spec.snapshot_path.read_text(encoding="utf-8")))


# -- train -------------------------------------------------------------------

def _prepare(spec: RunSpec, labeled: LabeledTable):
    pair = train_test_split(labeled, spec.split_ratio, spec.seed)
    transformer = TabularTransformer(standardize=spec.standardize_features).fit(pair.train)
    return pair, transformer, transformer.transform_dataset(pair.train), transformer.transform_dataset(pair.test)


def _train_cell(spec, algorithm, validator, train, test, n_jobs):
    grid = spec.estimators[algorithm] or {}
    base = {"seed": spec.seed}
    opts = spec.validators[validator]
    if validator == TVS:
        result = tvs_fit(algorithm, grid, train, opts.get("inner_ratio", 0.75), spec.seed, base, n_jobs)
    else:
        result = cv_fit(algorithm, grid, train, int(opts.get("k", 3)), spec.seed, base, n_jobs)
    model = result.best_model.model_
    test_pair = MetricPair.score(test.y, model.predict(test.X))
    overfit = overfit_check(model, train, test, spec.overfit_threshold)
    params = {**base, **result.best_params}
    model_path = spec.models_dir / f"{algorithm}_{validator}.json"
    save_model(model_path, model, params, train.feature_names)
    return {
        "algorithm": algorithm,
        "validator": validator,
        "status": "ok",
        "test_r2": test_pair.r2,
        "test_rmse": test_pair.rmse,
        "train_r2": overfit.train.r2,
        "train_rmse": overfit.train.rmse,
        "fit_time": round(result.fit_time, 2),
        "best_params": result.best_params,
        "grid_size": result.grid_size,
        "k_or_ratio": result.k_or_ratio,
        "validation_rmse": [{"params": p, "rmse": s} for p, s in result.validation_scores],
        "overfit": overfit.to_dict(),
        "model_path": str(model_path.relative_to(spec.output_dir)),
    }


def run_train(spec: RunSpec, n_jobs: int = 1) -> dict:
    """Tune, refit and score every (algorithm, validator) cell; write ``report.json``."""
    if spec.snapshot_path.exists():
        labeled = load_snapshot(spec)
    else:
        labeled, _ = run_ingest(spec, n_jobs)
    pair, transformer, train, test = _prepare(spec, labeled)
    spec.models_dir.mkdir(parents=True, exist_ok=True)
    transformer.save(spec.transform_path)

    rows = []
    for algorithm in ALGORITHMS:
        if algorithm not in spec.estimators:
            continue
        for validator in VALIDATORS:
            if validator not in spec.validators:
                continue
            try:
                rows.append(_train_cell(spec, algorithm, validator, train, test, n_jobs))
            except Exception as exc:
                logger.exception("%s/%s failed", algorithm, validator)
                rows.append({"algorithm": algorithm, "validator": validator,
                             "status": "failed", "error": f"{type(exc).__name__}: {exc}"})
    report = {
        "spec_version": SPEC_VERSION,
        "seed": spec.seed,
        "split_ratio": spec.split_ratio,
        "n_train": train.n_rows,
        "n_test": test.n_rows,
        "feature_names": list(train.feature_names),
        "metrics_on": "outer test partition",
        "rows": rows,
    }
    _atomic_write(spec.report_path, dump_json(report))
    return report


def strip_timing(obj):
    """Copy of a report with every ``fit_time`` field removed."""
    if isinstance(obj, dict):
        return {k: strip_timing(v) for k, v in obj.items() if k != "fit_time"}
    if isinstance(obj, list):
        return [strip_timing(v) for v in obj]
    return obj


# -- importance --------------------------------------------------------------

def run_importance(spec: RunSpec, model_path) -> tuple[dict, str]:
    """Permutation importance of a saved model on the outer test partition."""
    model_path = Path(model_path)
    model, doc = load_model(model_path)
    labeled = load_snapshot(spec) if spec.snapshot_path.exists() else run_ingest(spec)[0]
    pair = train_test_split(labeled, spec.split_ratio, spec.seed)
    if spec.transform_path.exists():
        transformer = TabularTransformer.load(spec.transform_path)
    else:
        transformer = TabularTransformer(standardize=spec.standardize_features).fit(pair.train)
    test = transformer.transform_dataset(pair.test)
    if test.n_features != model.n_features:
        raise ShapeError(f"model expects {model.n_features} features, "
                         f"snapshot yields {test.n_features}")
    report = permutation_importance(model, test.X, test.y, spec.importance_repeats,
                                    spec.seed, test.feature_names)
    payload = {"model": model_path.name, "kind": doc["kind"], **report.to_dict()}
    stem = spec.output_dir / f"importance_{model_path.stem}"
    _atomic_write(stem.with_suffix(".json"), dump_json(payload))
    text = report.to_text()
    _atomic_write(stem.with_suffix(".txt"), text)
    return payload, text


__all__ = ["RunSpec", "parse_run_spec", "load_run_spec", "run_ingest", "run_train",
           "run_importance", "load_snapshot", "strip_timing"]
