"""Grid search under a train-validation split or k-fold cross-validation."""
from __future__ import annotations

import itertools
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .evaluation import rmse
from .exceptions import GridError, SplitError
from .features import Dataset, permuted_split
from .models import make_estimator, resolve_params

TVS = "TVS"
CV = "CV"


def expand_grid(grid: dict[str, list]) -> list[dict]:
    """Cartesian product of a grid, keys in sorted order, values as given."""
    keys = sorted(grid)
    for key in keys:
        values = grid[key]
        if not isinstance(values, (list, tuple)) or len(values) == 0:
            raise GridError(f"grid entry {key!r} needs a non-empty list of values")
    return [dict(zip(keys, combo)) for combo in itertools.product(*(grid[k] for k in keys))]


@dataclass
class TunedResult:
    kind: str
    best_params: dict
    best_model: object
    validation_scores: list[tuple[dict, float]]
    fit_time: float
    validator: str
    k_or_ratio: float

    @property
    def grid_size(self) -> int:
        return len(self.validation_scores)


def cv_folds(n: int, k: int, seed: int) -> list[np.ndarray]:
    """Seeded partition of ``range(n)`` into ``k`` folds whose sizes differ by at most one."""
    if k < 2:
        raise SplitError("cross-validation needs k >= 2")
    if k > n:
        raise SplitError(f"k={k} folds requested for only {n} rows")
    order = np.random.default_rng(seed).permutation(n)
    return [np.sort(f) for f in np.array_split(order, k)]


def _candidates(kind, grid, base_params):
    maps = expand_grid(grid)
    for m in maps:
        resolve_params(kind, {**(base_params or {}), **m})
    return maps


def _fit_score(kind, params, train: Dataset, fit_rows, val_rows, n_jobs):
    est = make_estimator(kind, params, n_jobs=n_jobs)
    est.fit(train.X[fit_rows], train.y[fit_rows])
    return rmse(train.y[val_rows], est.predict(train.X[val_rows]))


def _run(kind, grid, train, splits, base_params, n_jobs, validator, k_or_ratio):
    start = time.perf_counter()
    maps = _candidates(kind, grid, base_params)
    jobs = [({**(base_params or {}), **m}, fit, val) for m in maps for fit, val in splits]

    def evaluate(job):
        params, fit, val = job
        return _fit_score(kind, params, train, fit, val, 1)

    if n_jobs > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            scores = list(pool.map(evaluate, jobs))
    else:
        scores = [evaluate(job) for job in jobs]

    per_split = len(splits)
    validation = []
    best_i, best_score = 0, np.inf
    for i, m in enumerate(maps):
        score = float(np.mean(scores[i * per_split:(i + 1) * per_split]))
        validation.append((m, score))
        if score < best_score:
            best_i, best_score = i, score

    best = maps[best_i]
    model = make_estimator(kind, {**(base_params or {}), **best}, n_jobs=n_jobs)
    model.fit(train.X, train.y)
    elapsed = time.perf_counter() - start
    return TunedResult(kind, best, model, validation, max(elapsed, 1e-9), validator, k_or_ratio)


def tvs_fit(kind: str, grid: dict, train: Dataset, inner_ratio: float = 0.75, seed: int = 42,
            base_params: dict | None = None, n_jobs: int = 1) -> TunedResult:
    """Pick the candidate with the lowest RMSE on one seeded holdout, then refit on all of ``train``."""
    fit_rows, val_rows = permuted_split(train.n_rows, inner_ratio, seed)
    return _run(kind, grid, train, [(fit_rows, val_rows)], base_params, n_jobs, TVS, inner_ratio)


def cv_fit(kind: str, grid: dict, train: Dataset, k: int = 3, seed: int = 42,
           base_params: dict | None = None, n_jobs: int = 1) -> TunedResult:
    """Pick the candidate with the lowest mean held-out-fold RMSE, then refit on all of ``train``."""
    folds = cv_folds(train.n_rows, k, seed)
    all_rows = np.arange(train.n_rows)
    splits = [(np.setdiff1d(all_rows, f), f) for f in folds]
    return _run(kind, grid, train, splits, base_params, n_jobs, CV, float(k))
