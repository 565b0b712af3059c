import numpy as np
import pytest
from hypothesis import given, strategies as st

from netprice.exceptions import GridError, SplitError
from netprice.features import Dataset
from netprice.models import make_estimator
from netprice.tuning import cv_fit, cv_folds, expand_grid, tvs_fit


def dataset(X, y):
    return Dataset(X, y, tuple(f"x{j}" for j in range(X.shape[1])))


def test_expand_grid_examples():
    assert len(expand_grid({"max_depth": [3, 5], "n_estimators": [10]})) == 2
    assert expand_grid({"a": [1], "b": [1]}) == [{"a": 1, "b": 1}]
    maps = expand_grid({"max_depth": [3, 5], "maxBins": [16, 32, 64]})
    assert maps == [{"maxBins": b, "max_depth": d} for b in (16, 32, 64) for d in (3, 5)]
    assert expand_grid({}) == [{}]
    with pytest.raises(GridError):
        expand_grid({"a": []})


@given(st.dictionaries(st.text(min_size=1, max_size=3),
                       st.lists(st.integers(), min_size=1, max_size=3), max_size=4))
def test_expand_grid_size_is_product(grid):
    assert len(expand_grid(grid)) == int(np.prod([len(v) for v in grid.values()]))


def test_cv_folds_partition():
    folds = cv_folds(9, 3, 0)
    assert [len(f) for f in folds] == [3, 3, 3]
    assert sorted(np.concatenate(folds)) == list(range(9))
    with pytest.raises(SplitError):
        cv_folds(2, 3, 0)
    with pytest.raises(SplitError):
        cv_folds(5, 1, 0)


@given(st.integers(2, 200), st.integers(2, 10), st.integers(0, 100))
def test_cv_folds_property(n, k, seed):
    if k > n:
        return
    folds = cv_folds(n, k, seed)
    sizes = [len(f) for f in folds]
    assert max(sizes) - min(sizes) <= 1
    assert sorted(np.concatenate(folds)) == list(range(n))


def test_singleton_grid_equals_direct_fit(rng):
    X = rng.normal(size=(100, 3))
    y = X @ [1.0, 2, 3] + rng.normal(size=100)
    data = dataset(X, y)
    result = tvs_fit("GBT", {"maxIter": [5]}, data, 0.75, 0)
    direct = make_estimator("GBT", {"maxIter": 5}).fit(X, y)
    assert result.best_params == {"maxIter": 5}
    assert np.array_equal(result.best_model.predict(X), direct.predict(X))
    assert result.fit_time > 0
    assert result.grid_size == 1


def test_tvs_inner_sizes(rng, monkeypatch):
    seen = []
    import netprice.tuning as tuning
    original = tuning._fit_score

    def spy(kind, params, train, fit_rows, val_rows, n_jobs):
        seen.append((len(fit_rows), len(val_rows)))
        return original(kind, params, train, fit_rows, val_rows, n_jobs)

    monkeypatch.setattr(tuning, "_fit_score", spy)
    X = rng.normal(size=(100, 2))
    tvs_fit("LR", {}, dataset(X, X[:, 0]), 0.75, 0)
    assert seen == [(75, 25)]


def test_true_model_wins_tvs():
    """Linear data: a linear candidate should beat a heavily penalized (constant) one."""
    wins = 0
    for seed in range(100):
        r = np.random.default_rng(seed)
        X = r.normal(size=(60, 1))
        y = 3 * X[:, 0] + r.normal(scale=0.5, size=60)
        result = tvs_fit("LR", {"regParam": [1e9, 0.0]}, dataset(X, y), 0.75, seed)
        wins += result.best_params["regParam"] == 0.0
    assert wins >= 95


def test_cv_score_is_fold_mean(rng, monkeypatch):
    import netprice.tuning as tuning
    scores = iter([2.0, 4.0])
    monkeypatch.setattr(tuning, "_fit_score", lambda *a: next(scores))
    X = rng.normal(size=(10, 1))
    result = cv_fit("LR", {}, dataset(X, X[:, 0]), 2, 0)
    assert result.validation_scores == [({}, 3.0)]


def test_ties_go_to_first_candidate(rng, monkeypatch):
    import netprice.tuning as tuning
    monkeypatch.setattr(tuning, "_fit_score", lambda *a: 1.0)
    X = rng.normal(size=(20, 1))
    result = cv_fit("DT", {"max_depth": [4, 2, 3]}, dataset(X, X[:, 0]), 2, 0)
    assert result.best_params == {"max_depth": 4}


def test_best_params_in_grid_and_deterministic(rng):
    X = rng.normal(size=(90, 3))
    y = np.abs(X[:, 0]) * 4 + rng.normal(size=90)
    grid = {"max_depth": [1, 3], "maxBins": [8, 32]}
    a = cv_fit("DT", grid, dataset(X, y), 3, 7)
    b = cv_fit("DT", grid, dataset(X, y), 3, 7)
    assert a.best_params in expand_grid(grid)
    assert a.validation_scores == b.validation_scores
    assert a.best_params == b.best_params


def test_parallel_matches_serial(rng):
    X = rng.normal(size=(90, 3))
    y = X[:, 1] + rng.normal(size=90)
    grid = {"n_estimators": [3, 5], "max_depth": [2, 3]}
    serial = cv_fit("RF", grid, dataset(X, y), 3, 1, n_jobs=1)
    threaded = cv_fit("RF", grid, dataset(X, y), 3, 1, n_jobs=3)
    assert serial.validation_scores == threaded.validation_scores


def test_same_choice_gives_same_test_metrics(rng):
    """When TVS and CV pick the same candidate the refit models are identical."""
    X = rng.normal(size=(120, 2))
    y = X @ [2.0, -1] + rng.normal(size=120)
    data = dataset(X, y)
    a = tvs_fit("DT", {"max_depth": [4]}, data, 0.75, 3)
    b = cv_fit("DT", {"max_depth": [4]}, data, 3, 3)
    Xt = rng.normal(size=(50, 2))
    assert np.array_equal(a.best_model.predict(Xt), b.best_model.predict(Xt))


def test_refit_uses_full_training_partition(rng):
    X = rng.normal(size=(40, 1))
    result = tvs_fit("DT", {"max_depth": [2]}, dataset(X, X[:, 0]), 0.75, 0)
    assert result.best_model.model_.n_train[0] == 40


def test_invalid_grid_rejected(rng):
    X = rng.normal(size=(20, 1))
    with pytest.raises(GridError):
        tvs_fit("LR", {"max_depth": [1]}, dataset(X, X[:, 0]), 0.75, 0)
