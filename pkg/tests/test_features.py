from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from netprice.exceptions import FitError, SchemaError, SplitError
from netprice.features import (FittedTransform, TabularTransformer, apply_transform,
                               fit_transform_spec, split_sizes, train_test_split)
from netprice.ingest import (CATEGORICAL, NUMERIC, LabeledTable, Missing, Numeric,
                             RawTable, Text)


def labeled(numeric=None, categorical=None, label=None):
    columns, kinds = {}, {}
    for name, values in (numeric or {}).items():
        columns[name] = [Missing("empty") if v is None else Numeric(float(v)) for v in values]
        kinds[name] = NUMERIC
    for name, values in (categorical or {}).items():
        columns[name] = [Missing("null-sentinel") if v is None else Text(str(v)) for v in values]
        kinds[name] = CATEGORICAL
    n = len(next(iter(columns.values())))
    label = label if label is not None else list(range(n))
    return LabeledTable(RawTable(columns, kinds), label, ["public"] * n)


def test_median_imputation():
    spec = fit_transform_spec(labeled({"A": [1, None, 3]}))
    assert spec.numeric["A"] == 2.0
    data = apply_transform(spec, labeled({"A": [None, 5, 1]}))
    assert data.X[:, 0].tolist() == [2.0, 5.0, 1.0]


def test_one_hot_control():
    spec = fit_transform_spec(labeled(categorical={"CONTROL": [3, 1, 2, 1]}))
    assert spec.categorical["CONTROL"] == ("1", "2", "3")
    data = apply_transform(spec, labeled(categorical={"CONTROL": [2, 9, None]}))
    assert data.X.tolist() == [[0, 1, 0], [0, 0, 0], [0, 0, 0]]
    assert data.feature_names == ("CONTROL=1", "CONTROL=2", "CONTROL=3")


def test_output_order_numerics_then_one_hot():
    rows = labeled({"B": [1, 2], "A": [3, 4]}, {"C": ["x", "y"]})
    spec = fit_transform_spec(rows)
    assert apply_transform(spec, rows).feature_names == ("B", "A", "C=x", "C=y")


def test_zero_variance_dropped_when_standardizing(caplog):
    rows = labeled({"A": [2, 2, 2], "B": [1, 2, 3]})
    spec = fit_transform_spec(rows, standardize=True)
    assert spec.dropped == ("A",)
    assert apply_transform(spec, rows).feature_names == ("B",)
    assert "zero-variance" in caplog.text


def test_standardized_training_columns(rng):
    values = rng.normal(10, 3, 50)
    rows = labeled({"A": values, "B": values ** 2}, {"C": rng.integers(0, 3, 50)})
    data = apply_transform(fit_transform_spec(rows, True), rows)
    assert np.allclose(data.X.mean(axis=0), 0, atol=1e-9)
    assert np.allclose(data.X.std(axis=0), 1, atol=1e-9)


def test_fit_errors():
    with pytest.raises(FitError, match="C"):
        fit_transform_spec(labeled({"A": [1, 2]}, {"C": [None, None]}))
    spec = fit_transform_spec(labeled({"A": [1, 2]}))
    with pytest.raises(SchemaError):
        apply_transform(spec, labeled({"B": [1, 2]}))


def test_leakage_guard(rng):
    """Test rows are encoded with train statistics only."""
    values = rng.normal(size=40)
    rows = labeled({"A": values})
    pair = train_test_split(rows, 0.7, 3)
    spec = fit_transform_spec(pair.train, True)
    assert fit_transform_spec(pair.test, True) != spec
    train_vals = values[pair.train_index]
    expected = (values[pair.test_index] - train_vals.mean()) / train_vals.std()
    assert np.allclose(apply_transform(spec, pair.test).X[:, 0], expected, atol=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.permutations(list(range(8))))
def test_apply_is_row_wise(perm):
    rows = labeled({"A": [1, None, 3, 4, 5, None, 7, 8]}, {"C": list("abcabcax")})
    spec = fit_transform_spec(rows, True)
    full = apply_transform(spec, rows).X
    permuted = apply_transform(spec, rows.take(perm)).X
    assert np.array_equal(permuted, full[perm])


def test_one_hot_rows_sum():
    spec = fit_transform_spec(labeled(categorical={"C": ["a", "b"]}))
    X = apply_transform(spec, labeled(categorical={"C": ["a", "b", "z"]})).X
    assert X.sum(axis=1).tolist() == [1, 1, 0]


def test_split_sizes_and_determinism():
    rows = labeled({"A": list(range(10))})
    pair = train_test_split(rows, 0.7, 1)
    assert (pair.train.n_rows, pair.test.n_rows) == (7, 3)
    again = train_test_split(rows, 0.7, 1)
    assert np.array_equal(pair.train_index, again.train_index)
    assert set(pair.train_index).isdisjoint(pair.test_index)
    assert sorted(np.concatenate([pair.train_index, pair.test_index])) == list(range(10))


@given(st.integers(2, 500), st.floats(0.05, 0.95))
def test_split_size_rounding(n, ratio):
    try:
        n_train, n_test = split_sizes(n, ratio)
    except SplitError:
        return
    assert n_train + n_test == n
    assert abs(n_train - round(ratio * n)) <= 1


def test_split_errors():
    with pytest.raises(SplitError):
        train_test_split(labeled({"A": [1]}), 0.7, 0)
    with pytest.raises(SplitError):
        train_test_split(labeled({"A": [1, 2]}), 1.0, 0)
    with pytest.raises(SplitError):
        train_test_split(labeled({"A": [1, 2]}), 0.1, 0)


def test_transformer_estimator_api(tmp_path):
    rows = labeled({"A": [1, None, 3]}, {"C": ["x", "y", "x"]})
    tr = TabularTransformer(standardize=False).fit(rows)
    assert tr.get_params() == {"standardize": False}
    assert list(tr.get_feature_names_out()) == ["A", "C=x", "C=y"]
    assert tr.transform(rows).shape == (3, 3)
    tr.save(tmp_path / "t.json")
    back = TabularTransformer.load(tmp_path / "t.json")
    assert back.spec_ == tr.spec_
    assert FittedTransform.from_dict(tr.spec_.to_dict()) == tr.spec_


def test_test_partition_never_reaches_training():
    from netprice.models import make_estimator
    from netprice.models.persistence import model_to_dict
    from netprice.pipeline import RunSpec, _prepare

    rng = np.random.default_rng(7)
    n = 200
    cost = rng.uniform(1e4, 5e4, n).round().tolist()
    ctrl = rng.choice(["1", "2", "3"], n).tolist()
    label = (0.6 * np.array(cost) + rng.normal(0, 100, n)).clip(0).tolist()
    spec = RunSpec(inputs=[], output_dir=Path("unused"), seed=11)
    base = labeled({"COSTT4_A": cost}, {"CONTROL": ctrl}, label)

    test_rows = set(train_test_split(base, spec.split_ratio, spec.seed).test_index.tolist())
    cost2 = [1e9 if i in test_rows else v for i, v in enumerate(cost)]
    ctrl2 = ["99" if i in test_rows else v for i, v in enumerate(ctrl)]
    label2 = [0.0 if i in test_rows else v for i, v in enumerate(label)]
    mutated = labeled({"COSTT4_A": cost2}, {"CONTROL": ctrl2}, label2)

    fitted = []
    for data in (base, mutated):
        _, transformer, train, _ = _prepare(spec, data)
        est = make_estimator("DT", {"max_depth": 4}).fit(train.X, train.y)
        fitted.append((transformer.spec_.to_dict(), train.X.tolist(), train.y.tolist(),
                       model_to_dict(est.model_, {}, train.feature_names)))
    assert fitted[0] == fitted[1]
