import json
import math
import warnings

import numpy as np
import pandas as pd
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from alphanorm.data import DataError, DatasetSchema, decode_names, load_csv, one_hot, week_parts


def write(tmp_path, text, name="d.csv"):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_schema_rules(tmp_path):
    with pytest.raises(DataError):
        DatasetSchema(response="y", numeric_features=["y", "x"])
    s = DatasetSchema.infer(["y", "a", "iri_key", "b"])
    assert s.numeric_features == ("a", "b")
    with pytest.raises(DataError):
        DatasetSchema.infer(["a", "b"], response="y")
    p = write(tmp_path, json.dumps({"response": "q", "categorical_features": ["c"]}), "s.json")
    s = DatasetSchema.from_json(p)
    assert s.categorical_features == ("c",)
    assert DatasetSchema(**s.to_dict()) == s
    with pytest.raises(DataError):
        DatasetSchema.from_json(write(tmp_path, "{", "bad.json"))
    with pytest.raises(DataError):
        DatasetSchema.from_json(write(tmp_path, json.dumps({"response": "q", "extra": 1}), "x.json"))
    with pytest.raises(DataError):
        DatasetSchema.from_json(write(tmp_path, json.dumps({"numeric_features": []}), "n.json"))
    with pytest.raises(DataError):
        DatasetSchema.from_json(tmp_path / "missing.json")


def test_load_csv_examples(tmp_path):
    schema = DatasetSchema(response="q", numeric_features=["price"], log_transform=["q"])
    with pytest.raises(DataError):
        load_csv(write(tmp_path, ""), schema)
    with pytest.raises(DataError):
        load_csv(tmp_path / "nope.csv", schema)
    df, rep = load_csv(write(tmp_path, "q,price\n2,1.0\n3,\n5,2.5\n"), schema)
    assert len(df) == 2 and rep.n_missing == 1 and rep.n_kept == 2
    np.testing.assert_allclose(df.q, [math.log(2), math.log(5)])
    with pytest.raises(DataError, match="missing columns"):
        load_csv(write(tmp_path, "q,cost\n1,2\n"), schema)


def test_load_csv_nonpositive_log_rows(tmp_path):
    schema = DatasetSchema(response="q", numeric_features=["price"], log_transform=["q", "price"])
    df, rep = load_csv(write(tmp_path, "q,price\n0,1\n2,-1\n4,2\ninf,3\n"), schema)
    assert rep.n_read == 4 and rep.n_missing == 1 and rep.n_nonpositive_log == 2
    assert len(df) == 1
    with pytest.raises(DataError, match="no usable rows"):
        load_csv(write(tmp_path, "q,price\n0,1\n"), schema)


def test_week_parts_examples():
    year, woy = week_parts([1, 52, 53, 104, 105, 300])
    assert list(year) == [1, 1, 2, 2, 3, 6]
    assert list(woy) == [1, 52, 1, 52, 1, 40]


@given(st.integers(1, 10_000))
def test_week_parts_roundtrip(w):
    year, woy = week_parts([w])
    assert (year[0] - 1) * 52 + woy[0] == w
    assert 1 <= woy[0] <= 52


def test_one_hot_reference_level():
    df = pd.DataFrame({"y": [1.0, 2, 3, 4], "x": [0.5, 1, 2, 3], "c": ["B", "A", "C", "B"]})
    enc = one_hot(df, DatasetSchema(response="y", numeric_features=["x"], categorical_features=["c"]))
    assert enc.column_names == ["x", "c=B", "c=C"]
    assert enc.dropped_reference == {"c": "A"}
    np.testing.assert_array_equal(enc.matrix[0], [0.5, 1.0, 0.0])
    np.testing.assert_array_equal(enc.matrix[1], [1.0, 0.0, 0.0])


def test_one_hot_week_and_promotion():
    df = pd.DataFrame({"y": [1.0, 2, 3, 4], "promo": [0, 1, 0, 1], "week": [1, 53, 2, 105]})
    schema = DatasetSchema(response="y", promotion_column="promo", week_column="week")
    enc = one_hot(df, schema)
    assert enc.column_names[0] == "promo"
    assert "year=2" in enc.column_names and "year=3" in enc.column_names
    assert "week_of_year=2" in enc.column_names
    assert enc.dropped_reference == {"year": 1, "week_of_year": 1}
    enc2 = one_hot(df, schema, include_promotion=False)
    assert "promo" not in enc2.column_names


def test_week_levels_sort_numerically():
    weeks = [1, 2, 10, 11, 12, 520]
    df = pd.DataFrame({"y": np.arange(6.0), "week": weeks})
    enc = one_hot(df, DatasetSchema(response="y", week_column="week"))
    assert enc.levels["year"] == [1, 10]
    assert enc.levels["week_of_year"] == [1, 2, 10, 11, 12, 52]


def test_single_level_categorical_dropped():
    df = pd.DataFrame({"y": [1.0, 2], "c": ["A", "A"], "x": [1.0, 2.0]})
    with pytest.warns(UserWarning, match="single level"):
        enc = one_hot(df, DatasetSchema(response="y", numeric_features=["x"], categorical_features=["c"]))
    assert enc.column_names == ["x"]


def test_reuse_levels_for_new_rows():
    train = pd.DataFrame({"y": [1.0, 2, 3], "c": ["A", "B", "C"]})
    schema = DatasetSchema(response="y", categorical_features=["c"])
    enc = one_hot(train, schema)
    new = pd.DataFrame({"y": [0.0, 0.0], "c": ["C", "Z"]})
    enc2 = one_hot(new, schema, enc.levels)
    assert enc2.column_names == enc.column_names
    np.testing.assert_array_equal(enc2.matrix, [[0.0, 1.0], [0.0, 0.0]])


@given(st.lists(st.sampled_from(list("ABCDE")), min_size=2, max_size=40), st.lists(st.integers(1, 400), min_size=40, max_size=40))
@settings(max_examples=40)
def test_encoding_invariants_and_roundtrip(cats, weeks):
    n = len(cats)
    df = pd.DataFrame({"y": np.arange(float(n)), "c": cats, "week": weeks[:n]})
    schema = DatasetSchema(response="y", categorical_features=["c"], week_column="week")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")  # single-level draws
        enc = one_hot(df, schema)
    for var, levs in enc.levels.items():
        assert sum(name.startswith(var + "=") for name in enc.column_names) == len(levs) - 1
    if enc.matrix.size:
        assert np.all(enc.matrix.sum(axis=0) > 0)
    assert decode_names(enc.column_names, enc.dropped_reference) == enc.levels

