"""Data layer: scaling, schema-driven loading, splits, synthetics, conversion."""

import math

import numpy as np
import pytest

from specrisk.data import (
    Dataset,
    _encode_onehot,
    apply_scaling,
    convert_libsvm,
    fit_scaling,
    load_delimited,
    load_schema,
    make_linabs_sampler,
    make_synthetic,
    split_shuffle,
    write_delimited,
)


def test_minmax_example():
    raw = np.array([[2.0], [4.0], [6.0]])
    scaling = fit_scaling(raw, ["numeric"])
    np.testing.assert_array_equal(scaling, [[2.0, 6.0]])
    X = apply_scaling(raw, scaling, ["numeric"], clamp=False)
    np.testing.assert_array_equal(X[:, 0], [0.0, 0.5, 1.0])


def test_constant_columns_map_to_one_half():
    raw = np.array([[3.0, 1.0], [3.0, 2.0]])
    scaling = fit_scaling(raw, ["numeric", "numeric"])
    X = apply_scaling(raw, scaling, ["numeric", "numeric"], clamp=False)
    np.testing.assert_array_equal(X[:, 0], [0.5, 0.5])
    np.testing.assert_array_equal(X[:, 1], [0.0, 1.0])


def test_clamp_only_affects_out_of_range_scaled_columns():
    raw = np.array([[0.0], [10.0]])
    scaling = fit_scaling(raw, ["numeric"])
    fresh = np.array([[-5.0], [15.0], [5.0]])
    loose = apply_scaling(fresh, scaling, ["numeric"], clamp=False)
    np.testing.assert_array_equal(loose[:, 0], [-0.5, 1.5, 0.5])
    tight = apply_scaling(fresh, scaling, ["numeric"], clamp=True)
    np.testing.assert_array_equal(tight[:, 0], [0.0, 1.0, 0.5])
    kept = apply_scaling(fresh, scaling, ["indicator"], clamp=True)
    np.testing.assert_array_equal(kept, fresh)


def test_scaling_a_scaled_matrix_changes_nothing():
    rng = np.random.default_rng(101)
    raw = np.hstack([rng.standard_normal((20, 3)), np.full((20, 1), 7.0)])
    kinds = ["numeric"] * 4
    first = apply_scaling(raw, fit_scaling(raw, kinds), kinds, clamp=False)
    second = apply_scaling(first, fit_scaling(first, kinds), kinds, clamp=False)
    np.testing.assert_array_equal(first, second)


def test_onehot_unknown_levels_become_all_zero_rows():
    block = _encode_onehot(["a", "c", "b", "zzz"], ["a", "b", "c"])
    np.testing.assert_array_equal(
        block,
        [[1, 0, 0], [0, 0, 1], [0, 1, 0], [0, 0, 0]],
    )


def _write(path, text):
    path.write_text(text, encoding="utf-8")
    return str(path)


def test_schema_file_parsing_and_errors(tmp_path):
    good = _write(
        tmp_path / "roles.txt",
        "# roles\n\nage = numeric\ncolor = categorical\nlabel = label\n",
    )
    assert load_schema(good) == {
        "age": "numeric",
        "color": "categorical",
        "label": "label",
    }
    with pytest.raises(ValueError, match="line 1"):
        load_schema(_write(tmp_path / "a.txt", "age: numeric\n"))
    with pytest.raises(ValueError, match="must be one of"):
        load_schema(_write(tmp_path / "b.txt", "age = float\n"))
    with pytest.raises(ValueError, match="duplicate"):
        load_schema(_write(tmp_path / "c.txt", "age = numeric\nage = label\n"))
    with pytest.raises(ValueError, match="no columns"):
        load_schema(_write(tmp_path / "d.txt", "# nothing here\n"))


_CSV = (
    "age,color,label\n"
    "20,red,1\n"
    "30,blue,0\n"
    "40,red,1\n"
    "25,green,0\n"
)
_SCHEMA = {"age": "numeric", "color": "categorical", "label": "label"}


def test_loader_scales_encodes_and_relabels(tmp_path):
    ds = load_delimited(_write(tmp_path / "toy.csv", _CSV), _SCHEMA)
    assert ds.task == "classification"
    assert ds.n_classes == 2
    assert ds.feature_names == ["age", "color=blue", "color=green", "color=red"]
    assert ds.column_kinds == ["numeric", "indicator", "indicator", "indicator"]
    np.testing.assert_array_equal(ds.y, [1, 0, 1, 0])
    np.testing.assert_array_equal(ds.X[:, 0], [0.0, 0.5, 1.0, 0.25])
    np.testing.assert_array_equal(ds.X[0, 1:], [0, 0, 1])
    np.testing.assert_array_equal(ds.X[1, 1:], [1, 0, 0])
    np.testing.assert_array_equal(ds.X[3, 1:], [0, 1, 0])
    assert len(ds) == 4 and ds.n_features == 4
    examples = ds.examples()
    assert examples[0].label == 1
    np.testing.assert_array_equal(examples[2].features, ds.X[2])


def test_numeric_looking_labels_sort_numerically(tmp_path):
    csv_text = "v,label\n1,10\n2,2\n3,10\n"
    ds = load_delimited(
        _write(tmp_path / "n.csv", csv_text), {"v": "numeric", "label": "label"}
    )
    np.testing.assert_array_equal(ds.y, [1, 0, 1])  # 2 -> 0, 10 -> 1
    csv_text = "v,label\n1,b\n2,a\n"
    ds = load_delimited(
        _write(tmp_path / "s.csv", csv_text), {"v": "numeric", "label": "label"}
    )
    np.testing.assert_array_equal(ds.y, [1, 0])


def test_written_datasets_reload_identically(tmp_path):
    ds = load_delimited(_write(tmp_path / "toy.csv", _CSV), _SCHEMA)
    out = tmp_path / "out.csv"
    write_delimited(ds, out)
    reread = load_delimited(
        str(out), {name: "numeric" for name in ds.feature_names} | {"label": "label"}
    )
    np.testing.assert_array_equal(reread.X, ds.X)
    np.testing.assert_array_equal(reread.y, ds.y)
    assert reread.feature_names == ds.feature_names


def test_loader_error_messages_name_the_line_and_column(tmp_path):
    with pytest.raises(ValueError, match="no schema role for column"):
        load_delimited(_write(tmp_path / "a.csv", "age,extra,label\n1,2,0\n"),
                       {"age": "numeric", "label": "label"})
    with pytest.raises(ValueError, match="absent column"):
        load_delimited(_write(tmp_path / "b.csv", "age,label\n1,0\n"),
                       {"age": "numeric", "height": "numeric", "label": "label"})
    with pytest.raises(ValueError, match="exactly one label"):
        load_delimited(_write(tmp_path / "c.csv", "age,height\n1,2\n"),
                       {"age": "numeric", "height": "numeric"})
    with pytest.raises(ValueError, match="line 3: expected 2 fields"):
        load_delimited(_write(tmp_path / "d.csv", "age,label\n1,0\n2\n"),
                       {"age": "numeric", "label": "label"})
    with pytest.raises(ValueError, match=r"line 2: column 'age'.*'old'"):
        load_delimited(_write(tmp_path / "e.csv", "age,label\nold,0\n"),
                       {"age": "numeric", "label": "label"})
    with pytest.raises(ValueError, match="is empty"):
        load_delimited(_write(tmp_path / "f.csv", ""),
                       {"age": "numeric", "label": "label"})
    with pytest.raises(ValueError, match="no data rows"):
        load_delimited(_write(tmp_path / "g.csv", "age,label\n"),
                       {"age": "numeric", "label": "label"})


def test_split_sizes_determinism_and_coverage():
    ds = make_synthetic("gauss2", 10, d=2, noise=0.1, seed=3)
    train, test = split_shuffle(ds, 0.2, 42)
    assert (len(train), len(test)) == (8, 2)
    again_train, again_test = split_shuffle(ds, 0.2, 42)
    np.testing.assert_array_equal(train.raw, again_train.raw)
    np.testing.assert_array_equal(test.y, again_test.y)
    combined = sorted(map(tuple, np.vstack([train.raw, test.raw])))
    assert combined == sorted(map(tuple, ds.raw))
    with pytest.raises(ValueError):
        split_shuffle(ds, 0.0, 0)
    with pytest.raises(ValueError):
        split_shuffle(ds, 1.0, 0)
    with pytest.raises(ValueError, match="empty part"):
        split_shuffle(ds, 0.05, 0)


def test_split_refits_scaling_on_the_training_part_only():
    ds = make_synthetic("gauss2", 40, d=2, noise=0.3, seed=9)
    train, test = split_shuffle(ds, 0.25, 7)
    np.testing.assert_array_equal(
        train.scaling, fit_scaling(train.raw, train.column_kinds)
    )
    np.testing.assert_array_equal(train.scaling, test.scaling)
    for j, kind in enumerate(train.column_kinds):
        if kind != "numeric":
            continue
        assert train.X[:, j].min() == 0.0
        assert train.X[:, j].max() == 1.0
        assert test.X[:, j].min() >= 0.0
        assert test.X[:, j].max() <= 1.0


def test_two_gaussians_dataset_shape_and_separation():
    ds = make_synthetic("gauss2", 400, d=2, noise=0.02, seed=11)
    assert ds.task == "classification" and ds.n_classes == 2
    assert ds.feature_names == ["x0", "x1", "bias"]
    assert ds.column_kinds == ["numeric", "numeric", "indicator"]
    np.testing.assert_array_equal(ds.X[:, 2], np.ones(400))
    # class means sit at 0.35 and 0.65, so the raw coordinate mean
    # classifies perfectly at this noise level
    predicted = (ds.raw[:, :2].mean(axis=1) > 0.5).astype(int)
    assert np.array_equal(predicted, ds.y)
    same = make_synthetic("gauss2", 400, d=2, noise=0.02, seed=11)
    np.testing.assert_array_equal(ds.X, same.X)
    np.testing.assert_array_equal(ds.y, same.y)


def test_heavy_tailed_regression_second_moment():
    noise = 0.7
    ds = make_synthetic("linabs", 20_000, d=2, noise=noise, seed=5)
    assert ds.task == "regression" and ds.n_classes == 0
    assert ds.column_kinds == ["indicator", "indicator"]
    w_star = np.array([0.5, -0.3])
    expected = float(w_star @ w_star) / 3.0 + math.exp(2.0 * noise * noise)
    sq = ds.y**2
    se = float(np.std(sq, ddof=1)) / math.sqrt(sq.size)
    assert abs(float(np.mean(sq)) - expected) <= 3.0 * se
    ex = ds.examples()[0]
    assert ex.target == ds.y[0]


def test_regression_split_keeps_features_untouched():
    ds = make_synthetic("linabs", 50, d=3, noise=0.5, seed=13)
    train, test = split_shuffle(ds, 0.2, 1)
    np.testing.assert_array_equal(train.X, train.raw)
    np.testing.assert_array_equal(test.X, test.raw)
    assert test.X.min() < 0.0  # clamping must not have touched kept columns


def test_streaming_sampler_matches_the_dataset_recipe():
    sampler = make_linabs_sampler(2, noise=0.4)
    x, y = sampler(5, np.random.default_rng(17))
    assert x.shape == (5, 2) and y.shape == (5,)
    x2, y2 = make_linabs_sampler(2, noise=0.4)(5, np.random.default_rng(17))
    np.testing.assert_array_equal(x, x2)
    np.testing.assert_array_equal(y, y2)
    fixed = make_linabs_sampler(1, noise=1e-12, w_star=[2.0])
    xf, yf = fixed(200, np.random.default_rng(19))
    np.testing.assert_allclose(yf, 2.0 * xf[:, 0] + 1.0, atol=1e-9)
    with pytest.raises(ValueError):
        make_linabs_sampler(2, w_star=[1.0])


def test_synthetic_argument_errors():
    with pytest.raises(ValueError, match="unknown synthetic kind"):
        make_synthetic("moons", 10)
    with pytest.raises(ValueError):
        make_synthetic("gauss2", 1)
    with pytest.raises(ValueError):
        make_synthetic("gauss2", 10, d=0)


def test_sparse_format_conversion_round_trip(tmp_path):
    src = _write(tmp_path / "in.libsvm", "1 1:0.5 3:2.0\n0 2:1.5\n\n1 3:-1.0\n")
    out = tmp_path / "out.csv"
    assert convert_libsvm(src, str(out)) == (3, 3)
    lines = out.read_text(encoding="utf-8").splitlines()
    assert lines[0] == "f1,f2,f3,label"
    assert lines[1] == "0.5,0.0,2.0,1"
    assert lines[2] == "0.0,1.5,0.0,0"
    assert lines[3] == "0.0,0.0,-1.0,1"
    schema = {"f1": "numeric", "f2": "numeric", "f3": "numeric", "label": "label"}
    ds = load_delimited(str(out), schema)
    assert len(ds) == 3 and ds.n_features == 3
    np.testing.assert_array_equal(ds.y, [1, 0, 1])


def test_sparse_format_conversion_rejects_malformed_lines(tmp_path):
    out = tmp_path / "out.csv"
    with pytest.raises(ValueError, match="line 1: expected idx:value"):
        convert_libsvm(_write(tmp_path / "a.txt", "1 abc\n"), str(out))
    with pytest.raises(ValueError, match="line 2: cannot parse entry"):
        convert_libsvm(_write(tmp_path / "b.txt", "1 1:2\n0 x:1\n"), str(out))
    with pytest.raises(ValueError, match="index must be >= 1"):
        convert_libsvm(_write(tmp_path / "c.txt", "1 0:2\n"), str(out))
    with pytest.raises(ValueError, match="no data lines"):
        convert_libsvm(_write(tmp_path / "d.txt", "\n\n"), str(out))
