import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tdakit import (ColumnSpec, EmptyInputError, ParseError, PointCloud,
                    load_point_cloud, pairwise_distances, read_records,
                    standardize_features)

from oracles import double_loop_distances


def test_load_preserves_shape():
    text = "a,b,c,d\n1,2,3,4\n5,6,7,8\n9,10,11,12\n"
    cloud = load_point_cloud(text)
    assert cloud.n == 3
    assert cloud.dim == 4
    assert cloud.points[1].tolist() == [5.0, 6.0, 7.0, 8.0]


def test_nan_feature_rejected_with_row():
    text = "a,b\n1,2\nNaN,4\n"
    with pytest.raises(ParseError) as exc:
        load_point_cloud(text)
    assert exc.value.row == 1
    assert exc.value.column == "a"


def test_missing_feature_cell_rejected():
    with pytest.raises(ParseError):
        load_point_cloud("a,b\n1,\n")


def test_garbage_cell_rejected():
    with pytest.raises(ParseError) as exc:
        load_point_cloud("a,b\n1,2\n3,oops\n")
    assert exc.value.row == 1
    assert exc.value.column == "b"


def test_optional_temperature_column():
    text = "T,f1,f2\n1.0,1,2\n,3,4\n2.5,5,6\n3.0,7,8\nnan,9,10\n"
    spec = ColumnSpec(temperature_column="T")
    records = read_records(text, spec)
    assert len(records) == 5
    present = [r.temperature for r in records if r.temperature is not None]
    assert len(present) == 3
    cloud = load_point_cloud(text, spec)
    assert cloud.n == 5 and cloud.dim == 2


def test_index_column_and_default():
    text = "idx,f\n10,1\n20,2\n"
    with_idx = read_records(text, ColumnSpec(index_column="idx"))
    assert [r.index for r in with_idx] == [10, 20]
    without = read_records("f\n1\n2\n")
    assert [r.index for r in without] == [0, 1]


def test_empty_inputs():
    with pytest.raises(EmptyInputError):
        read_records("")
    with pytest.raises(EmptyInputError):
        read_records("a,b\n")


def test_unknown_column_named():
    with pytest.raises(ParseError):
        read_records("a,b\n1,2\n", ColumnSpec(feature_columns=("zz",)))


def test_three_four_five_triangle():
    cloud = PointCloud("tri", np.array([[0.0, 0.0], [3.0, 4.0]]))
    d = pairwise_distances(cloud)
    assert d.entries[0, 1] == 5.0
    assert d.entries[1, 0] == 5.0


def test_single_point_zero_matrix():
    d = pairwise_distances(PointCloud("one", np.array([[1.0, 2.0, 3.0]])))
    assert d.entries.shape == (1, 1)
    assert d.entries[0, 0] == 0.0


def test_matches_double_loop_oracle():
    rng = np.random.default_rng(7)
    pts = rng.normal(size=(10, 4))
    d = pairwise_distances(PointCloud("r4", pts))
    expected = double_loop_distances(pts.tolist())
    assert np.max(np.abs(d.entries - expected)) <= 1e-12


def test_cloud_validation():
    with pytest.raises(ValueError):
        PointCloud("bad", np.array([[np.inf, 0.0]]))
    with pytest.raises(ValueError):
        PointCloud("bad", np.empty((0, 2)))


points_strategy = st.integers(2, 12).flatmap(
    lambda n: st.integers(1, 4).flatmap(
        lambda d: st.lists(
            st.lists(st.floats(-100, 100, allow_nan=False), min_size=d, max_size=d),
            min_size=n, max_size=n)))


@settings(max_examples=50, deadline=None)
@given(points_strategy)
def test_distance_matrix_properties(pts):
    cloud = PointCloud("h", np.array(pts, dtype=float))
    m = pairwise_distances(cloud).entries
    assert np.array_equal(m, m.T)
    assert np.all(np.diagonal(m) == 0.0)
    assert np.all(m >= 0.0)
    n = cloud.n
    rng = np.random.default_rng(0)
    for _ in range(20):
        i, j, k = rng.integers(0, n, size=3)
        assert m[i, k] <= m[i, j] + m[j, k] + 1e-9


@settings(max_examples=30, deadline=None)
@given(points_strategy, st.randoms(use_true_random=False))
def test_permutation_consistency(pts, rnd):
    pts = np.array(pts, dtype=float)
    m = pairwise_distances(PointCloud("a", pts)).entries
    perm = list(range(len(pts)))
    rnd.shuffle(perm)
    m2 = pairwise_distances(PointCloud("b", pts[perm])).entries
    for i in range(len(pts)):
        for j in range(len(pts)):
            assert m2[i, j] == m[perm[i], perm[j]]


def test_standardize():
    cloud = PointCloud("s", np.array([[1.0, 5.0], [3.0, 5.0], [5.0, 5.0]]))
    out = standardize_features(cloud)
    assert abs(out.points[:, 0].mean()) < 1e-15
    assert abs(out.points[:, 0].std() - 1.0) < 1e-12
    # constant column centred, not scaled
    assert np.all(out.points[:, 1] == 0.0)
