import math

import numpy as np
import pytest

from tdakit import (CapacityError, DistanceMatrix, PointCloud,
                    build_filtration, complex_at_scale, filtration_dump_lines,
                    pairwise_distances)

from oracles import brute_force_simplices


def equilateral(side=1.0):
    h = side * math.sqrt(3) / 2
    return pairwise_distances(PointCloud("eq", np.array(
        [[0.0, 0.0], [side, 0.0], [side / 2, h]])))


def as_tuples(filt):
    return [(s.vertices, s.dimension, s.diameter) for s in filt]


def test_equilateral_counts():
    filt = build_filtration(equilateral(), max_dimension=2)
    assert filt.count(0) == 3
    assert filt.count(1) == 3
    assert filt.count(2) == 1
    assert np.allclose(filt.diameters_of(1), 1.0)
    assert filt.diameters_of(0).tolist() == [0.0, 0.0, 0.0]


def test_cap_excludes_edge():
    d = DistanceMatrix(np.array([[0.0, 5.0], [5.0, 0.0]]))
    filt = build_filtration(d, max_dimension=1, diameter_cap=4.0)
    assert filt.count(0) == 2
    assert filt.count(1) == 0


def test_matches_subset_enumeration_oracle():
    rng = np.random.default_rng(11)
    d = pairwise_distances(PointCloud("r", rng.normal(size=(6, 2))))
    filt = build_filtration(d, max_dimension=2)
    expected = brute_force_simplices(d.entries, 2)
    assert as_tuples(filt) == expected


def test_cap_matches_oracle():
    rng = np.random.default_rng(3)
    d = pairwise_distances(PointCloud("r", rng.normal(size=(7, 3))))
    cap = float(np.median(d.entries))
    filt = build_filtration(d, max_dimension=3, diameter_cap=cap)
    assert as_tuples(filt) == brute_force_simplices(d.entries, 3, cap)


def test_simplex_count_formula():
    rng = np.random.default_rng(5)
    d = pairwise_distances(PointCloud("r", rng.normal(size=(8, 2))))
    filt = build_filtration(d, max_dimension=3)
    for k in range(4):
        assert filt.count(k) == math.comb(8, k + 1)


def test_complex_at_scale_radius_convention():
    filt = build_filtration(equilateral(), max_dimension=2)
    # 2*0.4 = 0.8 < 1: vertices only
    assert len(complex_at_scale(filt, 0.4)) == 3
    # 2*0.5 = 1.0, inclusive threshold: the whole complex
    assert len(complex_at_scale(filt, 0.5)) == 7


def test_complex_at_scale_face_closure():
    rng = np.random.default_rng(23)
    d = pairwise_distances(PointCloud("r", rng.normal(size=(8, 2))))
    filt = build_filtration(d, max_dimension=3)
    for eps in np.linspace(0.0, d.enclosing_diameter / 2, 7):
        present = {s.vertices for s in complex_at_scale(filt, float(eps))}
        for verts in present:
            for drop in range(len(verts)):
                face = verts[:drop] + verts[drop + 1:]
                if face:
                    assert face in present


def test_monotonicity_in_scale():
    rng = np.random.default_rng(2)
    d = pairwise_distances(PointCloud("r", rng.normal(size=(7, 2))))
    filt = build_filtration(d, max_dimension=2)
    prev = set()
    for eps in np.linspace(0.0, d.enclosing_diameter, 9):
        cur = {s.vertices for s in complex_at_scale(filt, float(eps))}
        assert prev <= cur
        prev = cur


def test_order_is_deterministic_and_valid():
    rng = np.random.default_rng(17)
    pts = rng.normal(size=(9, 2))
    d = pairwise_distances(PointCloud("r", pts))
    a = build_filtration(d, max_dimension=2)
    b = build_filtration(d, max_dimension=2)
    assert as_tuples(a) == as_tuples(b)
    # faces precede cofaces and diameters are monotone along the order
    seen = set()
    last = (-1.0, -1)
    for s in a:
        key = (s.diameter, s.dimension)
        assert key >= last
        last = key
        for drop in range(len(s.vertices)):
            face = s.vertices[:drop] + s.vertices[drop + 1:]
            if face:
                assert face in seen
        seen.add(s.vertices)


def test_diameter_equals_max_edge():
    rng = np.random.default_rng(29)
    d = pairwise_distances(PointCloud("r", rng.normal(size=(7, 3))))
    filt = build_filtration(d, max_dimension=3)
    for s in filt:
        if s.dimension >= 1:
            expected = max(d.entries[a, b]
                           for i, a in enumerate(s.vertices)
                           for b in s.vertices[i + 1:])
            assert s.diameter == expected


def test_capacity_error_is_explicit():
    rng = np.random.default_rng(1)
    d = pairwise_distances(PointCloud("r", rng.normal(size=(30, 2))))
    with pytest.raises(CapacityError):
        build_filtration(d, max_dimension=3, budget=1000)
    with pytest.raises(CapacityError):
        build_filtration(d, max_dimension=3, diameter_cap=d.enclosing_diameter / 2,
                         budget=100)


def test_dump_format():
    filt = build_filtration(equilateral(), max_dimension=2)
    lines = list(filtration_dump_lines(filt))
    assert len(lines) == 7
    assert lines[0].split() == ["0.0", "0", "0"]
    parts = lines[-1].split()
    assert parts[1] == "2" and parts[2:] == ["0", "1", "2"]


def test_global_positions_round_trip():
    rng = np.random.default_rng(31)
    d = pairwise_distances(PointCloud("r", rng.normal(size=(6, 2))))
    filt = build_filtration(d, max_dimension=2)
    for dim in filt.dims():
        for local in range(filt.count(dim)):
            pos = filt.global_position(dim, local)
            s = filt[pos]
            assert s.dimension == dim
            assert s.vertices == tuple(int(v) for v in filt.vertices_of(dim)[local])
