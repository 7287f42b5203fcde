"""File round trips and ingestion validation for the matrix formats."""

import numpy as np
import pytest

from wardgeo.dissim import (
    DissimMatrix,
    read_adjacency,
    read_dissim,
    read_feature_table,
    read_geo_points,
    read_weights,
    write_dissim,
)
from wardgeo.errors import ValidationError
from conftest import random_dissim


@pytest.mark.parametrize("format", ["condensed", "square"])
def test_roundtrip_bitwise(tmp_path, format):
    rng = np.random.default_rng(11)
    d = random_dissim(rng, 9, ids=[f"m{i}" for i in range(9)])
    path = tmp_path / "d.csv"
    write_dissim(d, path, format=format)
    back = read_dissim(path, format="auto")
    assert back.n == d.n
    assert np.array_equal(back.values, d.values)
    if format == "square":
        assert back.ids == d.ids
    else:
        assert back.ids is None


def test_square_without_ids_roundtrip(tmp_path):
    rng = np.random.default_rng(12)
    d = random_dissim(rng, 5)
    path = tmp_path / "d.csv"
    write_dissim(d, path, format="square")
    back = read_dissim(path)
    assert np.array_equal(back.values, d.values)
    assert back.ids is None


def test_square_asymmetry_names_pair(tmp_path):
    m = np.array([[0.0, 1.0, 2.0], [1.0, 0.0, 3.0], [2.0, 3.5, 0.0]])
    path = tmp_path / "bad.csv"
    path.write_text("\n".join(",".join(repr(float(v)) for v in row) for row in m) + "\n")
    with pytest.raises(ValidationError, match=r"\(1,2\)|\(1, 2\)"):
        read_dissim(path)


def test_square_nonzero_diagonal_rejected(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("0.0,1.0\n1.0,0.1\n")
    with pytest.raises(ValidationError, match="diagonal"):
        read_dissim(path)


def test_square_ragged_row_rejected(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("0.0,1.0\n1.0\n")
    with pytest.raises(ValidationError, match="ragged"):
        read_dissim(path)


def test_square_condensed_equivalence(tmp_path):
    # the same 3x3 matrix written by hand in both formats
    square = tmp_path / "sq.csv"
    square.write_text("0.0,1.5,2.5\n1.5,0.0,0.75\n2.5,0.75,0.0\n")
    condensed = tmp_path / "cond.csv"
    condensed.write_text("n=3\n1.5\n2.5\n0.75\n")
    a = read_dissim(square)
    b = read_dissim(condensed)
    assert a.n == b.n == 3
    assert np.array_equal(a.values, b.values)


def test_condensed_header_and_count_validation(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("3\n1.0\n2.0\n3.0\n")
    with pytest.raises(ValidationError, match="n=<count>"):
        read_dissim(path, format="condensed")
    path.write_text("n=3\n1.0\n2.0\n")
    with pytest.raises(ValidationError, match="expected 3 values"):
        read_dissim(path)


def test_condensed_bad_value_located(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("n=3\n1.0\nfoo\n3.0\n")
    with pytest.raises(ValidationError, match=":3"):
        read_dissim(path)


def test_symmetry_tolerance_accepts_tiny_noise(tmp_path):
    # relative asymmetry below 1e-12 passes; the upper triangle wins
    a = 1.0
    b = a * (1 + 1e-13)
    path = tmp_path / "d.csv"
    path.write_text(f"0.0,{a!r}\n{b!r},0.0\n")
    d = read_dissim(path)
    assert d.value(0, 1) == a


def test_feature_table_reader(tmp_path):
    path = tmp_path / "feat.csv"
    path.write_text("id,a,b\nx,1.0,2.0\ny,3.5,4.5\n")
    t = read_feature_table(path)
    assert t.ids == ("x", "y")
    assert t.columns == ("a", "b")
    assert t.values.tolist() == [[1.0, 2.0], [3.5, 4.5]]
    path.write_text("id,a,b\nx,1.0\n")
    with pytest.raises(ValidationError, match="ragged"):
        read_feature_table(path)


def test_geo_points_reader(tmp_path):
    path = tmp_path / "pts.csv"
    path.write_text("id,lat,lon\np,44.5,-0.5\nq,45.0,-1.0\n")
    g = read_geo_points(path)
    assert g.ids == ("p", "q")
    assert g.lat.tolist() == [44.5, 45.0]
    path.write_text("lat,lon\n44.5,-0.5\n")
    with pytest.raises(ValidationError, match="id,lat,lon"):
        read_geo_points(path)


def test_adjacency_reader(tmp_path):
    path = tmp_path / "adj.json"
    path.write_text('{"a": ["b"], "b": ["a"], "c": []}')
    adj = read_adjacency(path)
    assert adj.ids == ("a", "b", "c")
    assert adj.neighbors == (frozenset({1}), frozenset({0}), frozenset())
    path.write_text('{"a": ["z"]}')
    with pytest.raises(ValidationError, match="unknown neighbor"):
        read_adjacency(path)
    path.write_text('{"a": ["b"], "b": []}')
    with pytest.raises(ValidationError, match="asymmetric"):
        read_adjacency(path)


def test_weights_reader(tmp_path):
    path = tmp_path / "w.csv"
    path.write_text("id,weight\nx,2.0\ny,0.5\n")
    w = read_weights(path)
    assert w.ids == ("x", "y")
    assert w.weights.tolist() == [2.0, 0.5]
    path.write_text("id,weight\nx,0.0\n")
    with pytest.raises(ValidationError, match="not positive"):
        read_weights(path)
