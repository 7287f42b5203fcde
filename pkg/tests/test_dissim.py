"""Dissimilarity constructors: Euclidean, geodesic, adjacency, normalization."""

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from wardgeo.dissim import (
    EARTH_RADIUS_KM,
    AdjacencyList,
    DissimMatrix,
    FeatureTable,
    GeoPoints,
    adjacency_dissim,
    condensed_size,
    euclidean_dissim,
    geodesic_dissim,
    normalize_max,
)
from wardgeo.errors import ValidationError
from conftest import random_dissim


class TestEuclidean:
    def test_three_four_five(self):
        d = euclidean_dissim(FeatureTable(np.array([[0.0, 0.0], [3.0, 4.0]])))
        assert d.value(0, 1) == 5.0

    def test_identical_rows(self):
        d = euclidean_dissim(FeatureTable(np.array([[1.5, 2.5], [1.5, 2.5], [0.0, 0.0]])))
        assert d.value(0, 1) == 0.0

    def test_reference_rows_hand_summed(self):
        # two rows of the reference data, distance accumulated coordinate by
        # coordinate before comparing with the vectorized path
        row_a = [28.08, 17.68, 5.15, 90.04438]
        row_b = [30.42, 13.13, 4.93, 58.51182]
        acc = 0.0
        for a, b in zip(row_a, row_b):
            acc += (a - b) ** 2
        expected = math.sqrt(acc)
        assert expected == pytest.approx(31.945717086232392, rel=1e-12)
        d = euclidean_dissim(FeatureTable(np.array([row_a, row_b]), ids=["17015", "17021"]))
        assert d.value(0, 1) == pytest.approx(expected, rel=1e-12)

    def test_triangle_inequality_sampled(self):
        rng = np.random.default_rng(41)
        x = rng.normal(size=(30, 4))
        d = euclidean_dissim(FeatureTable(x))
        for _ in range(500):
            i, j, k = rng.choice(30, size=3, replace=False)
            assert d.value(i, j) <= d.value(i, k) + d.value(k, j) + 1e-12

    def test_nonfinite_entry_located(self):
        with pytest.raises(ValidationError, match="row 1, column 2"):
            FeatureTable(np.array([[1.0, 2.0, 3.0], [4.0, 5.0, np.nan]]))


class TestGeodesic:
    def test_identical_points(self):
        p = GeoPoints(lat=np.array([44.84, 44.84]), lon=np.array([-0.58, -0.58]))
        assert geodesic_dissim(p).value(0, 1) == 0.0

    def test_equatorial_antipodes(self):
        p = GeoPoints(lat=np.array([0.0, 0.0]), lon=np.array([0.0, 180.0]))
        assert geodesic_dissim(p).value(0, 1) == pytest.approx(
            math.pi * EARTH_RADIUS_KM, rel=1e-12
        )

    def test_matches_law_of_cosines(self):
        rng = np.random.default_rng(42)
        lat = rng.uniform(-80, 80, size=12)
        lon = rng.uniform(-175, 175, size=12)
        d = geodesic_dissim(GeoPoints(lat=lat, lon=lon))
        phi = np.radians(lat)
        lam = np.radians(lon)
        for i in range(12):
            for j in range(i + 1, 12):
                cosc = (
                    math.sin(phi[i]) * math.sin(phi[j])
                    + math.cos(phi[i]) * math.cos(phi[j]) * math.cos(lam[i] - lam[j])
                )
                oracle = EARTH_RADIUS_KM * math.acos(max(-1.0, min(1.0, cosc)))
                assert d.value(i, j) == pytest.approx(oracle, rel=1e-6)

    def test_out_of_range_rejected(self):
        with pytest.raises(ValidationError, match="latitude"):
            GeoPoints(lat=np.array([91.0, 0.0]), lon=np.array([0.0, 0.0]))
        with pytest.raises(ValidationError, match="longitude"):
            GeoPoints(lat=np.array([0.0, 0.0]), lon=np.array([0.0, -180.5]))


class TestAdjacency:
    def test_complete_graph(self):
        n = 5
        adj = AdjacencyList(
            tuple(frozenset(set(range(n)) - {i}) for i in range(n))
        )
        d = adjacency_dissim(adj)
        assert np.all(d.values == 0.0)

    def test_empty_graph(self):
        adj = AdjacencyList(tuple(frozenset() for _ in range(4)))
        d = adjacency_dissim(adj)
        assert np.all(d.values == 1.0)

    def test_reference_block(self):
        # ARCES-ARVERT not adjacent, ARCES-BARZAN adjacent
        ids = ["ARCES", "ARVERT", "BALANZAC", "BARZAN", "BOIS"]
        neighbors = [frozenset({3}), frozenset(), frozenset(), frozenset({0}), frozenset()]
        d = adjacency_dissim(AdjacencyList(tuple(neighbors), ids=ids))
        assert d.value(0, 1) == 1.0  # ARCES-ARVERT
        assert d.value(0, 3) == 0.0  # ARCES-BARZAN

    def test_only_zeros_and_ones(self):
        rng = np.random.default_rng(3)
        n = 12
        sets = [set() for _ in range(n)]
        for _ in range(20):
            i, j = rng.choice(n, size=2, replace=False)
            sets[i].add(int(j))
            sets[j].add(int(i))
        d = adjacency_dissim(AdjacencyList(tuple(frozenset(s) for s in sets)))
        assert set(np.unique(d.values)) <= {0.0, 1.0}

    def test_asymmetric_rejected_with_pair(self):
        with pytest.raises(ValidationError, match="asymmetric.*1.*0|asymmetric.*0.*1"):
            AdjacencyList((frozenset({1}), frozenset(), frozenset()))

    def test_self_adjacency_rejected(self):
        with pytest.raises(ValidationError, match="self-adjacency"):
            AdjacencyList((frozenset({0}), frozenset()),)


class TestNormalizeMax:
    def test_simple_values(self):
        d = DissimMatrix(n=3, values=np.array([2.0, 4.0, 8.0]))
        out = normalize_max(d)
        assert out.values.tolist() == [0.25, 0.5, 1.0]

    def test_already_normalized_unchanged(self):
        d = DissimMatrix(n=3, values=np.array([0.25, 0.5, 1.0]))
        assert np.array_equal(normalize_max(d).values, d.values)

    @given(st.integers(0, 2**32 - 1))
    def test_idempotent(self, seed):
        rng = np.random.default_rng(seed)
        d = random_dissim(rng, 6)
        once = normalize_max(d)
        twice = normalize_max(once)
        assert np.array_equal(once.values, twice.values)
        assert once.values.max() == 1.0

    def test_preserves_zeros(self):
        d = DissimMatrix(n=3, values=np.array([0.0, 3.0, 0.0]))
        out = normalize_max(d)
        assert out.values.tolist() == [0.0, 1.0, 0.0]

    def test_all_zero_rejected(self):
        d = DissimMatrix(n=3, values=np.zeros(condensed_size(3)))
        with pytest.raises(ValidationError, match="all-zero"):
            normalize_max(d)
