"""Condensed index bijection and DissimMatrix basics."""

import numpy as np
import pytest
from hypothesis import given, strategies as st

from wardgeo.dissim import (
    DissimMatrix,
    condensed_rank,
    condensed_size,
    condensed_unrank,
)
from wardgeo.errors import ValidationError


def test_rank_unrank_exhaustive_small_n():
    for n in range(2, 51):
        k = 0
        for i in range(n - 1):
            for j in range(i + 1, n):
                assert condensed_rank(n, i, j) == k
                assert condensed_unrank(n, k) == (i, j)
                k += 1
        assert k == condensed_size(n)


@given(st.integers(2, 3000), st.data())
def test_rank_unrank_roundtrip(n, data):
    i = data.draw(st.integers(0, n - 2))
    j = data.draw(st.integers(i + 1, n - 1))
    assert condensed_unrank(n, condensed_rank(n, i, j)) == (i, j)


def test_rank_vectorized_matches_scalar():
    n = 17
    ii, jj = np.triu_indices(n, 1)
    ranks = condensed_rank(n, ii, jj)
    assert ranks.tolist() == list(range(condensed_size(n)))


def test_unrank_out_of_range():
    with pytest.raises(ValidationError):
        condensed_unrank(5, condensed_size(5))
    with pytest.raises(ValidationError):
        condensed_unrank(5, -1)


def test_value_and_square_agree():
    rng = np.random.default_rng(7)
    n = 9
    d = DissimMatrix(n=n, values=rng.uniform(0, 2, condensed_size(n)))
    m = d.square()
    assert np.array_equal(m, m.T)
    assert np.all(m.diagonal() == 0)
    for i in range(n):
        for j in range(n):
            assert d.value(i, j) == m[i, j]


def test_from_square_roundtrip():
    rng = np.random.default_rng(8)
    n = 6
    d = DissimMatrix(n=n, values=rng.uniform(0, 2, condensed_size(n)), ids=list("abcdef"))
    back = DissimMatrix.from_square(d.square(), ids=d.ids)
    assert np.array_equal(back.values, d.values)
    assert back.ids == d.ids


def test_matrix_validation_errors():
    with pytest.raises(ValidationError):
        DissimMatrix(n=1, values=np.array([]))
    with pytest.raises(ValidationError):
        DissimMatrix(n=3, values=np.array([1.0, 2.0]))
    with pytest.raises(ValidationError, match="non-finite"):
        DissimMatrix(n=3, values=np.array([1.0, np.nan, 2.0]))
    with pytest.raises(ValidationError, match="negative"):
        DissimMatrix(n=3, values=np.array([1.0, -0.5, 2.0]))
    with pytest.raises(ValidationError, match="asymmetry"):
        DissimMatrix.from_square(np.array([[0, 1.0], [1.1, 0]]))
    with pytest.raises(ValidationError, match="diagonal"):
        DissimMatrix.from_square(np.array([[0.5, 1.0], [1.0, 0]]))


def test_values_are_immutable():
    d = DissimMatrix(n=2, values=np.array([1.0]))
    with pytest.raises(ValueError):
        d.values[0] = 2.0
