import itertools

import pytest
from hypothesis import given, settings, strategies as st

from nonkoszul.monomials import (
    graded_slice,
    hilbert_function,
    monomial_ideal_member,
    slice_array,
    top_degree,
)


def brute_count(caps, degree):
    return sum(1 for expo in itertools.product(*(range(c) for c in caps))
               if sum(expo) == degree)


def test_top_degree():
    assert top_degree((3, 3)) == 4
    assert top_degree((1,)) == 0
    assert top_degree((4, 4, 4, 4, 5)) == 16


def test_hilbert_matches_enumeration():
    for caps in [(2, 2), (3, 4), (2, 3, 4), (5, 5, 5)]:
        values = hilbert_function(caps)
        assert len(values) == top_degree(caps) + 1
        for j, v in enumerate(values):
            assert v == brute_count(caps, j)


def test_hilbert_symmetric_in_caps():
    assert hilbert_function((3, 4, 5)) == hilbert_function((5, 3, 4))


def test_hilbert_palindromic():
    values = hilbert_function((4, 6, 3))
    assert values == values[::-1]


def test_hilbert_known_peak():
    # box with caps (4,4,4,4,5): the value at degree 8 exceeds the one at 9
    values = hilbert_function((4, 4, 4, 4, 5))
    assert values[8] == 186
    assert values[9] == 175


def test_slice_is_descending_lex():
    arr = slice_array((3, 3, 3), 3)
    rows = [tuple(row) for row in arr]
    assert rows == sorted(rows, reverse=True)
    assert len(rows) == brute_count((3, 3, 3), 3)


def test_slice_rows_respect_caps():
    arr = slice_array((2, 4), 3)
    for row in arr:
        assert all(0 <= e < c for e, c in zip(row, (2, 4)))
        assert sum(row) == 3


def test_slice_empty_outside_range():
    assert len(slice_array((2, 2), 5)) == 0
    assert len(slice_array((2, 2), -1)) == 0


def test_graded_slice_wrapper():
    s = graded_slice((3, 3), 2)
    assert s.degree == 2
    assert len(s) == hilbert_function((3, 3))[2]
    assert s.box == (3, 3)


@settings(max_examples=60)
@given(st.lists(st.integers(1, 6), min_size=1, max_size=4), st.integers(0, 12))
def test_slice_count_equals_hilbert(caps, degree):
    caps = tuple(caps)
    values = hilbert_function(caps)
    expected = values[degree] if degree < len(values) else 0
    assert len(slice_array(caps, degree)) == expected


def test_monomial_ideal_member():
    # exponent at or above any cap lies in the ideal
    assert monomial_ideal_member((3, 0), (3, 3))
    assert monomial_ideal_member((0, 5), (3, 3))
    assert not monomial_ideal_member((2, 2), (3, 3))


def test_slice_array_is_readonly():
    arr = slice_array((3, 3), 2)
    with pytest.raises(ValueError):
        arr[0, 0] = 9
