import itertools

import numpy as np
import pytest

from nonkoszul.linalg import matrix_from_rows, rank
from nonkoszul.monomials import hilbert_function, slice_array, top_degree
from nonkoszul.oracle import (
    e_degree_oracle,
    mult_map,
    nu_value,
    socle_degree_oracle,
    wlp_rank_profile,
)


def brute_mult_map(caps, src_degree, power, p):
    """Multiply every source monomial by (x_1+...+x_m)^power, expanding the
    power with nested loops.  Independent of the production routine."""
    import math
    m = len(caps)
    src = [tuple(r) for r in slice_array(caps, src_degree)]
    tgt = [tuple(r) for r in slice_array(caps, src_degree + power)]
    tgt_index = {mono: i for i, mono in enumerate(tgt)}
    mat = np.zeros((len(tgt), len(src)), dtype=np.int64)
    for comp in itertools.product(range(power + 1), repeat=m):
        if sum(comp) != power:
            continue
        coeff = math.factorial(power)
        for c in comp:
            coeff //= math.factorial(c)
        coeff %= p
        if coeff == 0:
            continue
        for j, mono in enumerate(src):
            shifted = tuple(a + b for a, b in zip(mono, comp))
            if all(e < c for e, c in zip(shifted, caps)):
                mat[tgt_index[shifted], j] = (mat[tgt_index[shifted], j] + coeff) % p
    return mat


@pytest.mark.parametrize("caps,deg,power,p", [
    ((3, 3), 1, 2, 2),
    ((3, 4, 2), 2, 3, 3),
    ((5, 5), 0, 4, 5),
    ((2, 2, 2, 2), 1, 2, 3),
])
def test_mult_map_matches_brute_force(caps, deg, power, p):
    got = mult_map(caps, deg, power, p)
    expected = brute_mult_map(caps, deg, power, p)
    assert got.p == p
    assert np.array_equal(got.data, expected)


FROZEN_E = [
    # (p, d, value)
    (5, (6, 7, 11, 12), 16),
    (5, (7, 7, 7, 18), 19),
    (2, (2, 2, 2), 2),
    (3, (2, 2, 2), 3),
    (3, (4, 5, 6), 7),
    (3, (4, 4, 4, 4, 5), 9),
    (3, (3, 3, 3, 3), 3),
    (3, (4, 4, 1), 4),
    (3, (5, 4, 1), 5),
    (3, (2, 1, 1), 2),
    (3, (5, 5, 5), 7),
    (3, (4, 4, 4), 6),
    (2, (3, 3, 4), 4),
    (7, (1, 1, 1), 1),
]


@pytest.mark.parametrize("p,d,value", FROZEN_E)
def test_relation_degree_frozen_values(p, d, value):
    res = e_degree_oracle(p, d)
    assert res.value == value
    assert res.method == "oracle"


def test_single_entry_tuple():
    res = e_degree_oracle(5, (4,))
    assert res.value == 4
    assert res.degenerate
    assert res.witness is None


def test_degenerate_flag():
    # power exceeds the top degree of the box, so f^power vanishes outright
    res = e_degree_oracle(3, (2, 2, 9))
    assert res.degenerate
    assert res.value == 9
    res = e_degree_oracle(3, (3, 3, 3))
    assert not res.degenerate


def test_symmetry_under_permutations():
    for p, d in [(2, (2, 3, 4)), (3, (1, 4, 2)), (5, (2, 3, 4, 5)),
                 (2, (3, 3, 4))]:
        values = {e_degree_oracle(p, perm, want_witness=False).value
                  for perm in itertools.permutations(d)}
        assert len(values) == 1


def witness_maps_to_zero(p, d):
    res = e_degree_oracle(p, d)
    assert res.witness is not None
    box = d[:-1]
    coeffs = np.asarray(res.witness.coefficients, dtype=np.int64)
    src_degree = res.witness.degree
    assert res.value == src_degree + d[-1]
    mat = mult_map(box, src_degree, d[-1], p)
    assert np.any(coeffs != 0)
    assert np.all((mat.data @ coeffs) % p == 0)
    # at every earlier degree the map is injective, making the value minimal
    for j in range(d[-1], res.value):
        earlier = mult_map(box, j - d[-1], d[-1], p)
        assert rank(earlier) == earlier.cols


@pytest.mark.parametrize("p,d", [
    (3, (4, 4, 1)),
    (5, (6, 7, 11, 12)),
    (2, (2, 2, 2)),
    (3, (4, 5, 6)),
])
def test_witness_validity(p, d):
    witness_maps_to_zero(p, d)


def test_witness_rendering():
    res = e_degree_oracle(3, (4, 4, 1))
    assert res.witness.terms() == [
        "2*x1^3", "1*x1^2*x2", "2*x1*x2^2", "1*x2^3"]
    res = e_degree_oracle(5, (7, 7, 7, 18))
    assert res.witness.terms() == ["1*x3"]
    assert not res.degenerate


def test_result_dict_shape():
    doc = e_degree_oracle(3, (4, 4, 1)).to_dict()
    assert doc["value"] == 4
    assert doc["method"] == "oracle"
    assert doc["degenerate"] is False
    assert doc["witness"]["degree"] == 3
    assert doc["witness"]["terms"][0] == "2*x1^3"


def test_rejects_bad_input():
    with pytest.raises(ValueError):
        e_degree_oracle(4, (2, 2, 2))
    with pytest.raises(ValueError):
        e_degree_oracle(3, (2, 0, 2))
    with pytest.raises(ValueError):
        e_degree_oracle(3, ())


def test_wlp_rank_profile_verdicts():
    report = wlp_rank_profile(2, (2, 2, 2))
    assert report.verdict is False
    report = wlp_rank_profile(3, (2, 2, 2))
    assert report.verdict is True
    # each record is marked maximal exactly when rank hits min(dims)
    for rec in report.records:
        assert rec.maximal == (rec.rank == min(rec.dim_source, rec.dim_target))


def test_wlp_profile_covers_every_degree():
    box = (2, 2, 2)
    report = wlp_rank_profile(3, box)
    assert [rec.degree for rec in report.records] == list(range(top_degree(box)))
    h = hilbert_function(box)
    for rec in report.records:
        assert rec.dim_source == h[rec.degree]


def test_wlp_report_dict_round_trip_fields():
    doc = wlp_rank_profile(3, (2, 2, 2)).to_dict()
    assert doc["p"] == 3
    assert doc["verdict"] is True
    assert doc["profile"][0]["degree"] == 0


SOCLE_CASES = [
    # (p, K, a, value)
    (3, (3, 3, 3), 2, 3),
    (3, (9, 9), 2, 8),
    (3, (1, 1, 1), 1, 0),
    (2, (4, 4), 3, 4),
    (5, (5, 5, 5), 2, 6),
]


@pytest.mark.parametrize("p,K,a,value", SOCLE_CASES)
def test_socle_degree_frozen(p, K, a, value):
    assert socle_degree_oracle(p, K, a) == value


def brute_socle_degree(p, K, a):
    """Largest degree where the quotient by the diagonal a-th powers is
    nonzero, found by scanning every degree with a dense rank computation."""
    m = len(K)
    top = top_degree(K)
    h = hilbert_function(K)
    best = -1
    for j in range(top + 1):
        if j < a:
            if h[j] > 0:
                best = j
            continue
        src = [tuple(r) for r in slice_array(K, j - a)]
        tgt = {tuple(r): i for i, r in enumerate(slice_array(K, j))}
        mat = np.zeros((len(tgt), len(src)), dtype=np.int64)
        for col, mono in enumerate(src):
            for i in range(m):
                shifted = list(mono)
                shifted[i] += a
                key = tuple(shifted)
                if key in tgt:
                    mat[tgt[key], col] = (mat[tgt[key], col] + 1) % p
        if len(tgt) and rank(matrix_from_rows(mat, p)) < len(tgt):
            best = j
    return best


@pytest.mark.parametrize("p,K,a", [
    (3, (3, 3, 3), 2), (2, (4, 4), 3), (5, (4, 3), 2), (2, (2, 3, 2), 3),
])
def test_socle_degree_matches_full_scan(p, K, a):
    assert socle_degree_oracle(p, K, a) == brute_socle_degree(p, K, a)


def test_nu_values():
    # closed form for a=1: every variable to the q, so the socle sits at
    # (n+1)(q-1) - q + 1
    for p, e, n in [(2, 0, 1), (2, 2, 2), (3, 1, 3), (5, 1, 2)]:
        q = p ** e
        assert nu_value(p, e, 1, n) == (n + 1) * (q - 1) - q + 1
    assert nu_value(3, 0, 2, 2) == 0
    assert nu_value(3, 1, 2, 2) == 3
    assert nu_value(3, 2, 2, 2) == 12
    assert nu_value(5, 1, 2, 2) == 6


def test_nu_rejects_divisible_a():
    with pytest.raises(ValueError):
        nu_value(3, 2, 6, 2)
