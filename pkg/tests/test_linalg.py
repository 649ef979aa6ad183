import math
import numpy as np
import pytest
from hypothesis import given, strategies as st

from lievar.coeffring import CoeffDomain
from lievar.linalg import (
    IntSpan,
    ModpSpan,
    determinant,
    hermite_normal_form,
    integer_left_kernel,
    matmul,
    normalize_invariants,
    nullspace_mod_p,
    quotient_presentation,
    relative_invariants,
    row_space_membership,
    smith_normal_form,
)

Z = CoeffDomain(0)


def matrices(max_dim=8, lo=-9, hi=9):
    return st.integers(1, max_dim).flatmap(
        lambda r: st.integers(1, max_dim).flatmap(
            lambda c: st.lists(st.lists(st.integers(lo, hi), min_size=c, max_size=c), min_size=r, max_size=r)
        )
    )


def is_row_hnf(h):
    last = -1
    zero_seen = False
    for row in h:
        nz = [i for i, x in enumerate(row) if x]
        if not nz:
            zero_seen = True
            continue
        assert not zero_seen
        p = nz[0]
        assert p > last and row[p] > 0
        last = p
    for i, row in enumerate(h):
        nz = [k for k, x in enumerate(row) if x]
        if nz:
            p = nz[0]
            for above in h[:i]:
                assert 0 <= above[p] < row[p]
    return True


def test_hnf_examples():
    assert hermite_normal_form([[2, 0], [0, 3]])[0] == [[2, 0], [0, 3]]
    assert hermite_normal_form([[1, 1], [1, 1]])[0] == [[1, 1], [0, 0]]
    m = [[2, 4], [1, 3]]
    h, u = hermite_normal_form(m)
    assert abs(determinant(u)) == 1 and matmul(u, m) == h
    assert h[0][0] == 1 and h[1][0] == 0 and h[1][1] == 2


def test_snf_examples():
    s, u, v = smith_normal_form([[2, 0], [0, 3]])
    assert s == [[1, 0], [0, 6]]
    assert smith_normal_form([[1, 0, 0], [0, 1, 0], [0, 0, 1]])[0] == [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
    assert smith_normal_form([[0, 0], [0, 0]])[0] == [[0, 0], [0, 0]]


@given(matrices())
def test_hnf_properties(m):
    h, u = hermite_normal_form(m)
    assert abs(determinant(u)) == 1
    assert matmul(u, m) == h
    assert is_row_hnf(h)


@given(matrices())
def test_snf_properties(m):
    s, u, v = smith_normal_form(m)
    assert abs(determinant(u)) == 1 and abs(determinant(v)) == 1
    assert matmul(matmul(u, m), v) == s
    diag = [s[i][i] for i in range(min(len(s), len(s[0])))]
    for i in range(len(s)):
        for j in range(len(s[0])):
            if i != j:
                assert s[i][j] == 0
    assert all(d >= 0 for d in diag)
    for a, b in zip(diag, diag[1:]):
        assert (b == 0) or (a != 0 and b % a == 0)


def test_snf_gcd_determinant_oracle():
    # d1 = gcd of entries, d1*d2 = |det|, for random 2x2 matrices
    rng = np.random.default_rng(7)
    from math import gcd

    for _ in range(200):
        m = rng.integers(-9, 10, size=(2, 2)).tolist()
        s = smith_normal_form(m)[0]
        g = 0
        for r in m:
            for x in r:
                g = gcd(g, x)
        assert s[0][0] == g
        assert s[0][0] * s[1][1] == abs(m[0][0] * m[1][1] - m[0][1] * m[1][0])


def test_row_space_membership_examples():
    assert row_space_membership([2, 2], [[1, 1]], Z)
    assert not row_space_membership([1, 1], [[2, 2]], Z)
    assert row_space_membership([1, 1], [[2, 2]], CoeffDomain(3))
    with pytest.raises(ValueError):
        row_space_membership([1, 1], [[2, 2]], CoeffDomain(4))


def test_quotient_presentation_examples():
    assert quotient_presentation([[1, 0]], 2, Z).invariant_factors == [0]
    assert quotient_presentation([[3, 0], [0, 3]], 2, Z).invariant_factors == [3, 3]
    assert quotient_presentation([[1, 1, 0]], 3, CoeffDomain(5)).invariant_factors == [5, 5]
    assert quotient_presentation([[1, 0], [0, 1]], 2, Z).trivial
    with pytest.raises(ValueError):
        quotient_presentation([[1, 0]], 2, CoeffDomain(4))


@given(matrices(5, -5, 5))
def test_quotient_presentation_idempotent_and_coordinates(m):
    ncols = len(m[0])
    p = quotient_presentation(m, ncols, Z)
    q = quotient_presentation(m + [[2 * x for x in m[0]]] + m, ncols, Z)
    assert p.invariant_factors == q.invariant_factors
    for row in m:
        c = p.coordinates(row)
        assert all(x == 0 for x, d in zip(c, p.invariant_factors) if d)
        assert all(x == 0 for x, d in zip(c, p.invariant_factors) if d == 0)


@given(matrices(5, 0, 6), st.sampled_from([2, 3, 5, 7]))
def test_modp_rank_plus_quotient(m, p):
    ncols = len(m[0])
    sp = ModpSpan(ncols, p)
    sp.add_rows(m)
    pres = quotient_presentation(m, ncols, CoeffDomain(p))
    assert sp.rank + len(pres.invariant_factors) == ncols
    for row in m:
        assert sp.contains(row)
    ker = nullspace_mod_p(np.array(m, dtype=np.int64), p)
    assert not ((np.array(m) @ ker.T) % p).any()
    assert ker.shape[0] == ncols - sp.rank


@given(matrices(5, -6, 6))
def test_intspan_matches_snf(m):
    ncols = len(m[0])
    sp = IntSpan(ncols)
    sp.add_rows(m)
    assert sp.invariants() == quotient_presentation(m, ncols, Z).invariant_factors
    for row in m:
        assert sp.contains(row)


def test_relative_invariants_and_kernel():
    assert relative_invariants([[2, 0], [0, 6]], [[1, 0], [0, 1]], 2) == [2, 6]
    assert relative_invariants([], [[1, 0]], 2) == [0]
    k = integer_left_kernel([[1, 2], [2, 4], [0, 1]], 3)
    assert k and all(sum(u[i] * r[j] for i, r in enumerate([[1, 2], [2, 4], [0, 1]])) == 0 for u in k for j in range(2))
    assert normalize_invariants([2, 3, 0, 1]) == [6, 0]
    assert normalize_invariants([4, 6]) == [2, 12]


def test_snf_dense_8x8_stays_small():
    # dense full-rank inputs used to blow up the off-pivot entries
    rng = np.random.default_rng(13)
    for _ in range(30):
        m = rng.integers(-9, 10, size=(8, 8)).tolist()
        s, u, v = smith_normal_form(m)
        assert matmul(matmul(u, m), v) == s
        assert abs(determinant(u)) == 1 and abs(determinant(v)) == 1
        d = [s[i][i] for i in range(8)]
        assert d[-1] * math.prod(d[:-1]) == abs(determinant(m))
