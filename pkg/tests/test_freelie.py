import itertools
import random

import pytest
from hypothesis import given, strategies as st

from lievar.coeffring import CoeffDomain
from lievar.freelie import (
    ContextMismatchError,
    FreeLieContext,
    ResourceGuardError,
    add,
    bracket,
    build_context,
    from_vector,
    graded_component,
    is_zero,
    left_normed,
    necklace_count,
    scale,
    standard_factorization,
    to_vector,
)


def brute_lyndon_counts(rank, max_len):
    """Words strictly smaller than every proper rotation."""
    out = []
    for n in range(1, max_len + 1):
        c = 0
        for w in itertools.product(range(rank), repeat=n):
            if all(w < w[k:] + w[:k] for k in range(1, n)):
                c += 1
        out.append(c)
    return out


@pytest.mark.parametrize("rank,max_len", [(1, 6), (2, 8), (3, 7), (4, 6)])
def test_basis_counts_match_word_enumeration(rank, max_len):
    ctx = build_context(rank, max_len)
    assert ctx.basis_counts() == brute_lyndon_counts(rank, max_len)
    assert ctx.basis_counts() == [necklace_count(rank, d) for d in range(1, max_len + 1)]


def test_basis_count_examples():
    assert build_context(2, 5).basis_counts() == [2, 1, 2, 3, 6]
    assert build_context(1, 3).basis_counts() == [1, 0, 0]
    assert build_context(3, 2).basis_counts() == [3, 3]


def test_basis_order_is_degree_then_lex():
    ctx = build_context(3, 4)
    keys = [(len(w), w) for w in ctx.words]
    assert keys == sorted(keys)


def test_basis_dump_golden():
    assert build_context(2, 3).basis_dump() == [
        "x1\t1",
        "x2\t1",
        "[x1,x2]\t2",
        "[x1,[x1,x2]]\t3",
        "[[x1,x2],x2]\t3",
    ]


def test_standard_factorization():
    assert standard_factorization((0, 1)) == ((0,), (1,))
    assert standard_factorization((0, 0, 1)) == ((0,), (0, 1))
    assert standard_factorization((0, 1, 1)) == ((0, 1), (1,))
    assert standard_factorization((0, 1, 0, 1, 1)) == ((0, 1), (0, 1, 1))


def test_resource_guard():
    with pytest.raises(ResourceGuardError) as e:
        FreeLieContext(4, 9, max_basis=1000)
    assert e.value.size > 1000
    with pytest.raises(ValueError):
        FreeLieContext(0, 3)


# ---- independent bracket oracle: the free associative algebra


def assoc(ctx, i):
    w = ctx.words[i]
    if len(w) == 1:
        return {w: 1}
    u, v = standard_factorization(w)
    return commutator(assoc(ctx, ctx.index[u]), assoc(ctx, ctx.index[v]))


def poly_mul(a, b):
    out = {}
    for x, c in a.items():
        for y, d in b.items():
            out[x + y] = out.get(x + y, 0) + c * d
    return {k: v for k, v in out.items() if v}


def commutator(a, b):
    out = dict(poly_mul(a, b))
    for k, v in poly_mul(b, a).items():
        out[k] = out.get(k, 0) - v
    return {k: v for k, v in out.items() if v}


def elt_assoc(ctx, e):
    out = {}
    for i, c in e.terms.items():
        for k, v in assoc(ctx, i).items():
            out[k] = out.get(k, 0) + c * v
    return {k: v for k, v in out.items() if v}


@pytest.mark.parametrize("rank,cut", [(2, 7), (3, 5), (4, 4)])
def test_basis_products_agree_with_associative_embedding(rank, cut):
    ctx = build_context(rank, cut)
    n = len(ctx)
    for i in range(n):
        for j in range(n):
            if ctx.degrees[i] + ctx.degrees[j] > cut:
                continue
            got = elt_assoc(ctx, bracket(ctx.basis_element(i), ctx.basis_element(j)))
            assert got == commutator(assoc(ctx, i), assoc(ctx, j)), (i, j)


def test_truncation():
    ctx = build_context(2, 2)
    x1, x2 = ctx.generators()
    assert bracket(bracket(x1, x2), x1).is_zero()


def test_skew_and_golden_sign():
    ctx = build_context(2, 3)
    x1, x2 = ctx.generators()
    assert bracket(x1, x1).is_zero()
    assert to_vector(bracket(x2, x1), 2) == [-1]
    assert str(bracket(x2, x1)) == "-[x1,x2]"


def test_left_normed_and_module_ops():
    ctx = build_context(3, 3, CoeffDomain(3))
    a, b, c = ctx.generators()
    assert left_normed([a]) == a
    assert left_normed([a, b]) == bracket(a, b)
    assert left_normed([a, b, c]) == bracket(bracket(a, b), c)
    with pytest.raises(ValueError):
        left_normed([])
    assert is_zero(add(a, scale(-1, a)))
    assert scale(3, a).is_zero()
    ab = bracket(a, b)
    assert graded_component(ab, 2) == ab
    assert to_vector(ctx.zero(), 2) == [0, 0, 0]


def test_context_mismatch():
    a = build_context(2, 3).generator(1)
    b = build_context(2, 3, CoeffDomain(5)).generator(1)
    with pytest.raises(ContextMismatchError):
        bracket(a, b)


def random_element(ctx, rng, nterms=3):
    terms = {}
    for _ in range(nterms):
        i = rng.randrange(len(ctx))
        terms[i] = terms.get(i, 0) + rng.randint(-4, 4)
    return ctx.element(terms)


@pytest.mark.parametrize("m", [0, 2, 3, 5])
@given(seed=st.integers(0, 10**9))
def test_axioms_randomized(m, seed):
    rng = random.Random(seed)
    ctx = build_context(3, 6, CoeffDomain(m))
    x, y, z, w = (random_element(ctx, rng) for _ in range(4))
    assert (bracket(x, y) + bracket(y, x)).is_zero()
    jac = bracket(x, bracket(y, z)) + bracket(y, bracket(z, x)) + bracket(z, bracket(x, y))
    assert jac.is_zero()
    assert bracket(x + w, y) == bracket(x, y) + bracket(w, y)


@given(seed=st.integers(0, 10**9))
def test_confluence_of_association_orders(seed):
    rng = random.Random(seed)
    ctx = build_context(3, 6)
    a, b, c, d = (random_element(ctx, rng, 2) for _ in range(4))
    # [[a,b],[c,d]] via Jacobi reassociation: [[[a,b],c],d] - [[[a,b],d],c]
    lhs = bracket(bracket(a, b), bracket(c, d))
    rhs = bracket(bracket(bracket(a, b), c), d) - bracket(bracket(bracket(a, b), d), c)
    assert lhs == rhs


@given(seed=st.integers(0, 10**9), d=st.integers(1, 5))
def test_vector_round_trip(seed, d):
    rng = random.Random(seed)
    ctx = build_context(3, 5)
    a = random_element(ctx, rng, 5)
    assert from_vector(ctx, d, to_vector(a, d)) == graded_component(a, d)
    with pytest.raises(ValueError):
        to_vector(a, 6)
