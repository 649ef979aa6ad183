"""Truncated free Lie rings on the Lyndon basis.

Basis elements are Lyndon words over the alphabet ``0..rank-1``; the
bracket of a Lyndon word is read off its standard factorization.  Products
of basis elements are rewritten into the basis with skew symmetry and the
Jacobi identity, and memoized per rank (the rewriting does not depend on
the coefficient domain or on the class cutoff).
"""

from __future__ import annotations

import threading
from functools import lru_cache
from typing import Iterator, Mapping, Sequence

from .coeffring import CoeffDomain

Word = tuple[int, ...]

DEFAULT_MAX_BASIS = 60_000


class ResourceGuardError(RuntimeError):
    """A configured size cap was exceeded."""

    def __init__(self, message: str, size: int | None = None):
        super().__init__(message)
        self.size = size


class ContextMismatchError(ValueError):
    pass


def lyndon_words(rank: int, max_len: int) -> Iterator[Word]:
    """All Lyndon words of length <= max_len in lexicographic order (Duval)."""
    if rank < 1 or max_len < 1:
        return
    w = [-1]
    while w:
        w[-1] += 1
        yield tuple(w)
        m = len(w)
        while len(w) < max_len:
            w.append(w[len(w) - m])
        while w and w[-1] == rank - 1:
            w.pop()


def _mobius(n: int) -> int:
    out, f = 1, 2
    while f * f <= n:
        if n % f == 0:
            n //= f
            if n % f == 0:
                return 0
            out = -out
        f += 1
    return -out if n > 1 else out


def necklace_count(rank: int, degree: int) -> int:
    """Witt's formula: dimension of the degree-d component of the free Lie ring."""
    total = sum(_mobius(degree // d) * rank**d for d in range(1, degree + 1) if degree % d == 0)
    return total // degree


def standard_factorization(w: Word) -> tuple[Word, Word]:
    """Split a Lyndon word of length >= 2 at its smallest proper suffix."""
    if len(w) < 2:
        raise ValueError("letters have no standard factorization")
    k = min(range(1, len(w)), key=lambda i: w[i:])
    return w[:k], w[k:]


class _LyndonRewriter:
    """Integer-coefficient products of Lyndon basis words, shared per rank."""

    def __init__(self):
        self._cache: dict[tuple[Word, Word], dict[Word, int]] = {}
        self._std: dict[Word, tuple[Word, Word]] = {}
        self._lock = threading.Lock()

    def std(self, w: Word) -> tuple[Word, Word]:
        f = self._std.get(w)
        if f is None:
            f = standard_factorization(w)
            self._std[w] = f
        return f

    def bracket(self, u: Word, v: Word) -> dict[Word, int]:
        key = (u, v)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        out = self._compute(u, v)
        with self._lock:
            self._cache.setdefault(key, out)
        return out

    def _compute(self, u: Word, v: Word) -> dict[Word, int]:
        if u == v:
            return {}
        if u > v:
            return {w: -c for w, c in self.bracket(v, u).items()}
        if len(u) == 1 or self.std(u)[1] >= v:
            return {u + v: 1}
        u1, u2 = self.std(u)
        # [[u1,u2],v] = [[u1,v],u2] + [u1,[u2,v]]
        acc: dict[Word, int] = {}
        for w, c in self.bracket(u1, v).items():
            for w2, c2 in self.bracket(w, u2).items():
                acc[w2] = acc.get(w2, 0) + c * c2
        for w, c in self.bracket(u2, v).items():
            for w2, c2 in self.bracket(u1, w).items():
                acc[w2] = acc.get(w2, 0) + c * c2
        return {w: c for w, c in acc.items() if c}


@lru_cache(maxsize=None)
def _rewriter(rank: int) -> _LyndonRewriter:
    return _LyndonRewriter()


class FreeLieContext:
    """Free Lie ring of a given rank, truncated above ``class_cutoff``.

    Basis order is degree-major, then lexicographic on Lyndon words; this
    order is part of the public contract (reports and golden tests use it).
    """

    def __init__(
        self,
        rank: int,
        class_cutoff: int,
        domain: CoeffDomain | None = None,
        names: Sequence[str] | None = None,
        max_basis: int = DEFAULT_MAX_BASIS,
    ):
        if rank < 1:
            raise ValueError(f"rank must be >= 1, got {rank}")
        if class_cutoff < 1:
            raise ValueError(f"class cutoff must be >= 1, got {class_cutoff}")
        total = sum(necklace_count(rank, d) for d in range(1, class_cutoff + 1))
        if total > max_basis:
            raise ResourceGuardError(
                f"basis of rank {rank}, class {class_cutoff} has {total} elements (cap {max_basis})", total
            )
        self.rank = rank
        self.class_cutoff = class_cutoff
        self.domain = domain if domain is not None else CoeffDomain(0)
        self.names = list(names) if names is not None else [f"x{i + 1}" for i in range(rank)]
        if len(self.names) != rank:
            raise ValueError("need one name per generator")

        words = sorted(lyndon_words(rank, class_cutoff), key=lambda w: (len(w), w))
        self.words: list[Word] = words
        self.index: dict[Word, int] = {w: i for i, w in enumerate(words)}
        self.degrees: list[int] = [len(w) for w in words]
        self.multidegrees: list[tuple[int, ...]] = [
            tuple(w.count(a) for a in range(rank)) for w in words
        ]
        self._degree_ranges: list[range] = []
        start = 0
        for d in range(1, class_cutoff + 1):
            n = sum(1 for w in words if len(w) == d)
            self._degree_ranges.append(range(start, start + n))
            start += n
        # multigraded blocks: multidegree -> ordered basis indices
        self.blocks: dict[tuple[int, ...], list[int]] = {}
        for i, md in enumerate(self.multidegrees):
            self.blocks.setdefault(md, []).append(i)
        self.block_position: list[int] = [0] * len(words)
        for idxs in self.blocks.values():
            for pos, i in enumerate(idxs):
                self.block_position[i] = pos
        self._rw = _rewriter(rank)
        self._products: dict[tuple[int, int], tuple[tuple[int, int], ...]] = {}

    # ------------------------------------------------------------ basis

    def __len__(self) -> int:
        return len(self.words)

    def degree_indices(self, d: int) -> range:
        if not 1 <= d <= self.class_cutoff:
            raise ValueError(f"degree {d} outside 1..{self.class_cutoff}")
        return self._degree_ranges[d - 1]

    def dimension(self, d: int) -> int:
        return len(self.degree_indices(d))

    def basis_counts(self) -> list[int]:
        return [len(r) for r in self._degree_ranges]

    def blocks_of_degree(self, d: int) -> list[tuple[int, ...]]:
        return sorted((md for md in self.blocks if sum(md) == d), reverse=True)

    def bracket_string(self, i: int) -> str:
        return self._word_bracket(self.words[i])

    def _word_bracket(self, w: Word) -> str:
        if len(w) == 1:
            return self.names[w[0]]
        u, v = self._rw.std(w)
        return f"[{self._word_bracket(u)},{self._word_bracket(v)}]"

    def basis_dump(self) -> list[str]:
        return [f"{self.bracket_string(i)}\t{self.degrees[i]}" for i in range(len(self.words))]

    # ------------------------------------------------------------ products

    def basis_bracket(self, i: int, j: int) -> tuple[tuple[int, int], ...]:
        """[b_i, b_j] as integer (index, coefficient) pairs; empty past the cutoff."""
        key = (i, j)
        hit = self._products.get(key)
        if hit is not None:
            return hit
        if self.degrees[i] + self.degrees[j] > self.class_cutoff:
            out: tuple[tuple[int, int], ...] = ()
        else:
            prod = self._rw.bracket(self.words[i], self.words[j])
            out = tuple(sorted((self.index[w], c) for w, c in prod.items()))
        self._products[key] = out
        return out

    # ------------------------------------------------------------ elements

    def element(self, terms: Mapping[int, int]) -> "LieElement":
        d = self.domain
        return LieElement(self, {i: c for i, c in ((i, d.canon(c)) for i, c in terms.items()) if c})

    def zero(self) -> "LieElement":
        return LieElement(self, {})

    def basis_element(self, i: int) -> "LieElement":
        return LieElement(self, {i: 1})

    def generator(self, k: int) -> "LieElement":
        """The k-th free generator, 1-based."""
        if not 1 <= k <= self.rank:
            raise ValueError(f"generator index {k} outside 1..{self.rank}")
        return self.basis_element(self.index[(k - 1,)])

    def generators(self) -> list["LieElement"]:
        return [self.generator(k) for k in range(1, self.rank + 1)]

    def from_vector(self, d: int, v: Sequence[int]) -> "LieElement":
        rng = self.degree_indices(d)
        if len(v) != len(rng):
            raise ValueError(f"vector length {len(v)} != dimension {len(rng)} of degree {d}")
        return self.element({i: int(c) for i, c in zip(rng, v) if c})

    def bracket_terms(self, a: Mapping[int, int], b: Mapping[int, int]) -> dict[int, int]:
        """Bilinear product of raw term maps; coefficients left uncanonicalized."""
        acc: dict[int, int] = {}
        cut = self.class_cutoff
        degs = self.degrees
        prod = self.basis_bracket
        for i, ci in a.items():
            di = degs[i]
            for j, cj in b.items():
                if di + degs[j] > cut:
                    continue
                c = ci * cj
                for k, ck in prod(i, j):
                    acc[k] = acc.get(k, 0) + c * ck
        return acc

    def bracket(self, a: "LieElement", b: "LieElement") -> "LieElement":
        if a.ctx is not self or b.ctx is not self:
            raise ContextMismatchError("elements belong to different contexts")
        return self.element(self.bracket_terms(a.terms, b.terms))

    def left_normed(self, args: Sequence["LieElement"]) -> "LieElement":
        if not args:
            raise ValueError("left_normed needs at least one argument")
        out = args[0]
        for x in args[1:]:
            out = self.bracket(out, x)
        return out


class LieElement:
    """Sparse exact combination of basis elements of a FreeLieContext."""

    __slots__ = ("ctx", "terms")

    def __init__(self, ctx: FreeLieContext, terms: dict[int, int]):
        self.ctx = ctx
        self.terms = terms

    def _check(self, other: "LieElement"):
        if not isinstance(other, LieElement):
            return NotImplemented
        if other.ctx is not self.ctx:
            raise ContextMismatchError("elements belong to different contexts")
        return None

    def __add__(self, other: "LieElement") -> "LieElement":
        if self._check(other) is NotImplemented:
            return NotImplemented
        out = dict(self.terms)
        for i, c in other.terms.items():
            out[i] = out.get(i, 0) + c
        return self.ctx.element(out)

    def __sub__(self, other: "LieElement") -> "LieElement":
        if self._check(other) is NotImplemented:
            return NotImplemented
        out = dict(self.terms)
        for i, c in other.terms.items():
            out[i] = out.get(i, 0) - c
        return self.ctx.element(out)

    def __neg__(self) -> "LieElement":
        return self.ctx.element({i: -c for i, c in self.terms.items()})

    def scale(self, k: int) -> "LieElement":
        return self.ctx.element({i: k * c for i, c in self.terms.items()})

    def __rmul__(self, k: int) -> "LieElement":
        if not isinstance(k, int):
            return NotImplemented
        return self.scale(k)

    def bracket(self, other: "LieElement") -> "LieElement":
        return self.ctx.bracket(self, other)

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, LieElement):
            return NotImplemented
        return self.ctx is other.ctx and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def degrees(self) -> list[int]:
        return sorted({self.ctx.degrees[i] for i in self.terms})

    def graded_component(self, d: int) -> "LieElement":
        return LieElement(self.ctx, {i: c for i, c in self.terms.items() if self.ctx.degrees[i] == d})

    def to_vector(self, d: int) -> list[int]:
        rng = self.ctx.degree_indices(d)
        return [self.terms.get(i, 0) for i in rng]

    def __repr__(self) -> str:
        return f"LieElement({self})"

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        m = self.ctx.domain.modulus
        for i in sorted(self.terms):
            c = self.terms[i]
            if m and c > m // 2:
                c -= m
            s = self.ctx.bracket_string(i)
            if c == 1:
                parts.append(f"+ {s}")
            elif c == -1:
                parts.append(f"- {s}")
            else:
                parts.append(f"{'+' if c > 0 else '-'} {abs(c)}*{s}")
        out = " ".join(parts)
        return out[2:] if out.startswith("+ ") else "-" + out[2:]


def build_context(rank: int, class_cutoff: int, domain: CoeffDomain | None = None, **kw) -> FreeLieContext:
    return FreeLieContext(rank, class_cutoff, domain, **kw)


def bracket(a: LieElement, b: LieElement) -> LieElement:
    return a.ctx.bracket(a, b)


def left_normed(args: Sequence[LieElement]) -> LieElement:
    if not args:
        raise ValueError("left_normed needs at least one argument")
    return args[0].ctx.left_normed(args)


def add(a: LieElement, b: LieElement) -> LieElement:
    return a + b


def scale(k: int, a: LieElement) -> LieElement:
    return a.scale(k)


def is_zero(a: LieElement) -> bool:
    return a.is_zero()


def graded_component(a: LieElement, d: int) -> LieElement:
    return a.graded_component(d)


def to_vector(a: LieElement, d: int) -> list[int]:
    return a.to_vector(d)


def from_vector(ctx: FreeLieContext, d: int, v: Sequence[int]) -> LieElement:
    return ctx.from_vector(d, v)

