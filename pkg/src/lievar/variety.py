"""Verbal ideals and relatively free Lie rings inside a truncated free Lie ring.

Everything here is multigraded: substituting Lyndon basis elements into a
word gives a multihomogeneous value, bracketing with a generator shifts the
multidegree by a unit vector, and so every subspace is stored block by
block (one block per multidegree).  Over a prime field a block is a
``ModpSpan``; over the integers an ``IntSpan``.
"""

from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

from .coeffring import CoeffDomain
from .freelie import FreeLieContext, LieElement
from .linalg import (
    AbelianPresentation,
    IntSpan,
    ModpSpan,
    integer_left_kernel,
    normalize_invariants,
    quotient_presentation,
    nullspace_mod_p,
    relative_invariants,
)
from .wordlang import (
    Identity,
    LeftNormed,
    Linearization,
    Var,
    Word,
    WordCombination,
    linearizations,
    ln,
    parse_identity_file,
)

Multideg = tuple[int, ...]
Terms = dict[int, int]

_FLUSH_ROWS = 2048


@dataclass
class VarietySpec:
    identities: list[Identity]
    domain: CoeffDomain = field(default_factory=CoeffDomain)

    def __post_init__(self):
        if not self.identities:
            raise ValueError("a variety needs at least one identity")

    @classmethod
    def from_text(cls, text: str, domain: CoeffDomain | None = None) -> "VarietySpec":
        return cls(parse_identity_file(text), domain or CoeffDomain())

    def max_multiplicity(self) -> int:
        return max(ident.max_multiplicity() for ident in self.identities)

    def polarization_exact(self) -> bool:
        """True when per-composition polarizations provably lie in the verbal ideal.

        Multiplicity <= 2 needs only one cross term; over a prime field with
        p larger than every multiplicity the components separate by scaling.
        """
        k = self.max_multiplicity()
        if k <= 2:
            return True
        return self.domain.is_field and self.domain.modulus > k


# ---------------------------------------------------------------- subspaces


class GradedSubspace:
    """A multigraded additive subgroup of a FreeLieContext."""

    def __init__(self, ctx: FreeLieContext):
        self.ctx = ctx
        self.domain = ctx.domain
        if not (self.domain.is_integers or self.domain.is_field):
            raise ValueError(f"elimination needs Z or a prime field, got {self.domain}")
        self._spans: dict[Multideg, ModpSpan | IntSpan] = {}
        self._pending: dict[Multideg, list] = defaultdict(list)
        self._npending = 0

    # ---- block plumbing

    def _new_span(self, md: Multideg):
        n = len(self.ctx.blocks[md])
        if self.domain.is_integers:
            return IntSpan(n)
        return ModpSpan(n, self.domain.modulus)

    def span(self, md: Multideg):
        self.flush()
        sp = self._spans.get(md)
        if sp is None:
            sp = self._spans[md] = self._new_span(md)
        return sp

    def _split(self, terms: Mapping[int, int]) -> dict[Multideg, list[int]]:
        ctx = self.ctx
        out: dict[Multideg, list[int]] = {}
        for i, c in terms.items():
            if not c:
                continue
            md = ctx.multidegrees[i]
            row = out.get(md)
            if row is None:
                row = out[md] = [0] * len(ctx.blocks[md])
            row[ctx.block_position[i]] += c
        return out

    def _full(self, md: Multideg) -> bool:
        sp = self._spans.get(md)
        return sp is not None and sp.rank == sp.ncols

    def add_terms(self, terms: Mapping[int, int]):
        for md, row in self._split(terms).items():
            if self.domain.modulus:
                row = [c % self.domain.modulus for c in row]
            if not any(row) or self._full(md):
                continue
            self._pending[md].append(row)
            self._npending += 1
        if self._npending >= _FLUSH_ROWS:
            self.flush()

    def add_element(self, e: LieElement):
        self.add_terms(e.terms)

    def add_block_rows(self, md: Multideg, rows):
        if len(rows) and not self._full(md):
            self._pending[md].extend(list(rows))
            self._npending += len(rows)
            if self._npending >= _FLUSH_ROWS:
                self.flush()

    def flush(self):
        if not self._npending:
            return
        pending, self._pending, self._npending = self._pending, defaultdict(list), 0
        for md, rows in pending.items():
            sp = self._spans.get(md)
            if sp is None:
                sp = self._spans[md] = self._new_span(md)
            if sp.rank < sp.ncols:
                sp.add_rows(rows)

    def copy(self) -> "GradedSubspace":
        self.flush()
        out = GradedSubspace(self.ctx)
        out._spans = {md: sp.copy() for md, sp in self._spans.items()}
        return out

    # ---- queries

    def block_rank(self, md: Multideg) -> int:
        self.flush()
        sp = self._spans.get(md)
        return sp.rank if sp is not None else 0

    def degree_rank(self, d: int) -> int:
        return sum(self.block_rank(md) for md in self.ctx.blocks_of_degree(d))

    def block_rows(self, md: Multideg) -> list[list[int]]:
        """Basis rows of a block (echelon form) in block coordinates."""
        self.flush()
        sp = self._spans.get(md)
        if sp is None:
            return []
        if isinstance(sp, ModpSpan):
            return sp.rows.tolist()
        return [r[:] for r in sp.rows]

    def block_row_terms(self, md: Multideg) -> list[Terms]:
        idxs = self.ctx.blocks[md]
        return [{idxs[k]: c for k, c in enumerate(row) if c} for row in self.block_rows(md)]

    def reduce_terms(self, terms: Mapping[int, int]) -> Terms:
        """Canonical representative of ``terms`` modulo this subspace."""
        self.flush()
        out: Terms = {}
        for md, row in self._split(terms).items():
            sp = self._spans.get(md)
            red = sp.reduce(row) if sp is not None else [self.domain.canon(c) for c in row]
            idxs = self.ctx.blocks[md]
            for k, c in enumerate(red):
                c = int(c)
                if c:
                    out[idxs[k]] = c
        return out

    def contains_terms(self, terms: Mapping[int, int]) -> bool:
        return not self.reduce_terms(terms)

    def contains(self, e: LieElement) -> bool:
        return self.contains_terms(e.terms)

    def blocks(self) -> list[Multideg]:
        self.flush()
        return [md for md, sp in self._spans.items() if sp.rank]

    def issubset(self, other: "GradedSubspace") -> bool:
        for md in self.blocks():
            sp = other.span(md) if md in other._spans else None
            for row in self.block_rows(md):
                if sp is None or not sp.contains(row):
                    return False
        return True

    def equals(self, other: "GradedSubspace") -> bool:
        return self.issubset(other) and other.issubset(self)


# ---------------------------------------------------------------- evaluation


class _WordEvaluator:
    """Evaluates a word combination on basis-index assignments, caching subtrees."""

    def __init__(self, ctx: FreeLieContext, comb: WordCombination):
        self.ctx = ctx
        self.comb = comb
        self._cache: dict = {}
        self._nodes = [(c, self._compile(w)) for c, w in comb.terms]

    def _compile(self, w: Word):
        if isinstance(w, Var):
            return ("v", w.name)
        kids = tuple(self._compile(x) for x in w.items)
        names: dict[str, None] = {}
        for k in kids:
            for n in ((k[1],) if k[0] == "v" else k[2]):
                names.setdefault(n, None)
        return ("n", kids, tuple(names), id(w))

    def _eval(self, node, assign: Mapping[str, int], top: bool) -> Terms:
        if node[0] == "v":
            return {assign[node[1]]: 1}
        key = None
        if not top:
            key = (node[3], tuple(assign[n] for n in node[2]))
            hit = self._cache.get(key)
            if hit is not None:
                return hit
        kids = node[1]
        canon = self.ctx.domain.canon
        val = self._eval(kids[0], assign, False)
        for k in kids[1:]:
            if not val:
                break
            val = self.ctx.bracket_terms(val, self._eval(k, assign, False))
            val = {i: c for i, c in ((i, canon(c)) for i, c in val.items()) if c}
        if key is not None:
            self._cache[key] = val
        return val

    def value(self, assign: Mapping[str, int]) -> Terms:
        acc: Terms = {}
        for c, node in self._nodes:
            for i, v in self._eval(node, assign, True).items():
                acc[i] = acc.get(i, 0) + c * v
        canon = self.ctx.domain.canon
        return {i: c for i, c in ((i, canon(c)) for i, c in acc.items()) if c}


def _substitutions(ctx: FreeLieContext, lin: Linearization) -> Iterator[dict[str, int]]:
    """Basis-index assignments to the fresh variables within the class cutoff.

    Fresh variables of one group get strictly increasing (hence distinct)
    basis indices; each composition is enumerated separately upstream.
    """
    flat = []
    for gid, (_, members) in enumerate(lin.groups):
        for pos, (name, count) in enumerate(members):
            flat.append((name, count, gid, pos))
    need_after = [0] * (len(flat) + 1)
    for i in range(len(flat) - 1, -1, -1):
        need_after[i] = need_after[i + 1] + flat[i][1]
    cut = ctx.class_cutoff
    if need_after[0] > cut:
        return
    ends = [0] * (cut + 1)
    for d in range(1, cut + 1):
        ends[d] = ctx.degree_indices(d).stop
    degs = ctx.degrees
    assign: dict[str, int] = {}

    def rec(i: int, budget: int, prev: int):
        if i == len(flat):
            yield dict(assign)
            return
        name, count, gid, pos = flat[i]
        maxdeg = (budget - need_after[i + 1]) // count
        if maxdeg < 1:
            return
        start = prev + 1 if pos > 0 else 0
        for b in range(start, ends[min(maxdeg, cut)]):
            assign[name] = b
            last_in_group = i + 1 == len(flat) or flat[i + 1][2] != gid
            yield from rec(i + 1, budget - count * degs[b], -1 if last_in_group else b)
        assign.pop(name, None)

    yield from rec(0, cut, -1)


def _as_linearizations(ident: Identity | Word | WordCombination) -> list[Linearization]:
    return linearizations(ident)


def iter_verbal_values(ident: Identity, ctx: FreeLieContext) -> Iterator[tuple[Linearization, dict[str, int], Terms]]:
    """Yields (linearization, substitution, value) for every verbal generator."""
    for lin in _as_linearizations(ident):
        ev = _WordEvaluator(ctx, lin.combination)
        for assign in _substitutions(ctx, lin):
            yield lin, assign, ev.value(assign)


def verbal_generators(ident: Identity, ctx: FreeLieContext, into: GradedSubspace | None = None) -> GradedSubspace:
    """Span of all basis-tuple values and polarization values of an identity."""
    out = into if into is not None else GradedSubspace(ctx)
    for _, _, val in iter_verbal_values(ident, ctx):
        if val:
            out.add_terms(val)
    out.flush()
    return out


# ---------------------------------------------------------------- closure


def _ad_matrix(ctx: FreeLieContext, md: Multideg, gen: int) -> tuple[Multideg, np.ndarray]:
    """Matrix of v -> [v, x_gen] from block md to block md + e_gen."""
    target = tuple(m + (k == gen) for k, m in enumerate(md))
    src = ctx.blocks[md]
    dst = ctx.blocks.get(target)
    if dst is None:
        return target, np.zeros((len(src), 0), dtype=object)
    g = ctx.index[(gen,)]
    a = np.zeros((len(src), len(dst)), dtype=object)
    for r, i in enumerate(src):
        for k, c in ctx.basis_bracket(i, g):
            a[r, ctx.block_position[k]] += c
    return target, a


def ideal_closure(gen: GradedSubspace, ctx: FreeLieContext | None = None) -> GradedSubspace:
    """Smallest graded ideal containing ``gen`` (closes under [-, x_i] degree by degree)."""
    ctx = ctx or gen.ctx
    out = gen.copy()
    p = ctx.domain.modulus
    for d in range(1, ctx.class_cutoff):
        for md in ctx.blocks_of_degree(d):
            rows = out.block_rows(md)
            if not rows:
                continue
            for g in range(ctx.rank):
                target, a = _ad_matrix(ctx, md, g)
                if a.shape[1] == 0 or out._full(target):
                    continue
                if p:
                    img = (np.asarray(rows, dtype=np.int64) @ (a % p).astype(np.int64)) % p
                    out.add_block_rows(target, img)
                else:
                    img = np.asarray(rows, dtype=object) @ a
                    out.add_block_rows(target, [list(map(int, r)) for r in img])
        out.flush()
    return out


# ---------------------------------------------------------------- quotient rings


@dataclass
class SeriesReport:
    kind: str
    cutoff: int
    rank: int
    steps: list[dict]  # {"step": k, "sizes": {degree: size}}
    terminated_at: int | None

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "cutoff": self.cutoff,
            "rank": self.rank,
            "steps": [
                {"step": s["step"], "degrees": [{"degree": d, "size": v} for d, v in sorted(s["sizes"].items())]}
                for s in self.steps
            ],
            "terminated_at": self.terminated_at,
        }


@dataclass
class BoundResult:
    """Observed nilpotency exponent / solvable length at a given rank and cutoff."""

    value: int | None  # None: did not terminate within the cutoff
    lower_bound: int
    full_certificate: bool

    def at_most(self, bound: int) -> bool:
        return self.value is not None and self.value <= bound


class RelativelyFreeRing:
    """Free Lie ring of given rank and class modulo a closed graded ideal."""

    def __init__(
        self, ctx: FreeLieContext, ideal: GradedSubspace, spec: VarietySpec | None = None, truncated: bool = False
    ):
        self.ctx = ctx
        self.ideal = ideal
        self.spec = spec
        self.domain = ctx.domain
        self.exact = spec.polarization_exact() if spec is not None else True
        # truncated: the cutoff is part of the ring's definition (free nilpotent
        # of that class), so brackets past it are genuinely zero
        self.truncated = truncated

    @property
    def rank(self) -> int:
        return self.ctx.rank

    @property
    def class_cutoff(self) -> int:
        return self.ctx.class_cutoff

    # ---- sizes

    def block_size(self, md: Multideg, sub: GradedSubspace | None = None):
        """Size of (sub + I)/I in one block, or of the quotient block if sub is None."""
        n = len(self.ctx.blocks[md])
        if self.domain.is_field:
            if sub is None:
                return n - self.ideal.block_rank(md)
            return sub.block_rank(md) - self.ideal.block_rank(md)
        if sub is None:
            return self.ideal.span(md).invariants()
        return relative_invariants(self.ideal.block_rows(md), sub.block_rows(md), n)

    def degree_size(self, d: int, sub: GradedSubspace | None = None):
        """Dimension over F_p, invariant factor list over Z."""
        sizes = [self.block_size(md, sub) for md in self.ctx.blocks_of_degree(d)]
        if self.domain.is_field:
            return sum(sizes)
        return normalize_invariants([f for s in sizes for f in s])

    @staticmethod
    def size_is_zero(size) -> bool:
        return size == 0 or size == []

    def quotient_sizes(self) -> dict[int, object]:
        return {d: self.degree_size(d) for d in range(1, self.class_cutoff + 1)}

    def presentation(self, d: int) -> AbelianPresentation:
        """Presentation of the degree-d component, coordinates in the degree-d basis."""
        rng = self.ctx.degree_indices(d)
        rows = []
        for md in self.ctx.blocks_of_degree(d):
            for t in self.ideal.block_row_terms(md):
                row = [0] * len(rng)
                for i, c in t.items():
                    row[i - rng.start] = c
                rows.append(row)
        return quotient_presentation(rows, len(rng), self.domain)

    # ---- element arithmetic modulo the ideal

    def reduce(self, e: LieElement) -> LieElement:
        return LieElement(self.ctx, self.ideal.reduce_terms(e.terms))

    def is_zero(self, e: LieElement) -> bool:
        return self.ideal.contains(e)

    def bracket(self, a: LieElement, b: LieElement) -> LieElement:
        return self.reduce(a.bracket(b))

    def check_bracket_well_defined(self) -> bool:
        """Bracketing ideal rows with the generators stays inside the ideal."""
        ctx = self.ctx
        for md in self.ideal.blocks():
            for t in self.ideal.block_row_terms(md):
                for g in ctx.generators():
                    if not self.ideal.contains_terms(ctx.bracket_terms(t, g.terms)):
                        return False
        return True

    # ---- quotient subspaces (stored as preimages containing the ideal)

    def _preimage(self, terms_iter: Iterable[Terms]) -> GradedSubspace:
        pre = self.ideal.copy()
        for t in terms_iter:
            pre.add_terms(t)
        pre.flush()
        return pre

    def representatives(self, pre: GradedSubspace) -> dict[Multideg, list[Terms]]:
        """Nonzero reduced spanning vectors of pre/I, block by block."""
        out: dict[Multideg, list[Terms]] = {}
        for md in pre.blocks():
            if pre.block_rank(md) == self.ideal.block_rank(md) and self.domain.is_field:
                continue
            reps = []
            for t in pre.block_row_terms(md):
                r = self.ideal.reduce_terms(t)
                if r:
                    reps.append(r)
            if reps:
                out[md] = reps
        return out

    def whole(self) -> GradedSubspace:
        pre = self.ideal.copy()
        for md, idxs in self.ctx.blocks.items():
            pre.add_block_rows(md, np.eye(len(idxs), dtype=np.int64).tolist())
        pre.flush()
        return pre

    def bracket_span(self, a: GradedSubspace, b: GradedSubspace) -> GradedSubspace:
        """Preimage of the additive span of [a, b]."""
        ra, rb = self.representatives(a), self.representatives(b)
        cut = self.class_cutoff
        ctx = self.ctx

        def gen():
            for mda, xs in ra.items():
                for mdb, ys in rb.items():
                    if sum(mda) + sum(mdb) > cut:
                        continue
                    for x in xs:
                        for y in ys:
                            yield ctx.bracket_terms(x, y)

        return self._preimage(gen())

    def _bracket_with_generators(self, a: GradedSubspace) -> GradedSubspace:
        ra = self.representatives(a)
        gens = [g.terms for g in self.ctx.generators()]

        def gen():
            for md, xs in ra.items():
                if sum(md) >= self.class_cutoff:
                    continue
                for x in xs:
                    for g in gens:
                        yield self.ctx.bracket_terms(x, g)

        return self._preimage(gen())

    def is_trivial(self, pre: GradedSubspace) -> bool:
        return not self.representatives(pre)

    def subspace_sizes(self, pre: GradedSubspace) -> dict[int, object]:
        return {d: self.degree_size(d, pre) for d in range(1, self.class_cutoff + 1)}

    # ---- series

    def lower_central_terms(self) -> list[GradedSubspace]:
        """L^1, L^2, ... up to the first zero term (or L^cutoff)."""
        terms = [self.whole()]
        while len(terms) < self.class_cutoff and not self.is_trivial(terms[-1]):
            terms.append(self._bracket_with_generators(terms[-1]))
        return terms

    def derived_terms(self) -> list[GradedSubspace]:
        """L^(0), L^(1), ... while the next term can be nonzero below the cutoff."""
        terms = [self.whole()]
        while not self.is_trivial(terms[-1]) and (self.truncated or 2 ** len(terms) <= self.class_cutoff):
            terms.append(self.bracket_span(terms[-1], terms[-1]))
        return terms

    def lower_central_series(self) -> SeriesReport:
        terms = self.lower_central_terms()
        steps = [{"step": k + 1, "sizes": self.subspace_sizes(t)} for k, t in enumerate(terms)]
        end = len(terms) if self.is_trivial(terms[-1]) else None
        return SeriesReport("lower_central", self.class_cutoff, self.rank, steps, end)

    def derived_series(self) -> SeriesReport:
        terms = self.derived_terms()
        steps = [{"step": k, "sizes": self.subspace_sizes(t)} for k, t in enumerate(terms)]
        end = len(terms) - 1 if self.is_trivial(terms[-1]) else None
        return SeriesReport("derived", self.class_cutoff, self.rank, steps, end)

    def nilpotency_exponent(self) -> BoundResult:
        """Largest k with L^k != 0, when L^(k+1) = 0 is seen within the cutoff.

        L^k is the image of all degrees >= k, so this reads the top nonzero
        quotient degree.  A nonzero top degree means no termination.
        """
        sizes = self.quotient_sizes()
        nonzero = [d for d, s in sizes.items() if not self.size_is_zero(s)]
        top = max(nonzero, default=0)
        if top == self.class_cutoff and not self.truncated:
            return BoundResult(None, self.class_cutoff, False)
        return BoundResult(top, top, self.rank >= top + 1)

    def solvable_length(self) -> BoundResult:
        """Length n means L^(n+1) = 0 and L^(n) != 0."""
        terms = self.derived_terms()
        if self.is_trivial(terms[-1]):
            k = len(terms) - 1
            n = k - 1 if k > 0 else 0
            if k == 0:
                return BoundResult(0, 0, True)
            return BoundResult(n, n, self.rank >= 2**k)
        return BoundResult(None, len(terms) - 1, False)

    def degrees_at_least(self, d: int) -> GradedSubspace:
        """Preimage of the image of all basis elements of degree >= d."""
        pre = self.ideal.copy()
        for md, idxs in self.ctx.blocks.items():
            if sum(md) >= d:
                pre.add_block_rows(md, np.eye(len(idxs), dtype=np.int64).tolist())
        pre.flush()
        return pre

    def l2_terms(self) -> list[GradedSubspace]:
        """Lower central series of the subring L^2, while the next term fits below the cutoff."""
        l2 = self.degrees_at_least(2)
        terms = [l2]
        while not self.is_trivial(terms[-1]) and (self.truncated or 2 * (len(terms) + 1) <= self.class_cutoff):
            terms.append(self.bracket_span(l2, terms[-1]))
        return terms

    def l2_exponent(self) -> BoundResult:
        """Nilpotency exponent of L^2; (L^2)^k lives in degrees >= 2k."""
        terms = self.l2_terms()
        if self.is_trivial(terms[-1]):
            k = len(terms)
            return BoundResult(k - 1, k - 1, self.rank >= 2 * k)
        return BoundResult(None, len(terms), False)

    # ---- centers

    def _kernel_block(self, md: Multideg, partners: Sequence[Terms]) -> list[Terms]:
        """Vectors v of block md with [v, s] in I for every homogeneous partner s."""
        ctx = self.ctx
        idxs = ctx.blocks[md]
        n = len(idxs)
        targets: list[tuple[Terms, Multideg, int]] = []
        width = 0
        for s in partners:
            if not s:
                continue
            smd = ctx.multidegrees[next(iter(s))]
            tmd = tuple(a + b for a, b in zip(md, smd))
            if tmd in ctx.blocks:
                targets.append((s, tmd, width))
                width += len(ctx.blocks[tmd])
        if not width:
            return [{i: 1} for i in idxs]
        images = [[0] * width for _ in range(n)]
        for r, i in enumerate(idxs):
            for s, tmd, off in targets:
                val = ctx.bracket_terms({i: 1}, s)
                if self.domain.is_field:
                    val = self.ideal.reduce_terms(val)
                for k, c in val.items():
                    images[r][off + ctx.block_position[k]] += c
        if self.domain.is_field:
            p = self.domain.modulus
            ker = nullspace_mod_p(np.asarray(images, dtype=np.int64).T % p, p)
            return [{idxs[k]: int(c) for k, c in enumerate(v) if c} for v in ker]
        rows = [r[:] for r in images]
        for _, tmd, off in targets:
            for irow in self.ideal.block_rows(tmd):
                r = [0] * width
                r[off:off + len(irow)] = irow
                rows.append(r)
        out = []
        for u in integer_left_kernel(rows, len(rows)):
            v = {idxs[k]: u[k] for k in range(n) if u[k]}
            if v:
                out.append(v)
        return out

    def centralizer(self, sub: GradedSubspace) -> GradedSubspace:
        partners = [t for ts in self.representatives(sub).values() for t in ts]
        vecs = []
        for md in self.ctx.blocks:
            vecs.extend(self._kernel_block(md, partners))
        return self._preimage(vecs)

    def center(self) -> GradedSubspace:
        return self.centralizer_of_generators()

    def centralizer_of_generators(self) -> GradedSubspace:
        gens = [g.terms for g in self.ctx.generators()]
        vecs = []
        for md in self.ctx.blocks:
            vecs.extend(self._kernel_block(md, gens))
        return self._preimage(vecs)

    # ---- identities

    def identity_witness(self, ident: Identity) -> dict | None:
        for lin, assign, val in iter_verbal_values(ident, self.ctx):
            if val and not self.ideal.contains_terms(val):
                ctx = self.ctx
                return {
                    "linearization": str(lin.combination),
                    "substitution": {k: ctx.bracket_string(v) for k, v in assign.items()},
                    "value": str(LieElement(ctx, self.ideal.reduce_terms(val))),
                }
        return None

    def satisfies_identity(self, ident: Identity) -> tuple[bool, dict | None]:
        w = self.identity_witness(ident)
        return w is None, w

    def structure_constants(self) -> tuple[int, list[str], dict[tuple[int, int], list[int]]]:
        """Quotient as a finite Lie ring over F_p: (p, basis labels, brackets i<j)."""
        p = self.domain.require_field()
        ctx = self.ctx
        basis: list[int] = []
        for d in range(1, self.class_cutoff + 1):
            for md in ctx.blocks_of_degree(d):
                sp = self.ideal.span(md)
                free = sp.free_columns()
                basis.extend(ctx.blocks[md][f] for f in free)
        basis.sort()
        pos = {b: k for k, b in enumerate(basis)}
        brackets: dict[tuple[int, int], list[int]] = {}
        for a in range(len(basis)):
            for b in range(a + 1, len(basis)):
                red = self.ideal.reduce_terms(ctx.bracket_terms({basis[a]: 1}, {basis[b]: 1}))
                if red:
                    vec = [0] * len(basis)
                    for k, c in red.items():
                        vec[pos[k]] = c % p
                    brackets[(a, b)] = vec
        return p, [ctx.bracket_string(b) for b in basis], brackets


def relatively_free(spec: VarietySpec, rank: int, class_cutoff: int, **ctx_kw) -> RelativelyFreeRing:
    ctx = FreeLieContext(rank, class_cutoff, spec.domain, **ctx_kw)
    gen = GradedSubspace(ctx)
    for ident in spec.identities:
        verbal_generators(ident, ctx, into=gen)
    return RelativelyFreeRing(ctx, ideal_closure(gen, ctx), spec)


def free_nilpotent(rank: int, class_cutoff: int, domain: CoeffDomain | None = None) -> RelativelyFreeRing:
    """The truncated free Lie ring itself (empty set of identities)."""
    ctx = FreeLieContext(rank, class_cutoff, domain)
    return RelativelyFreeRing(ctx, GradedSubspace(ctx), None, truncated=True)


# ---------------------------------------------------------------- predicates


def identity_C(k: int, rho: Sequence[int] | Mapping[int, int]) -> Identity:
    """(x1,...,xk) = (x1,x2,x_rho(3),...,x_rho(k)); rho lists rho(3..k) or maps them."""
    if k < 3:
        raise ValueError("C(k, rho) needs k >= 3")
    if isinstance(rho, Mapping):
        images = [rho.get(i, i) for i in range(3, k + 1)]
    else:
        images = list(rho)
    if sorted(images) != list(range(3, k + 1)):
        raise ValueError(f"{images} is not a permutation of 3..{k}")
    lhs = ln(*[f"x{i}" for i in range(1, k + 1)])
    rhs = ln("x1", "x2", *[f"x{i}" for i in images])
    return Identity(lhs, rhs)


def satisfies_C(R: RelativelyFreeRing, k: int, rho: Sequence[int] | Mapping[int, int] | None = None) -> bool:
    """C(k, rho), or C(k) for every rho when rho is None."""
    if rho is not None:
        return R.satisfies_identity(identity_C(k, rho))[0]
    for perm in itertools.permutations(range(3, k + 1)):
        if list(perm) != list(range(3, k + 1)) and not R.satisfies_identity(identity_C(k, perm))[0]:
            return False
    return True


def permutation_identities(n: int) -> list[Identity]:
    """(x1,...,xn) = (x1,x_rho(2),...,x_rho(n)) for every non-identity rho of 2..n."""
    base = list(range(2, n + 1))
    lhs = ln(*[f"x{i}" for i in range(1, n + 1)])
    out = []
    for perm in itertools.permutations(base):
        if list(perm) != base:
            out.append(Identity(lhs, ln("x1", *[f"x{i}" for i in perm])))
    return out


def variety_equal(a: VarietySpec, b: VarietySpec, rank: int, class_cutoff: int) -> bool:
    if a.domain != b.domain:
        raise ValueError("varieties over different domains")
    ra = relatively_free(a, rank, class_cutoff)
    rb = relatively_free(b, rank, class_cutoff)
    return ra.ideal.equals(rb.ideal)


def derived_word(k: int) -> Word:
    """delta_k on 2**k variables x1..x_{2^k}: delta_0 = x1, delta_{k+1} = [delta_k, delta_k']."""
    def build(k: int, start: int) -> Word:
        if k == 0:
            return Var(f"x{start}")
        half = 2 ** (k - 1)
        return LeftNormed((build(k - 1, start), build(k - 1, start + half)))

    return build(k, 1)
