"""Finite Lie rings given by structure constants, checked by total enumeration.

This module is deliberately independent of the free-ring machinery: it
never touches Lyndon words or verbal ideals, only a table ``T[i, j] = [e_i, e_j]``
over ``Z/m`` and plain numpy arithmetic.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .linalg import hnf_rows
from .wordlang import (
    Identity,
    LeftNormed,
    Linearization,
    Var,
    Word,
    WordCombination,
    linearizations,
)

DEFAULT_ASSIGNMENT_CAP = 3**6
DEFAULT_ORDER_CAP = 729
_CHUNK = 1 << 15


class EnumerationCapError(RuntimeError):
    def __init__(self, message: str, size: int):
        super().__init__(message)
        self.size = size


class StructureError(ValueError):
    """Malformed structure-constant input."""


@dataclass
class FiniteLieRing:
    """``(Z/m)^d`` with bracket ``[e_i, e_j] = table[i, j]``."""

    modulus: int
    table: np.ndarray  # shape (d, d, d)
    labels: list[str] = field(default_factory=list)
    name: str = ""

    def __post_init__(self):
        self.table = np.asarray(self.table, dtype=np.int64) % self.modulus
        d = self.dim
        if self.table.shape != (d, d, d):
            raise StructureError(f"table shape {self.table.shape} is not (d, d, d)")
        if not self.labels:
            self.labels = [f"e{i + 1}" for i in range(d)]
        self._flat = self.table.reshape(d * d, d)

    @property
    def dim(self) -> int:
        return self.table.shape[0]

    @property
    def order(self) -> int:
        return self.modulus**self.dim

    # ---- construction

    @classmethod
    def from_brackets(cls, modulus: int, dim: int, brackets: Mapping[tuple[int, int], Sequence[int]], **kw) -> "FiniteLieRing":
        """Build from the i < j entries (0-based); the rest follows by antisymmetry."""
        t = np.zeros((dim, dim, dim), dtype=np.int64)
        for (i, j), v in brackets.items():
            if not (0 <= i < dim and 0 <= j < dim) or i == j:
                raise StructureError(f"bad bracket index pair ({i}, {j})")
            if len(v) != dim:
                raise StructureError(f"bracket ({i}, {j}) has {len(v)} coefficients, expected {dim}")
            t[i, j] = v
            t[j, i] = -np.asarray(v, dtype=np.int64)
        return cls(modulus, t, **kw)

    @classmethod
    def from_json(cls, data: str | Mapping) -> "FiniteLieRing":
        """Parse ``{modulus, rank, brackets: [{i, j, value}]}`` (1-based i < j)."""
        if isinstance(data, str):
            try:
                data = json.loads(data)
            except json.JSONDecodeError as e:
                raise StructureError(f"malformed JSON: {e}") from None
        if not isinstance(data, Mapping):
            raise StructureError("structure file must be a JSON object")
        try:
            m = int(data["modulus"])
            d = int(data["rank"])
            entries = data.get("brackets", [])
        except (KeyError, TypeError, ValueError) as e:
            raise StructureError(f"missing or bad field: {e}") from None
        if m < 2 or d < 0:
            raise StructureError("need modulus >= 2 and rank >= 0")
        br = {}
        for ent in entries:
            try:
                i, j, v = int(ent["i"]), int(ent["j"]), [int(c) for c in ent["value"]]
            except (KeyError, TypeError, ValueError) as e:
                raise StructureError(f"bad bracket entry {ent!r}: {e}") from None
            if not 1 <= i < j <= d:
                raise StructureError(f"bracket entry needs 1 <= i < j <= rank, got i={i}, j={j}")
            br[(i - 1, j - 1)] = v
        return cls.from_brackets(m, d, br, name=str(data.get("name", "")))

    def to_json(self) -> dict:
        out = []
        for i in range(self.dim):
            for j in range(i + 1, self.dim):
                v = self.table[i, j]
                if v.any():
                    out.append({"i": i + 1, "j": j + 1, "value": [int(c) for c in v]})
        doc = {"modulus": self.modulus, "rank": self.dim, "brackets": out}
        if self.name:
            doc["name"] = self.name
        return doc

    # ---- arithmetic

    def basis(self, i: int) -> np.ndarray:
        v = np.zeros(self.dim, dtype=np.int64)
        v[i] = 1
        return v

    def bracket(self, a, b) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        return (np.outer(a, b).reshape(-1) @ self._flat) % self.modulus

    def bracket_many(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        n, d = a.shape
        prod = (a[:, :, None] * b[:, None, :]).reshape(n, d * d)
        return (prod @ self._flat) % self.modulus

    def elements(self) -> np.ndarray:
        """All m**d elements; row k holds the base-m digits of k (first coordinate most significant)."""
        n, d, m = self.order, self.dim, self.modulus
        k = np.arange(n, dtype=np.int64)
        out = np.zeros((n, d), dtype=np.int64)
        for c in range(d - 1, -1, -1):
            out[:, c] = k % m
            k //= m
        return out

    def format(self, v) -> str:
        terms = []
        for c, lab in zip(np.asarray(v) % self.modulus, self.labels):
            if c:
                terms.append(lab if c == 1 else f"{int(c)}*{lab}")
        return " + ".join(terms) if terms else "0"


# ---------------------------------------------------------------- validation


def validate_structure(R: FiniteLieRing) -> tuple[bool, dict | None]:
    """Alternating and Jacobi on all basis pairs/triples; first violation as witness."""
    d, m = R.dim, R.modulus
    t = R.table
    for i in range(d):
        if t[i, i].any():
            return False, {"axiom": "alternating", "basis": [i + 1], "value": R.format(t[i, i])}
    for i in range(d):
        for j in range(i + 1, d):
            if ((t[i, j] + t[j, i]) % m).any():
                return False, {"axiom": "skew symmetry", "basis": [i + 1, j + 1], "value": R.format(t[i, j] + t[j, i])}
    for i, j, k in itertools.product(range(d), repeat=3):
        ei, ej, ek = R.basis(i), R.basis(j), R.basis(k)
        s = (R.bracket(ei, R.bracket(ej, ek)) + R.bracket(ej, R.bracket(ek, ei)) + R.bracket(ek, R.bracket(ei, ej))) % m
        if s.any():
            return False, {"axiom": "jacobi", "basis": [i + 1, j + 1, k + 1], "value": R.format(s)}
    return True, None


# ---------------------------------------------------------------- identities


def _as_combination(ident: Identity | Word | WordCombination) -> WordCombination:
    if isinstance(ident, Identity):
        return ident.combination()
    if isinstance(ident, WordCombination):
        return ident
    return WordCombination(((1, ident),))


def _eval_batch(R: FiniteLieRing, w: Word, env: Mapping[str, np.ndarray]) -> np.ndarray:
    if isinstance(w, Var):
        return env[w.name]
    acc = _eval_batch(R, w.items[0], env)
    for it in w.items[1:]:
        acc = R.bracket_many(acc, _eval_batch(R, it, env))
    return acc


def brute_check_identity(
    R: FiniteLieRing, ident: Identity | Word | WordCombination, cap: int = DEFAULT_ASSIGNMENT_CAP
) -> tuple[bool, dict | None]:
    """Evaluate on every assignment of ring elements; witness is the first failing tuple."""
    comb = _as_combination(ident)
    names = comb.variables()
    n = R.order
    total = n ** len(names)
    if total > cap:
        raise EnumerationCapError(f"{total} assignments exceed the enumeration cap {cap}", total)
    elems = R.elements()
    m = R.modulus
    for start in range(0, total, _CHUNK):
        idx = np.arange(start, min(total, start + _CHUNK), dtype=np.int64)
        env = {}
        rest = idx.copy()
        for v in reversed(names):
            env[v] = elems[rest % n]
            rest //= n
        val = np.zeros((len(idx), R.dim), dtype=np.int64)
        for c, w in comb.terms:
            val = (val + c * _eval_batch(R, w, env)) % m
        bad = np.flatnonzero(val.any(axis=1))
        if bad.size:
            k = int(bad[0])
            return False, {
                "assignment": {v: R.format(env[v][k]) for v in names},
                "value": R.format(val[k]),
            }
    return True, None


def _lin_substitutions(R: FiniteLieRing, lin: Linearization):
    slots = []
    for _, members in lin.groups:
        slots.append([name for name, _ in members])
    per_group = [list(itertools.combinations(range(R.dim), len(g))) for g in slots]
    for pick in itertools.product(*per_group):
        yield {name: b for g, bs in zip(slots, pick) for name, b in zip(g, bs)}


def structural_check_identity(R: FiniteLieRing, ident: Identity | Word | WordCombination) -> tuple[bool, dict | None]:
    """Evaluate every multihomogeneous component on distinct basis elements."""
    m = R.modulus
    for lin in linearizations(ident):
        for sub in _lin_substitutions(R, lin):
            env = {k: R.basis(b)[None, :] for k, b in sub.items()}
            val = np.zeros(R.dim, dtype=np.int64)
            for c, w in lin.combination.terms:
                val = (val + c * _eval_batch(R, w, env)[0]) % m
            if val.any():
                return False, {
                    "linearization": str(lin.combination),
                    "substitution": {k: R.labels[b] for k, b in sub.items()},
                    "value": R.format(val),
                }
    return True, None


@dataclass
class Agreement:
    agree: bool
    brute: bool
    structural: bool
    brute_witness: dict | None
    structural_witness: dict | None


def agreement_check(R: FiniteLieRing, ident: Identity, cap: int = DEFAULT_ASSIGNMENT_CAP) -> Agreement:
    b, bw = brute_check_identity(R, ident, cap)
    s, sw = structural_check_identity(R, ident)
    return Agreement(b == s, b, s, bw, sw)


# ---------------------------------------------------------------- spans and series


class _Subgroup:
    """Subgroup of (Z/m)^d as an integer lattice containing m Z^d."""

    def __init__(self, d: int, m: int, rows: Sequence[Sequence[int]] = ()):
        self.d, self.m = d, m
        base = [[m if i == j else 0 for j in range(d)] for i in range(d)]
        self.rows = hnf_rows(base + [[int(c) % m for c in r] for r in rows], d)

    def generators(self) -> list[np.ndarray]:
        out = []
        for r in self.rows:
            v = np.asarray(r, dtype=np.int64) % self.m
            if v.any():
                out.append(v)
        return out

    def order(self) -> int:
        det = 1
        for i, r in enumerate(self.rows):
            det *= r[i]
        return self.m**self.d // det

    def key(self) -> tuple:
        return tuple(tuple(r) for r in self.rows)


def _span_of_brackets(R: FiniteLieRing, xs: list[np.ndarray], ys: list[np.ndarray]) -> _Subgroup:
    rows = [R.bracket(x, y) for x in xs for y in ys]
    return _Subgroup(R.dim, R.modulus, rows)


@dataclass
class SpanSeries:
    kind: str
    orders: list[int]  # orders[k] is |L^{k+1}| (lower central) or |L^(k)| (derived)
    terminated_at: int | None  # index of the first trivial term, None if it stabilized


def lower_central_by_spans(R: FiniteLieRing, start: Sequence[np.ndarray] | None = None) -> SpanSeries:
    """L^1 = start (default the whole ring), L^{k+1} = [L^1, L^k]."""
    first = _Subgroup(R.dim, R.modulus, start if start is not None else [R.basis(i) for i in range(R.dim)])
    gens = first.generators()
    terms = [first]
    while terms[-1].order() > 1:
        nxt = _span_of_brackets(R, gens, terms[-1].generators())
        if nxt.key() == terms[-1].key():
            return SpanSeries("lower_central", [t.order() for t in terms], None)
        terms.append(nxt)
    return SpanSeries("lower_central", [t.order() for t in terms], len(terms))


def derived_by_spans(R: FiniteLieRing) -> SpanSeries:
    terms = [_Subgroup(R.dim, R.modulus, [R.basis(i) for i in range(R.dim)])]
    while terms[-1].order() > 1:
        g = terms[-1].generators()
        nxt = _span_of_brackets(R, g, g)
        if nxt.key() == terms[-1].key():
            return SpanSeries("derived", [t.order() for t in terms], None)
        terms.append(nxt)
    return SpanSeries("derived", [t.order() for t in terms], len(terms) - 1)


def series_by_spans(R: FiniteLieRing) -> tuple[SpanSeries, SpanSeries]:
    return lower_central_by_spans(R), derived_by_spans(R)


def nilpotency_exponent(R: FiniteLieRing, start: Sequence[np.ndarray] | None = None) -> int | None:
    """n with L^{n+1} = 0 and L^n != 0; None when not nilpotent."""
    s = lower_central_by_spans(R, start)
    if s.terminated_at is None:
        return None
    return s.terminated_at - 1 if s.orders[0] > 1 else 0


def solvable_length(R: FiniteLieRing) -> int | None:
    """n with L^(n+1) = 0 and L^(n) != 0; None when not solvable."""
    s = derived_by_spans(R)
    if s.terminated_at is None:
        return None
    return max(s.terminated_at - 1, 0)


# ---------------------------------------------------------------- subrings


@dataclass
class Subring:
    generators: tuple[tuple[int, ...], ...]
    basis: list[np.ndarray]
    order: int

    def nilpotency_exponent(self, R: FiniteLieRing) -> int | None:
        return nilpotency_exponent(R, self.basis)


def _closure(R: FiniteLieRing, gens: Sequence[np.ndarray]) -> _Subgroup:
    sub = _Subgroup(R.dim, R.modulus, gens)
    while True:
        g = sub.generators()
        nxt = _Subgroup(R.dim, R.modulus, g + [R.bracket(x, y) for x in g for y in g])
        if nxt.key() == sub.key():
            return sub
        sub = nxt


def enumerate_generated_subrings(R: FiniteLieRing, g: int, cap: int = DEFAULT_ORDER_CAP) -> list[Subring]:
    """Distinct subrings generated by g-tuples of elements, in order of first appearance."""
    if g < 0:
        raise ValueError("g must be >= 0")
    total = R.order**g
    if R.order > cap or total > cap * cap:
        raise EnumerationCapError(f"{total} generator tuples exceed the cap", total)
    elems = R.elements()
    seen: dict[tuple, Subring] = {}
    for tup in itertools.product(range(R.order), repeat=g):
        sub = _closure(R, [elems[k] for k in tup])
        key = sub.key()
        if key not in seen:
            gens = tuple(tuple(int(c) for c in elems[k]) for k in tup)
            seen[key] = Subring(gens, sub.generators(), sub.order())
    return list(seen.values())


# ---------------------------------------------------------------- corpus


def abelian(m: int, d: int) -> FiniteLieRing:
    return FiniteLieRing(m, np.zeros((d, d, d), dtype=np.int64), name=f"abelian-{d}-mod{m}")


def heisenberg(m: int) -> FiniteLieRing:
    return FiniteLieRing.from_brackets(m, 3, {(0, 1): [0, 0, 1]}, name=f"heisenberg-mod{m}")


def strictly_upper_triangular(m: int, n: int) -> FiniteLieRing:
    """Strictly upper triangular n x n matrices under the commutator."""
    pos = [(i, j) for i in range(n) for j in range(i + 1, n)]
    index = {p: k for k, p in enumerate(pos)}
    d = len(pos)
    t = np.zeros((d, d, d), dtype=np.int64)
    for a, (i, j) in enumerate(pos):
        for b, (k, l) in enumerate(pos):
            # E_ij E_kl - E_kl E_ij
            if j == k:
                t[a, b, index[(i, l)]] += 1
            if l == i:
                t[a, b, index[(k, j)]] -= 1
    return FiniteLieRing(m, t, labels=[f"E{i + 1}{j + 1}" for i, j in pos], name=f"ut{n}-mod{m}")


def sl2(m: int) -> FiniteLieRing:
    """Basis e, f, h with [e,f] = h, [h,e] = 2e, [h,f] = -2f."""
    br = {(0, 1): [0, 0, 1], (0, 2): [-2, 0, 0], (1, 2): [0, 2, 0]}
    return FiniteLieRing.from_brackets(m, 3, br, labels=["e", "f", "h"], name=f"sl2-mod{m}")


def nonabelian_2d(m: int) -> FiniteLieRing:
    return FiniteLieRing.from_brackets(m, 2, {(0, 1): [1, 0]}, name=f"affine-line-mod{m}")


def free_nilpotent_rank2_class3(m: int) -> FiniteLieRing:
    """x, y, [x,y], [x,[x,y]], [y,[x,y]] with every bracket of length 4 zero."""
    # basis: x, y, c=[x,y], a=[x,c], b=[y,c]
    br = {
        (0, 1): [0, 0, 1, 0, 0],
        (0, 2): [0, 0, 0, 1, 0],
        (1, 2): [0, 0, 0, 0, 1],
    }
    return FiniteLieRing.from_brackets(
        m, 5, br, labels=["x", "y", "[x,y]", "[x,[x,y]]", "[y,[x,y]]"], name=f"free-nilpotent-2-3-mod{m}"
    )


def from_relatively_free(R) -> FiniteLieRing:
    """Export a relatively free ring over a prime field (duck-typed on structure_constants())."""
    p, labels, brackets = R.structure_constants()
    return FiniteLieRing.from_brackets(p, len(labels), brackets, labels=labels)


def corpus() -> list[FiniteLieRing]:
    return [
        abelian(2, 2),
        abelian(3, 2),
        heisenberg(2),
        heisenberg(3),
        heisenberg(5),
        strictly_upper_triangular(2, 4),
        free_nilpotent_rank2_class3(2),
        free_nilpotent_rank2_class3(3),
        sl2(3),
        nonabelian_2d(5),
    ]


def random_structure(rng: np.random.Generator, m: int, d: int, tries: int = 200) -> FiniteLieRing | None:
    """Random alternating table that passes validation, or None after ``tries``."""
    for _ in range(tries):
        br = {(i, j): rng.integers(0, m, size=d).tolist() for i in range(d) for j in range(i + 1, d)}
        R = FiniteLieRing.from_brackets(m, d, br)
        if validate_structure(R)[0]:
            return R
    return None
