"""Exact linear algebra: HNF/SNF over Z, elimination over prime fields.

Integer routines work on lists of lists of Python ints (unbounded
precision).  Prime-field routines use int64 numpy arrays; entries stay in
``0..p-1`` so every intermediate product fits comfortably.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .coeffring import CoeffDomain

Matrix = list[list[int]]


def identity(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def matmul(a: Matrix, b: Matrix) -> Matrix:
    if not a:
        return []
    inner = len(b)
    cols = len(b[0]) if b else 0
    out = []
    for row in a:
        out.append([sum(row[k] * b[k][j] for k in range(inner) if row[k]) for j in range(cols)])
    return out


def determinant(m: Matrix) -> int:
    """Exact determinant via fraction-free (Bareiss) elimination."""
    n = len(m)
    if n == 0:
        return 1
    a = [row[:] for row in m]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k]:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


# ---------------------------------------------------------------- integers


def hermite_normal_form(m: Sequence[Sequence[int]]) -> tuple[Matrix, Matrix]:
    """Row-style Hermite normal form.

    Returns ``(H, U)`` with ``U`` unimodular and ``U @ M == H``.  ``H`` is in
    row echelon form with positive pivots, entries above each pivot reduced
    into ``[0, pivot)``, and zero rows last.
    """
    h = [list(map(int, row)) for row in m]
    nrows = len(h)
    ncols = len(h[0]) if h else 0
    u = identity(nrows)
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        # Euclid on column c among rows r..end
        while True:
            nz = [i for i in range(r, nrows) if h[i][c]]
            if not nz:
                break
            piv = min(nz, key=lambda i: abs(h[i][c]))
            if piv != r:
                h[r], h[piv] = h[piv], h[r]
                u[r], u[piv] = u[piv], u[r]
            done = True
            for i in range(r + 1, nrows):
                if h[i][c]:
                    q = h[i][c] // h[r][c]
                    h[i] = [x - q * y for x, y in zip(h[i], h[r])]
                    u[i] = [x - q * y for x, y in zip(u[i], u[r])]
                    if h[i][c]:
                        done = False
            if done:
                break
        if not h[r][c]:
            continue
        if h[r][c] < 0:
            h[r] = [-x for x in h[r]]
            u[r] = [-x for x in u[r]]
        p = h[r][c]
        for i in range(r):
            q = h[i][c] // p
            if q:
                h[i] = [x - q * y for x, y in zip(h[i], h[r])]
                u[i] = [x - q * y for x, y in zip(u[i], u[r])]
        r += 1
    return h, u


def hnf_rows(rows: Sequence[Sequence[int]], ncols: int) -> Matrix:
    """Nonzero rows of the Hermite normal form (no transform tracked)."""
    h = [list(map(int, row)) for row in rows if any(row)]
    out: Matrix = []
    pivots: list[int] = []
    for c in range(ncols):
        while True:
            nz = [row for row in h if row[c]]
            if len(nz) <= 1:
                break
            best = min(nz, key=lambda row: abs(row[c]))
            nh = [best]
            for row in h:
                if row is best:
                    continue
                if row[c]:
                    q = row[c] // best[c]
                    row = [x - q * y for x, y in zip(row, best)]
                if any(row):
                    nh.append(row)
            h = nh
        nz = [row for row in h if row[c]]
        if not nz:
            continue
        prow = nz[0]
        h = [row for row in h if row is not prow]
        if prow[c] < 0:
            prow = [-x for x in prow]
        for i, orow in enumerate(out):
            q = orow[c] // prow[c]
            if q:
                out[i] = [x - q * y for x, y in zip(orow, prow)]
        out.append(prow)
        pivots.append(c)
    return out


def _transpose(m: Matrix) -> Matrix:
    return [list(col) for col in zip(*m)]


def _ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    """(g, x, y) with x*a + y*b = g = gcd(a, b) >= 0."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def smith_normal_form(m: Sequence[Sequence[int]]) -> tuple[Matrix, Matrix, Matrix]:
    """Smith normal form ``(S, U, V)`` with ``U @ M @ V == S``.

    ``U`` and ``V`` are unimodular, ``S`` is diagonal with nonnegative entries
    ``d1 | d2 | ...`` and zeros last.  Diagonalizes by alternating row and
    column Hermite forms (which keep entries reduced), then repairs the
    divisibility chain with 2 x 2 gcd steps.
    """
    s = [list(map(int, row)) for row in m]
    nrows = len(s)
    ncols = len(s[0]) if s else 0
    u = identity(nrows)
    v = identity(ncols)
    if not nrows or not ncols:
        return s, u, v

    def diagonal(a: Matrix) -> bool:
        return all(a[i][j] == 0 for i in range(nrows) for j in range(ncols) if i != j)

    while True:
        s, u1 = hermite_normal_form(s)
        u = matmul(u1, u)
        if diagonal(s):
            break
        st, v1 = hermite_normal_form(_transpose(s))
        s = _transpose(st)
        v = matmul(v, _transpose(v1))
        if diagonal(s):
            break

    k = min(nrows, ncols)
    for i in range(k):
        for j in range(i + 1, k):
            a, b = s[i][i], s[j][j]
            if b == 0 or (a != 0 and b % a == 0):
                continue
            g, x, y = _ext_gcd(a, b)
            # [[x, y], [-b/g, a/g]] @ diag(a, b) @ [[1, -y*b/g], [1, x*a/g]] = diag(g, a*b/g)
            ri, rj = u[i], u[j]
            u[i] = [x * p + y * q for p, q in zip(ri, rj)]
            u[j] = [(-b // g) * p + (a // g) * q for p, q in zip(ri, rj)]
            for row in v:
                ci, cj = row[i], row[j]
                row[i] = ci + cj
                row[j] = (-y * b // g) * ci + (x * a // g) * cj
            s[i][i], s[j][j] = g, a * b // g
    for i in range(k):
        if s[i][i] < 0:
            s[i][i] = -s[i][i]
            u[i] = [-c for c in u[i]]
    return s, u, v


def _prime_powers(n: int) -> list[int]:
    out = []
    f = 2
    while f * f <= n:
        if n % f == 0:
            q = 1
            while n % f == 0:
                n //= f
                q *= f
            out.append(q)
        f += 1
    if n > 1:
        out.append(n)
    return out


def normalize_invariants(factors: Sequence[int]) -> list[int]:
    """Rebuild the divisibility chain of a direct sum of cyclic groups.

    ``0`` stands for a free factor; factors equal to 1 are dropped.
    """
    free = sum(1 for f in factors if f == 0)
    by_prime: dict[int, list[int]] = {}
    for f in factors:
        if f in (0, 1):
            continue
        for q in _prime_powers(abs(f)):
            p = next(d for d in range(2, q + 1) if q % d == 0)
            by_prime.setdefault(p, []).append(q)
    length = max((len(v) for v in by_prime.values()), default=0)
    chain = [1] * length
    for qs in by_prime.values():
        qs.sort()
        for k, q in enumerate(qs):
            chain[length - len(qs) + k] *= q
    return chain + [0] * free


def solve_in_hnf(basis: Matrix, v: Sequence[int]) -> list[int] | None:
    """Integer coordinates of ``v`` in an HNF row basis, or None."""
    rem = list(v)
    coords = []
    for row in basis:
        c = next(i for i, x in enumerate(row) if x)
        if rem[c] % row[c]:
            return None
        q = rem[c] // row[c]
        coords.append(q)
        if q:
            rem = [x - q * y for x, y in zip(rem, row)]
    return coords if not any(rem) else None


def relative_invariants(sub_rows: Matrix, super_rows: Matrix, ncols: int) -> list[int]:
    """Invariant factors of ``span(super) / span(sub)`` (sub must be contained)."""
    sup = hnf_rows(super_rows, ncols)
    if not sup:
        return []
    coords = []
    for row in hnf_rows(sub_rows, ncols):
        c = solve_in_hnf(sup, row)
        if c is None:
            raise ValueError("sub lattice is not contained in super lattice")
        coords.append(c)
    if not coords:
        return [0] * len(sup)
    s, _, _ = smith_normal_form(coords)
    diag = [s[i][i] for i in range(min(len(s), len(sup)))]
    diag += [0] * (len(sup) - len(diag))
    return normalize_invariants(diag)


def integer_left_kernel(m: Matrix, nrows: int) -> Matrix:
    """Basis of ``{u in Z^nrows : u @ M == 0}``."""
    if nrows == 0:
        return []
    h, u = hermite_normal_form(m)
    return [u[i] for i in range(nrows) if not any(h[i])]


# ---------------------------------------------------------------- prime fields


def rref_mod_p(a: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form mod ``p``; returns nonzero rows and pivots."""
    a = np.array(a, dtype=np.int64) % p
    nrows, ncols = a.shape
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        col = a[r:, c]
        nz = np.flatnonzero(col)
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            a[[r, i]] = a[[i, r]]
        a[r] = (a[r] * pow(int(a[r, c]), -1, p)) % p
        others = np.flatnonzero(a[:, c])
        others = others[others != r]
        if others.size:
            a[others] = (a[others] - np.outer(a[others, c], a[r])) % p
        pivots.append(c)
        r += 1
    return a[:r].copy(), pivots


def nullspace_mod_p(a: np.ndarray, p: int) -> np.ndarray:
    """Basis (rows) of ``{x : a @ x == 0}`` mod ``p``."""
    a = np.asarray(a, dtype=np.int64)
    ncols = a.shape[1]
    r, piv = rref_mod_p(a, p) if a.shape[0] else (np.zeros((0, ncols), np.int64), [])
    free = [c for c in range(ncols) if c not in set(piv)]
    out = np.zeros((len(free), ncols), dtype=np.int64)
    for k, f in enumerate(free):
        out[k, f] = 1
        for i, pc in enumerate(piv):
            out[k, pc] = (-r[i, f]) % p
    return out


class ModpSpan:
    """Row space over ``Z/p`` kept in reduced row echelon form."""

    def __init__(self, ncols: int, p: int):
        self.ncols = ncols
        self.p = p
        self.rows = np.zeros((0, ncols), dtype=np.int64)
        self.pivots: list[int] = []

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def copy(self) -> "ModpSpan":
        out = ModpSpan(self.ncols, self.p)
        out.rows = self.rows.copy()
        out.pivots = list(self.pivots)
        return out

    def _reduce_many(self, a: np.ndarray) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64) % self.p
        if self.pivots and a.size:
            a = (a - (a[:, self.pivots] @ self.rows) % self.p) % self.p
        return a

    def reduce(self, v) -> np.ndarray:
        """Normal form of ``v``: zero on every pivot column."""
        return self._reduce_many(np.asarray(v, dtype=np.int64).reshape(1, -1))[0]

    def contains(self, v) -> bool:
        return not self.reduce(v).any()

    def add_rows(self, rows) -> int:
        """Add rows; returns the rank increase."""
        a = np.asarray(rows, dtype=np.int64).reshape(-1, self.ncols)
        if a.shape[0] == 0 or self.rank == self.ncols:
            return 0
        a = self._reduce_many(a)
        a = a[a.any(axis=1)]
        if a.shape[0] == 0:
            return 0
        new, newpiv = rref_mod_p(a, self.p)
        if self.pivots:
            self.rows = (self.rows - (self.rows[:, newpiv] @ new) % self.p) % self.p
        rows = np.vstack([self.rows, new])
        piv = self.pivots + newpiv
        order = np.argsort(piv, kind="stable")
        self.rows = rows[order]
        self.pivots = [piv[i] for i in order]
        return len(newpiv)

    def free_columns(self) -> list[int]:
        ps = set(self.pivots)
        return [c for c in range(self.ncols) if c not in ps]


class IntSpan:
    """Subgroup of ``Z^n`` kept as Hermite-normal-form rows."""

    def __init__(self, ncols: int):
        self.ncols = ncols
        self.rows: Matrix = []

    @property
    def rank(self) -> int:
        return len(self.rows)

    def copy(self) -> "IntSpan":
        out = IntSpan(self.ncols)
        out.rows = [r[:] for r in self.rows]
        return out

    @property
    def pivots(self) -> list[int]:
        return [next(i for i, x in enumerate(r) if x) for r in self.rows]

    def reduce(self, v) -> list[int]:
        rem = [int(x) for x in v]
        for row, c in zip(self.rows, self.pivots):
            q = rem[c] // row[c]
            if q:
                rem = [x - q * y for x, y in zip(rem, row)]
        return rem

    def contains(self, v) -> bool:
        return not any(self.reduce(v))

    def add_rows(self, rows) -> int:
        new = [list(map(int, r)) for r in rows]
        new = [self.reduce(r) for r in new]
        new = [r for r in new if any(r)]
        if not new:
            return 0
        before = self.rank
        self.rows = hnf_rows(self.rows + new, self.ncols)
        return self.rank - before

    def invariants(self) -> list[int]:
        """Invariant factors of ``Z^n / self``."""
        if not self.rows:
            return [0] * self.ncols
        s, _, _ = smith_normal_form(self.rows)
        diag = [s[i][i] for i in range(len(self.rows))]
        return normalize_invariants(diag + [0] * (self.ncols - len(self.rows)))


def make_span(ncols: int, domain: CoeffDomain):
    if domain.is_integers:
        return IntSpan(ncols)
    return ModpSpan(ncols, domain.require_field())


# ---------------------------------------------------------------- presentations


@dataclass
class AbelianPresentation:
    """``Z^n / span`` (or ``F_p^n / span``) as a product of cyclic groups.

    Quotient coordinates of an ambient row vector ``x`` are ``x @ basis_images``
    read modulo the matching invariant factor (``0`` means free).
    """

    ambient_rank: int
    invariant_factors: list[int]
    basis_images: Matrix = field(default_factory=list)

    @property
    def trivial(self) -> bool:
        return not self.invariant_factors

    @property
    def order(self) -> int | None:
        """Group order, or None when infinite."""
        out = 1
        for d in self.invariant_factors:
            if d == 0:
                return None
            out *= d
        return out

    def coordinates(self, x: Sequence[int]) -> list[int]:
        n = len(self.invariant_factors)
        out = []
        for j in range(n):
            val = sum(int(x[i]) * self.basis_images[i][j] for i in range(self.ambient_rank))
            d = self.invariant_factors[j]
            out.append(val % d if d else val)
        return out


def quotient_presentation(span: Sequence[Sequence[int]], ambient_rank: int, domain: CoeffDomain) -> AbelianPresentation:
    rows = [list(map(int, r)) for r in span]
    if domain.is_integers:
        if not rows:
            return AbelianPresentation(ambient_rank, [0] * ambient_rank, identity(ambient_rank))
        s, _, v = smith_normal_form(rows)
        k = min(len(rows), ambient_rank)
        diag = [s[i][i] for i in range(k)] + [0] * (ambient_rank - k)
        keep = [j for j, d in enumerate(diag) if d != 1]
        images = [[v[i][j] for j in keep] for i in range(ambient_rank)]
        return AbelianPresentation(ambient_rank, [diag[j] for j in keep], images)
    p = domain.require_field()
    sp = ModpSpan(ambient_rank, p)
    if rows:
        sp.add_rows(rows)
    free = sp.free_columns()
    images = [[0] * len(free) for _ in range(ambient_rank)]
    for j, f in enumerate(free):
        images[f][j] = 1
        for r, pc in enumerate(sp.pivots):
            images[pc][j] = int(-sp.rows[r, f]) % p
    return AbelianPresentation(ambient_rank, [p] * len(free), images)


def row_space_membership(v: Sequence[int], m: Sequence[Sequence[int]], domain: CoeffDomain) -> bool:
    if domain.is_integers:
        sp = IntSpan(len(v))
    else:
        sp = ModpSpan(len(v), domain.require_field())
    if m:
        sp.add_rows(m)
    return sp.contains(v)


def invariant_summary(factors: Sequence[int]) -> dict:
    """Compact description used in reports: {'free': k, 'torsion': [...]}"""
    c = Counter(factors)
    return {"free": c.get(0, 0), "torsion": [f for f in factors if f]}
