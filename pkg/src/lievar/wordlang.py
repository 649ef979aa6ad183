"""Commutator words in left-normed comma/semicolon notation.

``(a,b,c)`` is the left-normed commutator ``[[a,b],c]``; semicolons group
segments, so ``(a,b;c,d)`` is ``[[a,b],[c,d]]`` and ``(a;b,c)`` is
``[a,[b,c]]``.  Items may themselves be parenthesized words.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Any, Callable, Iterator, Mapping, Sequence, Union


class ParseError(ValueError):
    def __init__(self, message: str, text: str = "", pos: int = -1):
        if pos >= 0:
            message = f"{message} at position {pos} in {text!r}"
        super().__init__(message)
        self.pos = pos


class UnassignedVariableError(KeyError):
    def __init__(self, name: str):
        super().__init__(name)
        self.name = name

    def __str__(self) -> str:
        return f"variable {self.name!r} has no assigned value"


@dataclass(frozen=True)
class Var:
    name: str

    def __post_init__(self):
        if not self.name:
            raise ValueError("variable names must be nonempty")


@dataclass(frozen=True)
class LeftNormed:
    items: tuple["Word", ...]

    def __post_init__(self):
        if len(self.items) < 2:
            raise ValueError("a left-normed commutator needs at least two entries")


Word = Union[Var, LeftNormed]


def var(name: str) -> Var:
    return Var(name)


def ln(*items: Word | str) -> LeftNormed:
    """Build a left-normed word; strings become variables."""
    return LeftNormed(tuple(Var(x) if isinstance(x, str) else x for x in items))


def variables(word: Word) -> list[str]:
    """Distinct variable names in order of first appearance."""
    seen: dict[str, None] = {}
    for name in _leaves(word):
        seen.setdefault(name, None)
    return list(seen)


def _leaves(word: Word) -> Iterator[str]:
    if isinstance(word, Var):
        yield word.name
    else:
        for item in word.items:
            yield from _leaves(item)


def multiplicity(word: Word, v: str) -> int:
    return sum(1 for name in _leaves(word) if name == v)


def degree(word: Word) -> int:
    return sum(1 for _ in _leaves(word))


def rename(word: Word, mapping: Mapping[str, str]) -> Word:
    if isinstance(word, Var):
        return Var(mapping.get(word.name, word.name))
    return LeftNormed(tuple(rename(x, mapping) for x in word.items))


# ---------------------------------------------------------------- parsing

_TOKEN = re.compile(r"\s*(?:([A-Za-z_][A-Za-z0-9_']*)|(.))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    out = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            break
        if m.group(1):
            out.append(("id", m.group(1), m.start(1)))
        else:
            ch = m.group(2)
            if ch not in "(),;":
                raise ParseError(f"unexpected character {ch!r}", text, m.start(2))
            out.append((ch, ch, m.start(2)))
        pos = m.end()
    return out


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self) -> str | None:
        return self.toks[self.i][0] if self.i < len(self.toks) else None

    def pos(self) -> int:
        return self.toks[self.i][2] if self.i < len(self.toks) else len(self.text)

    def expect(self, kind: str):
        if self.peek() != kind:
            found = self.peek() or "end of input"
            raise ParseError(f"expected {kind!r}, found {found!r}", self.text, self.pos())
        self.i += 1

    def item(self) -> Word:
        kind = self.peek()
        if kind == "id":
            name = self.toks[self.i][1]
            self.i += 1
            return Var(name)
        if kind == "(":
            return self.word()
        if kind in (",", ";", ")"):
            raise ParseError("empty segment", self.text, self.pos())
        if kind is None:
            raise ParseError("unbalanced parentheses: input ended early", self.text, self.pos())
        raise ParseError(f"unexpected token {kind!r}", self.text, self.pos())

    def seg(self) -> list[Word]:
        items = [self.item()]
        while self.peek() == ",":
            self.i += 1
            items.append(self.item())
        return items

    def word(self) -> Word:
        start = self.pos()
        self.expect("(")
        segs = [self.seg()]
        while self.peek() == ";":
            self.i += 1
            segs.append(self.seg())
        if self.peek() != ")":
            if self.peek() is None:
                raise ParseError("unbalanced parentheses: missing ')'", self.text, self.pos())
            raise ParseError(f"unexpected token {self.peek()!r}", self.text, self.pos())
        self.i += 1
        if len(segs) == 1 and len(segs[0]) == 1:
            raise ParseError("a parenthesized word needs at least two entries", self.text, start)
        values = [s[0] if len(s) == 1 else LeftNormed(tuple(s)) for s in segs]
        return values[0] if len(values) == 1 else LeftNormed(tuple(values))


def parse(text: str) -> Word:
    """Parse a word; a bare identifier is a variable."""
    p = _Parser(text)
    if p.peek() is None:
        raise ParseError("empty input")
    w = p.item()
    if p.peek() is not None:
        if p.peek() == ")":
            raise ParseError("unbalanced parentheses: unexpected ')'", text, p.pos())
        raise ParseError(f"trailing input {p.toks[p.i][1]!r}", text, p.pos())
    return w


def to_string(word: Word) -> str:
    """Render with minimal parentheses; ``parse(to_string(w)) == w``."""
    if isinstance(word, Var):
        return word.name
    if any(isinstance(x, LeftNormed) for x in word.items):
        segs = []
        for x in word.items:
            if isinstance(x, Var):
                segs.append(x.name)
            else:
                segs.append(",".join(_item_string(y) for y in x.items))
        return "(" + ";".join(segs) + ")"
    return "(" + ",".join(x.name for x in word.items) + ")"


def _item_string(word: Word) -> str:
    return word.name if isinstance(word, Var) else to_string(word)


# ---------------------------------------------------------------- identities


@dataclass(frozen=True)
class WordCombination:
    """Formal integer combination of words."""

    terms: tuple[tuple[int, Word], ...]

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)

    def variables(self) -> list[str]:
        seen: dict[str, None] = {}
        for _, w in self.terms:
            for v in variables(w):
                seen.setdefault(v, None)
        return list(seen)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for c, w in self.terms:
            s = to_string(w)
            if c == 1:
                parts.append(f"+ {s}")
            elif c == -1:
                parts.append(f"- {s}")
            else:
                parts.append(f"{'+' if c > 0 else '-'} {abs(c)}*{s}")
        out = " ".join(parts)
        return out[2:] if out.startswith("+ ") else "-" + out[2:]


@dataclass(frozen=True)
class Identity:
    """``lhs = rhs``; ``rhs is None`` stands for zero."""

    lhs: Word
    rhs: Word | None = None

    def combination(self) -> WordCombination:
        if self.rhs is None:
            return WordCombination(((1, self.lhs),))
        return WordCombination(((1, self.lhs), (-1, self.rhs)))

    def variables(self) -> list[str]:
        return self.combination().variables()

    def max_multiplicity(self) -> int:
        comb = self.combination()
        return max((multiplicity(w, v) for _, w in comb for v in variables(w)), default=0)

    def __str__(self) -> str:
        rhs = "0" if self.rhs is None else to_string(self.rhs)
        return f"{to_string(self.lhs)} = {rhs}"


def parse_identity(text: str) -> Identity:
    if text.count("=") != 1:
        raise ParseError(f"an identity needs exactly one '=': {text!r}")
    left, right = (s.strip() for s in text.split("="))
    if not left or not right:
        raise ParseError(f"empty side in identity {text!r}")
    lhs = parse(left)
    rhs = None if right == "0" else parse(right)
    return Identity(lhs, rhs)


def parse_identity_file(text: str) -> list[Identity]:
    """One identity per line; ``#`` starts a comment; blank lines skipped."""
    out = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            out.append(parse_identity(line))
        except ParseError as exc:
            raise ParseError(f"line {lineno}: {exc}") from None
    return out


# ---------------------------------------------------------------- evaluation


def _default_bracket(a, b):
    return a.bracket(b)


def evaluate(word: Word, assignment: Mapping[str, Any], bracket: Callable[[Any, Any], Any] | None = None):
    """Evaluate in any backend whose elements support ``bracket``."""
    br = bracket or _default_bracket
    if isinstance(word, Var):
        try:
            return assignment[word.name]
        except KeyError:
            raise UnassignedVariableError(word.name) from None
    items = word.items
    out = evaluate(items[0], assignment, br)
    for x in items[1:]:
        out = br(out, evaluate(x, assignment, br))
    return out


def evaluate_combination(comb: WordCombination, assignment: Mapping[str, Any], bracket=None):
    total = None
    for c, w in comb.terms:
        val = evaluate(w, assignment, bracket)
        val = val if c == 1 else c * val
        total = val if total is None else total + val
    if total is None:
        raise ValueError("cannot evaluate an empty combination without a zero element")
    return total


# ---------------------------------------------------------------- polarization


def compositions(k: int, parts: int) -> Iterator[tuple[int, ...]]:
    """Ordered ways to write k as a sum of ``parts`` positive integers."""
    if parts == 1:
        yield (k,)
        return
    for first in range(1, k - parts + 2):
        for rest in compositions(k - first, parts - 1):
            yield (first, *rest)


def _fresh_names(v: str, j: int, taken: set[str]) -> list[str]:
    out = []
    for i in range(1, j + 1):
        name = f"{v}_{i}"
        while name in taken:
            name += "'"
        taken.add(name)
        out.append(name)
    return out


def _substitute_occurrences(word: Word, v: str, labels: Sequence[str]) -> Word:
    """Replace the occurrences of v, left to right, by the given names."""
    it = iter(labels)

    def go(w: Word) -> Word:
        if isinstance(w, Var):
            return Var(next(it)) if w.name == v else w
        return LeftNormed(tuple(go(x) for x in w.items))

    return go(word)


def _spread(comb: WordCombination, v: str, names: Sequence[str], counts: Sequence[int]) -> WordCombination:
    """Multihomogeneous part of comb with v replaced by sum(names), degree counts."""
    pool = [n for n, c in zip(names, counts) for _ in range(c)]
    out: dict[Word, int] = {}
    for coeff, w in comb.terms:
        k = multiplicity(w, v)
        if k != len(pool):
            raise ValueError(f"variable {v} has multiplicity {k}, expected {len(pool)}")
        for labels in sorted(set(itertools.permutations(pool))):
            nw = _substitute_occurrences(w, v, labels)
            out[nw] = out.get(nw, 0) + coeff
    return WordCombination(tuple((c, w) for w, c in out.items() if c))


def _as_combination(x: Word | WordCombination | Identity) -> WordCombination:
    if isinstance(x, WordCombination):
        return x
    if isinstance(x, Identity):
        return x.combination()
    return WordCombination(((1, x),))


def _common_multiplicity(comb: WordCombination, v: str) -> int:
    ks = {multiplicity(w, v) for _, w in comb.terms}
    if len(ks) != 1:
        raise ValueError(f"variable {v} does not occur homogeneously: multiplicities {sorted(ks)}")
    return ks.pop()


def polarize(word: Word | WordCombination | Identity, v: str) -> list[WordCombination]:
    """All cross terms of substituting a sum of fresh variables for ``v``.

    One combination per composition ``(k1..kj)`` of the multiplicity ``k``
    with ``j >= 2``: the sum of all words where the occurrences of ``v`` are
    relabelled with ``k_i`` copies of the i-th fresh variable.
    """
    comb = _as_combination(word)
    if v not in comb.variables():
        raise ValueError(f"variable {v!r} does not occur")
    k = _common_multiplicity(comb, v)
    taken = set(comb.variables())
    names = _fresh_names(v, k, taken)
    out = []
    for j in range(2, k + 1):
        for counts in compositions(k, j):
            out.append(_spread(comb, v, names[:j], counts))
    return out


@dataclass(frozen=True)
class Linearization:
    """A polarized form of an identity plus the fresh-variable bookkeeping.

    ``groups`` maps each original variable to its (fresh name, count) list;
    fresh variables of one group must receive distinct values.
    """

    combination: WordCombination
    groups: tuple[tuple[str, tuple[tuple[str, int], ...]], ...]


def linearizations(x: Word | WordCombination | Identity) -> list[Linearization]:
    """Every joint choice of a composition per variable (trivial one included)."""
    comb = _as_combination(x)
    vs = comb.variables()
    taken = set(vs)
    choices = []
    for v in vs:
        k = _common_multiplicity(comb, v)
        opts = [((v,), (k,))]
        names = tuple(_fresh_names(v, k, taken)) if k > 1 else ()
        for j in range(2, k + 1):
            for counts in compositions(k, j):
                opts.append((names[:j], counts))
        choices.append(opts)
    out = []
    for pick in itertools.product(*choices):
        c = comb
        groups = []
        for v, (names, counts) in zip(vs, pick):
            if len(names) > 1:
                c = _spread(c, v, names, counts)
            groups.append((v, tuple(zip(names, counts))))
        out.append(Linearization(c, tuple(groups)))
    return out


# ---------------------------------------------------------------- expansions


def expand_rightmost(n: int) -> WordCombination:
    """``(y1,...,yn,x)`` as 2**(n-1) signed words ``(x, y_pi(1), ..., y_pi(n))``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    ys = [f"y{i}" for i in range(1, n + 1)]

    # [z, (y1..yk)] = [[z,(y1..y_{k-1})], yk] - [[z,yk], (y1..y_{k-1})]
    def inner(head: tuple[str, ...], k: int) -> list[tuple[int, tuple[str, ...]]]:
        if k == 1:
            return [(1, head + (ys[0],))]
        first = [(s, seq + (ys[k - 1],)) for s, seq in inner(head, k - 1)]
        second = [(-s, seq) for s, seq in inner(head + (ys[k - 1],), k - 1)]
        return first + second

    terms = inner(("x",), n)
    return WordCombination(tuple((-s, ln(*seq)) for s, seq in terms))


def expand_pairs(n: int) -> WordCombination:
    """``(x1,x2;x3,x4;...;x2n-1,x2n)`` as 2**(n-1) signed left-normed words."""
    if n < 1:
        raise ValueError("n must be >= 1")
    terms: list[tuple[int, tuple[str, ...]]] = [(1, ("x1", "x2"))]
    for i in range(2, n + 1):
        a, b = f"x{2 * i - 1}", f"x{2 * i}"
        # [z,[a,b]] = [[z,a],b] - [[z,b],a]
        terms = [t for s, seq in terms for t in ((s, seq + (a, b)), (-s, seq + (b, a)))]
    return WordCombination(tuple((s, ln(*seq)) for s, seq in terms))


def pairs_word(n: int) -> Word:
    """``(x1,x2;x3,x4;...;x2n-1,x2n)``."""
    pairs = [ln(f"x{2 * i - 1}", f"x{2 * i}") for i in range(1, n + 1)]
    return pairs[0] if n == 1 else LeftNormed(tuple(pairs))


def rightmost_word(n: int) -> Word:
    """``(y1,...,yn,x)``."""
    return ln(*[f"y{i}" for i in range(1, n + 1)], "x")
