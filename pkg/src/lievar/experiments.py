"""Experiment manifests: a variety, a ring size, and a claim checked against it."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from typing import Any

from .coeffring import CoeffDomain
from .variety import (
    BoundResult,
    RelativelyFreeRing,
    VarietySpec,
    relatively_free,
)
from .wordlang import Identity, degree, parse_identity

CLAIM_KINDS = (
    "nilpotency_exponent",
    "solvable_length",
    "L2_exponent",
    "variety_equal",
    "satisfies",
    "degree_exponent",
)


class ManifestError(ValueError):
    pass


@dataclass
class Manifest:
    id: str
    identities: list[str]
    domain: str
    rank: int
    class_cutoff: int
    claim: dict
    tier: str = "quick"
    certification: str = "full"
    informational: bool = False
    description: str = ""
    notes: list[str] = field(default_factory=list)

    @classmethod
    def from_dict(cls, d: dict) -> "Manifest":
        try:
            m = cls(
                id=d["id"],
                identities=list(d["identities"]),
                domain=d.get("domain", "int"),
                rank=int(d["rank"]),
                class_cutoff=int(d["class"]),
                claim=dict(d["claim"]),
                tier=d.get("tier", "quick"),
                certification=d.get("certification", "full"),
                informational=bool(d.get("informational", False)),
                description=d.get("description", ""),
                notes=list(d.get("notes", [])),
            )
        except (KeyError, TypeError, ValueError) as e:
            raise ManifestError(f"bad manifest {d.get('id', '?')}: {e}") from None
        if m.claim.get("kind") not in CLAIM_KINDS:
            raise ManifestError(f"{m.id}: unknown claim kind {m.claim.get('kind')!r}")
        if m.tier not in ("quick", "deep"):
            raise ManifestError(f"{m.id}: tier must be quick or deep")
        return m

    def spec(self) -> VarietySpec:
        return VarietySpec([parse_identity(t) for t in self.identities], CoeffDomain.parse(self.domain))


def load_manifests() -> list[Manifest]:
    """Bundled manifests in file-name order."""
    root = resources.files("lievar") / "manifests"
    out = []
    for entry in sorted(root.iterdir(), key=lambda p: p.name):
        if entry.name.endswith(".json"):
            data = json.loads(entry.read_text())
            for d in data if isinstance(data, list) else [data]:
                out.append(Manifest.from_dict(d))
    ids = [m.id for m in out]
    if len(ids) != len(set(ids)):
        raise ManifestError("duplicate manifest ids")
    return out


def find_manifest(mid: str) -> Manifest:
    for m in load_manifests():
        if m.id == mid:
            return m
    raise ManifestError(f"no manifest with id {mid!r}")


# ---------------------------------------------------------------- evaluation


def _size_json(size) -> Any:
    return size if isinstance(size, int) else list(size)


def degree_table(R: RelativelyFreeRing) -> list[dict]:
    return [
        {"degree": d, "ambient": R.ctx.dimension(d), "quotient": _size_json(R.degree_size(d))}
        for d in range(1, R.class_cutoff + 1)
    ]


def _cert(full: bool, R: RelativelyFreeRing) -> str:
    return "full" if full else f"partial(rank={R.rank})"


def _bound_observed(b: BoundResult, cutoff: int) -> dict:
    if b.value is None:
        return {"value": None, "at_least": b.lower_bound, "terminated": False, "cutoff": cutoff}
    return {"value": b.value, "terminated": True}


def _ident_size(ident: Identity) -> tuple[int, int]:
    comb = ident.combination()
    return len(comb.variables()), max(degree(w) for _, w in comb.terms)


def _satisfies(R: RelativelyFreeRing, texts: list[str]) -> tuple[bool, bool, list[dict]]:
    ok, full, rows = True, True, []
    for t in texts:
        ident = parse_identity(t)
        sat, wit = R.satisfies_identity(ident)
        nv, deg = _ident_size(ident)
        full = full and R.rank >= nv and R.class_cutoff >= deg
        rows.append({"identity": str(ident), "holds": sat, "witness": wit})
        ok = ok and sat
    return ok, full, rows


def evaluate_claim(m: Manifest, R: RelativelyFreeRing) -> tuple[dict, str, bool]:
    """Returns (observed, certification, claim holds)."""
    claim = m.claim
    kind = claim["kind"]
    if kind in ("nilpotency_exponent", "solvable_length", "L2_exponent"):
        b = {
            "nilpotency_exponent": R.nilpotency_exponent,
            "solvable_length": R.solvable_length,
            "L2_exponent": R.l2_exponent,
        }[kind]()
        holds = b.at_most(int(claim["bound"]))
        if "exact" in claim:
            holds = holds and b.value == int(claim["exact"])
        return _bound_observed(b, R.class_cutoff), _cert(b.full_certificate and R.exact, R), holds
    if kind == "satisfies":
        ok, full, rows = _satisfies(R, list(claim["identities"]))
        expected = bool(claim.get("expected", True))
        return {"holds": ok, "checks": rows}, _cert(full and R.exact, R), ok == expected
    if kind == "variety_equal":
        other = VarietySpec([parse_identity(t) for t in claim["other"]], R.domain)
        S = relatively_free(other, R.rank, R.class_cutoff)
        equal = R.ideal.equals(S.ideal)
        sizes = [_ident_size(i) for i in (m.spec().identities + other.identities)]
        full = R.rank >= max(s[0] for s in sizes) and R.class_cutoff >= max(s[1] for s in sizes)
        expected = bool(claim.get("expected", True))
        observed = {"equal": equal, "other_degrees": degree_table(S)}
        return observed, _cert(full and R.exact and other.polarization_exact(), R), equal == expected
    if kind == "degree_exponent":
        d = int(claim["degree"])
        e = int(claim["annihilator"])
        size = R.degree_size(d)
        if R.domain.is_field:
            factors = [R.domain.modulus] * size
        else:
            factors = list(size)
        killed = all(f != 0 and e % f == 0 for f in factors)
        nonzero = bool(factors)
        holds = killed and (nonzero or not claim.get("nonzero", False))
        return {"degree": d, "invariant_factors": factors, "annihilated": killed}, _cert(R.rank >= d, R), holds
    raise ManifestError(f"unknown claim kind {kind!r}")


def run_manifest(m: Manifest) -> dict:
    """Build the relatively free ring and check the claim; deterministic JSON-ready dict."""
    spec = m.spec()
    R = relatively_free(spec, m.rank, m.class_cutoff)
    observed, cert, holds = evaluate_claim(m, R)
    wanted_full = m.certification == "full"
    level_ok = cert == "full" or not wanted_full
    report = {
        "id": m.id,
        "description": m.description,
        "variety": [str(i) for i in spec.identities],
        "domain": str(spec.domain),
        "rank": m.rank,
        "class": m.class_cutoff,
        "claim": m.claim,
        "observed": observed,
        "certification": cert,
        "degrees": degree_table(R),
        "pass": bool(holds and level_ok),
    }
    if not R.exact:
        report["notes"] = m.notes + ["polarization components form a graded hull; ideal may be too large"]
    elif m.notes:
        report["notes"] = list(m.notes)
    sc = m.claim.get("side_condition")
    if sc is not None and not (2 * int(sc["n"]) >= int(sc["m"]) >= 1):
        report["flags"] = [f"side condition 2n >= m >= 1 violated (n={sc['n']}, m={sc['m']})"]
    if m.informational:
        report["informational"] = True
    return report
