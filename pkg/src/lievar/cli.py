"""Command-line frontend: ``lievar basis|eval|check|verify``.

Exit codes: 0 all pass, 1 a claim or identity fails, 2 usage or input
error, 3 resource guard.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .coeffring import CoeffDomain
from .experiments import ManifestError, Manifest, find_manifest, load_manifests, run_manifest
from .freelie import FreeLieContext, ResourceGuardError
from .oracle import (
    DEFAULT_ASSIGNMENT_CAP,
    EnumerationCapError,
    FiniteLieRing,
    StructureError,
    brute_check_identity,
    structural_check_identity,
)
from .variety import VarietySpec, relatively_free
from .wordlang import ParseError, UnassignedVariableError, evaluate, parse, parse_identity_file, variables

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_GUARD = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _domain(text: str) -> CoeffDomain:
    try:
        return CoeffDomain.parse(text)
    except ValueError as e:
        raise UsageError(str(e)) from None


def _positive(name: str, v: int) -> int:
    if v < 1:
        raise UsageError(f"--{name} must be >= 1, got {v}")
    return v


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None


def _emit(obj, as_json: bool, text: str):
    if as_json:
        print(json.dumps(obj, indent=2, sort_keys=False))
    else:
        print(text)


# ---------------------------------------------------------------- commands


def cmd_basis(a) -> int:
    ctx = FreeLieContext(_positive("rank", a.rank), _positive("class", a.cls), _domain(a.domain))
    if a.json:
        _emit(
            {
                "rank": ctx.rank,
                "class": ctx.class_cutoff,
                "counts": ctx.basis_counts(),
                "basis": [{"bracket": ctx.bracket_string(i), "degree": ctx.degrees[i]} for i in range(len(ctx))],
            },
            True,
            "",
        )
    else:
        for line in ctx.basis_dump():
            print(line)
        print("counts " + "/".join(map(str, ctx.basis_counts())), file=sys.stderr)
    return EXIT_OK


def cmd_eval(a) -> int:
    ctx = FreeLieContext(_positive("rank", a.rank), _positive("class", a.cls), _domain(a.domain))
    word = parse(a.word)
    gens = {name: g for name, g in zip(ctx.names, ctx.generators())}
    if a.assign:
        try:
            spec = json.loads(_read(a.assign))
        except json.JSONDecodeError as e:
            raise UsageError(f"malformed assignment JSON: {e}") from None
        if not isinstance(spec, dict):
            raise UsageError("assignment file must map variable names to words over the generators")
        env = {}
        for v, text in spec.items():
            try:
                env[v] = evaluate(parse(str(text)), gens)
            except UnassignedVariableError as e:
                raise UsageError(f"assignment of {v!r} uses unknown generator {e.name!r}") from None
    else:
        names = variables(word)
        if len(names) > ctx.rank:
            raise UsageError(f"word has {len(names)} variables but rank is {ctx.rank}; pass --assign")
        env = dict(zip(names, ctx.generators()))
    val = evaluate(word, env)
    _emit(
        {"word": a.word, "value": str(val), "degrees": val.degrees(), "terms": {ctx.bracket_string(i): c for i, c in sorted(val.terms.items())}},
        a.json,
        str(val),
    )
    return EXIT_OK


def cmd_check(a) -> int:
    path = a.identities_pos or a.identities
    if not path:
        raise UsageError("check needs an identity file (positional or --identities)")
    idents = parse_identity_file(_read(path))
    if not idents:
        raise UsageError("identity file contains no identities")
    results = []
    if a.ring:
        try:
            R = FiniteLieRing.from_json(_read(a.ring))
        except StructureError as e:
            raise UsageError(str(e)) from None
        target = {"ring": a.ring, "modulus": R.modulus, "rank": R.dim}
        for ident in idents:
            try:
                ok, wit = brute_check_identity(R, ident, a.cap)
                method = "enumeration"
            except EnumerationCapError:
                ok, wit = structural_check_identity(R, ident)
                method = "structural"
            results.append({"identity": str(ident), "pass": ok, "method": method, "witness": wit})
    elif a.variety:
        spec = VarietySpec(parse_identity_file(_read(a.variety)), _domain(a.domain))
        Q = relatively_free(spec, _positive("rank", a.rank), _positive("class", a.cls))
        target = {"variety": [str(i) for i in spec.identities], "domain": str(spec.domain), "rank": a.rank, "class": a.cls}
        for ident in idents:
            ok, wit = Q.satisfies_identity(ident)
            results.append({"identity": str(ident), "pass": ok, "method": "relatively free", "witness": wit})
    else:
        raise UsageError("check needs --ring FILE or --variety FILE")
    allok = all(r["pass"] for r in results)
    lines = [f"{'PASS' if r['pass'] else 'FAIL'}  {r['identity']}" + (f"  witness {json.dumps(r['witness'])}" if r["witness"] else "") for r in results]
    _emit({"target": target, "results": results, "pass": allok}, a.json, "\n".join(lines))
    return EXIT_OK if allok else EXIT_FAIL


def _run_one(m: Manifest) -> dict:
    try:
        return run_manifest(m)
    except ResourceGuardError as e:
        return {"id": m.id, "error": "resource guard", "message": str(e), "size": e.size, "pass": False}


def _text_line(r: dict) -> str:
    if "error" in r:
        return f"GUARD {r['id']}  {r['message']}"
    status = "PASS" if r["pass"] else "FAIL"
    if r.get("informational"):
        status = "INFO-" + status
    obs = r["observed"]
    shown = {k: v for k, v in obs.items() if k not in ("checks", "other_degrees")}
    return f"{status:9} {r['id']:26} {r['certification']:18} {json.dumps(shown)}"


def cmd_verify(a) -> int:
    if a.all:
        ms = [m for m in load_manifests() if a.deep or m.tier == "quick"]
    elif a.ids:
        try:
            ms = [find_manifest(i) for i in a.ids]
        except ManifestError as e:
            raise UsageError(str(e)) from None
    else:
        raise UsageError("verify needs manifest ids or --all")
    if a.workers > 1 and len(ms) > 1:
        with ProcessPoolExecutor(max_workers=a.workers) as ex:
            reports = list(ex.map(_run_one, ms))
    else:
        reports = [_run_one(m) for m in ms]
    if a.json:
        print(json.dumps(reports[0] if len(reports) == 1 and not a.all else reports, indent=2))
    else:
        for r in reports:
            print(_text_line(r))
    if any("error" in r for r in reports):
        for r in reports:
            if "error" in r:
                print(f"{r['id']}: {r['message']}", file=sys.stderr)
        return EXIT_GUARD
    counted = [r for r in reports if not r.get("informational")]
    return EXIT_OK if all(r["pass"] for r in counted) else EXIT_FAIL


def cmd_list(a) -> int:
    ms = load_manifests()
    _emit(
        [{"id": m.id, "tier": m.tier, "description": m.description} for m in ms],
        a.json,
        "\n".join(f"{m.id:26} {m.tier:6} {m.description}" for m in ms),
    )
    return EXIT_OK


# ---------------------------------------------------------------- entry point


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="lievar", description="Verbal ideals and relatively free Lie rings at desk scale.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    def ctx_flags(sp, rank=None, cls=None):
        sp.add_argument("--rank", type=int, default=rank, required=rank is None)
        sp.add_argument("--class", dest="cls", type=int, default=cls, required=cls is None)
        sp.add_argument("--domain", default="int", help="int or zmod:<m>")

    b = sub.add_parser("basis", help="print the Lyndon basis up to the class cutoff")
    ctx_flags(b)
    b.add_argument("--json", action="store_true")
    b.set_defaults(func=cmd_basis)

    e = sub.add_parser("eval", help="evaluate a commutator word in a free context")
    e.add_argument("word")
    ctx_flags(e, rank=3, cls=4)
    e.add_argument("--assign", help="JSON object: variable -> word over x1..x<rank>")
    e.add_argument("--json", action="store_true")
    e.set_defaults(func=cmd_eval)

    c = sub.add_parser("check", help="check identities on a finite ring or a relatively free ring")
    c.add_argument("identities_pos", nargs="?", metavar="IDENTITIES")
    c.add_argument("--identities")
    c.add_argument("--ring", help="structure-constant JSON file")
    c.add_argument("--variety", help="identity file defining a variety")
    ctx_flags(c, rank=3, cls=3)
    c.add_argument("--cap", type=int, default=DEFAULT_ASSIGNMENT_CAP, help="enumeration cap before falling back")
    c.add_argument("--json", action="store_true")
    c.set_defaults(func=cmd_check)

    v = sub.add_parser("verify", help="run bundled experiment manifests")
    v.add_argument("ids", nargs="*")
    v.add_argument("--all", action="store_true")
    v.add_argument("--deep", action="store_true")
    v.add_argument("--json", action="store_true")
    v.add_argument("--workers", type=int, default=1)
    v.set_defaults(func=cmd_verify)

    ls = sub.add_parser("list", help="list bundled manifests")
    ls.add_argument("--json", action="store_true")
    ls.set_defaults(func=cmd_list)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        a = parser.parse_args(argv)
        if not getattr(a, "func", None):
            raise UsageError("missing command (basis, eval, check, verify, list)")
        return a.func(a)
    except UsageError as e:
        print(f"lievar: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except ParseError as e:
        print(f"lievar: parse error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except UnassignedVariableError as e:
        print(f"lievar: unassigned variable {e.name}", file=sys.stderr)
        return EXIT_USAGE
    except ResourceGuardError as e:
        print(f"lievar: resource guard: {e}", file=sys.stderr)
        return EXIT_GUARD
    except (ValueError, ManifestError) as e:
        print(f"lievar: error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
