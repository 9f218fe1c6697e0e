"""Command-line frontend.

Exit codes: 0 success, 1 the algebra lacks the property asked about,
2 bad usage or malformed input, 3 a search hit its resource cap.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Optional, Sequence

from .absorption import absorbs, is_n_absorbing
from .catalogue import MODES, enumerate_minimal_taylor
from .classify import SUITES, four_types, omitting_types, theorem_suite
from .clone import DEFAULT_ARITY_CAP, is_minimal_taylor, is_taylor
from .core import Algebra, Relation
from .edges import KINDS, check_connectivity, edge_graph
from .errors import ArgumentError, PreconditionError, ResourceError
from .manifest import FIXTURE_DIR, fixture_names, verify_manifest
from .relations import invariant, pp_eval

OK, FAILED, USAGE, RESOURCE = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ArgumentError(message)


def _read_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ArgumentError(f"cannot read {path}: {exc}") from None


def _resolve(path: str) -> str:
    """Paths that do not exist fall back to the bundled fixtures by file name."""
    if os.path.exists(path):
        return path
    bundled = os.path.join(FIXTURE_DIR, os.path.basename(path))
    if not bundled.endswith(".json"):
        bundled += ".json"
    if os.path.exists(bundled):
        return bundled
    raise ArgumentError(f"no such algebra file: {path}")


def _load(path: str, args) -> tuple[Algebra, Optional[list]]:
    data = _read_json(_resolve(path))
    if not isinstance(data, dict):
        raise ArgumentError("algebra file must hold a JSON object")
    alg = Algebra.from_dict(data, allow_non_idempotent=args.allow_non_idempotent)
    labels = data.get("labels")
    if labels is not None and (not isinstance(labels, list) or len(labels) != alg.size):
        raise ArgumentError("labels must list one name per element")
    return alg, labels


def _require_idempotent(alg: Algebra) -> None:
    if not alg.idempotent:
        raise PreconditionError("Taylor analyses need an idempotent algebra")


def _subset(text: str, alg: Algebra) -> list[int]:
    try:
        out = sorted({int(x) for x in text.split(",") if x.strip()})
    except ValueError:
        raise ArgumentError(f"bad element list {text!r}") from None
    if not out or any(not 0 <= x < alg.size for x in out):
        raise ArgumentError(f"subset {text!r} must be a nonempty list of elements")
    return out


def _emit(obj, args, text: Optional[str] = None) -> None:
    if args.report == "json" or text is None:
        json.dump(obj, sys.stdout, indent=2, sort_keys=True)
        sys.stdout.write("\n")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


# -- subcommands -------------------------------------------------------------------


def _edge_summary(alg: Algebra) -> dict:
    g = edge_graph(alg)
    counts = {k: sum(1 for arc in g.arcs if arc[2] == k) for k in KINDS}
    minimal = {k: sum(1 for arc in g.arcs if arc[2] == k and arc[3]) for k in KINDS}
    mg = edge_graph(alg, minimal_only=True)
    return {"edges": counts, "minimalEdges": minimal,
            "nonEdges": [list(p) for p in g.non_edges()],
            "minimalGraphConnected": check_connectivity(mg)}


def cmd_analyze(args) -> int:
    alg, _ = _load(args.algebra, args)
    _require_idempotent(alg)
    cert = is_taylor(alg, with_cyclic=True)
    out = {"algebra": alg.name or os.path.basename(args.algebra), "size": alg.size,
           "taylor": cert.verdict, "minimalTaylor": None, "fourTypes": None,
           "omittingTypes": None, "edgeSummary": None, "certificates": {}}
    if not cert.verdict:
        out["certificates"]["nonTaylor"] = {"subuniverse": list(cert.subuniverse),
                                            "blocks": [list(b) for b in cert.blocks],
                                            "projections": cert.projections}
    else:
        if cert.cyclic is not None:
            out["certificates"]["cyclic"] = str(cert.cyclic)
        minimal, witness = is_minimal_taylor(alg)
        out["minimalTaylor"] = minimal
        if witness is not None:
            out["certificates"]["smallerTaylorReduct"] = str(witness)
        ft = four_types(alg)
        out["fourTypes"] = ft.case
        out["certificates"]["fourTypes"] = ft.to_dict()
        out["omittingTypes"] = omitting_types(alg, max_arity=args.max_arity).to_dict()
        out["edgeSummary"] = _edge_summary(alg)
    lines = [f"algebra: {out['algebra']} (size {alg.size})", f"taylor: {out['taylor']}"]
    if cert.verdict:
        ot = out["omittingTypes"]
        lines += [f"minimal Taylor: {out['minimalTaylor']}",
                  f"four types case: {out['fourTypes']}",
                  "free of: " + ", ".join(k for k, v in ot["free"].items() if v),
                  "edges: " + ", ".join(f"{k} {v}" for k, v in out["edgeSummary"]["edges"].items())]
    _emit(out, args, "\n".join(lines))
    return OK


def cmd_check(args) -> int:
    alg, _ = _load(args.algebra, args)
    _require_idempotent(alg)
    report = theorem_suite(alg, args.suite, jobs=args.jobs)
    lines = [f"{c.status.upper():4} {c.group}: {c.name}"
             + (f"  ({c.counterexample})" if c.counterexample else "") for c in report.checks]
    _emit(report.to_dict(), args, "\n".join(lines))
    return OK if report.passed else FAILED


def cmd_edges(args) -> int:
    alg, labels = _load(args.alg, args)
    _require_idempotent(alg)
    g = edge_graph(alg, minimal_only=args.minimal)
    if args.dot:
        with open(args.dot, "w") as fh:
            fh.write(g.to_dot(labels))
    name = (lambda x: labels[x]) if labels else str
    lines = [f"{name(a)} -> {name(b)}  {k}{' (minimal)' if m else ''}" for a, b, k, m in g.arcs]
    _emit(g.to_dict(), args, "\n".join(lines) or "no edges")
    return OK


def cmd_absorb(args) -> int:
    alg, _ = _load(args.alg, args)
    _require_idempotent(alg)
    B = _subset(args.set, alg)
    if args.n is not None:
        t = is_n_absorbing(alg, B, args.n, max_arity=args.max_arity)
        out = {"subset": B, "kind": f"{args.n}-absorbing", "verdict": t is not None}
        if t is not None:
            out["witness"] = str(t)
            out["witnessArity"] = t.arity
        verdict = t is not None
    else:
        cert = absorbs(alg, B, max_arity=args.max_arity)
        out = cert.to_dict()
        verdict = cert.verdict
    text = f"{B}: {out['kind']} verdict={out['verdict']}" + (
        f" witness {out['witness']}" if "witness" in out else "")
    _emit(out, args, text)
    return OK if verdict else FAILED


def cmd_pp(args) -> int:
    alg, _ = _load(args.alg, args)
    raw = _read_json(args.rels)
    if not isinstance(raw, dict):
        raise ArgumentError("relations file must map names to relations")
    env = {name: Relation.from_dict(r) for name, r in raw.items()}
    if any(R.size != alg.size for R in env.values()):
        raise ArgumentError("relation domain sizes must match the algebra")
    R = pp_eval(env, args.formula, alg.size)
    out = R.to_dict()
    out["invariant"] = invariant(alg, R)
    text = f"arity {R.arity}, {len(out['tuples'])} tuples, invariant={out['invariant']}\n" + \
        "\n".join(" ".join(map(str, t)) for t in out["tuples"])
    _emit(out, args, text)
    return OK


def cmd_enumerate(args) -> int:
    census = enumerate_minimal_taylor(args.size, args.mode, budget=args.budget,
                                      checkpoint=args.checkpoint, jobs=args.jobs)
    out = census.to_dict()
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(out, fh, indent=2, sort_keys=True)
    text = (f"size {census.size}, {census.mode}: {census.clone_count} clones, "
            f"{census.class_count} up to relabeling, position {census.position}/{census.total}"
            + (f", {len(census.skipped)} skipped" if census.skipped else ""))
    _emit(out, args, text + "\n" + "\n".join(census.keys()))
    return OK


def cmd_fixtures(args) -> int:
    names = fixture_names()
    if args.action == "list":
        _emit(names, args, "\n".join(names))
        return OK
    chosen = args.names or names
    unknown = [n for n in chosen if n not in names and not os.path.exists(n)]
    if unknown:
        raise ArgumentError(f"unknown fixtures: {', '.join(unknown)}")
    out, lines, ok = {}, [], True
    for n in chosen:
        results = verify_manifest(n)
        out[n] = [r.to_dict() for r in results]
        good = all(r.passed for r in results)
        ok &= good
        lines.append(f"{'PASS' if good else 'FAIL'} {n} ({len(results)} claims)")
        lines += [f"     failed: {json.dumps(r.claim, sort_keys=True)} {r.detail}"
                  for r in results if not r.passed]
    _emit(out, args, "\n".join(lines))
    return OK if ok else FAILED


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="taylorlab", description="Analyze finite idempotent algebras.")
    p.add_argument("--max-arity", type=int, default=DEFAULT_ARITY_CAP,
                   help="largest arity for term searches")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--allow-non-idempotent", action="store_true")
    p.add_argument("--report", choices=("json", "text"), default="json")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("analyze", help="full report for one algebra")
    s.add_argument("algebra")
    s.set_defaults(run=cmd_analyze)

    s = sub.add_parser("check", help="run the theorem consistency suite")
    s.add_argument("algebra")
    s.add_argument("--suite", choices=SUITES, default="all")
    s.set_defaults(run=cmd_check)

    s = sub.add_parser("edges", help="edge graph, optionally as DOT")
    s.add_argument("--alg", required=True)
    s.add_argument("--minimal", action="store_true")
    s.add_argument("--dot")
    s.set_defaults(run=cmd_edges)

    s = sub.add_parser("absorb", help="absorption test for a subset")
    s.add_argument("--alg", required=True)
    s.add_argument("--set", required=True)
    s.add_argument("--n", type=int)
    s.set_defaults(run=cmd_absorb)

    s = sub.add_parser("pp", help="evaluate a primitive positive formula")
    s.add_argument("--alg", required=True)
    s.add_argument("--rels", required=True)
    s.add_argument("formula")
    s.set_defaults(run=cmd_pp)

    s = sub.add_parser("enumerate", help="census of minimal Taylor clones")
    s.add_argument("--size", type=int, required=True)
    s.add_argument("--mode", choices=MODES, default="exhaustive")
    s.add_argument("--out")
    s.add_argument("--checkpoint")
    s.add_argument("--budget", type=int)
    s.set_defaults(run=cmd_enumerate)

    s = sub.add_parser("fixtures", help="list or verify the bundled examples")
    s.add_argument("action", choices=("list", "verify"))
    s.add_argument("names", nargs="*")
    s.set_defaults(run=cmd_fixtures)
    return p


_GLOBAL_VALUED = ("--report", "--max-arity", "--jobs")
_GLOBAL_SWITCHES = ("--allow-non-idempotent",)


def _hoist_globals(argv: list[str]) -> list[str]:
    """Move global flags in front so they may also follow the subcommand."""
    front, rest, i = [], [], 0
    while i < len(argv):
        a = argv[i]
        flag, eq, _ = a.partition("=")
        if flag in _GLOBAL_VALUED and not eq and i + 1 < len(argv):
            front += [a, argv[i + 1]]
            i += 2
            continue
        if flag in _GLOBAL_VALUED or a in _GLOBAL_SWITCHES:
            front.append(a)
        else:
            rest.append(a)
        i += 1
    return front + rest


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(_hoist_globals(list(sys.argv[1:] if argv is None else argv)))
        if args.max_arity < 2 or args.jobs < 1:
            raise ArgumentError("--max-arity must be at least 2 and --jobs positive")
        return args.run(args)
    except ArgumentError as exc:
        print(f"taylorlab: error: {exc}", file=sys.stderr)
        return USAGE
    except PreconditionError as exc:
        print(f"taylorlab: {exc}", file=sys.stderr)
        return FAILED
    except ResourceError as exc:
        print(f"taylorlab: resource cap reached: {exc}", file=sys.stderr)
        return RESOURCE


if __name__ == "__main__":
    sys.exit(main())
