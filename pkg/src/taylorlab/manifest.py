"""Bundled example algebras and the checker for their expected-property manifests.

A manifest names an algebra file and lists claims. Each claim has a
``check`` key selecting one of the verifiers below; the verifier returns
whether the algebra behaves as claimed.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from typing import Callable, Optional

from .absorption import is_n_absorbing, min_taylor_3abs, verify_absorption
from .classify import four_types
from .clone import is_minimal_taylor, is_taylor
from .core import (Algebra, Partition, all_congruences, congruence_generated,
                   is_simple, is_subuniverse, load_algebra, maximal_congruences,
                   quotient, sg_set)
from .edges import classify_pair, is_minimal_edge, stable_under
from .errors import ArgumentError
from .relations import affine_structure, is_abelian
from .terms import parse_term

FIXTURE_DIR = os.path.join(os.path.dirname(__file__), "fixtures")


def fixture_names() -> list[str]:
    return sorted(f[:-len(".manifest.json")] for f in os.listdir(FIXTURE_DIR)
                  if f.endswith(".manifest.json"))


def fixture_path(name: str) -> str:
    path = os.path.join(FIXTURE_DIR, f"{name}.json")
    if not os.path.exists(path):
        raise ArgumentError(f"no bundled fixture named {name!r}")
    return path


def load_fixture(name: str) -> Algebra:
    return load_algebra(fixture_path(name))


def load_manifest(name_or_path: str) -> tuple[dict, str]:
    path = name_or_path
    if not os.path.exists(path):
        path = os.path.join(FIXTURE_DIR, f"{name_or_path}.manifest.json")
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ArgumentError(f"cannot read manifest {name_or_path}: {exc}") from None
    return data, os.path.dirname(os.path.abspath(path))


@dataclass
class ClaimResult:
    claim: dict
    passed: bool
    detail: str = ""

    def to_dict(self) -> dict:
        return {"claim": self.claim, "passed": self.passed, "detail": self.detail}


def _blocks(p: Partition) -> list[list[int]]:
    return sorted(sorted(b) for b in p.blocks)


def _edge(alg: Algebra, c: dict) -> tuple[bool, str]:
    a, b = c["pair"]
    ws = [w for w in classify_pair(alg, a, b) if w.kind == c["type"]]
    if not c.get("present", True):
        return not ws, f"{len(ws)} witnesses"
    if not ws:
        return False, "no witness of that type"
    if "minimal" in c and any(is_minimal_edge(alg, w) for w in ws) != c["minimal"]:
        return False, "minimality differs"
    if "group" in c:
        groups = {w.quotient.describe() for w in ws if w.quotient is not None}
        if c["group"] not in groups:
            return False, f"quotient groups {sorted(groups)}"
    return True, ""


def _edge_types(alg: Algebra, c: dict) -> tuple[bool, str]:
    kinds = set()
    for a in range(alg.size):
        for b in range(alg.size):
            if a != b:
                kinds |= {w.kind for w in classify_pair(alg, a, b)}
    return kinds == set(c["expect"]), str(sorted(kinds))


def _absorbs_up_to(alg: Algebra, c: dict) -> tuple[bool, str]:
    found = [n for n in range(2, c["arity"] + 1) if is_n_absorbing(alg, c["set"], n) is not None]
    return bool(found) == c["expect"], f"absorbing arities {found}"


def _affine_group(alg: Algebra, c: dict) -> tuple[bool, str]:
    S = c["subset"]
    sub = alg if len(S) == alg.size else alg.subalgebra(S)
    g = affine_structure(sub)
    got = g.describe() if g is not None else None
    return got == c["expect"], str(got)


def _abelian_quotient(alg: Algebra, c: dict) -> tuple[bool, str]:
    theta = congruence_generated(alg, [(b[0], x) for b in c["blocks"] for x in b])
    if _blocks(theta) != sorted(sorted(b) for b in c["blocks"]):
        return False, f"generated congruence {_blocks(theta)}"
    return is_abelian(quotient(alg, theta)) == c["expect"], ""


_VERIFIERS: dict[str, Callable[[Algebra, dict], tuple[bool, str]]] = {
    "taylor": lambda A, c: (bool(is_taylor(A).verdict) == c["expect"], ""),
    "minimal_taylor": lambda A, c: (is_minimal_taylor(A)[0] == c["expect"], ""),
    "simple": lambda A, c: (is_simple(A) == c["expect"], ""),
    "four_types_case": lambda A, c: ((lambda r: (r.case == c["expect"], str(r.flags)))(four_types(A))),
    "edge": _edge,
    "edge_types": _edge_types,
    "subuniverse": lambda A, c: (is_subuniverse(A, c["set"]) == c["expect"], ""),
    "every_pair_subuniverse": lambda A, c: (
        all(len(sg_set(A, {a, b})) == 2 for a in range(A.size) for b in range(a + 1, A.size))
        == c["expect"], ""),
    "generates": lambda A, c: (sorted(sg_set(A, c["pair"])) == c["expect"], ""),
    "absorbs_by": lambda A, c: (verify_absorption(A, c["set"], parse_term(c["term"])), ""),
    "absorbs_up_to": _absorbs_up_to,
    "center": lambda A, c: (min_taylor_3abs(A, c["set"]) == c["expect"], ""),
    "principal_congruence": lambda A, c: (
        (lambda blocks: (blocks == c["expect"], str(blocks)))(
            _blocks(congruence_generated(A, [tuple(c["pair"])])))),
    "unique_maximal_congruence": lambda A, c: (
        (lambda ms: (len(ms) == 1 and _blocks(ms[0]) == c["expect"], str([_blocks(m) for m in ms])))(
            maximal_congruences(A))),
    "affine_group": _affine_group,
    "abelian_quotient": _abelian_quotient,
    "stable_under": lambda A, c: (stable_under(A, c["set"], c["types"]) == c["expect"], ""),
}


def claim_kinds() -> list[str]:
    return sorted(_VERIFIERS)


def verify_claim(alg: Algebra, claim: dict) -> ClaimResult:
    fn = _VERIFIERS.get(claim.get("check"))
    if fn is None:
        raise ArgumentError(f"unknown manifest check {claim.get('check')!r}")
    try:
        ok, detail = fn(alg, claim)
    except KeyError as exc:
        raise ArgumentError(f"claim {claim} lacks field {exc}") from None
    return ClaimResult(claim, bool(ok), detail)


def verify_manifest(name_or_path: str, alg: Optional[Algebra] = None) -> list[ClaimResult]:
    data, base = load_manifest(name_or_path)
    if alg is None:
        alg = load_algebra(os.path.join(base, data["algebra"]))
    return [verify_claim(alg, c) for c in data.get("claims", [])]
