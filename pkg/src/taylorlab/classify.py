"""Four types, omitting types, and the theorem suite.

The four types report evaluates every case separately so that overlaps are
visible; ``case`` is the first one that holds. The omitting-types report
reads freeness flags off the full edge classification and pairs them with
explicit term searches. ``theorem_suite`` runs the minimal Taylor
structure theorems against one concrete algebra.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional

from .absorption import (absorbs, is_n_absorbing, is_projective, is_strongly_projective,
                         min_taylor_2abs, min_taylor_3abs, nonempty_subsets,
                         verify_absorption)
from .clone import (DEFAULT_ARITY_CAP, IdentitySpec, commutative_spec, find_term,
                    generates_clone, is_minimal_taylor, is_taylor, majority_spec,
                    malcev_spec, three_edge_spec, term_equivalent, unified_operation,
                    unified_spec, wnu_spec)
from .corpus import majority2, semilattice_join, semilattice_meet
from .core import (Algebra, all_congruences, congruence_generated, is_simple,
                   is_subuniverse, maximal_congruences, mu, quotient, sg_set,
                   sub_quotient, subuniverses)
from .edges import (EdgeWitness, check_connectivity, classify_pair, edge_graph,
                    is_minimal_edge, stable_under)
from .errors import ArgumentError, PreconditionError, ResourceError
from .relations import (affine_structure, centralize, find_binary_witness, is_abelian,
                        left_center, reflexive_irredundant_witness, scan_binary_witnesses,
                        subdirect_trichotomy)
from .terms import Term

CASES = ("a", "b", "c", "d")
CASE_NAMES = {
    "a": "nontrivial 2-absorbing subuniverse",
    "b": "nontrivial center",
    "c": "proper congruence with abelian quotient",
    "d": "proper congruence with polynomially complete quotient",
}


def _minimal_taylor(alg: Algebra) -> bool:
    return alg.idempotent and bool(is_taylor(alg).verdict) and is_minimal_taylor(alg)[0]


def _proper_subuniverses(alg: Algebra) -> list[frozenset]:
    return [B for B in subuniverses(alg) if 0 < len(B) < alg.size]


# -- four types ------------------------------------------------------------------


@dataclass
class FourTypesReport:
    flags: dict
    certificates: dict
    note: str = ""

    @property
    def case(self) -> Optional[str]:
        for c in CASES:
            if self.flags.get(c):
                return c
        return None

    @property
    def cases(self) -> list[str]:
        return [c for c in CASES if self.flags.get(c)]

    def to_dict(self) -> dict:
        out = {"case": self.case, "flags": dict(self.flags),
               "certificates": self.certificates}
        if self.note:
            out["note"] = self.note
        return out


def _case_a(alg: Algebra) -> tuple[Optional[bool], dict]:
    for B in _proper_subuniverses(alg):
        t = is_n_absorbing(alg, B, 2)
        if t is not None:
            return True, {"subset": sorted(B), "witness": str(t)}
    return False, {"checked": "every proper nonempty subuniverse at arity 2"}


def _case_b(alg: Algebra, a_flag: Optional[bool]) -> tuple[Optional[bool], dict]:
    if alg.idempotent and is_taylor(alg).verdict and is_minimal_taylor(alg)[0]:
        for B in _proper_subuniverses(alg):
            if min_taylor_3abs(alg, B):
                t = is_n_absorbing(alg, B, 3)
                return True, {"subset": sorted(B), "witness": str(t) if t else None,
                              "method": "3-absorption in a minimal Taylor algebra"}
        return False, {"method": "no proper subuniverse 3-absorbs"}
    if a_flag is False and alg.idempotent and is_taylor(alg).verdict:
        found, complete = scan_binary_witnesses(alg)
        for R in found:
            try:
                C = centralize(alg, R)
            except (ArgumentError, ResourceError):
                continue
            B = left_center(C)
            if 0 < len(B) < alg.size:
                return True, {"subset": sorted(B), "relation": C.to_dict(),
                              "method": "left center of a centralized linked relation"}
        if complete and not found:
            return None, {"method": "no linked witness; centers need an outside companion"}
    return None, {"method": "undecided outside minimal Taylor algebras"}


def _case_c(alg: Algebra) -> tuple[Optional[bool], dict]:
    for theta in all_congruences(alg):
        if theta.is_full():
            continue
        if is_abelian(quotient(alg, theta)):
            return True, {"congruence": [list(b) for b in theta.blocks]}
    return False, {"checked": "every proper congruence"}


def _polynomially_complete(Q: Algebra) -> tuple[Optional[bool], dict]:
    case, _ = subdirect_trichotomy(Q)
    if case != 1:
        return False, {"trichotomy": case}
    for m in (2, 3):
        R = reflexive_irredundant_witness(Q, m)
        if R is not None:
            return False, {"trichotomy": 1, "reflexive": R.to_dict()}
    return True, {"trichotomy": 1, "arityBound": 3}


def _case_d(alg: Algebra) -> tuple[Optional[bool], dict]:
    unknown = False
    for theta in maximal_congruences(alg):
        try:
            ok, info = _polynomially_complete(quotient(alg, theta))
        except ResourceError:
            unknown = True
            continue
        if ok:
            info["congruence"] = [list(b) for b in theta.blocks]
            return True, info
    if unknown:
        return None, {"note": "some quotient exceeded the scan caps"}
    return False, {"checked": "every maximal congruence"}


def four_types(alg: Algebra) -> FourTypesReport:
    if alg.size == 1:
        return FourTypesReport({c: True for c in CASES}, {},
                               "one-element algebra: every case holds vacuously")
    flags: dict = {}
    certs: dict = {}

    def run(name: str, fn: Callable[[], tuple]) -> None:
        try:
            flags[name], certs[name] = fn()
        except ResourceError as exc:
            flags[name], certs[name] = None, {"error": str(exc)}

    run("a", lambda: _case_a(alg))
    run("b", lambda: _case_b(alg, flags["a"]))
    run("c", lambda: _case_c(alg))
    run("d", lambda: _case_d(alg))
    return FourTypesReport(flags, certs)


# -- production theorems ---------------------------------------------------------


def _require_simple_taylor(alg: Algebra) -> None:
    if not alg.idempotent or not is_taylor(alg).verdict:
        raise PreconditionError("needs an idempotent Taylor algebra")
    if not is_simple(alg):
        raise PreconditionError("needs a simple algebra")


def produce_majority_term(alg: Algebra, *, check_hypotheses: bool = True) -> Optional[Term]:
    """A ternary t with t(a,a,b) = t(a,b,a) = t(b,a,a) = a for all (a, b) outside mu.

    The hypotheses (simple, no proper irredundant subdirect subpowers) are
    what guarantee existence; with ``check_hypotheses=False`` the search runs
    anyway and its answer is still exact.
    """
    if check_hypotheses:
        _require_simple_taylor(alg)
        case, _ = subdirect_trichotomy(alg)
        if case != 1:
            raise PreconditionError(f"subdirect trichotomy gives case {case}, not 1")
    m = mu(alg)
    spec = IdentitySpec(3, label="majority on non-mu pairs")
    for a, b in itertools.permutations(range(alg.size), 2):
        if not m.related(a, b):
            spec.allow((a, a, b), {a}).allow((a, b, a), {a}).allow((b, a, a), {a})
    return find_term(alg, spec)


@dataclass
class SemilatticeBlock:
    block: frozenset
    witnesses: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"block": sorted(self.block),
                "witnesses": [{"pair": list(p), "term": str(t)}
                              for p, t in sorted(self.witnesses.items())]}


def semilattice_pair_spec(a: int, b: int) -> IdentitySpec:
    """f(a, b) = f(b, a) = b: a semilattice edge witnessed by equality."""
    return IdentitySpec(2, label="semilattice pair").allow((a, b), {b}).allow((b, a), {b})


def produce_semilattice_block(alg: Algebra) -> Optional[SemilatticeBlock]:
    """A mu-class B with a binary f(a,b) = f(b,a) = b for every b in B, a not in B."""
    _require_simple_taylor(alg)
    if alg.size <= 2:
        raise PreconditionError("needs more than two elements")
    if find_binary_witness(alg) is None:
        raise PreconditionError("no proper irredundant subdirect binary subpower")
    blocks = sorted(mu(alg).blocks, key=lambda blk: (len(blk) == alg.size, blk))
    for blk in blocks:
        B = frozenset(blk)
        found = {}
        for b in sorted(B):
            for a in range(alg.size):
                if a in B:
                    continue
                t = find_term(alg, semilattice_pair_spec(a, b), reuse=True)
                if t is None:
                    break
                found[(a, b)] = t
            else:
                continue
            break
        else:
            return SemilatticeBlock(B, found)
    return None


def verify_semilattice_block(alg: Algebra, res: SemilatticeBlock) -> bool:
    if set(res.block) not in [set(b) for b in mu(alg).blocks]:
        return False
    for b in res.block:
        for a in range(alg.size):
            if a in res.block:
                continue
            t = res.witnesses.get((a, b))
            if t is None or not semilattice_pair_spec(a, b).holds(alg, t.table(alg)):
                return False
    return True


# -- omitting types --------------------------------------------------------------


FREE_FLAGS = ("a", "s", "m", "sm", "as", "am", "z2")


@dataclass
class OmittingTypesReport:
    free: dict
    properties: dict
    witnesses: dict
    minimal_taylor: bool
    violations: list = field(default_factory=list)
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"free": {f"{k}-free" if k != "z2" else "Z2-edge-free": v
                         for k, v in self.free.items()},
                "properties": self.properties,
                "witnesses": {k: (str(v) if v is not None else None)
                              for k, v in self.witnesses.items()},
                "minimalTaylor": self.minimal_taylor,
                "violations": list(self.violations),
                "details": self.details}


def _edge_kinds(alg: Algebra) -> tuple[set, bool]:
    kinds: set = set()
    z2 = False
    for a, b in itertools.permutations(range(alg.size), 2):
        for w in classify_pair(alg, a, b):
            kinds.add(w.kind)
            if w.kind == "abelian" and w.quotient is not None and w.quotient.order == 2:
                z2 = True
    return kinds, z2


def _edge_subquotients(alg: Algebra) -> list[Algebra]:
    out, seen = [], set()
    for a, b in itertools.permutations(range(alg.size), 2):
        for w in classify_pair(alg, a, b):
            Q = sub_quotient(alg, w.congruence)
            if Q.key not in seen:
                seen.add(Q.key)
                out.append(Q)
    return sorted(out, key=lambda Q: Q.size)


def _search(alg: Algebra, make: Callable[[int], IdentitySpec], cap: int):
    """Identities in two variables survive passing to subquotients, so a
    failure on an edge subquotient settles the question for A."""
    try:
        for Q in _edge_subquotients(alg):
            if Q.size < alg.size and find_term(Q, make(Q.size), max_arity=cap) is None:
                return None, True
        return find_term(alg, make(alg.size), max_arity=cap), True
    except ResourceError:
        return None, False


def _subalgebras(alg: Algebra) -> list[tuple[frozenset, Algebra]]:
    out = []
    for S in subuniverses(alg):
        if len(S) >= 2:
            out.append((S, alg if len(S) == alg.size else alg.subalgebra(sorted(S))))
    return out


def _centers(sub: Algebra) -> list[frozenset]:
    return [B for B in nonempty_subsets(sub.size) if len(B) < sub.size and min_taylor_3abs(sub, B)]


def _subalgebra_facts(alg: Algebra, cap: int) -> dict:
    """Per-subalgebra absorption facts used by the minimal Taylor equivalences."""
    two_abs = False
    centers_2abs = True
    unique_min_center = True
    unique_min_absorbing: Optional[bool] = True
    absorbing: Optional[bool] = False
    for S, sub in _subalgebras(alg):
        if any(min_taylor_2abs(sub, B) for B in nonempty_subsets(sub.size) if len(B) < sub.size):
            two_abs = True
        cs = _centers(sub) + [frozenset(range(sub.size))]
        if not all(min_taylor_2abs(sub, B) for B in cs):
            centers_2abs = False
        minimal = [B for B in cs if not any(C < B for C in cs)]
        if len(minimal) != 1:
            unique_min_center = False
        absorbing_here = [frozenset(range(sub.size))]
        unknown = False
        for C in subuniverses(sub):
            if not 0 < len(C) < sub.size:
                continue
            verdict = absorbs(sub, C, max_arity=cap).verdict
            if verdict is True:
                absorbing_here.append(frozenset(C))
                absorbing = True
            elif verdict is None:
                unknown = True
                if absorbing is False:
                    absorbing = None
        minimal = [B for B in absorbing_here if not any(C < B for C in absorbing_here)]
        if len(minimal) != 1:
            unique_min_absorbing = False
        elif unknown and unique_min_absorbing is True:
            unique_min_absorbing = None
    # reported next to uniqueMinimalCenter; no equivalence with m-freeness is assumed
    return {"subalgebraWith2Absorption": two_abs,
            "centersAre2Absorbing": centers_2abs,
            "uniqueMinimalCenter": unique_min_center,
            "uniqueMinimalAbsorbing": unique_min_absorbing,
            "subalgebraWithAbsorption": absorbing}


def omitting_types(alg: Algebra, *, max_arity: int = DEFAULT_ARITY_CAP) -> OmittingTypesReport:
    if not alg.idempotent or not is_taylor(alg).verdict:
        raise PreconditionError("omitting types are classified for idempotent Taylor algebras")
    kinds, z2 = _edge_kinds(alg)
    free = {
        "a": "abelian" not in kinds,
        "s": "semilattice" not in kinds,
        "m": "majority" not in kinds,
    }
    free["sm"] = free["s"] and free["m"]
    free["as"] = free["a"] and free["s"]
    free["am"] = free["a"] and free["m"]
    free["z2"] = not z2

    witnesses: dict = {}
    known: dict = {}
    makers = {"malcev": malcev_spec, "majority": majority_spec,
              "commutative": commutative_spec, "threeEdge": three_edge_spec}
    for k in range(2, max_arity + 1):
        makers[f"wnu{k}"] = lambda m, k=k: wnu_spec(m, k)
    for name, make in makers.items():
        witnesses[name], known[name] = _search(alg, make, max_arity)
    wnu = [k for k in range(2, max_arity + 1) if witnesses[f"wnu{k}"] is not None]

    def has(name: str) -> Optional[bool]:
        if witnesses[name] is not None:
            return True
        return False if known[name] else None

    minimal = _minimal_taylor(alg)
    props = {
        "hasMalcev": has("malcev"),
        "hasMajority": has("majority"),
        "hasCommutativeBinary": has("commutative"),
        "has3Edge": has("threeEdge"),
        "wnuArities": wnu,
        "arityBound": max_arity,
        "boundedWidth": free["a"],
        "fewSubpowers": True if witnesses["threeEdge"] is not None else (free["s"] if minimal else None),
    }
    report = OmittingTypesReport(free, props, witnesses, minimal)
    report.violations = _omitting_violations(alg, report, max_arity)
    return report


def _omitting_violations(alg: Algebra, rep: OmittingTypesReport, cap: int) -> list[str]:
    bad = []
    f, p = rep.free, rep.properties
    wnu_high = set(range(3, cap + 1)) <= set(p["wnuArities"])
    if f["a"] and not wnu_high:
        bad.append("a-free but some wnu of arity 3..cap is missing")
    if not f["a"] and wnu_high and _small_abelian_primes(alg, cap):
        bad.append("abelian edge present yet wnu terms exist at every arity 3..cap")
    if not rep.minimal_taylor:
        return bad
    facts = _subalgebra_facts(alg, cap)
    rep.details.update(facts)
    if f["s"] != p["has3Edge"]:
        bad.append("s-free differs from having a 3-edge term")
    if f["s"] == facts["subalgebraWith2Absorption"]:
        bad.append("s-free differs from no subalgebra having a nontrivial 2-absorbing set")
    if not (f["m"] == facts["centersAre2Absorbing"] == facts["uniqueMinimalCenter"]):
        bad.append("m-free, centers 2-absorbing and unique minimal center disagree")
    if (f["m"] and f["z2"]) != p["hasCommutativeBinary"]:
        bad.append("m-free without Z2-edges differs from a commutative binary term")
    if f["sm"] != p["hasMalcev"]:
        bad.append("sm-free differs from having a Mal'cev term")
    if facts["subalgebraWithAbsorption"] is not None and f["sm"] == facts["subalgebraWithAbsorption"]:
        bad.append("sm-free differs from no subalgebra having a nontrivial absorbing set")
    if f["as"] != p["hasMajority"]:
        bad.append("as-free differs from having a majority term")
    if f["am"] != (set(range(2, cap + 1)) <= set(p["wnuArities"])):
        bad.append("am-free differs from wnu terms at every arity 2..cap")
    return bad


def _small_abelian_primes(alg: Algebra, cap: int) -> bool:
    """Every abelian edge quotient has a prime factor at most ``cap``, so a
    missing wnu arity is expected within the cap."""
    for a, b in itertools.permutations(range(alg.size), 2):
        for w in classify_pair(alg, a, b):
            if w.kind != "abelian":
                continue
            if w.quotient is None or min(q for q, _ in w.quotient.decomposition) > cap:
                return False
    return True


# -- theorem suite ---------------------------------------------------------------


SUITES = ("all", "minimal-taylor", "edges")


@dataclass
class CheckResult:
    name: str
    group: str
    status: str
    counterexample: Optional[str] = None

    def to_dict(self) -> dict:
        out = {"name": self.name, "group": self.group, "status": self.status}
        if self.counterexample is not None:
            out["counterexample"] = self.counterexample
        return out


@dataclass
class SuiteReport:
    algebra: str
    checks: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.status != "fail" for c in self.checks)

    def failures(self) -> list[CheckResult]:
        return [c for c in self.checks if c.status == "fail"]

    def to_dict(self) -> dict:
        return {"algebra": self.algebra, "passed": self.passed,
                "checks": [c.to_dict() for c in self.checks]}


class _Fail(Exception):
    pass


def _expect(cond: bool, msg: str) -> None:
    if not cond:
        raise _Fail(msg)


def _fmt(B) -> str:
    return "{" + ",".join(str(x) for x in sorted(B)) + "}"


def _chk_four_types(alg):
    rep = four_types(alg)
    _expect(bool(rep.cases) or None in rep.flags.values(), f"no case holds: {rep.flags}")


def _chk_omitting(alg):
    rep = omitting_types(alg)
    _expect(not rep.violations, "; ".join(rep.violations))


def _chk_bin_abs(alg):
    for B in nonempty_subsets(alg.size):
        vals = (is_n_absorbing(alg, B, 2) is not None, min_taylor_2abs(alg, B),
                is_projective(alg, B), is_strongly_projective(alg, B))
        _expect(len(set(vals)) == 1, f"B={_fmt(B)}: 2-abs/relation/projective/strong = {vals}")


def _chk_center_abs(alg):
    for B in nonempty_subsets(alg.size):
        three = is_n_absorbing(alg, B, 3) is not None
        _expect(three == min_taylor_3abs(alg, B), f"B={_fmt(B)}: 3-abs vs B(x) or B(y)")
        if len(B) == 1:
            anyabs = _absorbing_witness(alg, B) is not None
            _expect(anyabs == three, f"B={_fmt(B)}: singleton absorbing up to the cap vs 3-abs")


# sets that are not subuniverses have no blocker test, so their absorption
# search stops at this arity
NON_SUBUNIVERSE_ARITY = 3


def _absorbing_witness(alg: Algebra, B: frozenset) -> Optional[Term]:
    top = DEFAULT_ARITY_CAP if is_subuniverse(alg, B) else NON_SUBUNIVERSE_ARITY
    for k in range(2, top + 1):
        t = is_n_absorbing(alg, B, k)
        if t is not None:
            return t
    return None


def _chk_abs_subuniverse(alg):
    for B in nonempty_subsets(alg.size):
        if not is_subuniverse(alg, B):
            t = _absorbing_witness(alg, B)
            _expect(t is None, f"B={_fmt(B)} absorbs by {t} but is not a subuniverse")


def _chk_bin_abs_stable(alg):
    kinds = ("semilattice", "majority", "abelian")
    for B in nonempty_subsets(alg.size):
        _expect(min_taylor_2abs(alg, B) == stable_under(alg, B, kinds),
                f"B={_fmt(B)}: 2-abs vs stability under all edges")


def _chk_abs_stable(alg):
    for B in subuniverses(alg):
        if B and _absorbing_witness(alg, B) is not None:
            _expect(stable_under(alg, B, ("semilattice", "abelian")),
                    f"B={_fmt(B)} absorbs but is not stable under s and a edges")
    for b in range(alg.size):
        anyabs = _absorbing_witness(alg, frozenset({b})) is not None
        _expect(anyabs == stable_under(alg, {b}, ("semilattice", "abelian")),
                f"singleton {b}: absorbing vs stable under s and a edges")


def _chk_bin_abs_intersect(alg):
    subs = subuniverses(alg)
    two = [B for B in subs if B and min_taylor_2abs(alg, B)]
    for B in two:
        for C in subs:
            if C:
                _expect(is_subuniverse(alg, B | C), f"B={_fmt(B)}, C={_fmt(C)}: union not a subuniverse")
        for C in subs:
            if not 0 < len(C) < alg.size:
                continue
            f = _absorbing_witness(alg, C)
            if f is None:
                continue
            _expect(verify_absorption(alg, B | C, f), f"B={_fmt(B)}, C={_fmt(C)}: union not absorbing by {f}")
            _expect(bool(B & C), f"B={_fmt(B)}, C={_fmt(C)}: disjoint")
            _expect(verify_absorption(alg, B & C, f), f"B={_fmt(B)}, C={_fmt(C)}: meet not absorbing by {f}")
    core = frozenset(range(alg.size))
    for B in two:
        core &= B
    _expect(bool(core) and min_taylor_2abs(alg, core), "2-absorbing sets have no least member")
    if len(core) > 1:
        sub = alg.subalgebra(sorted(core))
        for C in nonempty_subsets(sub.size):
            _expect(len(C) == sub.size or not min_taylor_2abs(sub, C),
                    f"least 2-absorbing {_fmt(core)} has a nontrivial 2-absorbing subset")


def _two_element(kind: str, top: int = 1) -> Algebra:
    """The two-element majority algebra, or the semilattice with absorbing ``top``."""
    if kind == "majority":
        return majority2()
    return semilattice_join() if top == 1 else semilattice_meet()


def _chk_3_abs_intersect(alg):
    centers = [B for B in nonempty_subsets(alg.size) if min_taylor_3abs(alg, B)]
    for B, C in itertools.combinations(centers, 2):
        _expect(is_subuniverse(alg, B | C), f"B={_fmt(B)}, C={_fmt(C)}: union not a subuniverse")
        if B & C:
            _expect(min_taylor_3abs(alg, B & C), f"B={_fmt(B)}, C={_fmt(C)}: meet not 3-absorbing")
            continue
        U = sorted(B | C)
        theta = congruence_generated(alg, [(min(B), b) for b in B] + [(min(C), c) for c in C], U)
        _expect(len(theta.blocks) == 2, f"B={_fmt(B)}, C={_fmt(C)}: B^2 u C^2 is not a congruence")
        Q = sub_quotient(alg, theta)
        _expect(term_equivalent(Q, _two_element("majority")),
                f"B={_fmt(B)}, C={_fmt(C)}: quotient not a two-element majority algebra")


def _chk_trans_three_abs(alg):
    for B in nonempty_subsets(alg.size):
        if len(B) in (1, alg.size) or not min_taylor_3abs(alg, B):
            continue
        order = sorted(B)
        sub = alg.subalgebra(order)
        for C in nonempty_subsets(sub.size):
            if min_taylor_3abs(sub, C):
                C_up = frozenset(order[c] for c in C)
                _expect(min_taylor_3abs(alg, C_up), f"{_fmt(C_up)} 3-absorbs {_fmt(B)} but not A")


def _chk_non_edge(alg):
    for a, b in itertools.combinations(range(alg.size), 2):
        E = sorted(sg_set(alg, {a, b}))
        sub = alg if len(E) == alg.size else alg.subalgebra(E)
        la, lb = E.index(a), E.index(b)
        abelian = any(not th.is_full() and is_abelian(quotient(sub, th)) for th in all_congruences(sub))
        absorbed = any(min_taylor_3abs(sub, C) for C in _proper_subuniverses(sub) if la in C or lb in C)
        _expect(abelian or absorbed, f"Sg({a},{b}) has neither an abelian quotient nor a 3-absorbing set around a or b")


def _chk_connected(alg):
    _expect(check_connectivity(edge_graph(alg, minimal_only=True)), "minimal edge graph is disconnected")


def _chk_edge_quotients(alg):
    for a, b in itertools.permutations(range(alg.size), 2):
        ws = classify_pair(alg, a, b)
        E = sorted(sg_set(alg, {a, b}))
        maximal = set(maximal_congruences(alg, E))
        for kind in ("semilattice", "majority"):
            mine = [w for w in ws if w.kind == kind]
            if mine:
                _expect(len(mine) == 1 and mine[0].congruence in maximal,
                        f"({a},{b}) {kind}: witnessing congruence not unique or not maximal")
        for w in ws:
            Q = sub_quotient(alg, w.congruence)
            if w.kind == "semilattice":
                top = w.congruence.block_of(b)
                _expect(Q.size == 2 and term_equivalent(Q, _two_element("semilattice", top)),
                        f"({a},{b}) semilattice quotient is not a two-element semilattice")
            elif w.kind == "majority":
                _expect(Q.size == 2 and term_equivalent(Q, _two_element("majority")),
                        f"({a},{b}) majority quotient is not a two-element majority algebra")
            else:
                _expect(w.quotient is not None and affine_structure(Q) is not None,
                        f"({a},{b}) abelian quotient is not affine")


def _chk_unique_type(alg):
    for a, b in itertools.permutations(range(alg.size), 2):
        ws = classify_pair(alg, a, b)
        if not any(is_minimal_edge(alg, w) for w in ws):
            continue
        E = sorted(sg_set(alg, {a, b}))
        maxi = maximal_congruences(alg, E)
        sub = alg.subalgebra(E) if len(E) < alg.size else alg
        m = mu(sub)
        mapped = sorted(sorted(E[x] for x in blk) for blk in m.blocks)
        _expect(len(maxi) == 1 and sorted(sorted(blk) for blk in maxi[0].blocks) == mapped,
                f"({a},{b}): maximal congruences {maxi} vs mu {mapped}")
        _expect(len({w.kind for w in ws}) == 1, f"({a},{b}) has types {sorted({w.kind for w in ws})}")


def _chk_thin_semilattice(alg):
    for a, b in itertools.permutations(range(alg.size), 2):
        for w in classify_pair(alg, a, b):
            if w.kind == "semilattice" and is_minimal_edge(alg, w):
                _expect(is_subuniverse(alg, {a, b}) and w.congruence.is_equality(),
                        f"minimal semilattice edge ({a},{b}) is not thin")


def _chk_minimal_variety(alg):
    from .corpus import subalgebras_and_quotients
    for X in subalgebras_and_quotients(alg):
        _expect(is_minimal_taylor(X)[0], f"{X.name} is not minimal Taylor")
    if alg.size ** 2 <= SQUARE_LIMIT:
        _expect(is_minimal_taylor(alg.power(2))[0], "the square is not minimal Taylor")


SQUARE_LIMIT = 9


def _chk_unified(alg):
    f = unified_operation(alg)
    _expect(unified_spec(alg).holds(alg, f.table(alg)), f"{f} fails the edge identities")
    _expect(generates_clone(alg, f), f"{f} does not generate the clone")


_CHECKS: list[tuple[str, str, bool, Callable]] = [
    ("four types exhaustive", "all", False, _chk_four_types),
    ("omitting types consistent", "all", False, _chk_omitting),
    ("2-absorption equivalences", "minimal-taylor", True, _chk_bin_abs),
    ("3-absorption equivalences", "minimal-taylor", True, _chk_center_abs),
    ("absorbing sets are subuniverses (arity 3 off subuniverses)", "minimal-taylor", True, _chk_abs_subuniverse),
    ("2-absorption is edge stability", "minimal-taylor", True, _chk_bin_abs_stable),
    ("absorption and s/a stability", "minimal-taylor", True, _chk_abs_stable),
    ("2-absorbing unions and meets", "minimal-taylor", True, _chk_bin_abs_intersect),
    ("3-absorbing unions and meets", "minimal-taylor", True, _chk_3_abs_intersect),
    ("3-absorption is transitive", "minimal-taylor", True, _chk_trans_three_abs),
    ("two-generated: abelian quotient or 3-absorption", "minimal-taylor", True, _chk_non_edge),
    ("closed under subalgebras, quotients, squares", "minimal-taylor", True, _chk_minimal_variety),
    ("unified edge operation", "minimal-taylor", True, _chk_unified),
    ("minimal edges connect", "edges", False, _chk_connected),
    ("edge quotient shapes", "edges", True, _chk_edge_quotients),
    ("minimal edges have one type", "edges", True, _chk_unique_type),
    ("minimal semilattice edges are thin", "edges", True, _chk_thin_semilattice),
]


def check_names(suite: str = "all") -> list[str]:
    return [name for name, group, _, _ in _CHECKS if suite == "all" or group == suite]


def theorem_suite(alg: Algebra, suite: str = "all", *, jobs: int = 1) -> SuiteReport:
    """Run the structure theorems on ``alg``; non-Taylor input is refused."""
    if suite not in SUITES:
        raise ArgumentError(f"unknown suite {suite!r}; expected one of {SUITES}")
    if not alg.idempotent or not is_taylor(alg).verdict:
        raise PreconditionError("the theorem suite needs an idempotent Taylor algebra")
    minimal = is_minimal_taylor(alg)[0]
    todo = [(n, g, m, fn) for n, g, m, fn in _CHECKS if suite == "all" or g == suite]

    def run(item) -> CheckResult:
        name, group, needs_min, fn = item
        if needs_min and not minimal:
            return CheckResult(name, group, "skip", "not minimal Taylor")
        try:
            fn(alg)
        except _Fail as exc:
            return CheckResult(name, group, "fail", str(exc))
        except ResourceError as exc:
            return CheckResult(name, group, "skip", f"cap exceeded: {exc}")
        return CheckResult(name, group, "pass")

    report = SuiteReport(alg.name)
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            report.checks = list(pool.map(run, todo))
    else:
        report.checks = [run(item) for item in todo]
    return report
