"""Absorption, projectivity and centers.

B n-absorbs A (B is n-absorbing) when some n-ary term t lands in B on every
tuple with at least n-1 entries in B. Witness searches run the clone
closure restricted to exactly those tuples. When B is a subuniverse, a
B-essential family (a blocker) certifies non-absorption: n tuples a^i with
a^i_j in B for i != j whose generated subpower of A^n misses B^n.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np

from .clone import (DEFAULT_ARITY_CAP, IdentitySpec, find_term, is_minimal_taylor,
                    is_taylor)
from .closure import generate
from .core import Algebra, Relation, is_subuniverse, sg_set, subuniverses
from .errors import ArgumentError, PreconditionError, ResourceError
from .relations import (centralize, invariant, is_linked, is_proper, is_subdirect,
                        left_center, right_center)
from .terms import Term

BLOCKER_BUDGET = 2_000


def _as_subset(alg: Algebra, B: Iterable[int]) -> frozenset:
    B = frozenset(int(b) for b in B)
    if not B:
        raise ArgumentError("the subset must be nonempty")
    if not all(0 <= b < alg.size for b in B):
        raise ArgumentError("subset elements outside the domain")
    return B


@dataclass
class AbsorptionCertificate:
    subset: tuple
    kind: str
    verdict: Optional[bool]
    witness: Optional[Term] = None
    relation: Optional[Relation] = None
    arity_bound: Optional[int] = None
    note: str = ""

    def to_dict(self) -> dict:
        out = {"subset": list(self.subset), "kind": self.kind, "verdict": self.verdict}
        if self.witness is not None:
            out["witness"] = str(self.witness)
            out["witnessArity"] = self.witness.arity
        if self.relation is not None:
            out["relation"] = self.relation.to_dict()
        if self.arity_bound is not None:
            out["arityBound"] = self.arity_bound
        if self.note:
            out["note"] = self.note
        return out


# -- n-absorption ----------------------------------------------------------------


def absorption_spec(n_elems: int, B: frozenset, n: int) -> IdentitySpec:
    spec = IdentitySpec(n, label=f"absorbs/{n}")
    for t in itertools.product(range(n_elems), repeat=n):
        if sum(v in B for v in t) >= n - 1:
            spec.allow(t, B)
    return spec


def blocker_families(alg: Algebra, B: frozenset, n: int) -> int:
    out_b = alg.size - len(B)
    return (len(B) ** (n - 1) * out_b) ** n


def find_blocker(alg: Algebra, B: Iterable[int], n: int, *,
                 budget: Optional[int] = None) -> Optional[tuple]:
    """A B-essential family of n tuples, or None when there is none.

    Requires B to be a subuniverse; the absence of blockers is equivalent
    to B n-absorbing A. With a ``budget`` at most that many families are
    tried and ResourceError signals that the scan stopped early.
    """
    B = _as_subset(alg, B)
    if not is_subuniverse(alg, B):
        raise PreconditionError("blockers characterize absorption of subuniverses only")
    if len(B) == alg.size:
        return None
    size = alg.size
    outside = [a for a in range(size) if a not in B]
    inside = sorted(B)
    inB = np.zeros(size, dtype=bool)
    inB[inside] = True
    ops = alg.generation_ops()

    def in_power(rows: np.ndarray) -> np.ndarray:
        return inB[rows].all(axis=1)

    choices = []
    for i in range(n):
        opts = []
        for rest in itertools.product(inside, repeat=n - 1):
            for a in outside:
                opts.append(rest[:i] + (a,) + rest[i:])
        choices.append(opts)
    for tried, family in enumerate(itertools.product(*choices)):
        if budget is not None and tried >= budget:
            raise ResourceError(f"blocker scan stopped after {budget} families")
        gens = np.array(family, dtype=np.uint8)
        _, hit = generate(size, ops, gens, stop=in_power)
        if hit is None:
            return family
    return None


def is_n_absorbing(alg: Algebra, B: Iterable[int], n: int, *,
                   max_arity: int = DEFAULT_ARITY_CAP) -> Optional[Term]:
    """An n-ary term witnessing that B n-absorbs A, or None (exact at n)."""
    B = _as_subset(alg, B)
    if n < 1:
        raise ArgumentError("absorption arity must be positive")
    if n > max_arity:
        raise ResourceError(f"absorption arity {n} exceeds the arity cap {max_arity}")
    if len(B) == alg.size:
        return Term.proj(0, n)
    key = ("absorbs", B, n)
    if key in alg._cache:
        return alg._cache[key]
    blocked = False
    if n >= 2 and is_subuniverse(alg, B):
        try:
            blocked = find_blocker(alg, B, n, budget=BLOCKER_BUDGET) is not None
        except ResourceError:
            blocked = False
    found = None if blocked else find_term(alg, absorption_spec(alg.size, B, n), max_arity=max_arity)
    alg._cache[key] = found
    return found


def verify_absorption(alg: Algebra, B: Iterable[int], t: Term) -> bool:
    B = frozenset(B)
    table = t.table(alg)
    spec = absorption_spec(alg.size, B, t.arity)
    return spec.holds(alg, table)


def absorbs(alg: Algebra, B: Iterable[int], *, max_arity: int = DEFAULT_ARITY_CAP
            ) -> AbsorptionCertificate:
    """Absorption at unspecified arity as a three-valued verdict.

    Yes with a witness found up to the cap; no when a minimal Taylor
    algebra rules it out (singletons via the binary relation test, other
    sets via closure or edge stability); unknown otherwise.
    """
    B = _as_subset(alg, B)
    subset = tuple(sorted(B))
    for n in range(2, max_arity + 1):
        t = is_n_absorbing(alg, B, n, max_arity=max_arity)
        if t is not None:
            return AbsorptionCertificate(subset, f"{n}-absorbing", True, t, arity_bound=max_arity)
    if alg.idempotent and is_taylor(alg).verdict and is_minimal_taylor(alg)[0]:
        if len(B) == 1:
            return AbsorptionCertificate(subset, "none", False, arity_bound=max_arity,
                                         note="singleton not 3-absorbing in a minimal Taylor algebra")
        if not is_subuniverse(alg, B):
            return AbsorptionCertificate(subset, "none", False, arity_bound=max_arity,
                                         note="absorbing sets of minimal Taylor algebras are subuniverses")
        from .edges import stable_under
        if not stable_under(alg, B, {"semilattice", "abelian"}):
            return AbsorptionCertificate(subset, "none", False, arity_bound=max_arity,
                                         note="not stable under semilattice and abelian edges")
    return AbsorptionCertificate(subset, "none-up-to-cap", None, arity_bound=max_arity)


# -- projectivity ------------------------------------------------------------------


def _preserving_coordinates(alg: Algebra, op, B: frozenset) -> list[int]:
    n = alg.size
    k = op.arity
    table = op.table.reshape((n,) * k)
    inB = np.zeros(n, dtype=bool)
    inB[sorted(B)] = True
    good = []
    for i in range(k):
        sl = [slice(None)] * k
        sl[i] = sorted(B)
        if inB[table[tuple(sl)]].all():
            good.append(i)
    return good


def is_projective(alg: Algebra, B: Iterable[int]) -> bool:
    """Every basic operation has a coordinate that forces its value into B."""
    B = _as_subset(alg, B)
    return all(_preserving_coordinates(alg, op, B) for op in alg.operations)


def disjunction_relation(size: int, B: Iterable[int], m: int) -> Relation:
    """B(x_1) or ... or B(x_m)."""
    inB = np.zeros(size, dtype=bool)
    inB[sorted(B)] = True
    cube = np.zeros((size,) * m, dtype=bool)
    for i in range(m):
        shape = [1] * m
        shape[i] = size
        cube |= inB.reshape(shape)
    return Relation(size, m, cube)


def is_projective_relational(alg: Algebra, B: Iterable[int], up_to: int = 4) -> bool:
    """Invariance of B(x_1) or ... or B(x_m) for m up to ``up_to``."""
    B = _as_subset(alg, B)
    return all(invariant(alg, disjunction_relation(alg.size, B, m)) for m in range(1, up_to + 1))


def is_strongly_projective(alg: Algebra, B: Iterable[int]) -> bool:
    """Invariance of R(x,y,z) = B(x) or y = z."""
    B = _as_subset(alg, B)
    n = alg.size
    inB = np.zeros(n, dtype=bool)
    inB[sorted(B)] = True
    cube = inB[:, None, None] | np.eye(n, dtype=bool)[None, :, :]
    return invariant(alg, Relation(n, 3, cube))


# -- minimal Taylor algebras -------------------------------------------------------


def _require_minimal_taylor(alg: Algebra) -> None:
    if not alg.idempotent or not is_taylor(alg).verdict or not is_minimal_taylor(alg)[0]:
        raise PreconditionError("this test is exact for minimal Taylor algebras only")


def min_taylor_2abs(alg: Algebra, B: Iterable[int]) -> bool:
    """2-absorption in a minimal Taylor algebra: B(x) or B(y) or B(z) is a subpower."""
    B = _as_subset(alg, B)
    _require_minimal_taylor(alg)
    return invariant(alg, disjunction_relation(alg.size, B, 3))


def min_taylor_3abs(alg: Algebra, B: Iterable[int]) -> bool:
    """3-absorption (equivalently, being a center) in a minimal Taylor algebra:
    B(x) or B(y) is a subpower."""
    B = _as_subset(alg, B)
    _require_minimal_taylor(alg)
    return invariant(alg, disjunction_relation(alg.size, B, 2))


def nonempty_subsets(n: int):
    for r in range(1, n + 1):
        for c in itertools.combinations(range(n), r):
            yield frozenset(c)


def minimal_2abs(alg: Algebra) -> frozenset:
    """The unique minimal 2-absorbing subuniverse of a minimal Taylor algebra."""
    _require_minimal_taylor(alg)
    absorbing = [B for B in nonempty_subsets(alg.size) if min_taylor_2abs(alg, B)]
    core = frozenset(range(alg.size))
    for B in absorbing:
        core &= B
    if not core or not min_taylor_2abs(alg, core):
        raise RuntimeError("2-absorbing subuniverses do not intersect to a 2-absorbing one")
    if 1 < len(core) < alg.size:
        sub = alg.subalgebra(core)
        for C in nonempty_subsets(len(core)):
            if len(C) < len(core) and min_taylor_2abs(sub, C):
                raise RuntimeError("minimal 2-absorbing subuniverse has a nontrivial 2-absorbing subset")
    return core


def minimal_3abs(alg: Algebra) -> list[frozenset]:
    """Inclusion-minimal 3-absorbing subsets of a minimal Taylor algebra."""
    _require_minimal_taylor(alg)
    found = [B for B in nonempty_subsets(alg.size) if min_taylor_3abs(alg, B)]
    return [B for B in found if not any(C < B for C in found)]


def absorption_from_linked(alg: Algebra, R: Relation) -> tuple[frozenset, Term]:
    """A nontrivial 3-absorbing subuniverse obtained from a linked relation.

    R is centralized; the centers of the result are tried first. If neither
    3-absorbs, A has a nontrivial 2-absorbing subuniverse (otherwise the
    left center would be a center), and the subuniverses are scanned.
    """
    if not alg.idempotent or not is_taylor(alg).verdict:
        raise PreconditionError("absorption from linked relations needs a Taylor algebra")
    failed = [name for name, ok in (("invariant", invariant(alg, R)),
                                    ("subdirect", is_subdirect(R)),
                                    ("proper", is_proper(R)),
                                    ("linked", is_linked(R))) if not ok]
    if failed:
        raise ArgumentError("relation is not " + ", ".join(failed))
    C = centralize(alg, R)
    candidates = [left_center(C), right_center(C)]
    candidates += [B for B in subuniverses(alg) if 0 < len(B) < alg.size]
    for B in candidates:
        t = is_n_absorbing(alg, B, 3)
        if t is not None:
            return B, t
    raise ResourceError("no 3-absorbing subuniverse confirmed at arity 3")
