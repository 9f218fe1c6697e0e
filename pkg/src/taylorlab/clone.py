"""Clone slices, identity-driven term search, Taylor and minimal Taylor tests.

Clo_k is generated as the subpower of A^(A^k) spanned by the k projections.
A term search for an identity that only mentions a few argument tuples runs
the same closure on those tuples alone, which is the image of Clo_k under
restriction and therefore exact.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .closure import DEFAULT_LIMIT, Subpower, generate
from .core import Algebra, OperationTable, all_tuples, tuple_index
from .errors import ArgumentError, PreconditionError, ResourceError
from .terms import Term, basic_term

DEFAULT_ARITY_CAP = 4


def _term_builder(alg: Algebra, arity: int):
    names = [op.name for op in alg.operations]
    return (lambda j: Term.proj(j, arity),
            lambda op_i, kids: Term.app(names[op_i], kids))


class CloneSlice:
    """All k-ary term operations of an algebra as tables, with witnesses."""

    def __init__(self, alg: Algebra, arity: int, sp: Subpower):
        self.algebra = alg
        self.arity = arity
        self._sp = sp
        self._terms: dict[int, Term] = {}

    def __len__(self) -> int:
        return len(self._sp)

    @property
    def tables(self) -> np.ndarray:
        return self._sp.rows

    def index(self, table) -> Optional[int]:
        return self._sp.find(table)

    def __contains__(self, table) -> bool:
        return self.index(table) is not None

    def witness(self, i: int) -> Term:
        t = self._terms.get(i)
        if t is None:
            leaf, node = _term_builder(self.algebra, self.arity)
            t = self._sp.derivation(i, leaf, node)
            self._terms[i] = t
        return t

    def witness_for(self, table) -> Term:
        i = self.index(table)
        if i is None:
            raise ArgumentError("table is not a term operation of this arity")
        return self.witness(i)


def projection_rows(n: int, k: int, points: Optional[np.ndarray] = None) -> np.ndarray:
    """Rows x_1..x_k evaluated on ``points`` (default: all of A^k)."""
    pts = all_tuples(n, k) if points is None else np.asarray(points, dtype=np.uint8)
    return np.ascontiguousarray(pts.T)


def clone_slice(alg: Algebra, k: int, *, max_arity: int = DEFAULT_ARITY_CAP,
                limit: int = DEFAULT_LIMIT, max_work: Optional[int] = None) -> CloneSlice:
    if k < 1:
        raise ArgumentError("arity must be positive")
    if k > max_arity:
        raise ResourceError(f"clone slice of arity {k} exceeds the arity cap {max_arity}")
    key = ("clone", k)
    cached = alg._cache.get(key)
    if cached is not None:
        return cached
    sp, _ = generate(alg.size, alg.generation_ops(), projection_rows(alg.size, k),
                     limit=limit, max_work=max_work)
    out = CloneSlice(alg, k, sp)
    alg._cache[key] = out
    return out


# -- identity specifications -------------------------------------------------


@dataclass
class IdentitySpec:
    """Constraints on an unknown k-ary term t.

    ``allowed`` maps an argument tuple to the set of values t may take there;
    ``equal`` lists pairs of argument tuples on which t must agree.
    """

    arity: int
    allowed: dict = field(default_factory=dict)
    equal: list = field(default_factory=list)
    label: str = ""

    def allow(self, point: Sequence[int], values: Iterable[int]) -> "IdentitySpec":
        point = tuple(int(a) for a in point)
        if len(point) != self.arity:
            raise ArgumentError("constraint point has the wrong length")
        vals = frozenset(int(v) for v in values)
        self.allowed[point] = self.allowed.get(point, vals) & vals
        return self

    def same(self, p: Sequence[int], q: Sequence[int]) -> "IdentitySpec":
        p, q = tuple(int(a) for a in p), tuple(int(a) for a in q)
        if p != q:
            self.equal.append((p, q))
        return self

    def points(self) -> list[tuple]:
        pts = dict.fromkeys(self.allowed)
        for p, q in self.equal:
            pts.setdefault(p)
            pts.setdefault(q)
        return list(pts)

    def holds(self, alg: Algebra, table: np.ndarray) -> bool:
        n = alg.size
        for p, vals in self.allowed.items():
            if int(table[tuple_index(p, n)]) not in vals:
                return False
        return all(table[tuple_index(p, n)] == table[tuple_index(q, n)] for p, q in self.equal)

    def _mask(self, points: list[tuple]):
        pos = {p: i for i, p in enumerate(points)}
        allowed = [(pos[p], np.array(sorted(v), dtype=np.uint8)) for p, v in self.allowed.items()]
        equal = [(pos[p], pos[q]) for p, q in self.equal]

        def accept(rows: np.ndarray) -> np.ndarray:
            ok = np.ones(len(rows), dtype=bool)
            for j, vals in allowed:
                ok &= np.isin(rows[:, j], vals)
            for i, j in equal:
                ok &= rows[:, i] == rows[:, j]
            return ok

        return accept


def _pairs(n: int):
    return itertools.product(range(n), repeat=2)


def malcev_spec(n: int) -> IdentitySpec:
    s = IdentitySpec(3, label="Mal'cev")
    for x, y in _pairs(n):
        s.allow((y, x, x), {y}).allow((x, x, y), {y})
    return s


def majority_spec(n: int) -> IdentitySpec:
    s = IdentitySpec(3, label="majority")
    for x, y in _pairs(n):
        s.allow((x, x, y), {x}).allow((x, y, x), {x}).allow((y, x, x), {x})
    return s


def minority_spec(n: int) -> IdentitySpec:
    s = IdentitySpec(3, label="minority")
    for x, y in _pairs(n):
        s.allow((x, x, y), {y}).allow((x, y, x), {y}).allow((y, x, x), {y})
    return s


def cyclic_spec(n: int, k: int) -> IdentitySpec:
    s = IdentitySpec(k, label=f"cyclic/{k}")
    for t in itertools.product(range(n), repeat=k):
        s.same(t, t[1:] + t[:1])
    return s


def wnu_spec(n: int, k: int) -> IdentitySpec:
    """Weak near-unanimity: t(y,x,..,x) = t(x,y,x,..,x) = ... = t(x,..,x,y)."""
    s = IdentitySpec(k, label=f"wnu/{k}")
    for x, y in _pairs(n):
        pts = [tuple(y if i == j else x for i in range(k)) for j in range(k)]
        for q in pts[1:]:
            s.same(pts[0], q)
    return s


def commutative_spec(n: int) -> IdentitySpec:
    s = IdentitySpec(2, label="commutative")
    for x, y in _pairs(n):
        s.same((x, y), (y, x))
    return s


def three_edge_spec(n: int) -> IdentitySpec:
    """e(y,y,x,x) = e(y,x,y,x) = e(x,x,x,y) = x."""
    s = IdentitySpec(4, label="3-edge")
    for x, y in _pairs(n):
        s.allow((y, y, x, x), {x}).allow((y, x, y, x), {x}).allow((x, x, x, y), {x})
    return s


def restricted_clone(alg: Algebra, points: Sequence[tuple], *,
                     limit: int = DEFAULT_LIMIT) -> Subpower:
    """Clo_k evaluated on the given points only, generated completely and cached."""
    points = tuple(tuple(int(v) for v in p) for p in points)
    key = ("restricted", points)
    sp = alg._cache.get(key)
    if sp is None:
        k = len(points[0])
        gens = projection_rows(alg.size, k, np.array(points, dtype=np.uint8))
        sp, _ = generate(alg.size, alg.generation_ops(), gens, limit=limit)
        alg._cache[key] = sp
    return sp


def find_term(alg: Algebra, spec: IdentitySpec, *, max_arity: int = DEFAULT_ARITY_CAP,
              limit: int = DEFAULT_LIMIT, reuse: bool = False) -> Optional[Term]:
    """A term of arity ``spec.arity`` meeting every constraint, or None.

    The answer is exact at that arity: the search covers the image of
    Clo_k on the constrained points. With ``reuse`` the complete restricted
    closure is cached, which pays off when many specs share their points.
    """
    k = spec.arity
    if k > max_arity:
        raise ResourceError(f"term search of arity {k} exceeds the arity cap {max_arity}")
    points = spec.points()
    accept = spec._mask(points)
    if reuse and points and ("clone", k) not in alg._cache:
        sp = restricted_clone(alg, points, limit=limit)
        ok = accept(sp.rows)
        if not ok.any():
            return None
        leaf, node = _term_builder(alg, k)
        return sp.derivation(int(np.argmax(ok)), leaf, node)
    cached = alg._cache.get(("clone", k))
    if cached is not None:
        rows = cached.tables
        if points:
            idx = np.array([tuple_index(p, alg.size) for p in points], dtype=np.int64)
            ok = accept(rows[:, idx])
        else:
            ok = np.ones(len(rows), dtype=bool)
        if not ok.any():
            return None
        return cached.witness(int(np.argmax(ok)))
    if not points:
        return Term.proj(0, k)
    gens = projection_rows(alg.size, k, np.array(points, dtype=np.uint8))
    sp, hit = generate(alg.size, alg.generation_ops(), gens, stop=accept, limit=limit)
    if hit is None:
        return None
    leaf, node = _term_builder(alg, k)
    return sp.derivation(hit, leaf, node)


# -- Taylor ------------------------------------------------------------------


@dataclass
class TaylorCertificate:
    verdict: bool
    subuniverse: Optional[tuple] = None
    blocks: Optional[tuple] = None
    projections: Optional[dict] = None
    cyclic: Optional[Term] = None

    def __bool__(self) -> bool:
        return self.verdict


def _two_block_splits(elems: Sequence[int]):
    first, rest = elems[0], elems[1:]
    for r in range(len(rest)):
        for other in itertools.combinations(rest, r):
            a = (first,) + other
            b = tuple(x for x in rest if x not in other)
            yield a, b


def _projection_on_split(alg: Algebra, elems: Sequence[int], side: np.ndarray) -> Optional[dict]:
    """For each operation a coordinate it follows modulo a two-block split."""
    n = alg.size
    choice = {}
    for op in alg.operations:
        k = op.arity
        cube = op.table.reshape((n,) * k)[np.ix_(*[list(elems)] * k)]
        out = side[cube]
        args = np.indices(out.shape)
        for i in range(k):
            if (out == side[np.asarray(elems)[args[i]]]).all():
                choice[op.name] = i
                break
        else:
            return None
    return choice


def is_taylor(alg: Algebra, *, with_cyclic: bool = False) -> TaylorCertificate:
    """Decide whether some subalgebra has a two-block quotient of projections."""
    from .core import subuniverses

    _require_idempotent(alg)
    cached = alg._cache.get("taylor")
    if cached is not None and (cached.cyclic is not None or not with_cyclic or not cached.verdict):
        return cached
    cert = _taylor_search(alg, subuniverses(alg))
    if cert.verdict and with_cyclic:
        cert.cyclic = find_term(alg, cyclic_spec(alg.size, 3)) if alg.size ** 3 <= 4096 else None
    alg._cache["taylor"] = cert
    return cert


def _taylor_search(alg: Algebra, subs) -> TaylorCertificate:
    for E in subs:
        if len(E) < 2:
            continue
        elems = sorted(E)
        for a, b in _two_block_splits(elems):
            side = np.zeros(alg.size, dtype=np.uint8)
            side[list(b)] = 1
            choice = _projection_on_split(alg, elems, side)
            if choice is not None:
                return TaylorCertificate(False, tuple(elems), (a, b), choice)
    return TaylorCertificate(True)


def verify_non_taylor(alg: Algebra, cert: TaylorCertificate) -> bool:
    """Re-check a non-Taylor witness by direct evaluation."""
    from .core import is_subuniverse

    if cert.verdict:
        return False
    elems = list(cert.subuniverse)
    if not is_subuniverse(alg, elems):
        return False
    side = {x: 0 for x in cert.blocks[0]} | {x: 1 for x in cert.blocks[1]}
    for op in alg.operations:
        i = cert.projections[op.name]
        for args in itertools.product(elems, repeat=op.arity):
            if side[alg.eval(op.name, args)] != side[args[i]]:
                return False
    return True


def _require_idempotent(alg: Algebra) -> None:
    if not alg.idempotent:
        raise PreconditionError("Taylor analyses need an idempotent algebra")


def require_taylor(alg: Algebra) -> None:
    if not is_taylor(alg).verdict:
        raise PreconditionError(f"{alg.name or 'algebra'} is not Taylor")


def ternary_algebra(n: int, table, name: str = "g") -> Algebra:
    return Algebra(n, [OperationTable(name, 3, table)], name)


def _embedded_targets(alg: Algebra, arity: int) -> list[bytes]:
    """Basic operations as tables of the given (larger) arity."""
    n = alg.size
    pts = all_tuples(n, arity).astype(np.int64)
    out = []
    for op in alg.operations:
        idx = np.zeros(len(pts), dtype=np.int64)
        for j in range(op.arity):
            idx = idx * n + pts[:, j]
        out.append(np.ascontiguousarray(op.table[idx]).tobytes())
    return out


def _closure_under(n: int, table: np.ndarray, arity: int, *, stop=None,
                   limit: int = DEFAULT_LIMIT):
    return generate(n, [(3, table)], projection_rows(n, arity), stop=stop, limit=limit)


def clone_contains_basic_ops(alg: Algebra, g_table, *, known_full: Optional[set] = None,
                             limit: int = DEFAULT_LIMIT) -> tuple[bool, Optional[Subpower]]:
    """Whether every basic operation of ``alg`` is a term of (A; g).

    Membership is tested at arity max(3, largest basic arity). ``known_full``
    holds tables (at that arity) already known to generate the whole clone;
    meeting one settles the question early. Returns the verdict and, when the
    closure ran to completion, the generated slice.
    """
    n = alg.size
    g_table = np.asarray(g_table, dtype=np.uint8)
    arity = max(3, alg.max_arity)
    targets = set(_embedded_targets(alg, arity))
    known_full = known_full or set()
    seen: set[bytes] = set()

    def stop(rows: np.ndarray) -> np.ndarray:
        mask = np.zeros(len(rows), dtype=bool)
        for i in range(len(rows)):
            key = rows[i].tobytes()
            if key in known_full:
                mask[i] = True
            elif key in targets:
                seen.add(key)
                if seen == targets:
                    mask[i] = True
        return mask

    sp, hit = _closure_under(n, g_table, arity, stop=stop, limit=limit)
    if hit is not None:
        return True, None
    return False, sp


def generates_clone(alg: Algebra, g: Term) -> bool:
    """True iff every basic operation of alg lies in the clone of g."""
    table = g.table(alg)
    if g.arity != 3:
        return _generates_general(alg, table, g.arity)
    return clone_contains_basic_ops(alg, table)[0]


def _generates_general(alg: Algebra, table: np.ndarray, k: int) -> bool:
    n = alg.size
    for op in alg.operations:
        sp, hit = generate(n, [(k, table)], projection_rows(n, op.arity),
                           stop=lambda rows, t=op.table: (rows == t).all(axis=1))
        if hit is None:
            return False
    return True


def term_equivalent(a: Algebra, b: Algebra) -> bool:
    """Same domain and each algebra's basic operations are terms of the other."""
    if a.size != b.size:
        return False
    for x, y in ((a, b), (b, a)):
        for op in x.operations:
            if op.table not in clone_slice(y, op.arity, max_arity=max(DEFAULT_ARITY_CAP, op.arity)):
                return False
    return True


def is_minimal_taylor(alg: Algebra) -> tuple[bool, Optional[Term]]:
    """Decide minimality among Taylor reducts; the counterexample is ternary.

    Every minimal Taylor clone is generated by one ternary operation, so it
    suffices to ask each Taylor ternary term operation g whether it generates
    all basic operations.
    """
    cached = alg._cache.get("minimal")
    if cached is not None:
        return cached
    require_taylor(alg)
    if alg.size == 1:
        return True, None
    clo3 = clone_slice(alg, 3)
    arity = max(3, alg.max_arity)
    full: set[bytes] = set()
    proper: set[bytes] = set()
    result: tuple[bool, Optional[Term]] = (True, None)
    for i in range(len(clo3)):
        row = clo3.tables[i]
        key = row.tobytes()
        if key in full:
            continue
        if not is_taylor(ternary_algebra(alg.size, row)).verdict:
            continue
        if key in proper:
            result = (False, clo3.witness(i))
            break
        ok, sp = clone_contains_basic_ops(alg, row, known_full=full)
        if ok:
            if arity == 3:
                full.add(key)
            continue
        result = (False, clo3.witness(i))
        break
    alg._cache["minimal"] = result
    return result


def ternary_clone(n: int, table, *, limit: int = DEFAULT_LIMIT) -> frozenset:
    """Clo_3 of (A; g) as a set of table encodings."""
    sp, _ = _closure_under(n, np.asarray(table, dtype=np.uint8), 3, limit=limit)
    return frozenset(sp.index)


def minimal_taylor_reduct(alg: Algebra) -> tuple[Algebra, Term]:
    """A minimal Taylor reduct (A; g) with g ternary, chosen deterministically.

    Among the minimal clones generated by Taylor ternary term operations the
    one whose least generator table is lexicographically smallest wins, and
    that table is returned as g.
    """
    require_taylor(alg)
    clo3 = clone_slice(alg, 3)
    n = alg.size
    taylor = [i for i in range(len(clo3))
              if is_taylor(ternary_algebra(n, clo3.tables[i])).verdict]
    minimal, _ = is_minimal_taylor(alg) if alg.size > 1 else (True, None)
    if minimal:
        best = min(taylor, key=lambda i: tuple(clo3.tables[i]))
    else:
        clones = {i: ternary_clone(n, clo3.tables[i]) for i in taylor}
        gens_of: dict[frozenset, list[int]] = {}
        for i, c in clones.items():
            gens_of.setdefault(c, []).append(i)
        minimal_clones = [c for c in gens_of if not any(d < c for d in gens_of)]
        best = min((min(gens_of[c], key=lambda i: tuple(clo3.tables[i]))
                    for c in minimal_clones), key=lambda i: tuple(clo3.tables[i]))
    g = clo3.witness(best)
    red = ternary_algebra(n, clo3.tables[best], "g")
    red.name = f"{alg.name}:reduct"
    return red, g


# -- unified operation -------------------------------------------------------


def unified_spec(alg: Algebra) -> IdentitySpec:
    """Pointwise constraints expressing the five requirements on a ternary f.

    Edge clauses fix the block of f on {a,b}^3 (semilattice and majority) or
    force f to be Mal'cev modulo theta on E (abelian); absorption clauses ask
    f to witness every 3-absorbing subuniverse and every binary minor of f to
    witness every 2-absorbing one.
    """
    from .absorption import min_taylor_2abs, min_taylor_3abs
    from .core import subuniverses
    from .edges import classify_pair

    n = alg.size
    spec = IdentitySpec(3, label="unified")
    for a, b in itertools.permutations(range(n), 2):
        for w in classify_pair(alg, a, b):
            theta = w.congruence
            blk = {x: set(theta.block(x)) for x in theta.carrier}
            if w.kind == "semilattice":
                for t in itertools.product((a, b), repeat=3):
                    spec.allow(t, blk[b] if b in t else blk[a])
            elif w.kind == "majority":
                for t in itertools.product((a, b), repeat=3):
                    spec.allow(t, blk[a] if t.count(a) >= 2 else blk[b])
            else:
                for x, y in itertools.product(theta.carrier, repeat=2):
                    spec.allow((x, x, y), blk[y]).allow((y, x, x), blk[y])
    for B in subuniverses(alg):
        if len(B) == n:
            continue
        if min_taylor_3abs(alg, B):
            for t in itertools.product(range(n), repeat=3):
                if sum(v in B for v in t) >= 2:
                    spec.allow(t, B)
        if min_taylor_2abs(alg, B):
            for x, y in itertools.product(range(n), repeat=2):
                if x in B or y in B:
                    spec.allow((x, x, y), B).allow((x, y, x), B).allow((y, x, x), B)
    return spec


def cyclic_candidate(alg: Algebra) -> Optional[Term]:
    """f = t for a ternary cyclic term t, when one exists."""
    if alg.size ** 3 > 4096:
        return None
    return find_term(alg, cyclic_spec(alg.size, 3))


def unified_operation(alg: Algebra) -> Term:
    """A ternary term acting uniformly on every edge and absorption.

    A ternary cyclic term (block sizes k = l = m = 1) is tried first. When it
    does not satisfy every clause, Clo_3 is searched for a table that does;
    the search is exact, so failure is reported rather than hidden.
    """
    ok, _ = is_minimal_taylor(alg)
    if not ok:
        raise PreconditionError("unified operations are built for minimal Taylor algebras")
    spec = unified_spec(alg)
    cand = cyclic_candidate(alg)
    if cand is not None and spec.holds(alg, cand.table(alg)):
        return cand
    found = find_term(alg, spec)
    if found is None:
        raise ResourceError("no ternary term operation satisfies all edge and absorption clauses")
    return found
