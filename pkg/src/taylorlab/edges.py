"""Semilattice, majority and abelian edges.

For a pair (a, b) every proper congruence theta of E = Sg(a, b) is tried as
a witness. Semilattice and majority witnesses are term searches on the six
points of {a, b}^2 and {a, b}^3 with values constrained to theta-blocks; the
abelian test asks whether E/theta is abelian.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .clone import IdentitySpec, find_term, is_minimal_taylor, is_taylor
from .core import (Algebra, Congruence, all_congruences, maximal_congruences, sg_set,
                   sub_quotient)
from .errors import ArgumentError, PreconditionError
from .relations import AbelianGroupStructure, affine_structure, is_abelian
from .terms import Term

KINDS = ("semilattice", "majority", "abelian")


@dataclass
class EdgeWitness:
    pair: tuple
    kind: str
    congruence: Congruence
    term: Optional[Term] = None
    quotient: Optional[AbelianGroupStructure] = None

    @property
    def subuniverse(self) -> tuple:
        return self.congruence.carrier

    def to_dict(self) -> dict:
        out = {"pair": list(self.pair), "type": self.kind,
               "blocks": [list(b) for b in self.congruence.blocks]}
        if self.term is not None:
            out["term"] = str(self.term)
        if self.quotient is not None:
            out["group"] = self.quotient.describe()
        return out


def _semilattice_spec(a: int, b: int, blk: dict) -> IdentitySpec:
    spec = IdentitySpec(2, label="semilattice edge")
    return spec.allow((a, b), blk[b]).allow((b, a), blk[b])


def _majority_spec(a: int, b: int, blk: dict) -> IdentitySpec:
    spec = IdentitySpec(3, label="majority edge")
    for t in itertools.product((a, b), repeat=3):
        if len(set(t)) == 2:
            spec.allow(t, blk[a] if t.count(a) >= 2 else blk[b])
    return spec


def _blocks(theta: Congruence) -> dict:
    return {x: frozenset(theta.block(x)) for x in theta.carrier}


def witnessing_congruences(alg: Algebra, a: int, b: int) -> list[Congruence]:
    """Proper congruences of Sg(a, b); each separates a and b."""
    E = sorted(sg_set(alg, {a, b}))
    return [c for c in all_congruences(alg, E) if not c.is_full()]


def classify_pair(alg: Algebra, a: int, b: int) -> list[EdgeWitness]:
    """Every (type, witnessing congruence) for the pair (a, b)."""
    if a == b:
        raise ArgumentError("an edge needs two distinct elements")
    if not (0 <= a < alg.size and 0 <= b < alg.size):
        raise ArgumentError("pair outside the domain")
    key = ("edges", a, b)
    cached = alg._cache.get(key)
    if cached is not None:
        return cached
    out = []
    for theta in witnessing_congruences(alg, a, b):
        blk = _blocks(theta)
        t = find_term(alg, _semilattice_spec(a, b, blk), reuse=True)
        if t is not None:
            out.append(EdgeWitness((a, b), "semilattice", theta, t))
        t = find_term(alg, _majority_spec(a, b, blk), reuse=True)
        if t is not None:
            out.append(EdgeWitness((a, b), "majority", theta, t))
        Q = sub_quotient(alg, theta)
        if is_abelian(Q):
            group = None
            if Q.idempotent and is_taylor(Q).verdict:
                group = affine_structure(Q)
            out.append(EdgeWitness((a, b), "abelian", theta, None, group))
    alg._cache[key] = out
    return out


def verify_witness(alg: Algebra, w: EdgeWitness) -> bool:
    a, b = w.pair
    blk = _blocks(w.congruence)
    if w.kind == "abelian":
        return is_abelian(sub_quotient(alg, w.congruence))
    spec = _semilattice_spec(a, b, blk) if w.kind == "semilattice" else _majority_spec(a, b, blk)
    return w.term is not None and spec.holds(alg, w.term.table(alg))


def _minimal_for(alg: Algebra, a: int, b: int, theta: Congruence) -> bool:
    E = sg_set(alg, {a, b})
    return all(sg_set(alg, {x, y}) == E
               for x in theta.block(a) for y in theta.block(b))


def is_minimal_edge(alg: Algebra, w: EdgeWitness) -> bool:
    """Some maximal congruence witnessing an edge of this type keeps every
    pair of representatives generating Sg(a, b)."""
    a, b = w.pair
    E = sorted(sg_set(alg, {a, b}))
    maximal = set(maximal_congruences(alg, E))
    for v in classify_pair(alg, a, b):
        if v.kind == w.kind and v.congruence in maximal and _minimal_for(alg, a, b, v.congruence):
            return True
    return False


def edge_types(alg: Algebra, a: int, b: int, *, minimal_only: bool = False) -> list[str]:
    kinds = []
    for w in classify_pair(alg, a, b):
        if w.kind in kinds:
            continue
        if minimal_only and not is_minimal_edge(alg, w):
            continue
        kinds.append(w.kind)
    return kinds


# -- graph -------------------------------------------------------------------------


@dataclass
class EdgeGraph:
    size: int
    arcs: list = field(default_factory=list)
    minimal_only: bool = False

    def neighbours(self) -> dict:
        adj = {x: set() for x in range(self.size)}
        for a, b, _, _ in self.arcs:
            adj[a].add(b)
            adj[b].add(a)
        return adj

    def non_edges(self) -> list[tuple]:
        linked = {(a, b) for a, b, _, _ in self.arcs}
        return [(a, b) for a, b in itertools.combinations(range(self.size), 2)
                if (a, b) not in linked and (b, a) not in linked]

    def to_dict(self) -> dict:
        return {"size": self.size, "minimalOnly": self.minimal_only,
                "arcs": [{"from": a, "to": b, "type": k, "minimal": m}
                         for a, b, k, m in self.arcs],
                "nonEdges": [list(p) for p in self.non_edges()]}

    def to_dot(self, labels: Optional[list[str]] = None) -> str:
        style = {"semilattice": "solid", "majority": "dashed", "abelian": "dotted"}
        name = (lambda x: labels[x]) if labels else str
        lines = ["digraph edges {"]
        for x in range(self.size):
            lines.append(f'  "{name(x)}";')
        for a, b, k, m in self.arcs:
            width = ", penwidth=2" if m else ""
            lines.append(f'  "{name(a)}" -> "{name(b)}" [label="{k}", style={style[k]}{width}];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def edge_graph(alg: Algebra, minimal_only: bool = False) -> EdgeGraph:
    g = EdgeGraph(alg.size, minimal_only=minimal_only)
    for a, b in itertools.permutations(range(alg.size), 2):
        seen = set()
        for w in classify_pair(alg, a, b):
            if w.kind in seen:
                continue
            m = is_minimal_edge(alg, w)
            if minimal_only and not m:
                continue
            seen.add(w.kind)
            g.arcs.append((a, b, w.kind, m))
    g.arcs.sort(key=lambda arc: (arc[0], arc[1], KINDS.index(arc[2])))
    return g


def check_connectivity(g: EdgeGraph) -> bool:
    """Undirected reachability of every vertex from vertex 0."""
    if g.size <= 1:
        return True
    adj = g.neighbours()
    seen = {0}
    todo = deque([0])
    while todo:
        x = todo.popleft()
        for y in adj[x]:
            if y not in seen:
                seen.add(y)
                todo.append(y)
    return len(seen) == g.size


# -- stability and s-edges ----------------------------------------------------------


def stable_under(alg: Algebra, B: Iterable[int], types: Iterable[str]) -> bool:
    """For every edge (b, a) of the given types and each of its witnessing
    congruences theta with b/theta meeting B, every theta-block meets B."""
    B = frozenset(B)
    if not B:
        raise ArgumentError("the subset must be nonempty")
    types = set(types)
    bad = types - set(KINDS)
    if bad:
        raise ArgumentError(f"unknown edge types {sorted(bad)}")
    for b, a in itertools.permutations(range(alg.size), 2):
        for w in classify_pair(alg, b, a):
            if w.kind not in types:
                continue
            theta = w.congruence
            if not set(theta.block(b)) & B:
                continue
            if any(not set(blk) & B for blk in theta.blocks):
                return False
    return True


def _require_minimal_taylor(alg: Algebra) -> None:
    if not alg.idempotent or not is_taylor(alg).verdict or not is_minimal_taylor(alg)[0]:
        raise PreconditionError("s-edges are defined here for minimal Taylor algebras")


def s_edges(alg: Algebra) -> list[tuple]:
    """Minimal semilattice edges."""
    out = []
    for a, b in itertools.permutations(range(alg.size), 2):
        if any(w.kind == "semilattice" and is_minimal_edge(alg, w) for w in classify_pair(alg, a, b)):
            out.append((a, b))
    return out


def s_closed(alg: Algebra, B: Iterable[int]) -> bool:
    """a is in B whenever (b, a) is an s-edge with b in B."""
    _require_minimal_taylor(alg)
    B = frozenset(B)
    return all(a in B for b, a in s_edges(alg) if b in B)


def s_walk(alg: Algebra, a: int, B: Iterable[int], within: Optional[Iterable[int]] = None
           ) -> Optional[list[int]]:
    """A shortest directed s-walk from a into B, optionally inside a set."""
    _require_minimal_taylor(alg)
    B = frozenset(B)
    allowed = frozenset(range(alg.size)) if within is None else frozenset(within)
    if a not in allowed:
        return None
    succ: dict[int, list[int]] = {}
    for x, y in s_edges(alg):
        if x in allowed and y in allowed:
            succ.setdefault(x, []).append(y)
    prev = {a: None}
    todo = deque([a])
    while todo:
        x = todo.popleft()
        if x in B:
            path = []
            while x is not None:
                path.append(x)
                x = prev[x]
            return path[::-1]
        for y in succ.get(x, []):
            if y not in prev:
                prev[y] = x
                todo.append(y)
    return None
