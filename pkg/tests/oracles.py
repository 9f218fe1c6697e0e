"""Naive reference implementations the library is checked against."""

import itertools

import numpy as np
from hypothesis import strategies as st

from taylorlab.core import Algebra


def apply(alg, op, args):
    n = alg.size
    idx = 0
    for a in args:
        idx = idx * n + a
    return int(op.table[idx])


def naive_sg(alg, m, gens):
    """Fixpoint of applying every operation coordinatewise."""
    cur = {tuple(g) for g in gens}
    while True:
        new = set(cur)
        for op in alg.operations:
            for rows in itertools.product(sorted(cur), repeat=op.arity):
                new.add(tuple(apply(alg, op, [r[i] for r in rows]) for i in range(m)))
        if new == cur:
            return cur
        cur = new


def set_partitions(elems):
    elems = list(elems)
    if not elems:
        yield []
        return
    first, rest = elems[0], elems[1:]
    for p in set_partitions(rest):
        yield [[first]] + p
        for i in range(len(p)):
            yield p[:i] + [[first] + p[i]] + p[i + 1:]


def compatible(alg, blocks, carrier=None):
    label = {x: i for i, b in enumerate(blocks) for x in b}
    carrier = sorted(label) if carrier is None else carrier
    for op in alg.operations:
        for xs in itertools.product(carrier, repeat=op.arity):
            for ys in itertools.product(carrier, repeat=op.arity):
                if all(label[x] == label[y] for x, y in zip(xs, ys)):
                    if label[apply(alg, op, xs)] != label[apply(alg, op, ys)]:
                        return False
    return True


def naive_congruences(alg, carrier=None):
    carrier = list(range(alg.size)) if carrier is None else sorted(carrier)
    return [sorted(sorted(b) for b in p) for p in set_partitions(carrier)
            if compatible(alg, p, carrier)]


def naive_clone(alg, k):
    """Term operations of arity k as tuples of values on A^k."""
    pts = list(itertools.product(range(alg.size), repeat=k))
    projections = [tuple(p[i] for p in pts) for i in range(k)]
    return naive_sg(alg, len(pts), projections)


def naive_invariant(alg, tuples):
    tuples = {tuple(t) for t in tuples}
    if not tuples:
        return True
    m = len(next(iter(tuples)))
    return naive_sg(alg, m, tuples) == tuples


def blocks_of(partition):
    return sorted(sorted(b) for b in partition.blocks)


@st.composite
def idempotent_algebras(draw, sizes=(2, 3), arities=(2, 3)):
    n = draw(st.sampled_from(sizes))
    k = draw(st.sampled_from(arities))
    table = []
    for t in itertools.product(range(n), repeat=k):
        table.append(t[0] if len(set(t)) == 1 else draw(st.integers(0, n - 1)))
    return Algebra(n, [("f", k, table)], "random")


@st.composite
def relations(draw, n, m):
    bits = draw(st.lists(st.booleans(), min_size=n ** m, max_size=n ** m))
    return np.array(bits, dtype=bool)


def unified_failures(alg, f):
    """Edge and absorption requirements a ternary term f fails, checked
    directly on the quotients E/theta and on the absorbing subsets."""
    from taylorlab.absorption import is_n_absorbing
    from taylorlab.core import sub_quotient, subuniverses
    from taylorlab.edges import classify_pair
    from taylorlab.relations import affine_structure

    n = alg.size
    table = f.table(alg).reshape(n, n, n)
    bad = []
    for a, b in itertools.permutations(range(n), 2):
        for w in classify_pair(alg, a, b):
            th = w.congruence
            cls = th.block_of
            if w.kind in ("semilattice", "majority"):
                for t in itertools.product((a, b), repeat=3):
                    if w.kind == "semilattice":
                        want = b if b in t else a
                    else:
                        want = a if t.count(a) >= 2 else b
                    if cls(table[t]) != cls(want):
                        bad.append((w.kind, (a, b), t))
            else:
                Q = sub_quotient(alg, th)
                g = affine_structure(Q)
                reps = [blk[0] for blk in th.blocks]
                for x, y, z in itertools.product(range(Q.size), repeat=3):
                    want = g.add[g.add[x, g.neg[y]], z]
                    if cls(table[reps[x], reps[y], reps[z]]) != want:
                        bad.append(("abelian", (a, b), (x, y, z)))
    for B in subuniverses(alg):
        if len(B) == n:
            continue
        if is_n_absorbing(alg, B, 3) is not None:
            for t in itertools.product(range(n), repeat=3):
                if sum(v in B for v in t) >= 2 and table[t] not in B:
                    bad.append(("3-absorption", sorted(B), t))
        if is_n_absorbing(alg, B, 2) is not None:
            for x, y in itertools.product(range(n), repeat=2):
                if x in B or y in B:
                    for v in (table[x, x, y], table[x, y, x], table[y, x, x]):
                        if v not in B:
                            bad.append(("2-absorption", sorted(B), (x, y)))
    return bad
