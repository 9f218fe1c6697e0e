"""Constructors for the small algebras used as test corpus and fixtures."""

from __future__ import annotations

import itertools

from .core import Algebra, operation_from_function


def _alg(name: str, n: int, *ops) -> Algebra:
    return Algebra(n, [operation_from_function(o[0], n, o[1], o[2]) for o in ops], name)


def semilattice_join() -> Algebra:
    return _alg("join", 2, ("j", 2, max))


def semilattice_meet() -> Algebra:
    return _alg("meet", 2, ("m", 2, min))


def majority2() -> Algebra:
    return _alg("majority", 2, ("maj", 3, lambda x, y, z: int(x + y + z >= 2)))


def minority2() -> Algebra:
    return _alg("minority", 2, ("p", 3, lambda x, y, z: (x + y + z) % 2))


def boolean_four() -> list[Algebra]:
    return [semilattice_join(), semilattice_meet(), majority2(), minority2()]


def projection_algebra(n: int = 2) -> Algebra:
    return _alg("projection", n, ("f", 2, lambda x, y: x))


def affine_zp(p: int = 3) -> Algebra:
    return _alg(f"Z{p}", p, ("p", 3, lambda x, y, z: (x - y + z) % p))


def rock_paper_scissors() -> Algebra:
    """0 = rock, 1 = paper, 2 = scissors; the operation returns the winner."""
    beats = {(1, 0), (0, 2), (2, 1)}
    return _alg("rps", 3, ("w", 2, lambda x, y: x if x == y or (x, y) in beats else y))


def _majority_with(default) -> callable:
    def m(x, y, z):
        if x == y or x == z:
            return x
        if y == z:
            return y
        return default(x, y, z)
    return m


def majority_first() -> Algebra:
    """Majority on {0,1,2} returning the first argument on distinct triples."""
    return _alg("maj-first", 3, ("m", 3, _majority_with(lambda x, y, z: x)))


def majority_two() -> Algebra:
    """Majority on {0,1,2} returning 2 on distinct triples."""
    return _alg("maj-two", 3, ("m", 3, _majority_with(lambda x, y, z: 2)))


def no_ez_majority() -> Algebra:
    """Symmetric g on Z4; majority edges across the classes {0,2}, {1,3}."""

    def g(x, y, z):
        args = (x, y, z)
        if len(set(args)) == 3:
            missing = ({0, 1, 2, 3} - set(args)).pop()
            return (missing - 1) % 4
        if x == y == z:
            return x
        a = x if x in (y, z) else y
        c = next(v for v in args if v != a)
        return a if (c - a) % 4 == 1 else (a + 2) % 4

    return _alg("noEZmajority", 4, ("g", 3, g))


def no_ez_abelian() -> Algebra:
    """Mal'cev p on {a,b,c,d} = {0,1,2,3} built from two group structures.

    x +_a z is addition in Z4 with zero a; x +_b z is the Klein group with
    zero b. The values p(x, c, z) and p(x, d, z) follow by requiring that p
    commutes with the transpositions (a c) and (b d).
    """
    plus_a = [[(x + z) % 4 for z in range(4)] for x in range(4)]
    plus_b = [[1, 0, 3, 2], [0, 1, 2, 3], [3, 2, 1, 0], [2, 3, 0, 1]]
    sigma = [2, 1, 0, 3]
    tau = [0, 3, 2, 1]

    def p(x, y, z):
        if y == 0:
            return plus_a[x][z]
        if y == 1:
            return plus_b[x][z]
        if y == 2:
            return sigma[plus_a[sigma[x]][sigma[z]]]
        return tau[plus_b[tau[x]][tau[z]]]

    return _alg("noEZabelian", 4, ("p", 3, p))


def star_algebra() -> Algebra:
    """Binary operation on {0,1,2,*} with * encoded as 3."""
    rows = [[0, 2, 1, 3], [2, 1, 0, 2], [1, 0, 2, 1], [3, 2, 1, 3]]
    return _alg("star", 4, ("f", 2, lambda x, y: rows[x][y]))


def join_with_minority() -> Algebra:
    return _alg("join+minority", 2, ("j", 2, max),
                ("p", 3, lambda x, y, z: (x + y + z) % 2))


def x_or_y_and_z() -> Algebra:
    return _alg("x|(y&z)", 2, ("f", 3, lambda x, y, z: x | (y & z)))


def one_element() -> Algebra:
    return _alg("trivial", 1, ("f", 2, lambda x, y: 0))


def corpus() -> list[Algebra]:
    """The minimal Taylor algebras every structural check runs over."""
    return boolean_four() + [
        rock_paper_scissors(), affine_zp(3), majority_first(), majority_two(),
        no_ez_majority(), no_ez_abelian(), star_algebra(),
    ]


def subalgebras_and_quotients(alg: Algebra) -> list[Algebra]:
    """alg itself, its proper subalgebras with at least two elements, and its
    nontrivial proper quotients, without repetitions."""
    from .core import all_congruences, quotient, subuniverses

    out = [alg]
    seen = {alg.key}
    for s in subuniverses(alg):
        if 1 < len(s) < alg.size:
            sub = alg.subalgebra(s, f"{alg.name}|{{{','.join(map(str, sorted(s)))}}}")
            if sub.key not in seen:
                seen.add(sub.key)
                out.append(sub)
    for c in all_congruences(alg):
        if not c.is_equality() and not c.is_full():
            q = quotient(alg, c, f"{alg.name}/{c!r}")
            if q.key not in seen:
                seen.add(q.key)
                out.append(q)
    return out


def idempotent_ternary_tables(n: int):
    """All idempotent ternary tables on {0..n-1} in lexicographic order."""
    diag = {tuple_index_3(x, x, x, n) for x in range(n)}
    free = [i for i in range(n ** 3) if i not in diag]
    for values in itertools.product(range(n), repeat=len(free)):
        t = [0] * n ** 3
        for x in range(n):
            t[tuple_index_3(x, x, x, n)] = x
        for i, v in zip(free, values):
            t[i] = v
        yield t


def tuple_index_3(x: int, y: int, z: int, n: int) -> int:
    return (x * n + y) * n + z
