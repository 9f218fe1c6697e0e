"""Relations, primitive positive definitions and relational invariants.

Binary relations are treated as subsets of A x A with the composition
R + S = {(a,c) : (a,b) in R, (b,c) in S for some b} and the inverse -R.
"""

from __future__ import annotations

import itertools
import math
import re
import string
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

import numpy as np

from .closure import generate
from .core import (Algebra, Relation, all_tuples, congruence_generated, sg_set,
                   subuniverses, tuple_index)
from .errors import ArgumentError, PreconditionError, ResourceError

# -- basic relational operations ------------------------------------------------


def invariant(alg: Algebra, R: Relation) -> bool:
    """Whether every basic operation maps tuples of R coordinatewise into R."""
    if R.size != alg.size:
        raise ArgumentError("relation and algebra have different domains")
    rows = R.rows()
    if len(rows) == 0:
        return True
    inside = R.members
    n = alg.size

    def outside(new_rows: np.ndarray) -> np.ndarray:
        idx = np.zeros(len(new_rows), dtype=np.int64)
        for j in range(new_rows.shape[1]):
            idx = idx * n + new_rows[:, j]
        return ~inside[idx]

    _, hit = generate(n, alg.generation_ops(), rows, stop=outside)
    return hit is None


def _check_binary(*rels: Relation) -> None:
    for R in rels:
        if R.arity != 2:
            raise ArgumentError("operation defined for binary relations only")
    if len({R.size for R in rels}) > 1:
        raise ArgumentError("relations live on different domains")


def compose(R: Relation, S: Relation) -> Relation:
    _check_binary(R, S)
    m = R.cube().astype(np.int64) @ S.cube().astype(np.int64)
    return Relation(R.size, 2, m > 0)


def inverse(R: Relation) -> Relation:
    _check_binary(R)
    return Relation(R.size, 2, R.cube().T)


def left_center(R: Relation) -> frozenset:
    """{a : a + R is the whole domain}."""
    _check_binary(R)
    return frozenset(int(a) for a in np.flatnonzero(R.cube().all(axis=1)))


def right_center(R: Relation) -> frozenset:
    _check_binary(R)
    return frozenset(int(b) for b in np.flatnonzero(R.cube().all(axis=0)))


def projection(R: Relation, coords: Sequence[int]) -> Relation:
    coords = list(coords)
    other = tuple(i for i in range(R.arity) if i not in coords)
    cube = R.cube().any(axis=other) if other else R.cube()
    # any() keeps the remaining axes in increasing order; reorder as asked
    order = sorted(coords)
    cube = np.transpose(cube, [order.index(c) for c in coords])
    return Relation(R.size, len(coords), cube)


def image(R: Relation, subset) -> frozenset:
    """subset + R for a binary R."""
    _check_binary(R)
    rows = R.cube()[sorted(subset)]
    return frozenset(int(b) for b in np.flatnonzero(rows.any(axis=0)))


def is_subdirect(R: Relation) -> bool:
    return all(projection(R, [i]).is_full() for i in range(R.arity))


def is_proper(R: Relation) -> bool:
    return not R.is_full()


def is_symmetric(R: Relation) -> bool:
    return R == inverse(R)


def is_transitive(R: Relation) -> bool:
    return compose(R, R) <= R


def is_central(R: Relation) -> bool:
    return bool(left_center(R)) and bool(right_center(R))


def is_linked(R: Relation) -> bool:
    """Connectedness of R as a bipartite graph between its two projections."""
    _check_binary(R)
    left = projection(R, [0]).members
    if not left.any():
        return False
    step = compose(R, inverse(R)).cube()
    reach = np.eye(R.size, dtype=bool) & left[:, None]
    while True:
        nxt = (reach.astype(np.int64) @ step.astype(np.int64)) > 0
        nxt |= reach
        if (nxt == reach).all():
            break
        reach = nxt
    block = np.outer(left, left)
    return bool((reach == block).all())


def _is_bijection_graph(P: Relation) -> bool:
    cube = P.cube()
    rows = cube.sum(axis=1)
    cols = cube.sum(axis=0)
    return bool(((rows == 0) | (rows == 1)).all() and ((cols == 0) | (cols == 1)).all())


def is_irredundant(R: Relation) -> bool:
    """No two coordinates whose projection is the graph of a bijection."""
    if R.is_empty():
        return True
    for i, j in itertools.combinations(range(R.arity), 2):
        if _is_bijection_graph(projection(R, [i, j])):
            return False
    return True


# -- primitive positive formulas ------------------------------------------------


@dataclass
class PPFormula:
    free: list
    bound: list
    atoms: list = field(default_factory=list)

    def __str__(self) -> str:
        def arg(a):
            return str(a[1])
        parts = []
        for at in self.atoms:
            if at[0] == "rel":
                parts.append(f"{at[1]}({','.join(arg(a) for a in at[2])})")
            else:
                parts.append(f"{arg(at[1])}={arg(at[2])}")
        body = " & ".join(parts)
        return f"E {' '.join(self.bound)}: {body}" if self.bound else body


_PP_TOKEN = re.compile(r"\s*(?:(?P<num>\d+)|(?P<name>[A-Za-z_][A-Za-z_0-9']*)|(?P<sym>[():,&=]))")


def parse_pp(text: str, free: Optional[Sequence[str]] = None) -> PPFormula:
    """Parse ``["E" var+ ":"] atom ("&" atom)*``.

    Free variables are listed in order of first appearance unless ``free``
    fixes the order.
    """
    tokens = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _PP_TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ArgumentError(f"unexpected character in formula at {pos}: {text[pos:pos + 10]!r}")
        pos = m.end()
        if m.group("num") is not None:
            tokens.append(("num", int(m.group("num"))))
        elif m.group("name") is not None:
            tokens.append(("name", m.group("name")))
        else:
            tokens.append(("sym", m.group("sym")))
    tokens = [t for t in tokens if t[1] != ""]
    i = 0
    bound: list[str] = []
    if tokens and tokens[0] == ("name", "E"):
        i = 1
        while i < len(tokens) and tokens[i][0] == "name":
            bound.append(tokens[i][1])
            i += 1
        if i >= len(tokens) or tokens[i] != ("sym", ":"):
            raise ArgumentError("expected ':' after the quantified variables")
        i += 1
        if not bound:
            raise ArgumentError("'E' needs at least one variable")

    def term(i):
        if i >= len(tokens):
            raise ArgumentError("formula ends where a term is expected")
        kind, val = tokens[i]
        if kind == "num":
            return ("const", val), i + 1
        if kind == "name":
            return ("var", val), i + 1
        raise ArgumentError(f"unexpected {val!r} where a term is expected")

    atoms = []
    while True:
        if i >= len(tokens):
            raise ArgumentError("formula ends where an atom is expected")
        if (tokens[i][0] == "name" and i + 1 < len(tokens) and tokens[i + 1] == ("sym", "(")):
            name = tokens[i][1]
            i += 2
            args = []
            while True:
                a, i = term(i)
                args.append(a)
                if i < len(tokens) and tokens[i] == ("sym", ","):
                    i += 1
                    continue
                if i < len(tokens) and tokens[i] == ("sym", ")"):
                    i += 1
                    break
                raise ArgumentError(f"expected ',' or ')' in atom {name}")
            atoms.append(("rel", name, args))
        else:
            a, i = term(i)
            if i >= len(tokens) or tokens[i] != ("sym", "="):
                raise ArgumentError("expected '=' in an equality atom")
            b, i = term(i + 1)
            atoms.append(("eq", a, b))
        if i == len(tokens):
            break
        if tokens[i] != ("sym", "&"):
            raise ArgumentError(f"expected '&' between atoms, got {tokens[i][1]!r}")
        i += 1

    seen: list[str] = []
    for at in atoms:
        args = at[2] if at[0] == "rel" else [at[1], at[2]]
        for a in args:
            if a[0] == "var" and a[1] not in seen:
                seen.append(a[1])
    for b in bound:
        if b in seen:
            continue
    natural_free = [v for v in seen if v not in bound]
    if free is None:
        free = natural_free
    else:
        free = list(free)
        missing = [v for v in natural_free if v not in free]
        if missing:
            raise ArgumentError(f"variables {missing} are neither free nor bound")
        if set(free) & set(bound):
            raise ArgumentError("a variable cannot be both free and bound")
    return PPFormula(list(free), bound, atoms)


def pp_eval(env: Mapping[str, Relation], formula, size: Optional[int] = None,
            free: Optional[Sequence[str]] = None) -> Relation:
    """The relation defined by a pp-formula over named relations.

    Atoms are joined with a single einsum contraction and projected onto the
    free variables; repeated variables and constants are handled by taking
    diagonals and slices of the atom tensors.
    """
    if isinstance(formula, str):
        formula = parse_pp(formula, free)
    if size is None:
        sizes = {R.size for R in env.values()}
        if len(sizes) != 1:
            raise ArgumentError("cannot infer the domain size")
        size = sizes.pop()
    n = size
    variables = list(dict.fromkeys(list(formula.free) + list(formula.bound)))
    for at in formula.atoms:
        args = at[2] if at[0] == "rel" else [at[1], at[2]]
        for a in args:
            if a[0] == "var" and a[1] not in variables:
                raise ArgumentError(f"variable {a[1]} is neither free nor bound")
            if a[0] == "const" and not 0 <= a[1] < n:
                raise ArgumentError(f"constant {a[1]} outside the domain")
    if len(variables) > 52:
        raise ResourceError("too many variables in formula")
    letter = dict(zip(variables, string.ascii_letters))
    operands: list = []
    subscripts: list[str] = []
    false = False
    for at in formula.atoms:
        if at[0] == "rel":
            name, args = at[1], at[2]
            if name not in env:
                raise ArgumentError(f"relation {name!r} is not bound")
            R = env[name]
            if R.size != n:
                raise ArgumentError(f"relation {name!r} has domain size {R.size}")
            if R.arity != len(args):
                raise ArgumentError(f"relation {name!r} has arity {R.arity}, used with {len(args)}")
            cube = R.cube()
            index = []
            for a in args:
                index.append(a[1] if a[0] == "const" else slice(None))
            cube = cube[tuple(index)]
            sub = "".join(letter[a[1]] for a in args if a[0] == "var")
            if np.ndim(cube) == 0:
                false |= not bool(cube)
                continue
            # einsum rejects repeated output letters, but repeated inputs are diagonals
            operands.append(cube.astype(np.int64))
            subscripts.append(sub)
        else:
            a, b = at[1], at[2]
            if a[0] == "const" and b[0] == "const":
                false |= a[1] != b[1]
            elif a[0] == "const" or b[0] == "const":
                c, v = (a, b) if a[0] == "const" else (b, a)
                vec = np.zeros(n, dtype=np.int64)
                vec[c[1]] = 1
                operands.append(vec)
                subscripts.append(letter[v[1]])
            elif a[1] == b[1]:
                continue
            else:
                operands.append(np.eye(n, dtype=np.int64))
                subscripts.append(letter[a[1]] + letter[b[1]])
    used = set("".join(subscripts))
    for v in variables:
        if letter[v] not in used:
            operands.append(np.ones(n, dtype=np.int64))
            subscripts.append(letter[v])
    out = "".join(letter[v] for v in formula.free)
    m = len(formula.free)
    if false:
        return Relation.empty(n, m)
    if not operands:
        return Relation.full(n, m)
    # clip between contractions so counts stay small
    operands = [np.minimum(o, 1) for o in operands]
    expr = ",".join(subscripts) + "->" + out
    result = np.einsum(expr, *operands, optimize=True) > 0
    return Relation(n, m, np.asarray(result).reshape((n,) * m) if m else result)


# -- centralization -------------------------------------------------------------


def _describe_failures(alg: Algebra, R: Relation) -> list[str]:
    bad = []
    if R.arity != 2:
        return ["binary"]
    if not invariant(alg, R):
        bad.append("invariant")
    if not is_subdirect(R):
        bad.append("subdirect")
    if not is_linked(R):
        bad.append("linked")
    if not is_proper(R):
        bad.append("proper")
    return bad


def _check_central_output(alg: Algebra, R: Relation) -> Relation:
    ok = (invariant(alg, R) and is_subdirect(R) and is_proper(R) and is_central(R)
          and (is_symmetric(R) or is_transitive(R)))
    if not ok:
        raise RuntimeError("centralization produced a relation violating its contract")
    return R


def _sum_power(Q: Relation, k: int) -> Relation:
    out = Q
    for _ in range(k - 1):
        out = pp_eval({"P": out, "Q": Q}, "E z: P(x,z) & Q(z,y)", free=["x", "y"])
    return out


def _linked_to_central(R: Relation) -> Relation:
    """Symmetric central relation pp-defined from a linked, subdirect, proper R
    that is not left central, via common-neighbour relations S_D."""
    n = R.size
    Q = pp_eval({"R": R}, "E a: R(a,x) & R(a,y)", free=["x", "y"])
    if not Q.is_full():
        powers = [Q]
        while not powers[-1].is_full():
            powers.append(_sum_power(Q, len(powers) + 1))
        R = powers[-2]
        if left_center(R):
            return R
    env = {"R": R}

    def S(D) -> Relation:
        body = ["R(a,x)", "R(a,y)"] + [f"R(a,{c})" for c in D]
        return pp_eval(env, "E a: " + " & ".join(body), size=n, free=["x", "y"])

    D: list[int] = []
    for c in range(n):
        if S(D + [c]).is_full():
            D.append(c)
    e = next(c for c in range(n) if c not in D)
    return S(D + [e])


def centralize(alg: Algebra, R: Relation) -> Relation:
    """A subdirect, proper, central relation on A that is symmetric or
    transitive, pp-defined from a linked, subdirect, proper invariant R."""
    bad = _describe_failures(alg, R)
    if bad:
        raise ArgumentError("centralize needs a relation that is " + ", ".join(bad))
    n = alg.size
    cur = R
    for _ in range(n + 1):
        if not left_center(cur):
            return _check_central_output(alg, _linked_to_central(cur))
        if not right_center(cur):
            return _check_central_output(alg, _linked_to_central(inverse(cur)))
        tower = [cur]
        while True:
            nxt = pp_eval({"R": tower[-1]}, "E z: R(x,z) & R(z,y)", free=["x", "y"])
            if nxt == tower[-1]:
                break
            tower.append(nxt)
        top = tower[-1]
        if not top.is_full():
            return _check_central_output(alg, top)
        S = tower[-2]
        B = right_center(S)
        if image(S, B) == frozenset(range(n)):
            S1 = pp_eval({"S": S}, "S(x,y) & S(y,x)", free=["x", "y"])
            if is_central(S1):
                return _check_central_output(alg, S1)
            return _check_central_output(alg, _linked_to_central(S1))
        restart = None
        prev = Relation.full(n, 2)
        for j in range(1, n + 1):
            body = ["S(x,z)", "S(z,y)"] + [f"S({a},z)" for a in range(j)]
            T = pp_eval({"S": S}, "E z: " + " & ".join(body), size=n, free=["x", "y"])
            if prev.is_full() and not T.is_full():
                restart = T
                break
            prev = T
        if restart is None:
            raise RuntimeError("no T_j found; the relation tower is inconsistent")
        cur = restart
    raise RuntimeError("centralization did not terminate")


# -- strongly functional relations and the trichotomy ----------------------------


def is_strongly_functional(R: Relation) -> bool:
    """Ternary, full binary projections, any two coordinates fix the third."""
    if R.arity != 3:
        raise ArgumentError("strong functionality is defined for ternary relations")
    n = R.size
    if len(R) != n * n:
        return False
    return all(projection(R, list(c)).is_full() for c in itertools.combinations(range(3), 2))


def _power_cached(alg: Algebra, m: int) -> Algebra:
    key = ("power", m)
    P = alg._cache.get(key)
    if P is None:
        P = alg.power(m)
        alg._cache[key] = P
    return P


def binary_subpowers(alg: Algebra) -> list[Relation]:
    """Every nonempty subuniverse of A^2 as a relation."""
    key = "binary_subpowers"
    cached = alg._cache.get(key)
    if cached is None:
        P = _power_cached(alg, 2)
        n = alg.size
        cached = []
        for s in subuniverses(P):
            bits = np.zeros(n * n, dtype=bool)
            bits[list(s)] = True
            cached.append(Relation(n, 2, bits))
        alg._cache[key] = cached
    return cached


def scan_binary_witnesses(alg: Algebra, *, cap: int = 5, heuristic: bool = False):
    """Proper irredundant subdirect binary subpowers.

    Returns (relations, complete). Up to ``cap`` elements every subuniverse of
    A^2 is enumerated; beyond it only ``heuristic`` mode is allowed, which
    looks at subpowers generated by at most three pairs.
    """
    n = alg.size
    good = lambda R: is_proper(R) and is_subdirect(R) and is_irredundant(R)
    if n <= cap and n * n <= 255:
        found = [R for R in binary_subpowers(alg) if good(R)]
        # reflexive witnesses first: they include the order relations
        found.sort(key=lambda R: not all((a, a) in R for a in range(n)))
        return found, True
    if not heuristic:
        raise ResourceError(
            f"binary subpower scan is exhaustive only up to size {cap}; "
            "use the generator-bounded heuristic mode")
    pairs = list(itertools.product(range(n), repeat=2))
    found = {}
    from .core import sg
    for r in (1, 2, 3):
        for gens in itertools.combinations(pairs, r):
            R = sg(alg, 2, gens)
            if good(R):
                found.setdefault(R, None)
    return list(found), False


def find_binary_witness(alg: Algebra, *, cap: int = 5) -> Optional[Relation]:
    found, _ = scan_binary_witnesses(alg, cap=cap)
    return found[0] if found else None


def _functional(S: set, n: int) -> bool:
    for i, j in ((0, 1), (0, 2), (1, 2)):
        seen = {}
        for t in S:
            key = (t[i], t[j])
            if seen.setdefault(key, t) != t:
                return False
    return True


def find_strongly_functional(alg: Algebra, *, cap: int = 6) -> Optional[Relation]:
    """An invariant strongly functional ternary relation, or None.

    Such a relation is the graph of a quasigroup; Latin squares are filled
    cell by cell and each partial square is replaced by the subpower it
    generates, pruning as soon as determination fails.
    """
    n = alg.size
    if n > cap:
        raise ResourceError(f"strongly functional search is capped at size {cap}")
    if n == 1:
        R = Relation.full(1, 3)
        return R
    P = _power_cached(alg, 3)
    decode = [tuple(int(v) for v in t) for t in all_tuples(n, 3)]

    def close(S: frozenset) -> frozenset:
        return sg_set(P, [tuple_index(t, n) for t in S]) if S else frozenset()

    def search(S: set) -> Optional[set]:
        cells = {(t[0], t[1]) for t in S}
        todo = next(((x, y) for x in range(n) for y in range(n) if (x, y) not in cells), None)
        if todo is None:
            return S
        x, y = todo
        for z in range(n):
            cand = {decode[i] for i in close(frozenset(S | {(x, y, z)}))}
            if len(cand) <= n * n and _functional(cand, n):
                got = search(cand)
                if got is not None:
                    return got
        return None

    found = search(set())
    if found is None:
        return None
    return Relation.from_tuples(n, 3, found)


def subdirect_trichotomy(alg: Algebra) -> tuple[int, Optional[Relation]]:
    """Case 2 with a binary witness, case 3 with a strongly functional one,
    or case 1 when neither exists."""
    R = find_binary_witness(alg)
    if R is not None:
        return 2, R
    T = find_strongly_functional(alg)
    if T is not None:
        return 3, T
    return 1, None


def reflexive_irredundant_witness(alg: Algebra, arity: int) -> Optional[Relation]:
    """A proper reflexive irredundant subpower of the given arity (2 or 3)."""
    n = alg.size
    if n ** arity > 255:
        raise ResourceError("reflexive scan needs an explicit power table")
    P = _power_cached(alg, arity)
    diag = frozenset(tuple_index((a,) * arity, n) for a in range(n))
    start = sg_set(P, diag)
    found = {start}
    frontier = [start]
    total = n ** arity

    def test(s) -> Optional[Relation]:
        if len(s) == total:
            return None
        bits = np.zeros(total, dtype=bool)
        bits[list(s)] = True
        R = Relation(n, arity, bits)
        return R if is_irredundant(R) else None

    hit = test(start)
    if hit is not None:
        return hit
    while frontier:
        nxt = []
        for s in frontier:
            for x in range(total):
                if x in s:
                    continue
                t = sg_set(P, s | {x})
                if t not in found:
                    found.add(t)
                    hit = test(t)
                    if hit is not None:
                        return hit
                    nxt.append(t)
        frontier = nxt
    return None


# -- abelianness and affine structure -------------------------------------------


def is_abelian(alg: Algebra) -> bool:
    """The diagonal is a block of the congruence of A^2 it generates."""
    n = alg.size
    if n == 1:
        return True
    P = _power_cached(alg, 2)
    diag = [a * n + a for a in range(n)]
    theta = congruence_generated(P, [(diag[0], d) for d in diag[1:]])
    return set(theta.block(diag[0])) == set(diag)


@dataclass
class AbelianGroupStructure:
    zero: int
    add: np.ndarray
    neg: np.ndarray
    decomposition: list
    coefficients: dict

    @property
    def order(self) -> int:
        return len(self.neg)

    def describe(self) -> str:
        parts = [f"Z/{p ** k}" for p, k in self.decomposition]
        return " x ".join(parts) if parts else "trivial"


def _group_decomposition(add: np.ndarray, zero: int) -> list[tuple[int, int]]:
    n = add.shape[0]

    def mult(c: int, x: int) -> int:
        acc = zero
        for _ in range(c):
            acc = int(add[acc, x])
        return acc

    out = []
    m = n
    primes = []
    p = 2
    while m > 1:
        if m % p == 0:
            primes.append(p)
            while m % p == 0:
                m //= p
        p += 1
    for p in primes:
        e = 0
        while n % p ** (e + 1) == 0:
            e += 1
        counts = [1]
        for j in range(1, e + 1):
            counts.append(sum(1 for x in range(n) if mult(p ** j, x) == zero))
        # number of cyclic factors of order at least p^j
        at_least = [round(math.log(counts[j] / counts[j - 1], p)) for j in range(1, e + 1)]
        at_least.append(0)
        for j in range(1, e + 1):
            exact = at_least[j - 1] - at_least[j]
            out.extend([(p, j)] * exact)
    return sorted(out)


def affine_structure(alg: Algebra) -> Optional[AbelianGroupStructure]:
    """Recover the abelian group behind an abelian Taylor algebra.

    With zero fixed to 0 and p a Mal'cev term, x + y = p(x, 0, y). Every
    basic operation must then split as a sum of unary traces, each of which
    is multiplication by an integer. Returns None if any step fails.
    """
    from .clone import find_term, is_taylor, malcev_spec

    if not is_taylor(alg).verdict or not is_abelian(alg):
        raise PreconditionError("affine structure is recovered for abelian Taylor algebras")
    n = alg.size
    zero = 0
    p = find_term(alg, malcev_spec(n))
    if p is None:
        return None
    pt = p.table(alg).reshape(n, n, n)
    add = np.ascontiguousarray(pt[:, zero, :]).astype(np.int64)
    neg = np.array([int(pt[zero, x, zero]) for x in range(n)], dtype=np.int64)
    X = np.arange(n)
    if not ((add[zero] == X).all() and (add[:, zero] == X).all()):
        return None
    if not (add == add.T).all():
        return None
    for x, y, z in itertools.product(range(n), repeat=3):
        if add[add[x, y], z] != add[x, add[y, z]]:
            return None
    if not all(add[x, neg[x]] == zero for x in range(n)):
        return None

    def mult(c: int, x: int) -> int:
        acc = zero
        for _ in range(c):
            acc = int(add[acc, x])
        return acc

    exponent = 1
    for x in range(n):
        k = 1
        while mult(k, x) != zero:
            k += 1
        exponent = math.lcm(exponent, k)
    coefficients = {}
    for op in alg.operations:
        k = op.arity
        table = op.table.reshape((n,) * k)
        coeffs = []
        for i in range(k):
            trace = [int(table[tuple(x if j == i else zero for j in range(k))]) for x in range(n)]
            c = next((c for c in range(exponent) if all(mult(c, x) == trace[x] for x in range(n))), None)
            if c is None:
                return None
            coeffs.append(c)
        for args in itertools.product(range(n), repeat=k):
            acc = zero
            for i, x in enumerate(args):
                acc = int(add[acc, mult(coeffs[i], x)])
            if int(table[args]) != acc:
                return None
        coefficients[op.name] = tuple(coeffs)
    return AbelianGroupStructure(zero, add.astype(np.uint8), neg.astype(np.uint8),
                                 _group_decomposition(add, zero), coefficients)
