"""Finite idempotent algebras: tables, subuniverses, congruences, quotients.

Elements are the integers 0..n-1. An operation of arity k is a flat table of
length n**k indexed lexicographically with the leftmost argument most
significant, so f(a_1, ..., a_k) sits at sum(a_i * n**(k-i)).
"""

from __future__ import annotations

import itertools
import json
from collections import OrderedDict
from functools import cached_property
from typing import Iterable, Iterator, Optional, Sequence

import numpy as np

from .closure import generate
from .errors import ArgumentError

Tuple = tuple[int, ...]


def tuple_index(t: Sequence[int], n: int) -> int:
    idx = 0
    for a in t:
        idx = idx * n + int(a)
    return idx


def index_tuple(idx: int, n: int, m: int) -> Tuple:
    out = []
    for _ in range(m):
        idx, r = divmod(idx, n)
        out.append(r)
    return tuple(reversed(out))


def all_tuples(n: int, m: int) -> np.ndarray:
    """Every m-tuple over {0..n-1} in lexicographic order, shape (n**m, m)."""
    if m == 0:
        return np.zeros((1, 0), dtype=np.uint8)
    grids = np.indices((n,) * m, dtype=np.uint8).reshape(m, -1)
    return np.ascontiguousarray(grids.T)


class OperationTable:
    __slots__ = ("name", "arity", "table")

    def __init__(self, name: str, arity: int, table):
        self.name = str(name)
        self.arity = int(arity)
        self.table = np.asarray(table, dtype=np.uint8)
        self.table.setflags(write=False)

    def __repr__(self) -> str:
        return f"OperationTable({self.name!r}, {self.arity})"


_CACHES: "OrderedDict[tuple, dict]" = OrderedDict()
_CACHE_LIMIT = 512


def _shared_cache(key: tuple) -> dict:
    """Analysis cache shared by algebras with identical tables and names."""
    cache = _CACHES.get(key)
    if cache is None:
        cache = _CACHES[key] = {}
        if len(_CACHES) > _CACHE_LIMIT:
            _CACHES.popitem(last=False)
    else:
        _CACHES.move_to_end(key)
    return cache


class Algebra:
    """A finite algebra on {0..size-1} with an ordered list of operations."""

    def __init__(self, size: int, operations: Iterable, name: Optional[str] = None,
                 *, allow_non_idempotent: bool = False):
        if int(size) < 1:
            raise ArgumentError("algebra size must be positive")
        if size > 255:
            raise ArgumentError("domains larger than 255 elements are not supported")
        self.size = int(size)
        ops = []
        for op in operations:
            if not isinstance(op, OperationTable):
                op = OperationTable(*op)
            if op.arity < 1:
                raise ArgumentError(f"operation {op.name}: arity must be positive")
            raw = np.asarray(op.table)
            if raw.shape != (self.size ** op.arity,):
                raise ArgumentError(
                    f"operation {op.name}: table length {raw.size}, "
                    f"expected {self.size ** op.arity}")
            if raw.size and (raw.min() < 0 or raw.max() >= self.size):
                raise ArgumentError(f"operation {op.name}: entry out of range")
            ops.append(op)
        names = [op.name for op in ops]
        if len(set(names)) != len(names):
            raise ArgumentError("operation names must be distinct")
        self.operations = tuple(ops)
        self.name = name
        self.idempotent = all(self._is_idempotent(op) for op in ops)
        if not self.idempotent and not allow_non_idempotent:
            bad = [op.name for op in ops if not self._is_idempotent(op)]
            raise ArgumentError(f"operations not idempotent: {', '.join(bad)}")
        self._cache = _shared_cache((self.key, tuple(names)))

    def _is_idempotent(self, op: OperationTable) -> bool:
        n = self.size
        step = sum(n ** j for j in range(op.arity))
        return all(int(op.table[x * step]) == x for x in range(n))

    def __repr__(self) -> str:
        ops = ", ".join(f"{o.name}/{o.arity}" for o in self.operations)
        return f"Algebra({self.name or '?'}, n={self.size}, [{ops}])"

    @cached_property
    def key(self) -> bytes:
        """Bit-exact encoding of the tables; equal keys mean equal algebras."""
        parts = [bytes([self.size])]
        for op in self.operations:
            parts.append(bytes([op.arity]))
            parts.append(op.table.tobytes())
        return b"|".join(parts)

    def __eq__(self, other) -> bool:
        return isinstance(other, Algebra) and self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    @property
    def max_arity(self) -> int:
        return max((op.arity for op in self.operations), default=0)

    def op_index(self, name: str) -> int:
        for i, op in enumerate(self.operations):
            if op.name == name:
                return i
        raise ArgumentError(f"no operation named {name!r}")

    def eval(self, op: int | str, args: Sequence[int]) -> int:
        if isinstance(op, str):
            op = self.op_index(op)
        if not 0 <= op < len(self.operations):
            raise ArgumentError(f"operation index {op} out of range")
        f = self.operations[op]
        if len(args) != f.arity:
            raise ArgumentError(f"{f.name} takes {f.arity} arguments, got {len(args)}")
        for a in args:
            if not 0 <= int(a) < self.size:
                raise ArgumentError(f"element {a} outside the domain")
        return int(f.table[tuple_index(args, self.size)])

    def generation_ops(self) -> list[tuple[int, np.ndarray]]:
        return [(op.arity, op.table) for op in self.operations]

    # -- derived algebras -------------------------------------------------

    def with_operations(self, operations, name: Optional[str] = None) -> "Algebra":
        return Algebra(self.size, operations, name or self.name)

    def relabel(self, perm: Sequence[int], name: Optional[str] = None) -> "Algebra":
        """The isomorphic copy obtained by renaming each x to perm[x]."""
        n = self.size
        perm = np.asarray(perm, dtype=np.int64)
        inv = np.empty(n, dtype=np.int64)
        inv[perm] = np.arange(n)
        ops = []
        for op in self.operations:
            pts = all_tuples(n, op.arity).astype(np.int64)
            pre = inv[pts]
            idx = np.zeros(len(pts), dtype=np.int64)
            for j in range(op.arity):
                idx = idx * n + pre[:, j]
            ops.append(OperationTable(op.name, op.arity, perm[op.table[idx]]))
        return Algebra(n, ops, name or self.name)

    def subalgebra(self, carrier: Iterable[int], name: Optional[str] = None) -> "Algebra":
        """Restriction to a subuniverse, relabeled by increasing order."""
        elems = sorted(set(int(c) for c in carrier))
        if not elems:
            raise ArgumentError("empty carrier")
        n = self.size
        local = {e: i for i, e in enumerate(elems)}
        ops = []
        for op in self.operations:
            cube = op.table.reshape((n,) * op.arity)[np.ix_(*[elems] * op.arity)]
            try:
                t = [local[int(v)] for v in cube.ravel()]
            except KeyError:
                raise ArgumentError("carrier is not closed under " + op.name) from None
            ops.append(OperationTable(op.name, op.arity, t))
        return Algebra(len(elems), ops, name or f"{self.name}|{elems}")

    def power(self, m: int) -> "Algebra":
        """A^m with coordinatewise operations; elements are lexicographic indices."""
        n = self.size
        if n ** m > 255:
            raise ArgumentError("power too large for an explicit table")
        N = n ** m
        tups = all_tuples(n, m).astype(np.int64)
        weights = n ** np.arange(m - 1, -1, -1)
        ops = []
        for op in self.operations:
            k = op.arity
            args = all_tuples(N, k).astype(np.int64)
            idx = np.zeros((len(args), m), dtype=np.int64)
            for j in range(k):
                idx = idx * n + tups[args[:, j]]
            ops.append(OperationTable(op.name, k, (op.table[idx] * weights).sum(axis=1)))
        return Algebra(N, ops, f"{self.name}^{m}")

    def to_dict(self) -> dict:
        return {
            "name": self.name or "",
            "size": self.size,
            "operations": [
                {"name": op.name, "arity": op.arity, "table": [int(v) for v in op.table]}
                for op in self.operations
            ],
        }

    @classmethod
    def from_dict(cls, data: dict, *, allow_non_idempotent: bool = False) -> "Algebra":
        try:
            ops = [(o["name"], int(o["arity"]), list(o["table"])) for o in data["operations"]]
            return cls(int(data["size"]), ops, data.get("name"),
                       allow_non_idempotent=allow_non_idempotent)
        except (KeyError, TypeError) as exc:
            raise ArgumentError(f"malformed algebra description: {exc}") from None


def load_algebra(path: str, *, allow_non_idempotent: bool = False) -> Algebra:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ArgumentError(f"cannot read algebra {path}: {exc}") from None
    if not isinstance(data, dict):
        raise ArgumentError("algebra file must hold a JSON object")
    return Algebra.from_dict(data, allow_non_idempotent=allow_non_idempotent)


def operation_from_function(name: str, n: int, arity: int, fn) -> OperationTable:
    return OperationTable(name, arity,
                          [fn(*t) for t in itertools.product(range(n), repeat=arity)])


# -- relations --------------------------------------------------------------


class Relation:
    """An m-ary relation on {0..n-1}, stored as a dense boolean vector."""

    __slots__ = ("size", "arity", "members", "_hash")

    def __init__(self, size: int, arity: int, members):
        self.size = int(size)
        self.arity = int(arity)
        members = np.asarray(members, dtype=bool).ravel()
        if members.shape != (self.size ** self.arity,):
            raise ArgumentError("member vector has the wrong length")
        members.setflags(write=False)
        self.members = members
        self._hash = None

    @classmethod
    def from_tuples(cls, size: int, arity: int, tuples: Iterable[Sequence[int]]) -> "Relation":
        bits = np.zeros(size ** arity, dtype=bool)
        for t in tuples:
            if len(t) != arity:
                raise ArgumentError(f"tuple {tuple(t)} does not have arity {arity}")
            if any(not 0 <= int(a) < size for a in t):
                raise ArgumentError(f"tuple {tuple(t)} leaves the domain")
            bits[tuple_index(t, size)] = True
        return cls(size, arity, bits)

    @classmethod
    def full(cls, size: int, arity: int) -> "Relation":
        return cls(size, arity, np.ones(size ** arity, dtype=bool))

    @classmethod
    def empty(cls, size: int, arity: int) -> "Relation":
        return cls(size, arity, np.zeros(size ** arity, dtype=bool))

    @classmethod
    def unary(cls, size: int, subset: Iterable[int]) -> "Relation":
        return cls.from_tuples(size, 1, [(b,) for b in subset])

    def cube(self) -> np.ndarray:
        return self.members.reshape((self.size,) * self.arity)

    def tuples(self) -> list[Tuple]:
        return [index_tuple(int(i), self.size, self.arity) for i in np.flatnonzero(self.members)]

    def rows(self) -> np.ndarray:
        return all_tuples(self.size, self.arity)[self.members]

    def __iter__(self) -> Iterator[Tuple]:
        return iter(self.tuples())

    def __len__(self) -> int:
        return int(self.members.sum())

    def __contains__(self, t) -> bool:
        return bool(self.members[tuple_index(t, self.size)])

    def __eq__(self, other) -> bool:
        return (isinstance(other, Relation) and self.size == other.size
                and self.arity == other.arity and bool((self.members == other.members).all()))

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.size, self.arity, np.packbits(self.members).tobytes()))
        return self._hash

    def __and__(self, other: "Relation") -> "Relation":
        return Relation(self.size, self.arity, self.members & other.members)

    def __or__(self, other: "Relation") -> "Relation":
        return Relation(self.size, self.arity, self.members | other.members)

    def __le__(self, other: "Relation") -> bool:
        return bool((self.members <= other.members).all())

    def is_full(self) -> bool:
        return bool(self.members.all())

    def is_empty(self) -> bool:
        return not self.members.any()

    def as_set(self) -> frozenset:
        """Unary relations as a set of elements."""
        if self.arity != 1:
            raise ArgumentError("only unary relations convert to element sets")
        return frozenset(int(i) for i in np.flatnonzero(self.members))

    def to_dict(self) -> dict:
        return {"arity": self.arity, "size": self.size,
                "tuples": [list(t) for t in self.tuples()]}

    @classmethod
    def from_dict(cls, data: dict) -> "Relation":
        try:
            return cls.from_tuples(int(data["size"]), int(data["arity"]), data["tuples"])
        except (KeyError, TypeError) as exc:
            raise ArgumentError(f"malformed relation description: {exc}") from None

    def __repr__(self) -> str:
        ts = self.tuples()
        shown = ", ".join(map(str, ts[:8])) + (", ..." if len(ts) > 8 else "")
        return f"Relation(n={self.size}, m={self.arity}, {{{shown}}})"


def sg(alg: Algebra, power: int, generators: Iterable[Sequence[int]]) -> Relation:
    """The subuniverse of alg**power generated by the given tuples."""
    if power < 1:
        raise ArgumentError("power must be positive")
    gens = [tuple(int(a) for a in g) for g in generators]
    for g in gens:
        if len(g) != power or any(not 0 <= a < alg.size for a in g):
            raise ArgumentError(f"generator {g} is not a {power}-tuple over the domain")
    if not gens:
        return Relation.empty(alg.size, power)
    sp, _ = generate(alg.size, alg.generation_ops(), np.array(gens, dtype=np.uint8))
    return Relation.from_tuples(alg.size, power, [tuple(r) for r in sp.rows])


def sg_set(alg: Algebra, elements: Iterable[int]) -> frozenset:
    """Subuniverse of A generated by a set of elements."""
    key = ("sg", frozenset(int(e) for e in elements))
    cached = alg._cache.get(key)
    if cached is not None:
        return cached
    elems = sorted(key[1])
    if not elems:
        out = frozenset()
    else:
        sp, _ = generate(alg.size, alg.generation_ops(),
                         np.array(elems, dtype=np.uint8).reshape(-1, 1))
        out = frozenset(int(v) for v in sp.rows[:, 0])
    alg._cache[key] = out
    return out


def is_subuniverse(alg: Algebra, subset: Iterable[int]) -> bool:
    s = frozenset(int(e) for e in subset)
    return sg_set(alg, s) == s


def subuniverses(alg: Algebra) -> list[frozenset]:
    """All nonempty subuniverses of A, sorted by size then content."""
    cached = alg._cache.get("subuniverses")
    if cached is not None:
        return cached
    found = set()
    frontier = [frozenset()]
    while frontier:
        nxt = []
        for s in frontier:
            for x in range(alg.size):
                if x in s:
                    continue
                t = sg_set(alg, s | {x})
                if t not in found:
                    found.add(t)
                    nxt.append(t)
        frontier = nxt
    out = sorted(found, key=lambda s: (len(s), sorted(s)))
    alg._cache["subuniverses"] = out
    return out


# -- partitions and congruences ---------------------------------------------


class Partition:
    """A partition of a carrier set, blocks ordered by least element."""

    def __init__(self, carrier: Iterable[int], blocks: Iterable[Iterable[int]]):
        carrier = tuple(sorted(set(int(c) for c in carrier)))
        blks = [tuple(sorted(set(int(x) for x in b))) for b in blocks]
        blks = [b for b in blks if b]
        blks.sort()
        seen = [x for b in blks for x in b]
        if len(seen) != len(set(seen)) or set(seen) != set(carrier):
            raise ArgumentError("blocks do not partition the carrier")
        self.carrier = carrier
        self.blocks = tuple(blks)
        self._block_of = {x: i for i, b in enumerate(blks) for x in b}

    @classmethod
    def from_labels(cls, carrier: Sequence[int], labels: Sequence[int]):
        groups: dict[int, list[int]] = {}
        for x, lab in zip(carrier, labels):
            groups.setdefault(int(lab), []).append(int(x))
        return cls(carrier, groups.values())

    def block_of(self, x: int) -> int:
        try:
            return self._block_of[int(x)]
        except KeyError:
            raise ArgumentError(f"element {x} is not in the carrier") from None

    def block(self, x: int) -> tuple:
        return self.blocks[self.block_of(x)]

    def related(self, x: int, y: int) -> bool:
        return self.block_of(x) == self.block_of(y)

    def is_equality(self) -> bool:
        return len(self.blocks) == len(self.carrier)

    def is_full(self) -> bool:
        return len(self.blocks) == 1

    def __le__(self, other: "Partition") -> bool:
        return all(other.block_of(b[0]) == other.block_of(x) for b in self.blocks for x in b)

    def __eq__(self, other) -> bool:
        return (isinstance(other, Partition) and self.carrier == other.carrier
                and self.blocks == other.blocks)

    def __hash__(self) -> int:
        return hash((self.carrier, self.blocks))

    def __repr__(self) -> str:
        inner = "|".join(",".join(map(str, b)) for b in self.blocks)
        return f"{type(self).__name__}({inner})"

    def join(self, other: "Partition") -> "Partition":
        uf = _UnionFind(self.carrier)
        for part in (self, other):
            for b in part.blocks:
                for x in b[1:]:
                    uf.union(b[0], x)
        return type(self)(self.carrier, uf.groups())

    def meet(self, other: "Partition") -> "Partition":
        groups: dict[tuple, list] = {}
        for x in self.carrier:
            groups.setdefault((self.block_of(x), other.block_of(x)), []).append(x)
        return type(self)(self.carrier, groups.values())


class Congruence(Partition):
    """A partition of a subuniverse that is compatible with every operation."""


class _UnionFind:
    def __init__(self, elements: Iterable[int]):
        self.parent = {int(e): int(e) for e in elements}

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, x: int, y: int) -> bool:
        rx, ry = self.find(x), self.find(y)
        if rx == ry:
            return False
        if rx < ry:
            self.parent[ry] = rx
        else:
            self.parent[rx] = ry
        return True

    def groups(self) -> list[list[int]]:
        out: dict[int, list[int]] = {}
        for x in self.parent:
            out.setdefault(self.find(x), []).append(x)
        return list(out.values())


def _carrier(alg: Algebra, carrier) -> tuple[int, ...]:
    if carrier is None:
        return tuple(range(alg.size))
    c = tuple(sorted(set(int(x) for x in carrier)))
    if not c or c[0] < 0 or c[-1] >= alg.size:
        raise ArgumentError("carrier must be a nonempty set of domain elements")
    return c


def _translations(alg: Algebra, carrier: tuple[int, ...]) -> np.ndarray:
    """Basic unary polynomials of the restricted algebra, one row per map.

    Row entries are positions in ``carrier``; a row is f(c_1, .., x, .., c_k)
    as a function of x with the constants drawn from the carrier.
    """
    key = ("translations", carrier)
    cached = alg._cache.get(key)
    if cached is not None:
        return cached
    n = alg.size
    local = np.full(n, -1, dtype=np.int64)
    local[list(carrier)] = np.arange(len(carrier))
    rows = []
    for op in alg.operations:
        k = op.arity
        cube = op.table.reshape((n,) * k)[np.ix_(*[carrier] * k)]
        loc = local[cube]
        if (loc < 0).any():
            raise ArgumentError("carrier is not closed under " + op.name)
        for i in range(k):
            rows.append(np.moveaxis(loc, i, -1).reshape(-1, len(carrier)))
    out = np.unique(np.concatenate(rows, axis=0), axis=0) if rows else \
        np.zeros((0, len(carrier)), dtype=np.int64)
    # constant maps carry no information
    out = out[(out != out[:, :1]).any(axis=1)] if len(out) else out
    alg._cache[key] = out
    return out


def congruence_generated(alg: Algebra, pairs: Iterable[tuple[int, int]],
                         carrier=None) -> Congruence:
    """Smallest congruence of the restricted algebra containing ``pairs``."""
    carrier = _carrier(alg, carrier)
    pos = {x: i for i, x in enumerate(carrier)}
    trans = _translations(alg, carrier)
    uf = _UnionFind(range(len(carrier)))
    work = []
    for a, b in pairs:
        if a not in pos or b not in pos:
            raise ArgumentError(f"pair ({a},{b}) leaves the carrier")
        if uf.union(pos[a], pos[b]):
            work.append((pos[a], pos[b]))
    while work:
        x, y = work.pop()
        ux, uy = trans[:, x], trans[:, y]
        diff = ux != uy
        for u, v in zip(ux[diff].tolist(), uy[diff].tolist()):
            if uf.union(u, v):
                work.append((u, v))
    groups = [[carrier[i] for i in g] for g in uf.groups()]
    return Congruence(carrier, groups)


def principal_congruence(alg: Algebra, carrier, a: int, b: int) -> Congruence:
    carrier = _carrier(alg, carrier)
    if a not in carrier or b not in carrier:
        raise ArgumentError("a and b must lie in the carrier")
    return congruence_generated(alg, [(a, b)], carrier)


def all_congruences(alg: Algebra, carrier=None) -> list[Congruence]:
    """Every congruence of the restricted algebra, from finest to coarsest."""
    carrier = _carrier(alg, carrier)
    key = ("congruences", carrier)
    cached = alg._cache.get(key)
    if cached is not None:
        return cached
    eq = Congruence(carrier, [[x] for x in carrier])
    principal = {principal_congruence(alg, carrier, a, b)
                 for a, b in itertools.combinations(carrier, 2)}
    found = {eq} | principal
    frontier = list(principal)
    while frontier:
        nxt = []
        for c in frontier:
            for p in principal:
                j = c.join(p)
                if j not in found:
                    found.add(j)
                    nxt.append(j)
        frontier = nxt
    out = sorted(found, key=lambda c: (-len(c.blocks), c.blocks))
    alg._cache[key] = out
    return out


def maximal_congruences(alg: Algebra, carrier=None) -> list[Congruence]:
    """Proper congruences with no proper congruence strictly above them."""
    cons = all_congruences(alg, carrier)
    proper = [c for c in cons if not c.is_full()]
    return [c for c in proper if not any(c != d and c <= d for d in proper)]


def quotient(alg: Algebra, cong: Partition, name: Optional[str] = None) -> Algebra:
    """The algebra induced on the blocks of a congruence of the whole domain."""
    if cong.carrier != tuple(range(alg.size)):
        raise ArgumentError("quotient needs a congruence on the whole domain")
    return _quotient_tables(alg, cong, name)


def _quotient_tables(alg: Algebra, cong: Partition, name=None) -> Algebra:
    n = alg.size
    reps = [b[0] for b in cong.blocks]
    lab = np.zeros(n, dtype=np.int64)
    for x in cong.carrier:
        lab[x] = cong.block_of(x)
    m = len(reps)
    ops = []
    for op in alg.operations:
        args = all_tuples(m, op.arity).astype(np.int64)
        idx = np.zeros(len(args), dtype=np.int64)
        for j in range(op.arity):
            idx = idx * n + np.asarray(reps)[args[:, j]]
        ops.append(OperationTable(op.name, op.arity, lab[op.table[idx]]))
    return Algebra(m, ops, name or f"{alg.name}/{cong!r}")


def sub_quotient(alg: Algebra, cong: Partition, name=None) -> Algebra:
    """E/theta for a congruence theta on a subuniverse E; blocks in order."""
    sub = alg.subalgebra(cong.carrier)
    local = {x: i for i, x in enumerate(cong.carrier)}
    moved = Partition(range(len(cong.carrier)),
                      [[local[x] for x in b] for b in cong.blocks])
    return _quotient_tables(sub, moved, name or f"{alg.name}:{cong!r}")


def mu(alg: Algebra) -> Partition:
    """Smallest equivalence joining pairs that generate a proper subuniverse."""
    uf = _UnionFind(range(alg.size))
    for a, b in itertools.combinations(range(alg.size), 2):
        if len(sg_set(alg, {a, b})) < alg.size:
            uf.union(a, b)
    return Partition(range(alg.size), uf.groups())


def is_simple(alg: Algebra) -> bool:
    return alg.size > 1 and len(all_congruences(alg)) == 2
