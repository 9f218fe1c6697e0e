"""Terms over the basic operations of an algebra.

A term is a tree whose leaves are projections x_i and whose inner nodes
apply a named basic operation. Trees produced by closure share subtrees, so
evaluation memoizes by node identity. Tables are computed on demand and
cached per algebra; high-arity terms can also be evaluated pointwise.
"""

from __future__ import annotations

import re
from typing import Optional, Sequence

import numpy as np

from .errors import ArgumentError

_LETTERS = "xyz"


def var_name(i: int, arity: int) -> str:
    return _LETTERS[i] if arity <= len(_LETTERS) else f"x{i + 1}"


class Term:
    __slots__ = ("symbol", "index", "children", "arity", "_tables", "__weakref__")

    def __init__(self, symbol: Optional[str], index: int, children: tuple, arity: int):
        self.symbol = symbol
        self.index = index
        self.children = children
        self.arity = arity
        self._tables: dict = {}

    @classmethod
    def proj(cls, i: int, arity: int) -> "Term":
        if not 0 <= i < arity:
            raise ArgumentError(f"projection index {i} outside arity {arity}")
        return cls(None, i, (), arity)

    @classmethod
    def app(cls, symbol: str, children: Sequence["Term"]) -> "Term":
        children = tuple(children)
        if not children:
            raise ArgumentError("operations need at least one argument")
        arity = children[0].arity
        if any(c.arity != arity for c in children):
            raise ArgumentError("children of a term must share one arity")
        return cls(symbol, -1, children, arity)

    @property
    def is_projection(self) -> bool:
        return self.symbol is None

    def __str__(self) -> str:
        memo: dict[int, str] = {}

        def show(t: Term) -> str:
            s = memo.get(id(t))
            if s is None:
                if t.symbol is None:
                    s = var_name(t.index, self.arity)
                else:
                    s = "(" + " ".join([t.symbol] + [show(c) for c in t.children]) + ")"
                memo[id(t)] = s
            return s

        return show(self)

    def __repr__(self) -> str:
        return f"Term[{self.arity}]{self}"

    def depth(self) -> int:
        memo: dict[int, int] = {}

        def d(t: Term) -> int:
            if id(t) not in memo:
                memo[id(t)] = 0 if t.symbol is None else 1 + max(d(c) for c in t.children)
            return memo[id(t)]

        return d(self)

    # -- evaluation -------------------------------------------------------

    def table(self, alg) -> np.ndarray:
        """Flat table of the term operation on ``alg`` (length n**arity)."""
        cached = self._tables.get(alg.key)
        if cached is not None:
            return cached
        n = alg.size
        if n ** self.arity > 50_000_000:
            raise ArgumentError("term arity too large to tabulate; use at()")
        ops = {op.name: op for op in alg.operations}
        grid = np.indices((n,) * self.arity, dtype=np.uint8).reshape(self.arity, -1)
        memo: dict[int, np.ndarray] = {}
        order = _postorder(self)
        for t in order:
            if t.symbol is None:
                memo[id(t)] = grid[t.index]
                continue
            op = ops.get(t.symbol)
            if op is None:
                raise ArgumentError(f"algebra has no operation {t.symbol!r}")
            if op.arity != len(t.children):
                raise ArgumentError(f"{t.symbol} applied to {len(t.children)} arguments")
            idx = np.zeros(grid.shape[1], dtype=np.int64)
            for c in t.children:
                idx = idx * n + memo[id(c)]
            memo[id(t)] = op.table[idx]
        out = memo[id(self)]
        out = np.ascontiguousarray(out, dtype=np.uint8)
        out.setflags(write=False)
        self._tables[alg.key] = out
        return out

    def at(self, alg, args: Sequence[int]) -> int:
        """Value at one argument tuple without building the full table."""
        if len(args) != self.arity:
            raise ArgumentError(f"term of arity {self.arity} given {len(args)} arguments")
        n = alg.size
        ops = {op.name: op for op in alg.operations}
        memo: dict[int, int] = {}
        for t in _postorder(self):
            if t.symbol is None:
                memo[id(t)] = int(args[t.index])
            else:
                idx = 0
                for c in t.children:
                    idx = idx * n + memo[id(c)]
                memo[id(t)] = int(ops[t.symbol].table[idx])
        return memo[id(self)]

    # -- composition ------------------------------------------------------

    def substitute(self, args: Sequence["Term"]) -> "Term":
        """t(args[0], ..., args[k-1]) for terms of a common arity."""
        if len(args) != self.arity:
            raise ArgumentError("substitution needs one term per variable")
        memo: dict[int, Term] = {}
        for t in _postorder(self):
            if t.symbol is None:
                memo[id(t)] = args[t.index]
            else:
                memo[id(t)] = Term.app(t.symbol, [memo[id(c)] for c in t.children])
        return memo[id(self)]

    def minor(self, mapping: Sequence[int], arity: int) -> "Term":
        """Rename variable i to mapping[i] inside a term of the given arity."""
        return self.substitute([Term.proj(j, arity) for j in mapping])

    def star(self, other: "Term") -> "Term":
        """t * s: the i-th argument of t becomes s(x_i, x_{i+p}, x_{i+2p}, ...)."""
        p, q = self.arity, other.arity
        arity = p * q
        inner = [other.minor([i + p * j for j in range(q)], arity) for i in range(p)]
        return self.substitute(inner)

    def cyclic_compose(self, other: "Term") -> "Term":
        """t(s(x1..xp), s(x2..xp,x1), ..., s(xp,x1..x_{p-1}))."""
        p = self.arity
        if other.arity != p:
            raise ArgumentError("cyclic composition needs equal arities")
        inner = [other.minor([(i + j) % p for j in range(p)], p) for i in range(p)]
        return self.substitute(inner)


def _postorder(root: Term) -> list[Term]:
    seen: set[int] = set()
    out: list[Term] = []
    stack: list[tuple[Term, bool]] = [(root, False)]
    while stack:
        t, expanded = stack.pop()
        if id(t) in seen:
            continue
        if expanded or t.symbol is None:
            seen.add(id(t))
            out.append(t)
            continue
        stack.append((t, True))
        for c in reversed(t.children):
            if id(c) not in seen:
                stack.append((c, False))
    return out


_TOKEN = re.compile(r"\(|\)|[^\s()]+")


def _var_index(name: str) -> Optional[int]:
    if name in _LETTERS:
        return _LETTERS.index(name)
    if name == "w":
        return 3
    m = re.fullmatch(r"x(\d+)", name)
    if m and int(m.group(1)) >= 1:
        return int(m.group(1)) - 1
    return None


def parse_term(text: str, arity: Optional[int] = None) -> Term:
    """Parse a prefix expression such as ``(m (m x y z) y z)``.

    Variables are x, y, z, w or x1, x2, ...; the arity defaults to the
    largest variable index used.
    """
    tokens = _TOKEN.findall(text)
    if not tokens:
        raise ArgumentError("empty term")
    pos = 0

    def node():
        nonlocal pos
        if pos >= len(tokens):
            raise ArgumentError("unexpected end of term")
        tok = tokens[pos]
        pos += 1
        if tok == "(":
            if pos >= len(tokens) or tokens[pos] in "()":
                raise ArgumentError("expected an operation name after '('")
            head = tokens[pos]
            pos += 1
            kids = []
            while pos < len(tokens) and tokens[pos] != ")":
                kids.append(node())
            if pos >= len(tokens):
                raise ArgumentError("missing ')'")
            pos += 1
            if not kids:
                raise ArgumentError(f"operation {head} has no arguments")
            return ("app", head, kids)
        if tok == ")":
            raise ArgumentError("unexpected ')'")
        idx = _var_index(tok)
        if idx is None:
            raise ArgumentError(f"unknown variable {tok!r}")
        return ("var", idx)

    tree = node()
    if pos != len(tokens):
        raise ArgumentError("trailing tokens after term")

    def max_var(t) -> int:
        return t[1] if t[0] == "var" else max(max_var(c) for c in t[2])

    k = max_var(tree) + 1 if arity is None else arity
    if max_var(tree) >= k:
        raise ArgumentError("variable index exceeds the declared arity")

    def build(t) -> Term:
        if t[0] == "var":
            return Term.proj(t[1], k)
        return Term.app(t[1], [build(c) for c in t[2]])

    return build(tree)


def basic_term(alg, op: int | str) -> Term:
    """The term f(x_1, ..., x_k) for a basic operation f."""
    if isinstance(op, int):
        op = alg.operations[op].name
    k = alg.operations[alg.op_index(op)].arity
    return Term.app(op, [Term.proj(i, k) for i in range(k)])
