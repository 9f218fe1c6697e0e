"""Canonical forms and small censuses of minimal Taylor clones.

Two minimal Taylor algebras on the same domain are term-equivalent exactly
when their ternary clones agree, because each clone is generated by any of
its Taylor ternary members. The canonical form therefore minimizes the
indicator of Clo_3 over all relabelings of the domain. Indicators are
compared lexicographically along the table order, so the least indicator
is the one whose first differing table is absent.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .clone import clone_slice, is_minimal_taylor, is_taylor, ternary_algebra
from .core import Algebra, all_tuples
from .errors import ArgumentError, PreconditionError, ResourceError

MODES = ("exhaustive", "search")
# tables whose ternary clone outgrows this are recorded as skipped in search mode
CENSUS_CLONE_LIMIT = 2_000
CENSUS_WORK_LIMIT = 3_000_000


def _relabel_maps(n: int, perm: Sequence[int]) -> tuple[np.ndarray, np.ndarray]:
    """Value map and source positions turning a ternary table t into t^perm."""
    perm = np.asarray(perm, dtype=np.int64)
    inv = np.empty(n, dtype=np.int64)
    inv[perm] = np.arange(n)
    pts = inv[all_tuples(n, 3).astype(np.int64)]
    src = (pts[:, 0] * n + pts[:, 1]) * n + pts[:, 2]
    return perm.astype(np.uint8), src


def relabel_tables(tables: np.ndarray, perm: Sequence[int]) -> np.ndarray:
    n = round(tables.shape[1] ** (1 / 3))
    values, src = _relabel_maps(n, perm)
    return values[tables[:, src]]


def _indicator_cmp(a: frozenset, b: frozenset) -> int:
    if a == b:
        return 0
    first = min(a ^ b)
    return -1 if first in b else 1


@dataclass
class CanonicalForm:
    size: int
    key: str
    encoding: str
    generator: list
    permutation: tuple
    clone_size: int
    orbit: int = 1

    def to_dict(self) -> dict:
        return {"size": self.size, "key": self.key, "encoding": self.encoding,
                "generator": list(self.generator), "permutation": list(self.permutation),
                "cloneSize": self.clone_size, "clonesInClass": self.orbit}

    def algebra(self) -> Algebra:
        return ternary_algebra(self.size, self.generator, "g")


def _key_for(n: int, generator: Sequence[int]) -> str:
    return f"{n}:" + "".join(str(int(v)) for v in generator)


def _clone_set(tables: np.ndarray) -> frozenset:
    return frozenset(bytes(r) for r in np.ascontiguousarray(tables, dtype=np.uint8))


def canonicalize(alg: Algebra) -> CanonicalForm:
    """Least Clo_3 indicator over all domain permutations.

    The key spells out the least Taylor table of the canonical Clo_3; that
    table generates the canonical clone, so keys agree exactly when the
    least indicators do.
    """
    if not alg.idempotent or not is_taylor(alg).verdict or not is_minimal_taylor(alg)[0]:
        raise PreconditionError("canonical forms are defined for minimal Taylor algebras")
    n = alg.size
    tables = clone_slice(alg, 3).tables
    best, best_perm = None, None
    variants = set()
    for perm in itertools.permutations(range(n)):
        s = _clone_set(relabel_tables(tables, perm))
        variants.add(s)
        if best is None or _indicator_cmp(s, best) < 0:
            best, best_perm = s, perm
    ordered = sorted(best)
    gen = next(t for t in ordered
               if is_taylor(ternary_algebra(n, np.frombuffer(t, dtype=np.uint8))).verdict)
    digest = hashlib.sha256(b"".join(ordered)).hexdigest()
    generator = [int(v) for v in gen]
    return CanonicalForm(n, _key_for(n, generator), digest, generator, tuple(best_perm),
                         len(ordered), len(variants))


def same_class(a: Algebra, b: Algebra) -> bool:
    """Term-equivalent after some relabeling of the domain."""
    return a.size == b.size and canonicalize(a).key == canonicalize(b).key


# -- enumeration -------------------------------------------------------------------


@dataclass
class Census:
    size: int
    mode: str
    forms: list = field(default_factory=list)
    position: int = 0
    total: int = 0
    skipped: list = field(default_factory=list)

    @property
    def complete(self) -> bool:
        return self.position >= self.total

    @property
    def class_count(self) -> int:
        return len(self.forms)

    @property
    def clone_count(self) -> int:
        return sum(f.orbit for f in self.forms)

    def keys(self) -> list[str]:
        return [f.key for f in self.forms]

    def to_dict(self) -> dict:
        return {"size": self.size, "mode": self.mode, "complete": self.complete,
                "position": self.position, "total": self.total,
                "clonesUpToTermEquivalence": self.clone_count,
                "classesUpToPermutation": self.class_count,
                "skippedTables": list(self.skipped),
                "forms": [f.to_dict() for f in self.forms]}


def _free_slots(n: int) -> list[int]:
    diag = {(x * n + x) * n + x for x in range(n)}
    return [i for i in range(n ** 3) if i not in diag]


def table_count(n: int) -> int:
    return n ** len(_free_slots(n))


def table_at(n: int, index: int) -> np.ndarray:
    """The index-th idempotent ternary table in lexicographic order."""
    free = _free_slots(n)
    t = np.zeros(n ** 3, dtype=np.uint8)
    for x in range(n):
        t[(x * n + x) * n + x] = x
    for slot in reversed(free):
        index, t[slot] = divmod(index, n)
    return t


def _least_in_orbit(n: int, table: np.ndarray, maps) -> bool:
    row = table[None, :]
    for values, src in maps:
        if bytes(values[row[:, src]][0]) < bytes(table):
            return False
    return True


def _scan(n: int, start: int, stop: int, covered: frozenset = frozenset(),
          limit: Optional[int] = None) -> tuple[list[list[int]], list[int]]:
    """Generators of minimal Taylor clones met on tables [start, stop), and
    the positions whose ternary clone exceeded ``limit``."""
    maps = [_relabel_maps(n, p) for p in itertools.permutations(range(n)) if list(p) != list(range(n))]
    found, skipped = [], []
    seen = set(covered)
    for i in range(start, stop):
        t = table_at(n, i)
        key = bytes(t)
        if key in seen or not _least_in_orbit(n, t, maps):
            continue
        g = ternary_algebra(n, t)
        if not is_taylor(g).verdict:
            continue
        try:
            if limit is not None:
                clone_slice(g, 3, limit=limit, max_work=CENSUS_WORK_LIMIT)
            if not is_minimal_taylor(g)[0]:
                continue
        except ResourceError:
            skipped.append(i)
            continue
        for p in itertools.permutations(range(n)):
            seen |= _clone_set(relabel_tables(clone_slice(g, 3).tables, p))
        found.append([int(v) for v in t])
    return found, skipped


def _merge(census: Census, generators: Iterable[Sequence[int]]) -> None:
    have = set(census.keys())
    for gen in generators:
        form = canonicalize(ternary_algebra(census.size, gen))
        if form.key not in have:
            have.add(form.key)
            census.forms.append(form)
    census.forms.sort(key=lambda f: f.key)


def _covered(n: int, forms: list[CanonicalForm]) -> frozenset:
    out: set = set()
    for f in forms:
        tables = clone_slice(f.algebra(), 3).tables
        for p in itertools.permutations(range(n)):
            out |= _clone_set(relabel_tables(tables, p))
    return frozenset(out)


def load_checkpoint(path: str, n: int) -> Census:
    """Resume state: the checkpoint is a JSON list of keys, progress sits beside it."""
    census = Census(n, "search", total=table_count(n))
    if os.path.exists(path):
        with open(path) as fh:
            keys = json.load(fh)
        if not isinstance(keys, list) or not all(isinstance(k, str) for k in keys):
            raise ArgumentError("checkpoint must be a JSON list of canonical keys")
        gens = []
        for k in keys:
            size, _, digits = k.partition(":")
            if int(size) != n or len(digits) != n ** 3:
                raise ArgumentError(f"checkpoint key {k!r} does not match size {n}")
            gens.append([int(c) for c in digits])
        _merge(census, gens)
        progress = path + ".progress"
        if os.path.exists(progress):
            with open(progress) as fh:
                state = json.load(fh)
            census.position = int(state["position"])
            census.skipped = [int(i) for i in state.get("skipped", [])]
    return census


def save_checkpoint(path: str, census: Census) -> None:
    with open(path, "w") as fh:
        json.dump(census.keys(), fh, indent=1)
    with open(path + ".progress", "w") as fh:
        json.dump({"position": census.position, "skipped": census.skipped}, fh)


def enumerate_minimal_taylor(n: int, mode: str = "exhaustive", *,
                             budget: Optional[int] = None,
                             checkpoint: Optional[str] = None,
                             jobs: int = 1) -> Census:
    """Minimal Taylor clones on an n-element domain generated by one ternary table.

    ``exhaustive`` runs all idempotent ternary tables (n = 2 only). ``search``
    is resumable: it scans at most ``budget`` tables from the checkpointed
    position, skipping tables that are not least in their relabeling orbit
    or that lie in a clone already found.
    """
    if mode not in MODES:
        raise ArgumentError(f"mode must be one of {MODES}")
    if n < 2 or n > 3:
        raise ArgumentError("enumeration supports domains of size 2 and 3")
    if mode == "exhaustive":
        if n != 2:
            raise ArgumentError("exhaustive mode is limited to the two-element domain")
        census = Census(n, mode, total=table_count(n))
        gens, census.skipped = _scan(n, 0, census.total)
        _merge(census, gens)
        census.position = census.total
        return census
    census = load_checkpoint(checkpoint, n) if checkpoint else Census(n, mode, total=table_count(n))
    stop = census.total if budget is None else min(census.total, census.position + budget)
    covered = _covered(n, census.forms)
    if jobs > 1 and stop - census.position > jobs:
        bounds = np.linspace(census.position, stop, jobs + 1).astype(int)
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(_scan, [n] * jobs, bounds[:-1].tolist(), bounds[1:].tolist(),
                                  [covered] * jobs, [CENSUS_CLONE_LIMIT] * jobs))
        gens = [g for part, _ in parts for g in part]
        census.skipped += [i for _, sk in parts for i in sk]
    else:
        gens, sk = _scan(n, census.position, stop, covered, CENSUS_CLONE_LIMIT)
        census.skipped += sk
    _merge(census, gens)
    census.position = stop
    if checkpoint:
        save_checkpoint(checkpoint, census)
    return census
