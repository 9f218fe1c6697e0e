"""Vectorized generation of subpowers with derivation tracking.

Every existence search in the package reduces to the same problem: given an
algebra A and some tuples in A^m, list the subuniverse of A^m they generate
and remember how each member was built. Clone slices are the case where the
generators are the projections (m = n^k); restricted term searches use the
projections evaluated only on the points an identity mentions.

The loop is semi-naive: a round only evaluates argument combinations that
use at least one row discovered in the previous round.
"""

from __future__ import annotations

from typing import Callable, Optional, Sequence

import numpy as np

from .errors import ResourceError

DEFAULT_LIMIT = 2_000_000
# rough number of array cells materialized per vectorized chunk
_CHUNK_CELLS = 1 << 22


class Subpower:
    """Rows generated so far together with how each was obtained.

    ``parents[i]`` is ``(-1, j)`` for the j-th generator, otherwise
    ``(op_index, (i_1, ..., i_k))`` naming the rows fed to the operation.
    """

    def __init__(self, width: int):
        self.width = width
        self._chunks: list[np.ndarray] = []
        self._rows: Optional[np.ndarray] = None
        self.parents: list[tuple] = []
        self.index: dict[bytes, int] = {}
        self.complete = False

    def __len__(self) -> int:
        return len(self.parents)

    @property
    def rows(self) -> np.ndarray:
        if self._rows is None or len(self._rows) != len(self.parents):
            if self._chunks:
                self._rows = np.concatenate(self._chunks, axis=0)
                self._chunks = [self._rows]
            else:
                self._rows = np.zeros((0, self.width), dtype=np.uint8)
        return self._rows

    def _add(self, rows: np.ndarray, parents: list[tuple]) -> None:
        self._chunks.append(rows)
        self.parents.extend(parents)
        self._rows = None

    def find(self, row: Sequence[int]) -> Optional[int]:
        return self.index.get(np.asarray(row, dtype=np.uint8).tobytes())

    def derivation(self, i: int, leaf: Callable[[int], object],
                   node: Callable[[int, list], object]) -> object:
        """Rebuild the derivation of row ``i`` bottom-up, sharing subtrees."""
        memo: dict[int, object] = {}
        stack = [i]
        while stack:
            j = stack[-1]
            if j in memo:
                stack.pop()
                continue
            kind, arg = self.parents[j]
            if kind < 0:
                memo[j] = leaf(arg)
                stack.pop()
                continue
            missing = [c for c in arg if c not in memo]
            if missing:
                stack.extend(missing)
                continue
            memo[j] = node(kind, [memo[c] for c in arg])
            stack.pop()
        return memo[i]


def _as_void(rows: np.ndarray) -> np.ndarray:
    rows = np.ascontiguousarray(rows)
    return rows.view(np.dtype((np.void, rows.shape[1]))).ravel()


_BITMAP_CODES = 1 << 26


class _Seen:
    """Membership of generated rows, with integer codes for narrow rows.

    Rows of A^m with |A|^m small are tracked in a bitmap; up to 63 bits the
    codes are kept in a sorted array; wider rows fall back to byte keys.
    """

    def __init__(self, size: int, width: int):
        space = size ** width
        self.mode = "bitmap" if space <= _BITMAP_CODES else ("sorted" if space < 1 << 62 else "bytes")
        if self.mode != "bytes":
            self.weights = np.array([size ** (width - 1 - j) for j in range(width)], dtype=np.int64)
        if self.mode == "bitmap":
            self.bits = np.zeros(space, dtype=bool)
        elif self.mode == "sorted":
            self.codes = np.zeros(0, dtype=np.int64)

    def _encode(self, rows: np.ndarray) -> np.ndarray:
        acc = np.zeros(len(rows), dtype=np.int64)
        for j, w in enumerate(self.weights):
            acc += rows[:, j].astype(np.int64) * w
        return acc

    def mark(self, rows: np.ndarray) -> None:
        if self.mode == "bitmap":
            self.bits[self._encode(rows)] = True
        elif self.mode == "sorted":
            self.codes = np.union1d(self.codes, self._encode(rows))

    def fresh(self, rows: np.ndarray, sp: "Subpower") -> np.ndarray:
        """Sorted positions of the first occurrence of each unseen row."""
        if self.mode == "bytes":
            voids = _as_void(rows)
            _, first = np.unique(voids, return_index=True)
            keep = [f for f in first if voids[f].tobytes() not in sp.index]
            return np.sort(np.asarray(keep, dtype=np.int64))
        codes = self._encode(rows)
        if self.mode == "bitmap":
            cand = np.flatnonzero(~self.bits[codes])
        else:
            pos = np.searchsorted(self.codes, codes)
            pos = np.minimum(pos, max(len(self.codes) - 1, 0))
            known = (self.codes[pos] == codes) if len(self.codes) else np.zeros(len(codes), bool)
            cand = np.flatnonzero(~known)
        if len(cand) == 0:
            return cand
        _, first = np.unique(codes[cand], return_index=True)
        return np.sort(cand[first])


def generate(size: int, ops: Sequence[tuple[int, np.ndarray]],
             generators: np.ndarray, *,
             stop: Optional[Callable[[np.ndarray], np.ndarray]] = None,
             limit: int = DEFAULT_LIMIT,
             max_work: Optional[int] = None) -> tuple[Subpower, Optional[int]]:
    """Close ``generators`` (shape (g, m)) under ``ops`` applied coordinatewise.

    ``ops`` is a list of (arity, flat table) pairs over a domain of ``size``
    elements. ``stop`` receives freshly added rows and returns a boolean mask;
    generation halts at the first row it accepts, whose index is returned.
    ``max_work`` bounds the number of argument combinations evaluated.
    """
    gens = np.asarray(generators, dtype=np.uint8)
    if gens.ndim != 2:
        gens = gens.reshape(len(gens), -1)
    width = gens.shape[1]
    sp = Subpower(width)
    seen = _Seen(size, width)
    sp._seen = seen
    hit = _admit(sp, gens, [(-1, j) for j in range(len(gens))], stop)
    if hit is not None:
        return sp, hit
    tables = [(k, np.asarray(t, dtype=np.uint8)) for k, t in ops]
    done = 0
    work = 0
    while done < len(sp):
        cur = len(sp)
        rows = sp.rows
        for op_i, (k, table) in enumerate(tables):
            weights = [size ** (k - 1 - j) for j in range(k)]
            for p in range(k):
                sizes = [done] * p + [cur - done] + [cur] * (k - p - 1)
                offsets = [0] * p + [done] + [0] * (k - p - 1)
                total = int(np.prod(sizes, dtype=np.int64)) if sizes else 0
                if total == 0:
                    continue
                work += total
                if max_work is not None and work > max_work:
                    raise ResourceError(f"subpower generation exceeded {max_work} evaluations")
                step = max(1, _CHUNK_CELLS // max(1, width * k))
                for start in range(0, total, step):
                    flat = np.arange(start, min(total, start + step), dtype=np.int64)
                    picks = np.unravel_index(flat, sizes)
                    picks = [pk + off for pk, off in zip(picks, offsets)]
                    acc = np.zeros((len(flat), width), dtype=np.int64)
                    for w, pk in zip(weights, picks):
                        acc += rows[pk].astype(np.int64) * w
                    out = table[acc]
                    fresh = seen.fresh(out, sp)
                    if len(fresh) == 0:
                        continue
                    parents = [(op_i, tuple(int(pk[f]) for pk in picks)) for f in fresh]
                    hit = _admit(sp, out[fresh], parents, stop)
                    if hit is not None:
                        return sp, hit
                    if len(sp) > limit:
                        raise ResourceError(
                            f"subpower generation exceeded {limit} elements "
                            f"(width {width})")
        done = cur
    sp.complete = True
    return sp, None


def _admit(sp: Subpower, rows: np.ndarray, parents: list[tuple],
           stop) -> Optional[int]:
    base = len(sp)
    keep = []
    for i in range(len(rows)):
        key = rows[i].tobytes()
        if key in sp.index:
            continue
        sp.index[key] = base + len(keep)
        keep.append(i)
    if not keep:
        return None
    rows = np.ascontiguousarray(rows[keep])
    sp._add(rows, [parents[i] for i in keep])
    seen = getattr(sp, "_seen", None)
    if seen is not None:
        seen.mark(rows)
    if stop is not None:
        mask = np.asarray(stop(rows), dtype=bool)
        if mask.any():
            return base + int(np.argmax(mask))
    return None
