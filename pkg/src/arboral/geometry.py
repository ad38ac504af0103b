"""Integer-grid point sets, rectangle predicates, and arboral satisfaction.

Coordinates follow the access-sequence convention: ``key`` is the x axis
(left to right) and ``time`` is the y axis growing *downward*, so time 1 is
the topmost row.  A pair of points is arborally satisfied when they share a
row or column, or when a third point lies in the closed axis-aligned
rectangle they span.  ``is_arborally_satisfied`` is the ground-truth oracle
every other module is tested against, so it ships in two independent
flavours (naive scan and index-backed) that are required to agree.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Iterator, NamedTuple, Sequence

import numpy as np

ORIGINAL = "original"
MARKED = "marked"


class PermutationError(ValueError):
    """Input does not describe a permutation of 1..n."""


class PointSetError(ValueError):
    """Malformed point set, or a query about points not in the set."""


@dataclass(frozen=True, slots=True)
class Point:
    """A grid point.  ``kind`` tags provenance, identity is the cell."""

    key: int
    time: int
    kind: str = ORIGINAL

    @property
    def cell(self) -> tuple[int, int]:
        return (self.key, self.time)


class Relation(Enum):
    SAME = "same"
    ABOVE = "above"
    BELOW = "below"
    LEFT = "left"
    RIGHT = "right"
    NE = "ne"
    NW = "nw"
    SE = "se"
    SW = "sw"


def relate(p: Point | tuple[int, int], q: Point | tuple[int, int]) -> Relation:
    """Position of q relative to p (time grows downward, so NE = later key, earlier time)."""
    pk, pt = (p.key, p.time) if isinstance(p, Point) else p
    qk, qt = (q.key, q.time) if isinstance(q, Point) else q
    if pk == qk:
        if pt == qt:
            return Relation.SAME
        return Relation.BELOW if qt > pt else Relation.ABOVE
    if pt == qt:
        return Relation.RIGHT if qk > pk else Relation.LEFT
    if qk > pk:
        return Relation.NE if qt < pt else Relation.SE
    return Relation.NW if qt < pt else Relation.SW


class SatisfactionReport(NamedTuple):
    satisfied: bool
    witness: tuple[tuple[int, int], tuple[int, int]] | None


class PointSet:
    """Immutable point set on the n x n grid with row/column indexes.

    Safe to share read-only across threads or processes once constructed.
    """

    __slots__ = ("n", "_kind", "_row_keys", "_col_times", "_prefix")

    def __init__(self, n: int, points: Iterable[Point | tuple], strict: bool = True):
        self.n = n
        kind: dict[tuple[int, int], str] = {}
        for p in points:
            if isinstance(p, Point):
                k, t, kd = p.key, p.time, p.kind
            elif len(p) == 3:
                k, t, kd = p
            else:
                (k, t), kd = p, ORIGINAL
            if not (1 <= k <= n and 1 <= t <= n):
                raise PointSetError(f"point ({k},{t}) outside the {n}x{n} grid")
            if (k, t) in kind:
                raise PointSetError(f"duplicate point at cell ({k},{t})")
            kind[(k, t)] = kd
        self._kind = kind
        row_keys: dict[int, list[int]] = {}
        col_times: dict[int, list[int]] = {}
        for (k, t) in kind:
            row_keys.setdefault(t, []).append(k)
            col_times.setdefault(k, []).append(t)
        for v in row_keys.values():
            v.sort()
        for v in col_times.values():
            v.sort()
        self._row_keys = row_keys
        self._col_times = col_times
        self._prefix = None
        if strict:
            self._check_original_permutation()

    def _check_original_permutation(self) -> None:
        rows: dict[int, int] = {}
        cols: dict[int, int] = {}
        for (k, t), kd in self._kind.items():
            if kd != ORIGINAL:
                continue
            if t in rows or k in cols:
                raise PointSetError("more than one original point in a row or column")
            rows[t] = k
            cols[k] = t

    @classmethod
    def from_permutation(cls, perm: Sequence[int]) -> "PointSet":
        validate_permutation(perm)
        return cls(len(perm), ((k, t, ORIGINAL) for t, k in enumerate(perm, start=1)))

    def __len__(self) -> int:
        return len(self._kind)

    def __contains__(self, p) -> bool:
        cell = (p.key, p.time) if isinstance(p, Point) else tuple(p)
        return cell in self._kind

    def kind_of(self, cell: tuple[int, int]) -> str:
        return self._kind[cell]

    def is_original(self, cell: tuple[int, int]) -> bool:
        return self._kind.get(cell) == ORIGINAL

    def points(self) -> Iterator[Point]:
        for t in sorted(self._row_keys):
            for k in self._row_keys[t]:
                yield Point(k, t, self._kind[(k, t)])

    def cells(self) -> list[tuple[int, int]]:
        return [(k, t) for t in sorted(self._row_keys) for k in self._row_keys[t]]

    def row(self, t: int) -> list[int]:
        return self._row_keys.get(t, [])

    def column(self, k: int) -> list[int]:
        return self._col_times.get(k, [])

    def prefix_counts(self) -> np.ndarray:
        """(n+1)x(n+1) cumulative count grid; entry [t, x] counts points with time<=t, key<=x."""
        if self._prefix is None:
            grid = np.zeros((self.n + 1, self.n + 1), dtype=np.int32)
            for (k, t) in self._kind:
                grid[t, k] = 1
            grid.cumsum(axis=0, out=grid)
            grid.cumsum(axis=1, out=grid)
            self._prefix = grid
        return self._prefix

    def count_in_rect(self, x1: int, x2: int, t1: int, t2: int) -> int:
        """Number of points in the closed rectangle [x1,x2] x [t1,t2]."""
        if x1 > x2 or t1 > t2:
            return 0
        pre = self.prefix_counts()
        return int(pre[t2, x2] - pre[t1 - 1, x2] - pre[t2, x1 - 1] + pre[t1 - 1, x1 - 1])


def validate_permutation(perm: Sequence[int]) -> None:
    n = len(perm)
    if n == 0:
        raise PermutationError("empty access sequence")
    seen = [False] * (n + 1)
    for v in perm:
        if not isinstance(v, int) or not 1 <= v <= n or seen[v]:
            raise PermutationError(f"sequence is not a permutation of 1..{n}")
        seen[v] = True


def rect_satisfied(ps: PointSet, p: Point | tuple[int, int], q: Point | tuple[int, int]) -> bool:
    """True iff the pair (p, q) is arborally satisfied with respect to ps.

    A third point anywhere in the closed spanning rectangle counts, boundary
    included.  Raises if either endpoint is not in the set.
    """
    pc = (p.key, p.time) if isinstance(p, Point) else tuple(p)
    qc = (q.key, q.time) if isinstance(q, Point) else tuple(q)
    if pc not in ps or qc not in ps:
        raise PointSetError(f"rect_satisfied query with points not in the set: {pc}, {qc}")
    if pc[0] == qc[0] or pc[1] == qc[1]:
        return True
    x1, x2 = min(pc[0], qc[0]), max(pc[0], qc[0])
    t1, t2 = min(pc[1], qc[1]), max(pc[1], qc[1])
    # Scan the thinner dimension; every probed line is a sorted index lookup.
    if x2 - x1 <= t2 - t1:
        for x in range(x1, x2 + 1):
            times = ps.column(x)
            i = bisect.bisect_left(times, t1)
            while i < len(times) and times[i] <= t2:
                if (x, times[i]) != pc and (x, times[i]) != qc:
                    return True
                i += 1
    else:
        for t in range(t1, t2 + 1):
            keys = ps.row(t)
            i = bisect.bisect_left(keys, x1)
            while i < len(keys) and keys[i] <= x2:
                if (keys[i], t) != pc and (keys[i], t) != qc:
                    return True
                i += 1
    return False


def _pairs_in_order(cells: list[tuple[int, int]]):
    for i in range(len(cells)):
        for j in range(i + 1, len(cells)):
            yield cells[i], cells[j]


def _is_satisfied_naive(ps: PointSet) -> SatisfactionReport:
    cells = ps.cells()
    for a, b in _pairs_in_order(cells):
        if a[0] == b[0] or a[1] == b[1]:
            continue
        x1, x2 = min(a[0], b[0]), max(a[0], b[0])
        t1, t2 = min(a[1], b[1]), max(a[1], b[1])
        ok = False
        for c in cells:
            if c != a and c != b and x1 <= c[0] <= x2 and t1 <= c[1] <= t2:
                ok = True
                break
        if not ok:
            return SatisfactionReport(False, (a, b))
    return SatisfactionReport(True, None)


def _is_satisfied_indexed(ps: PointSet) -> SatisfactionReport:
    cells = ps.cells()
    m = len(cells)
    if m < 2:
        return SatisfactionReport(True, None)
    keys = np.fromiter((c[0] for c in cells), dtype=np.int64, count=m)
    times = np.fromiter((c[1] for c in cells), dtype=np.int64, count=m)
    pre = ps.prefix_counts()
    for i in range(m - 1):
        k, t = keys[i], times[i]
        ks, ts = keys[i + 1 :], times[i + 1 :]
        x1 = np.minimum(k, ks)
        x2 = np.maximum(k, ks)
        t1 = np.minimum(t, ts)
        t2 = np.maximum(t, ts)
        counts = pre[t2, x2] - pre[t1 - 1, x2] - pre[t2, x1 - 1] + pre[t1 - 1, x1 - 1]
        bad = (counts < 3) & (ks != k) & (ts != t)
        if bad.any():
            j = int(np.flatnonzero(bad)[0]) + i + 1
            return SatisfactionReport(False, (cells[i], cells[j]))
    return SatisfactionReport(True, None)


def is_arborally_satisfied(ps: PointSet, method: str = "indexed") -> SatisfactionReport:
    """Check every unordered pair; on failure report the first unsatisfied pair.

    Pairs are examined in (time, key) order, so the witness is deterministic
    and identical across both methods.
    """
    if method == "naive":
        return _is_satisfied_naive(ps)
    if method == "indexed":
        return _is_satisfied_indexed(ps)
    raise ValueError(f"unknown method {method!r}")


# Permutation file format: UTF-8 text, whitespace-separated integers, the
# i-th integer is the key accessed at time i (1-indexed).

def parse_permutation(text: str) -> list[int]:
    try:
        values = [int(tok) for tok in text.split()]
    except ValueError as exc:
        raise PermutationError(f"non-integer token in permutation file: {exc}") from None
    validate_permutation(values)
    return values


def read_permutation_file(path) -> list[int]:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_permutation(fh.read())


def write_permutation_file(path, perm: Sequence[int]) -> None:
    validate_permutation(perm)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(" ".join(str(v) for v in perm) + "\n")
