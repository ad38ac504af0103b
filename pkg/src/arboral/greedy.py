"""The GREEDY sweep: process a permutation in time order, adding on each row
the minimal set of marked points that satisfies every rectangle ending at the
new point.

Two implementations are provided.  ``greedy_sweep`` is the output-sensitive
staircase scan: per processed original it walks outward over columns keeping
the running maximum of last-seen times, and marks exactly the columns whose
latest point beats that maximum.  ``greedy_sweep_reference`` is the literal
quadratic definition (test every prior point's rectangle for a witness) and
serves as the oracle the staircase is checked against.
"""

from __future__ import annotations

import bisect
from typing import Iterator, Sequence

from .geometry import MARKED, ORIGINAL, Point, PointSet, validate_permutation
from .indexing import GridIndex


class SweepError(RuntimeError):
    """Structural invariant of a sweep result does not hold."""


class AugmentedPointSet:
    """X u G: the input permutation plus the points GREEDY marked.

    Immutable after construction; row and column indexes cover originals and
    marks together.  Index 0 of the per-row/per-key lists is unused so keys
    and times can be used directly.
    """

    __slots__ = (
        "n",
        "key_at_time",
        "time_of_key",
        "marks_by_row",
        "col_times",
        "row_keys",
        "_marked",
        "g_size",
    )

    def __init__(self, perm: Sequence[int], marks_by_row: Sequence[Sequence[int]]):
        validate_permutation(perm)
        n = len(perm)
        self.n = n
        self.key_at_time = [0] + list(perm)
        time_of_key = [0] * (n + 1)
        for t, k in enumerate(perm, start=1):
            time_of_key[k] = t
        self.time_of_key = time_of_key
        self.marks_by_row = [sorted(marks_by_row[t]) if t < len(marks_by_row) else [] for t in range(n + 1)]
        col_times: list[list[int]] = [[] for _ in range(n + 1)]
        row_keys: list[list[int]] = [[] for _ in range(n + 1)]
        marked = set()
        for t in range(1, n + 1):
            orig = self.key_at_time[t]
            keys = self.marks_by_row[t]
            for k in keys:
                if not 1 <= k <= n or k == orig:
                    raise SweepError(f"marked point ({k},{t}) collides with the grid or its original")
                if (k, t) in marked:
                    raise SweepError(f"duplicate marked point ({k},{t})")
                marked.add((k, t))
            row_keys[t] = sorted(keys + [orig])
        for t in range(1, n + 1):
            for k in row_keys[t]:
                col_times[k].append(t)
        self.col_times = col_times
        self.row_keys = row_keys
        self._marked = frozenset(marked)
        self.g_size = len(marked)

    @property
    def perm(self) -> list[int]:
        return self.key_at_time[1:]

    def is_marked(self, cell: tuple[int, int]) -> bool:
        return cell in self._marked

    def marks(self) -> Iterator[tuple[int, int]]:
        for t in range(1, self.n + 1):
            for k in self.marks_by_row[t]:
                yield (k, t)

    def originals(self) -> Iterator[tuple[int, int]]:
        for t in range(1, self.n + 1):
            yield (self.key_at_time[t], t)

    def op(self, cell: tuple[int, int]) -> tuple[int, int]:
        """The original sharing the row of ``cell`` (identity on originals)."""
        return (self.key_at_time[cell[1]], cell[1])

    def point_set(self) -> PointSet:
        pts = [Point(self.key_at_time[t], t, ORIGINAL) for t in range(1, self.n + 1)]
        pts += [Point(k, t, MARKED) for (k, t) in self.marks()]
        return PointSet(self.n, pts)

    def mirrored(self) -> "AugmentedPointSet":
        """Reflect keys (x -> n+1-x); GREEDY commutes with this reflection."""
        n = self.n
        perm = [n + 1 - k for k in self.perm]
        marks = [[n + 1 - k for k in reversed(self.marks_by_row[t])] for t in range(n + 1)]
        return AugmentedPointSet(perm, marks)

    def grid_index(self) -> GridIndex:
        return GridIndex.from_aug(self)


def greedy_sweep(perm: Sequence[int]) -> AugmentedPointSet:
    """Staircase sweep; extensionally equal to ``greedy_sweep_reference``.

    ``last[x]`` is the latest time of any point in column x.  Scanning
    leftward (then rightward) from the processed original, a column is marked
    iff its ``last`` beats the running maximum, i.e. marked columns form the
    strictly increasing staircase of last-seen times.  The scan stops early
    once the maximum saturates at t-1.
    """
    validate_permutation(perm)
    n = len(perm)
    last = [0] * (n + 2)
    marks_by_row: list[list[int]] = [[] for _ in range(n + 1)]
    for t, xp in enumerate(perm, start=1):
        row: list[int] = []
        m = 0
        x = xp - 1
        while x >= 1 and m < t - 1:
            lx = last[x]
            if lx > m:
                row.append(x)
                m = lx
            x -= 1
        row.reverse()
        m = 0
        x = xp + 1
        while x <= n and m < t - 1:
            lx = last[x]
            if lx > m:
                row.append(x)
                m = lx
            x += 1
        for x in row:
            last[x] = t
        last[xp] = t
        marks_by_row[t] = row
    return AugmentedPointSet(perm, marks_by_row)


def _rect_has_witness(cols, rows, xq: int, tq: int, xp: int, tp: int) -> bool:
    """Third point in the closed rectangle spanned by (xq,tq) and (xp,tp)?"""
    x1, x2 = (xq, xp) if xq < xp else (xp, xq)
    t1, t2 = (tq, tp) if tq < tp else (tp, tq)
    if x2 - x1 <= t2 - t1:
        for x in range(x1, x2 + 1):
            times = cols[x]
            i = bisect.bisect_left(times, t1)
            while i < len(times) and times[i] <= t2:
                if (x, times[i]) != (xq, tq) and (x, times[i]) != (xp, tp):
                    return True
                i += 1
    else:
        for t in range(t1, t2 + 1):
            keys = rows[t]
            i = bisect.bisect_left(keys, x1)
            while i < len(keys) and keys[i] <= x2:
                if (keys[i], t) != (xq, tq) and (keys[i], t) != (xp, tp):
                    return True
                i += 1
    return False


def greedy_sweep_reference(perm: Sequence[int]) -> AugmentedPointSet:
    """Literal definition: per time step, test every prior point's rectangle
    against the set so far and add the missing corners on the current row."""
    validate_permutation(perm)
    n = len(perm)
    cols: list[list[int]] = [[] for _ in range(n + 1)]
    rows: list[list[int]] = [[] for _ in range(n + 1)]
    marks_by_row: list[list[int]] = [[] for _ in range(n + 1)]
    for t, xp in enumerate(perm, start=1):
        bisect.insort(cols[xp], t)
        bisect.insort(rows[t], xp)
        new_marks = set()
        for tq in range(1, t):
            for xq in rows[tq]:
                if xq == xp:
                    continue
                if not _rect_has_witness(cols, rows, xq, tq, xp, t):
                    new_marks.add(xq)
        for x in sorted(new_marks):
            bisect.insort(cols[x], t)
            bisect.insort(rows[t], x)
            marks_by_row[t].append(x)
    return AugmentedPointSet(perm, marks_by_row)


def first_above(aug: AugmentedPointSet, cell: tuple[int, int]) -> tuple[int, int]:
    """The point in ``cell``'s column with the largest time strictly below
    Time(cell); defined for marked points only."""
    k, t = cell
    if not aug.is_marked(cell):
        raise SweepError(f"first_above is defined for marked points, got {cell}")
    times = aug.col_times[k]
    i = bisect.bisect_left(times, t)
    if i == 0:
        raise SweepError(f"marked point {cell} has nothing above it; structure corrupted")
    return (k, times[i - 1])


# Structural invariant checks.  Each returns a list of violations (empty on
# conforming instances); they are pure functions of the finished sweep.

def check_nothing_above(aug: AugmentedPointSet) -> list[tuple]:
    out = []
    for x in range(1, aug.n + 1):
        times = aug.col_times[x]
        if times and times[0] != aug.time_of_key[x]:
            out.append(("nothing-above", (x, times[0])))
    return out


def _greedy_property_side(aug: AugmentedPointSet, grid: GridIndex, right: bool) -> list[tuple]:
    out = []
    n = aug.n
    for t in range(1, n + 1):
        keys = aug.row_keys[t]
        for i, k in enumerate(keys):
            times = aug.col_times[k]
            j = bisect.bisect_left(times, t)
            ta = times[j - 1] if j > 0 else 0
            if right:
                nk = keys[i + 1] if i + 1 < len(keys) else n + 1
                cnt = grid.count_all(k + 1, nk - 1, ta + 1, t - 1)
            else:
                pk = keys[i - 1] if i > 0 else 0
                cnt = grid.count_all(pk + 1, k - 1, ta + 1, t - 1)
            if cnt:
                out.append(("greedy-property" if right else "greedy-property-left", (k, t)))
    return out


def check_greedy_property(aug: AugmentedPointSet, grid: GridIndex | None = None) -> list[tuple]:
    """Every NE (and NW) rectangle over X u G has a witness adjacent to its
    lower corner: either above it in its column or beside it on its row."""
    if grid is None:
        grid = aug.grid_index()
    return _greedy_property_side(aug, grid, right=True) + _greedy_property_side(aug, grid, right=False)


def _check_hidden_one_orientation(
    aug: AugmentedPointSet, grid: GridIndex, right: bool
) -> list[tuple]:
    # For s marked with predecessor w in its column c: a point r strictly
    # between that column and the column of OP(s), with time in [Time(w),
    # Time(s)), violates the hidden lemma, provided some point p exists
    # beyond r on the far side (which is what makes r hide a column-c point
    # from p).  ``right`` mirrors the orientation.
    out = []
    n = aug.n
    name = "hidden" if not right else "hidden-right"
    for c in range(1, n + 1):
        times = aug.col_times[c]
        for idx in range(1, len(times)):
            ts = times[idx]
            s = (c, ts)
            if not aug.is_marked(s):
                continue
            kop = aug.key_at_time[ts]
            if (kop <= c) if not right else (kop >= c):
                continue
            tw = times[idx - 1]
            x1, x2 = (c + 1, kop) if not right else (kop, c - 1)
            if grid.count_all(x1, x2, tw, ts - 1) == 0:
                continue
            for tr in range(tw, ts):
                row = aug.row_keys[tr]
                j = bisect.bisect_left(row, x1)
                while j < len(row) and row[j] <= x2:
                    kr = row[j]
                    if not right:
                        strict_p = grid.exists_beyond(kr + 1, tr)
                        loose_p = grid.exists_beyond(kr, tr)
                    else:
                        strict_p = grid.exists_before(kr - 1, tr)
                        loose_p = grid.exists_before(kr, tr)
                    if tr > tw:
                        applies = strict_p
                    else:
                        col_above = idx >= 2
                        applies = loose_p or (col_above and strict_p)
                    if applies:
                        out.append((name, {"r": (kr, tr), "s": s, "op_s": (kop, ts)}))
                    j += 1
    return out


def check_hidden(aug: AugmentedPointSet, grid: GridIndex | None = None) -> list[tuple]:
    """Hidden-point lemma, both orientations."""
    if grid is None:
        grid = aug.grid_index()
    return _check_hidden_one_orientation(aug, grid, right=False) + _check_hidden_one_orientation(
        aug, grid, right=True
    )
