"""Counting indexes shared by the bulk invariant checks.

A ``GridIndex`` holds two cumulative-count grids over the n x n cell grid
(one for all points, one for originals only) plus suffix structures for
"is there any point beyond (key, time)" queries.  Everything is read-only
after construction.
"""

from __future__ import annotations

import numpy as np


class GridIndex:
    __slots__ = ("n", "_all", "_orig", "_sfx_max_time", "_pfx_max_time")

    def __init__(self, n: int, all_cells, orig_cells):
        self.n = n
        self._all = self._prefix(n, all_cells)
        self._orig = self._prefix(n, orig_cells)
        # Per-column latest time, scanned from both ends: used for
        # "exists a point with key >=/<= K and time > T" probes.
        col_last = np.zeros(n + 2, dtype=np.int64)
        for (k, t) in all_cells:
            if t > col_last[k]:
                col_last[k] = t
        sfx = col_last.copy()
        for x in range(n - 1, 0, -1):
            if sfx[x + 1] > sfx[x]:
                sfx[x] = sfx[x + 1]
        pfx = col_last.copy()
        for x in range(2, n + 1):
            if pfx[x - 1] > pfx[x]:
                pfx[x] = pfx[x - 1]
        self._sfx_max_time = sfx
        self._pfx_max_time = pfx

    @staticmethod
    def _prefix(n: int, cells) -> np.ndarray:
        grid = np.zeros((n + 1, n + 1), dtype=np.int32)
        for (k, t) in cells:
            grid[t, k] = 1
        grid.cumsum(axis=0, out=grid)
        grid.cumsum(axis=1, out=grid)
        return grid

    @classmethod
    def from_aug(cls, aug) -> "GridIndex":
        n = aug.n
        orig = [(aug.key_at_time[t], t) for t in range(1, n + 1)]
        allc = list(orig)
        for t in range(1, n + 1):
            for k in aug.marks_by_row[t]:
                allc.append((k, t))
        return cls(n, allc, orig)

    def _count(self, pre: np.ndarray, x1: int, x2: int, t1: int, t2: int) -> int:
        x1 = max(x1, 1)
        t1 = max(t1, 1)
        x2 = min(x2, self.n)
        t2 = min(t2, self.n)
        if x1 > x2 or t1 > t2:
            return 0
        return int(pre[t2, x2] - pre[t1 - 1, x2] - pre[t2, x1 - 1] + pre[t1 - 1, x1 - 1])

    def count_all(self, x1: int, x2: int, t1: int, t2: int) -> int:
        """Points of X u G in the closed rectangle [x1,x2] x [t1,t2]."""
        return self._count(self._all, x1, x2, t1, t2)

    def count_originals(self, x1: int, x2: int, t1: int, t2: int) -> int:
        return self._count(self._orig, x1, x2, t1, t2)

    def count_all_open(self, x1: int, x2: int, t1: int, t2: int) -> int:
        """Points strictly inside (x1,x2) x (t1,t2)."""
        return self._count(self._all, x1 + 1, x2 - 1, t1 + 1, t2 - 1)

    def count_originals_open(self, x1: int, x2: int, t1: int, t2: int) -> int:
        return self._count(self._orig, x1 + 1, x2 - 1, t1 + 1, t2 - 1)

    def exists_beyond(self, key_from: int, time_after: int) -> bool:
        """Any point with key >= key_from and time > time_after?"""
        if key_from > self.n:
            return False
        return bool(self._sfx_max_time[max(key_from, 1)] > time_after)

    def exists_before(self, key_to: int, time_after: int) -> bool:
        """Any point with key <= key_to and time > time_after?"""
        if key_to < 1:
            return False
        return bool(self._pfx_max_time[min(key_to, self.n)] > time_after)

    def count_all_batch(self, x1, x2, t1, t2) -> np.ndarray:
        """Vectorized closed-rectangle counts over aligned coordinate arrays."""
        pre = self._all
        x1 = np.asarray(x1)
        x2 = np.asarray(x2)
        t1 = np.asarray(t1)
        t2 = np.asarray(t2)
        return pre[t2, x2] - pre[t1 - 1, x2] - pre[t2, x1 - 1] + pre[t1 - 1, x1 - 1]
