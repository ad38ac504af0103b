"""Block-level accounting over a decomposition tree.

For each block: the box it spans, the empty strip above it, the region below
it down to its parent's last access (RG), the first marks beside its top
access (Left/Right), and the key-new / key-old / key-live bookkeeping of the
marks that land in RG.  ``check_block_lemmas`` replays all of it and verifies
every stated structural fact, reporting violations with coordinates.
"""

from __future__ import annotations

import bisect
import json
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .decomposition import BlockNode, DecompositionTree, validate_tree
from .greedy import AugmentedPointSet, first_above
from .indexing import GridIndex
from .pairs import SIDE_R, ZAG, ZIG, AmcResult, PairRecord, amc_all, classify_all

Cell = tuple[int, int]

KEY_NEW = "new"
KEY_OLD = "old"


@dataclass
class BlockGeometry:
    node: BlockNode
    box_points: list[Cell]
    upb: tuple[int, int, int]  # key range and exclusive lower time bound
    rg: tuple[int, int, int, int] | None  # key range, exclusive time window
    left: Cell | None
    right: Cell | None
    mint: Cell
    maxt: Cell
    mink: Cell
    maxk: Cell


def _left_right(aug: AugmentedPointSet, node: BlockNode) -> tuple[Cell | None, Cell | None]:
    t = node.t_lo
    top_key = aug.key_at_time[t]
    marks = aug.marks_by_row[t]
    i = bisect.bisect_left(marks, top_key)
    left = (marks[i - 1], t) if i > 0 else None
    right = (marks[i], t) if i < len(marks) else None
    return left, right


def block_geometry(aug: AugmentedPointSet, tree: DecompositionTree, node: BlockNode) -> BlockGeometry:
    """Regions and landmark points of one block."""
    box = [
        (k, t)
        for t in range(node.t_lo, node.t_hi + 1)
        for k in aug.row_keys[t]
        if node.k_lo <= k <= node.k_hi
    ]
    left, right = _left_right(aug, node)
    rg = None
    if node.parent is not None:
        rg = (node.k_lo, node.k_hi, node.t_hi, node.parent.t_hi)
    return BlockGeometry(
        node=node,
        box_points=box,
        upb=(node.k_lo, node.k_hi, node.t_lo),
        rg=rg,
        left=left,
        right=right,
        mint=(aug.key_at_time[node.t_lo], node.t_lo),
        maxt=(aug.key_at_time[node.t_hi], node.t_hi),
        mink=(node.k_lo, aug.time_of_key[node.k_lo]),
        maxk=(node.k_hi, aug.time_of_key[node.k_hi]),
    )


def _rg_points(aug: AugmentedPointSet, node: BlockNode) -> list[Cell]:
    if node.parent is None:
        return []
    out = []
    for t in range(node.t_hi + 1, node.parent.t_hi):
        row = aug.marks_by_row[t]
        i = bisect.bisect_left(row, node.k_lo)
        while i < len(row) and row[i] <= node.k_hi:
            out.append((row[i], t))
            i += 1
    out.sort(key=lambda c: (c[1], c[0]))
    return out


@dataclass
class KeyLedger:
    window: list[BlockNode]
    entries: list[tuple[Cell, str]]  # region points in time order, tagged new/old
    live_counts: dict[int, int]  # query time -> number of live keys

    def tag_of(self, cell: Cell) -> str:
        for c, tag in self.entries:
            if c == cell:
                return tag
        raise KeyError(cell)


def _live_key_count_sorted(time_lists: list[list[int]], t: int) -> int:
    """Live keys at query time t; one sorted time list per key, in key order."""
    m = len(time_lists)
    latest = [0] * m
    for i, ts in enumerate(time_lists):
        j = bisect.bisect_left(ts, t)
        latest[i] = ts[j - 1] if j > 0 else -1
    live = 0
    pref = [-1] * m
    for i in range(1, m):
        pref[i] = max(pref[i - 1], latest[i - 1])
    suf = [-1] * m
    for i in range(m - 2, -1, -1):
        suf[i] = max(suf[i + 1], latest[i + 1])
    for i in range(m):
        if latest[i] < 0:
            continue
        if pref[i] >= latest[i] and suf[i] >= latest[i]:
            continue
        live += 1
    return live


def _live_key_count(times_by_key: dict[int, list[int]], t: int) -> int:
    return _live_key_count_sorted([times_by_key[k] for k in sorted(times_by_key)], t)


def key_ledger(
    aug: AugmentedPointSet, tree: DecompositionTree, window: Sequence[BlockNode]
) -> KeyLedger:
    """Key-new/key-old tags and the live-key timeline for one sibling window."""
    window = list(window)
    if not window:
        return KeyLedger([], [], {})
    parent = window[0].parent
    for b in window:
        if b.parent is not parent:
            raise ValueError("window blocks must share one parent")
    pts: list[Cell] = []
    for b in window:
        pts.extend(_rg_points(aug, b))
    pts.sort(key=lambda c: (c[1], c[0]))
    seen: set[int] = set()
    entries = []
    times_by_key: dict[int, list[int]] = defaultdict(list)
    for (k, t) in pts:
        entries.append(((k, t), KEY_NEW if k not in seen else KEY_OLD))
        seen.add(k)
        times_by_key[k].append(t)
    t_start = parent.t_lo if parent is not None else min((b.t_lo for b in window), default=1)
    t_end = (parent.t_hi if parent is not None else max(b.t_hi for b in window)) + 1
    live_counts = {t: _live_key_count(times_by_key, t) for t in range(t_start, t_end + 1)}
    return KeyLedger(window, entries, live_counts)


@dataclass
class LemmaReport:
    checks_run: Counter = field(default_factory=Counter)
    violations: list[tuple] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, check: str, block, window, detail) -> None:
        self.violations.append((check, block, window, detail))

    def to_json(self) -> str:
        entries = [
            {"check": c, "block": repr(b), "window": repr(w), "violations": [repr(d)]}
            for (c, b, w, d) in self.violations
        ]
        return json.dumps(
            {"entries": entries, "checks_run": dict(self.checks_run), "ok": self.ok},
            sort_keys=True,
        )


class _RangeMax:
    """O(1) range maximum over a 1-indexed array (sparse table)."""

    def __init__(self, values: list[int]):
        arr = np.asarray(values, dtype=np.int64)
        levels = [arr]
        span = 1
        while 2 * span <= len(arr):
            prev = levels[-1]
            levels.append(np.maximum(prev[: len(arr) - 2 * span + 1], prev[span:]))
            span *= 2
        self.tabs = [lv.tolist() for lv in levels]

    def query(self, lo: int, hi: int) -> int | None:
        if lo > hi:
            return None
        level = (hi - lo + 1).bit_length() - 1
        tab = self.tabs[level]
        return max(tab[lo], tab[hi - (1 << level) + 1])


class _RangeMin:
    def __init__(self, values: list[int]):
        arr = np.asarray(values, dtype=np.int64)
        levels = [arr]
        span = 1
        while 2 * span <= len(arr):
            prev = levels[-1]
            levels.append(np.minimum(prev[: len(arr) - 2 * span + 1], prev[span:]))
            span *= 2
        self.tabs = [lv.tolist() for lv in levels]

    def query(self, lo: int, hi: int) -> int | None:
        if lo > hi:
            return None
        level = (hi - lo + 1).bit_length() - 1
        tab = self.tabs[level]
        return min(tab[lo], tab[hi - (1 << level) + 1])


def _first_after(key_at_time: list[int], queries: list[tuple[int, int, int]]) -> list[int | None]:
    """Offline batch: earliest time strictly greater than T with key in [a, b].

    Sweep times descending, inserting originals into a key-indexed min-time
    segment tree; a query (T, a, b) is answered once everything later than T
    is in the tree.
    """
    n = len(key_at_time) - 1
    size = 1
    while size < max(n, 1):
        size *= 2
    INF = n + 1
    seg = [INF] * (2 * size)

    def range_min(a: int, b: int) -> int | None:
        if a > b or b < 1 or a > n:
            return None
        lo = size + max(a, 1) - 1
        hi = size + min(b, n) - 1
        best = INF
        while lo <= hi:
            if lo & 1:
                best = min(best, seg[lo])
                lo += 1
            if not hi & 1:
                best = min(best, seg[hi])
                hi -= 1
            lo //= 2
            hi //= 2
        return None if best >= INF else best

    answers: list[int | None] = [None] * len(queries)
    order = sorted(range(len(queries)), key=lambda i: -queries[i][0])
    qi = 0
    for t in range(n, 0, -1):
        while qi < len(order) and queries[order[qi]][0] >= t:
            idx = order[qi]
            _, a, b = queries[idx]
            answers[idx] = range_min(a, b)
            qi += 1
        pos = size + key_at_time[t] - 1
        seg[pos] = t
        pos //= 2
        while pos:
            seg[pos] = min(seg[2 * pos], seg[2 * pos + 1])
            pos //= 2
    while qi < len(order):
        idx = order[qi]
        _, a, b = queries[idx]
        answers[idx] = range_min(a, b)
        qi += 1
    return answers


def _relatives(
    aug: AugmentedPointSet, nodes: list[BlockNode], lefts: dict, rights: dict
) -> dict[BlockNode, set[int]]:
    """Per block: times of its left/right relative originals (at most 4).

    The left relatives are the first originals after the block ends with key
    strictly left of Left(B) and with key strictly between Left(B) and the
    block; one region when Left(B) is absent.  Right side mirrored.
    """
    queries: list[tuple[int, int, int]] = []
    owners: list[BlockNode] = []
    for node in nodes:
        if node.parent is None:
            continue
        t = node.t_hi
        lkey = lefts[node][0] if lefts[node] else None
        rkey = rights[node][0] if rights[node] else None
        if lkey is None:
            ranges = [(1, node.k_lo - 1)]
        else:
            ranges = [(1, lkey - 1), (lkey + 1, node.k_lo - 1)]
        if rkey is None:
            ranges.append((node.k_hi + 1, aug.n))
        else:
            ranges.append((node.k_hi + 1, rkey - 1))
            ranges.append((rkey + 1, aug.n))
        for (a, b) in ranges:
            if a <= b:
                queries.append((t, a, b))
                owners.append(node)
    answers = _first_after(aug.key_at_time, queries)
    rel: dict[BlockNode, set[int]] = {node: set() for node in nodes}
    for node, ans in zip(owners, answers):
        if ans is not None:
            rel[node].add(ans)
    return rel


def check_block_lemmas(
    aug: AugmentedPointSet,
    tree: DecompositionTree,
    records: Sequence[PairRecord] | None = None,
    amc: AmcResult | None = None,
    grid: GridIndex | None = None,
) -> LemmaReport:
    """Every block-structure lemma, verified by replay over one instance.

    Covers: the empty strip above each block; no marks in a block's box while
    its top is processed; mark locations while processing non-top originals
    (beside the Left/Right columns or in sibling regions); Left/Right key
    bounds; key-new marks created only by relatives and classified zag; the
    live-key growth bound (+4) through sibling blocks; the halved-window
    partition sums (12m / 14m); and the witness original between consecutive
    same-row zig rectangles.
    """
    if not validate_tree(aug.perm, tree):
        raise ValueError("tree does not match the permutation")
    if records is None:
        _, records = classify_all(aug, grid=grid)
    if amc is None:
        amc = amc_all(aug, records)
    report = LemmaReport()
    nodes = tree.nodes()
    n = aug.n

    # Landmarks.
    lefts = {node: _left_right(aug, node)[0] for node in nodes}
    rights = {node: _left_right(aug, node)[1] for node in nodes}

    # upperbox: no point in the strip above any block.
    report.checks_run["upperbox"] += len(nodes)
    for node in nodes:
        for x in range(node.k_lo, node.k_hi + 1):
            times = aug.col_times[x]
            if times and times[0] < node.t_lo:
                report.add("upperbox", node.time_interval(), None, (x, times[0]))

    # topnotinbox: processing Top(B) never marks inside BOX(B).
    report.checks_run["topnotinbox"] += len(nodes)
    for node in nodes:
        row = aug.marks_by_row[node.t_lo]
        i = bisect.bisect_left(row, node.k_lo)
        if i < len(row) and row[i] <= node.k_hi:
            report.add("topnotinbox", node.time_interval(), None, (row[i], node.t_lo))

    # Left/Right key bounds.
    report.checks_run["left-right-bounds"] += len(nodes)
    for node in nodes:
        lf, rt = lefts[node], rights[node]
        if lf is not None and lf[0] >= node.k_lo:
            report.add("left-bound", node.time_interval(), None, lf)
        if rt is not None and rt[0] <= node.k_hi:
            report.add("right-bound", node.time_interval(), None, rt)

    # blockleftright: marks while processing r go below Left/Right of the
    # parent of RT(r), or into sibling columns.
    report.checks_run["blockleftright"] += 1
    for t in range(1, n + 1):
        marks = aug.marks_by_row[t]
        if not marks:
            continue
        rt_node = tree.rt((aug.key_at_time[t], t))
        parent = rt_node.parent
        if parent is None:
            for x in marks:
                report.add("blockleftright", None, None, (x, t))
            continue
        lkey = lefts[parent][0] if lefts[parent] else None
        rkey = rights[parent][0] if rights[parent] else None
        for x in marks:
            if x == lkey or x == rkey:
                continue
            if parent.k_lo <= x <= parent.k_hi and not (rt_node.k_lo <= x <= rt_node.k_hi):
                continue
            report.add("blockleftright", parent.time_interval(), rt_node.time_interval(), (x, t))

    # Assign every mark to the unique block whose RG contains it.
    rg_pts: dict[BlockNode, list[tuple[int, int, bool]]] = {node: [] for node in nodes}
    for (x, t) in aug.marks():
        node = tree.leaf_of_time(aug.time_of_key[x])
        while node.parent is not None and t > node.parent.t_hi:
            node = node.parent
        if node.parent is None or t >= node.parent.t_hi:
            continue
        rg_pts[node].append((t, x, False))
    for node in nodes:
        pts = sorted(rg_pts[node])
        seen: set[int] = set()
        tagged = []
        for (t, x, _) in pts:
            tagged.append((t, x, x not in seen))
            seen.add(x)
        rg_pts[node] = tagged

    # Relatives; key-new creators and their classification.
    rel = _relatives(aug, nodes, lefts, rights)
    cls_of = {rec.marked: rec.cls for rec in records}
    report.checks_run["pointotherthanrel"] += 1
    report.checks_run["key-newinmfc"] += 1
    for node in nodes:
        for (t, x, is_new) in rg_pts[node]:
            if not is_new:
                continue
            if t not in rel[node]:
                report.add("pointotherthanrel", node.time_interval(), None, (x, t))
            elif cls_of[(x, t)] != ZAG:
                report.add("key-newinmfc", node.time_interval(), None, (x, t))

    # Windowed checks over consecutive children, halved recursively.
    observable_marks = {o.marked for o in amc.outcomes if o.status == "observable"}

    def window_checks(parent: BlockNode, kids_by_key: list[BlockNode], lo: int, hi: int) -> None:
        size = hi - lo + 1
        if size < 2:
            return
        mid = lo + size // 2
        for (s_lo, s_hi, d_lo, d_hi) in ((lo, mid - 1, mid, hi), (mid, hi, lo, mid - 1)):
            dst = kids_by_key[d_lo : d_hi + 1]
            src_tops = {
                kids_by_key[i].t_lo for i in range(s_lo, s_hi + 1)
            } - {parent.t_lo}
            m = d_hi - d_lo + 1
            region: list[tuple[int, int, bool]] = []
            for b in dst:
                region.extend(rg_pts[b])
            key_old_by_creator: Counter = Counter()
            obs_by_creator: Counter = Counter()
            for (t, x, is_new) in region:
                if t in src_tops:
                    if not is_new:
                        key_old_by_creator[t] += 1
                    if (x, t) in observable_marks:
                        obs_by_creator[t] += 1
            partition_sum = sum(max(0, c - 2) for c in key_old_by_creator.values())
            report.checks_run["partitionlemma"] += 1
            if partition_sum > 12 * m:
                report.add(
                    "partitionlemma",
                    parent.time_interval(),
                    (d_lo, d_hi),
                    (partition_sum, 12 * m),
                )
            observable_sum = sum(obs_by_creator.values())
            report.checks_run["mfcpartitionlemma"] += 1
            if observable_sum > 14 * m:
                report.add(
                    "mfcpartitionlemma",
                    parent.time_interval(),
                    (d_lo, d_hi),
                    (observable_sum, 14 * m),
                )
            # Live-key accounting over the destination region.
            times_by_key: dict[int, list[int]] = defaultdict(list)
            for (t, x, _) in sorted(region):
                times_by_key[x].append(t)
            time_lists = [times_by_key[k] for k in sorted(times_by_key)]
            report.checks_run["key-livesameblock"] += len(dst)
            if _live_key_count_sorted(time_lists, parent.t_lo) != 0:
                report.add("live-at-top", parent.time_interval(), (d_lo, d_hi), None)
            for b in dst:
                before = _live_key_count_sorted(time_lists, b.t_lo)
                after = _live_key_count_sorted(time_lists, b.t_hi + 1)
                if after > before + 4:
                    report.add(
                        "key-livesameblock",
                        parent.time_interval(),
                        b.time_interval(),
                        (before, after),
                    )
        window_checks(parent, kids_by_key, lo, mid - 1)
        window_checks(parent, kids_by_key, mid, hi)

    for node in nodes:
        if node.children:
            kids_by_key = sorted(node.children, key=lambda c: c.k_lo)
            window_checks(node, kids_by_key, 0, len(kids_by_key) - 1)

    # mmc-witness: between two same-row zig rectangles of one original there
    # is an original key-beyond the nearer rectangle, strictly between their
    # upper corners in time.
    zig_r: dict[Cell, list[Cell]] = defaultdict(list)
    zig_l: dict[Cell, list[Cell]] = defaultdict(list)
    for rec in records:
        if rec.cls == ZIG:
            (zig_r[rec.p] if rec.side == SIDE_R else zig_l[rec.p]).append(rec.marked)
    if any(len(v) > 1 for v in zig_r.values()) or any(len(v) > 1 for v in zig_l.values()):
        rmax = _RangeMax(aug.key_at_time)
        rmin = _RangeMin(aug.key_at_time)
        for groups, right in ((zig_r, True), (zig_l, False)):
            for p, marks in groups.items():
                if len(marks) < 2:
                    continue
                marks = sorted(marks)
                report.checks_run["mmc-witness"] += len(marks) * (len(marks) - 1) // 2
                for i in range(len(marks)):
                    for j in range(i + 1, len(marks)):
                        a, b = (marks[i], marks[j]) if right else (marks[j], marks[i])
                        ra = first_above(aug, a)
                        rb = first_above(aug, b)
                        if ra[1] >= rb[1]:
                            report.add("mmc-witness-order", p, None, (a, b))
                            continue
                        if right:
                            best = rmax.query(ra[1] + 1, rb[1] - 1)
                            found = best is not None and best > ra[0]
                        else:
                            best = rmin.query(ra[1] + 1, rb[1] - 1)
                            found = best is not None and best < ra[0]
                        if not found:
                            report.add("mmc-witness", p, None, (a, b))
    return report

