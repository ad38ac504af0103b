"""Pair taxonomy for marked points.

Every marked point is coupled to a pair of originals: its own row's original
and the original of the first point above it.  The pair is a *zig* when the
upper original lands beyond the lower one (away from the mark) and a *zag*
when it lands above or beyond the mark itself; one of the two always holds.
Zag pairs split further into *good* (no original strictly inside the spanned
rectangle) and *bad*.  Bad pairs are either mapped to a nearby zig point by
the partial association map or remain *observable*.
"""

from __future__ import annotations

import bisect
import io
from collections import Counter
from dataclasses import dataclass, field
from typing import Mapping, NamedTuple, Sequence

from .decomposition import DecompositionTree, validate_tree
from .greedy import AugmentedPointSet, first_above
from .indexing import GridIndex

SIDE_L = "L"
SIDE_R = "R"
ZIG = "zig"
ZAG = "zag"
GOOD = "good"
BAD = "bad"
SLASH = "slash"
BACKSLASH = "backslash"

Cell = tuple[int, int]


class ClassificationError(RuntimeError):
    """A marked point violates the pair taxonomy (should be impossible)."""


@dataclass(frozen=True, slots=True)
class PairRecord:
    marked: Cell
    p: Cell
    q_above: Cell
    q: Cell
    side: str
    cls: str
    goodness: str | None  # None for zig pairs
    orientation: str

    @property
    def pair(self) -> tuple[Cell, Cell]:
        return (self.p, self.q)


@dataclass
class Tally:
    """Counted set sizes for one instance."""

    n: int
    g_total: int = 0
    mmc: int = 0
    mfc: int = 0
    gr: int = 0
    br: int = 0
    cp_pairs: int = 0  # distinct pairs; a pair may recur once as L-zag and R-zig
    r_marks: int = 0
    l_marks: int = 0
    rmmc_p: Counter = field(default_factory=Counter)
    lmmc_p: Counter = field(default_factory=Counter)
    rmfc_p: Counter = field(default_factory=Counter)  # bad zag pairs per original, by side
    lmfc_p: Counter = field(default_factory=Counter)
    observable: int = 0
    mapped: int = 0
    s1_prime_original: int = 0

    def max_per_point(self) -> dict[str, int]:
        return {
            "rmmc": max(self.rmmc_p.values(), default=0),
            "lmmc": max(self.lmmc_p.values(), default=0),
            "rmfc": max(self.rmfc_p.values(), default=0),
            "lmfc": max(self.lmfc_p.values(), default=0),
        }

    def invariant_failures(self) -> list[str]:
        out = []
        if self.mmc + self.mfc != self.g_total:
            out.append(f"zig+zag = {self.mmc}+{self.mfc} != |G| = {self.g_total}")
        if self.gr + self.br != self.mfc:
            out.append(f"good+bad = {self.gr}+{self.br} != zag = {self.mfc}")
        if self.cp_pairs > self.mmc + self.mfc:
            out.append(f"distinct pairs {self.cp_pairs} > zig+zag {self.mmc + self.mfc}")
        if max(self.r_marks, self.l_marks) > self.cp_pairs:
            out.append(
                f"per-side injectivity bound broken: "
                f"max({self.r_marks},{self.l_marks}) > {self.cp_pairs} distinct pairs"
            )
        if self.g_total > 2 * self.cp_pairs:
            out.append(f"|G| = {self.g_total} > 2*|CP(G)| = {2 * self.cp_pairs}")
        return out


def _classify(aug: AugmentedPointSet, marked: Cell, grid: GridIndex | None) -> PairRecord:
    mk, mt = marked
    p = aug.op(marked)
    side = SIDE_R if mk > p[0] else SIDE_L
    q_above = first_above(aug, marked)
    q = aug.op(q_above)
    if side == SIDE_R:
        if q[0] < p[0]:
            cls = ZIG
        elif q[0] >= mk:
            cls = ZAG
        else:
            raise ClassificationError(
                f"marked {marked}: upper original {q} strictly between {p} and the mark"
            )
    else:
        if q[0] > p[0]:
            cls = ZIG
        elif q[0] <= mk:
            cls = ZAG
        else:
            raise ClassificationError(
                f"marked {marked}: upper original {q} strictly between the mark and {p}"
            )
    # Rectangle spanned by the pair: slash opens to the upper right.
    orientation = SLASH if (cls == ZAG) == (side == SIDE_R) else BACKSLASH
    goodness = None
    if cls == ZAG:
        x1, x2 = (p[0], q[0]) if p[0] < q[0] else (q[0], p[0])
        if grid is not None:
            inside = grid.count_originals_open(x1, x2, q[1], p[1])
        else:
            inside = 0
            for t in range(q[1] + 1, p[1]):
                if x1 < aug.key_at_time[t] < x2:
                    inside += 1
        goodness = GOOD if inside == 0 else BAD
    return PairRecord(marked, p, q_above, q, side, cls, goodness, orientation)


def cp(aug: AugmentedPointSet, marked: Cell, grid: GridIndex | None = None) -> PairRecord:
    """The coupled pair of one marked point, fully classified."""
    if not aug.is_marked(tuple(marked)):
        raise ClassificationError(f"{marked} is not a marked point")
    return _classify(aug, tuple(marked), grid)


def classify_all(
    aug: AugmentedPointSet,
    tree: DecompositionTree | None = None,
    grid: GridIndex | None = None,
) -> tuple[Tally, list[PairRecord]]:
    """One PairRecord per marked point plus the tally of all counted sets.

    The tally includes the association-map results (mapped/observable).  When
    a tree is supplied it is validated against the permutation first.
    """
    if tree is not None and not validate_tree(aug.perm, tree):
        raise ClassificationError("decomposition tree does not match the permutation")
    if grid is None:
        grid = aug.grid_index()
    records = [_classify(aug, m, grid) for m in aug.marks()]
    tally = Tally(n=aug.n, g_total=len(records))
    pairs = set()
    for rec in records:
        pairs.add(rec.pair)
        if rec.side == SIDE_R:
            tally.r_marks += 1
        else:
            tally.l_marks += 1
        if rec.cls == ZIG:
            tally.mmc += 1
            (tally.rmmc_p if rec.side == SIDE_R else tally.lmmc_p)[rec.p] += 1
        else:
            tally.mfc += 1
            if rec.goodness == GOOD:
                tally.gr += 1
            else:
                tally.br += 1
                (tally.rmfc_p if rec.side == SIDE_R else tally.lmfc_p)[rec.p] += 1
    tally.cp_pairs = len(pairs)
    amc = amc_all(aug, records)
    tally.mapped = amc.mapped
    tally.observable = amc.observable
    tally.s1_prime_original = amc.s1_prime_original
    return tally, records


def check_unique_coupling(records: Sequence[PairRecord]) -> list[tuple]:
    """CP is injective on left-marked and on right-marked points separately."""
    seen: dict[tuple, Cell] = {}
    out = []
    for rec in records:
        key = (rec.side, rec.pair)
        if key in seen:
            out.append(("unique-coupling", seen[key], rec.marked, rec.pair))
        else:
            seen[key] = rec.marked
    return out


class AmcOutcome(NamedTuple):
    marked: Cell
    status: str  # "mapped" | "observable"
    target: Cell | None
    s1_prime_original: bool


@dataclass
class AmcResult:
    outcomes: list[AmcOutcome]
    mapped: int
    observable: int
    s1_prime_original: int
    preimages: Counter  # (side, target) -> count
    observable_by_p: Counter  # (side, p) -> count

    def max_preimages(self) -> int:
        return max(self.preimages.values(), default=0)


def amc_map(
    aug: AugmentedPointSet,
    record: PairRecord | Cell,
    record_of: Mapping[Cell, PairRecord],
) -> AmcOutcome:
    """Associate one bad-pair point with a nearby zig point, if possible.

    Walk to the next point beside the mark (away from its original); if its
    pair is a zig, map there; otherwise look at the first point above it.  A
    missing neighbour is a structural violation, never skipped silently.
    Accepts either the marked cell or its record.
    """
    if not isinstance(record, PairRecord):
        record = record_of[tuple(record)]
    if record.cls != ZAG or record.goodness != BAD:
        raise ClassificationError("association map applies to bad zag pairs only")
    mk, mt = record.marked
    row = aug.row_keys[mt]
    i = bisect.bisect_left(row, mk)
    j = i + 1 if record.side == SIDE_R else i - 1
    if j < 0 or j >= len(row):
        raise ClassificationError(
            f"bad pair at {record.marked} has no neighbour on its row (side {record.side})"
        )
    p1p = (row[j], mt)
    rec1 = record_of.get(p1p)
    if rec1 is None:
        raise ClassificationError(f"row neighbour {p1p} of bad pair {record.marked} is original")
    if rec1.cls == ZIG:
        return AmcOutcome(record.marked, "mapped", p1p, False)
    s1p = first_above(aug, p1p)
    rec2 = record_of.get(s1p)
    if rec2 is None:
        # s1' original: observed, not assumed impossible.
        return AmcOutcome(record.marked, "observable", None, True)
    if rec2.cls == ZIG:
        return AmcOutcome(record.marked, "mapped", s1p, False)
    return AmcOutcome(record.marked, "observable", None, False)


def amc_all(aug: AugmentedPointSet, records: Sequence[PairRecord]) -> AmcResult:
    record_of = {rec.marked: rec for rec in records}
    outcomes = []
    preimages: Counter = Counter()
    observable_by_p: Counter = Counter()
    mapped = observable = s1_orig = 0
    for rec in records:
        if rec.cls != ZAG or rec.goodness != BAD:
            continue
        out = amc_map(aug, rec, record_of)
        outcomes.append(out)
        if out.status == "mapped":
            mapped += 1
            preimages[(rec.side, out.target)] += 1
        else:
            observable += 1
            observable_by_p[(rec.side, rec.p)] += 1
            if out.s1_prime_original:
                s1_orig += 1
    return AmcResult(outcomes, mapped, observable, s1_orig, preimages, observable_by_p)


def check_sibling_distinctness(
    aug: AugmentedPointSet,
    tree: DecompositionTree,
    records: Sequence[PairRecord] | None = None,
    amc: AmcResult | None = None,
) -> list[tuple]:
    """Pair locality along the decomposition tree.

    For CP(p1) = (p, q): q lies in the parent block of RT(p), in a sibling of
    RT(p); distinct zig pairs of one original land in pairwise distinct
    siblings, and so do its observable bad pairs (per side).
    """
    if records is None:
        _, records = classify_all(aug, tree)
    if amc is None:
        amc = amc_all(aug, records)
    observable_marks = {o.marked for o in amc.outcomes if o.status == "observable"}
    out = []
    zig_slots: dict[tuple, set[int]] = {}
    obs_slots: dict[tuple, set[int]] = {}
    for rec in records:
        b = tree.rt(rec.p)
        parent = b.parent
        if parent is None:
            out.append(("reversetop", rec.marked, "pair rooted at the first access"))
            continue
        qt = rec.q[1]
        if not (parent.t_lo <= qt <= parent.t_hi):
            out.append(("notoutsideblock", rec.marked, rec.pair))
            continue
        idx = bisect.bisect_right([c.t_lo for c in parent.children], qt) - 1
        sib = parent.children[idx]
        if not (sib.t_lo <= qt <= sib.t_hi):
            out.append(("notoutsideblock", rec.marked, rec.pair))
            continue
        if sib is b:
            out.append(("reversetop", rec.marked, rec.pair))
            continue
        if rec.cls == ZIG:
            slots = zig_slots.setdefault((rec.side, rec.p), set())
            if id(sib) in slots:
                out.append(("finalmmc", rec.p, rec.side, rec.pair))
            slots.add(id(sib))
        elif rec.marked in observable_marks:
            slots = obs_slots.setdefault((rec.side, rec.p), set())
            if id(sib) in slots:
                out.append(("finalmfc", rec.p, rec.side, rec.pair))
            slots.add(id(sib))
    return out


CSV_HEADER = "marked_key,marked_time,p_key,p_time,q_key,q_time,side,class,goodness,orientation"


def records_to_csv(records: Sequence[PairRecord]) -> str:
    buf = io.StringIO()
    buf.write(CSV_HEADER + "\n")
    for r in records:
        goodness = r.goodness if r.goodness is not None else "na"
        buf.write(
            f"{r.marked[0]},{r.marked[1]},{r.p[0]},{r.p[1]},{r.q[0]},{r.q[1]},"
            f"{r.side},{r.cls},{goodness},{r.orientation}\n"
        )
    return buf.getvalue()
