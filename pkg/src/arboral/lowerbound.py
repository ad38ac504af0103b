"""Good-rectangle lower-bound certificates and the exact-OPT oracle.

Good zag pairs span rectangles whose interiors are empty of every point the
sweep ever placed.  Split by orientation, each family admits a marking
procedure: repeatedly take the rectangle at the extreme key, find a vertical
line through its interior crossing no other remaining rectangle, and record
the horizontally adjacent pair of points straddling that line inside it.
The recorded pairs are pairwise distinct and contain at most one input point
each, so any satisfied superset must carry at least one extra point per
rectangle.  ``brute_force_opt`` provides the minimum satisfied superset on
tiny instances (grid-candidate model) to test the bound end to end.
"""

from __future__ import annotations

import bisect
import io
import itertools
from dataclasses import dataclass
from typing import NamedTuple, Sequence

from .geometry import MARKED, ORIGINAL, Point, PointSet, validate_permutation
from .greedy import AugmentedPointSet, greedy_sweep
from .indexing import GridIndex
from .pairs import BACKSLASH, GOOD, SLASH, PairRecord, classify_all

Cell = tuple[int, int]


class CertificateError(RuntimeError):
    """Certificate extraction failed; exposes a bug or a falsified lemma."""


class OptLimitError(ValueError):
    """Exact-OPT request beyond the configured instance-size limit."""


class GoodRect(NamedTuple):
    tl: Cell  # earlier-time, smaller-key corner
    br: Cell  # later-time, larger-key corner
    marked: Cell


@dataclass(frozen=True)
class RectFamily:
    orientation: str  # SLASH or BACKSLASH
    rects: tuple[GoodRect, ...]

    def __len__(self) -> int:
        return len(self.rects)


class Marking(NamedTuple):
    rect_p: Cell
    rect_q: Cell
    line_x2: int  # doubled line position, odd
    a: Cell
    b: Cell
    a_in_x: bool
    b_in_x: bool


@dataclass(frozen=True)
class Certificate:
    orientation: str
    markings: tuple[Marking, ...]

    def __len__(self) -> int:
        return len(self.markings)


@dataclass(frozen=True)
class OptResult:
    y: tuple[Cell, ...]
    size: int
    superset: PointSet


def _families(records: Sequence[PairRecord]) -> tuple[list[GoodRect], list[GoodRect]]:
    backslash: list[GoodRect] = []
    slash: list[GoodRect] = []
    for rec in records:
        if rec.cls != "zag" or rec.goodness != GOOD:
            continue
        if rec.orientation == BACKSLASH:
            backslash.append(GoodRect(rec.q, rec.p, rec.marked))
        else:
            # Slash rectangle _p[]^q: normalize corners to (top-right, bottom-left).
            slash.append(GoodRect(rec.q, rec.p, rec.marked))
    return backslash, slash


def verify_good_interiors(
    records: Sequence[PairRecord], grid: GridIndex
) -> list[tuple]:
    """Open interiors of good rectangles contain nothing from X u G."""
    out = []
    for rec in records:
        if rec.cls != "zag" or rec.goodness != GOOD:
            continue
        x1, x2 = sorted((rec.p[0], rec.q[0]))
        t1, t2 = rec.q[1], rec.p[1]
        if grid.count_all_open(x1, x2, t1, t2):
            out.append(("property-good-rectangle", rec.marked, rec.pair))
    return out


def good_rectangles(
    records: Sequence[PairRecord],
    aug: AugmentedPointSet,
    grid: GridIndex | None = None,
) -> tuple[RectFamily, RectFamily]:
    """Good pairs partitioned by orientation, interiors re-verified."""
    if grid is None:
        grid = aug.grid_index()
    bad = verify_good_interiors(records, grid)
    if bad:
        raise CertificateError(f"good-rectangle interior violated: {bad[:3]}")
    backslash, slash = _families(records)
    return (
        RectFamily(BACKSLASH, tuple(backslash)),
        RectFamily(SLASH, tuple(slash)),
    )


def check_good_interactions(
    aug: AugmentedPointSet,
    records: Sequence[PairRecord] | None = None,
    grid: GridIndex | None = None,
    pairwise_limit: int = 600,
) -> list[tuple]:
    """Forbidden overlap configurations between good rectangles of one family.

    Interior-membership conclusions are implied by the empty-interior check
    (a marked point inside another rectangle would already violate it), so at
    scale only the shared-corner boundary patterns need explicit scanning;
    small families additionally run the literal pairwise scan.
    """
    if grid is None:
        grid = aug.grid_index()
    if records is None:
        _, records = classify_all(aug, grid=grid)
    out = list(verify_good_interiors(records, grid))
    backslash, slash = _families(records)
    n = aug.n

    def mirror(rects: list[GoodRect]) -> list[GoodRect]:
        # Slash rectangles are stored corner-on-point (top-right, bottom-left);
        # reflecting keys turns them into backslash (top-left, bottom-right).
        return [
            GoodRect(
                (n + 1 - r.tl[0], r.tl[1]),
                (n + 1 - r.br[0], r.br[1]),
                (n + 1 - r.marked[0], r.marked[1]),
            )
            for r in rects
        ]

    for tag, fam in (("backslash", backslash), ("slash", mirror(slash))):
        by_br: dict[Cell, list[GoodRect]] = {}
        by_tl: dict[Cell, list[GoodRect]] = {}
        for r in fam:
            by_br.setdefault(r.br, []).append(r)
            by_tl.setdefault(r.tl, []).append(r)
        for group in by_br.values():
            for a, b in itertools.permutations(group, 2):
                if a.tl[0] < b.tl[0] and a.tl[1] > b.tl[1]:
                    if b.tl[0] < a.marked[0] < a.br[0]:
                        out.append(("interthree", tag, a.marked, a.br))
        for group in by_tl.values():
            for a, b in itertools.permutations(group, 2):
                if b.br[0] < a.br[0] and b.br[1] > a.br[1]:
                    if a.tl[0] < a.marked[0] < b.br[0] or a.marked[0] == a.tl[0]:
                        out.append(("interfour", tag, a.marked, a.tl))
        if len(fam) <= pairwise_limit:
            for a, b in itertools.permutations(fam, 2):
                inside = (
                    b.tl[0] < a.marked[0] < b.br[0] and b.tl[1] < a.marked[1] < b.br[1]
                )
                if not inside:
                    continue
                if b.tl[0] < a.tl[0] and b.tl[1] > a.tl[1] and b.br[0] < a.br[0] and b.br[1] > a.br[1]:
                    out.append(("interone", tag, a.marked, (b.tl, b.br)))
                elif a.tl[0] < b.tl[0] and a.tl[1] > b.tl[1] and b.br[0] < a.br[0] and b.br[1] > a.br[1]:
                    out.append(("intertwo", tag, a.marked, (b.tl, b.br)))
    return out


def _mirror_pointset(ps: PointSet) -> PointSet:
    n = ps.n
    return PointSet(n, [Point(n + 1 - p.key, p.time, p.kind) for p in ps.points()], strict=False)


def _extract_backslash(rects: list[GoodRect], superset: PointSet) -> list[Marking]:
    remaining = list(rects)
    markings: list[Marking] = []
    while remaining:
        ref_key = max(r.br[0] for r in remaining)
        at_corner = [r for r in remaining if r.br[0] == ref_key]
        widths = sorted(at_corner, key=lambda r: r.br[0] - r.tl[0], reverse=True)
        if len(widths) > 1 and widths[0].br[0] - widths[0].tl[0] == widths[1].br[0] - widths[1].tl[0]:
            raise CertificateError("widest-rectangle tie; permutation coordinates are broken")
        chosen = widths[0]
        (sk, st), (qk, qt) = chosen.tl, chosen.br
        others = [r for r in remaining if r is not chosen]
        line_x2 = None
        for x2 in range(2 * sk + 1, 2 * qk, 2):
            crossed = False
            for r in others:
                if 2 * r.tl[0] < x2 < 2 * r.br[0] and r.tl[1] < qt and r.br[1] > st:
                    crossed = True
                    break
            if not crossed:
                line_x2 = x2
                break
        if line_x2 is None:
            raise CertificateError(
                f"no separating line inside rectangle {chosen.tl}-{chosen.br}"
            )
        best = None
        for t in range(st, qt + 1):
            row = superset.row(t)
            lo = bisect.bisect_left(row, sk)
            hi = bisect.bisect_right(row, qk)
            inside = row[lo:hi]
            if not inside:
                continue
            i = bisect.bisect_left(inside, (line_x2 + 1) // 2)
            if i == 0 or i == len(inside):
                continue
            a_key, b_key = inside[i - 1], inside[i]
            # Nothing of the superset strictly between them on the whole row.
            j = bisect.bisect_right(row, a_key)
            if j < len(row) and row[j] < b_key:
                continue
            cand = (b_key - a_key, t, a_key, b_key)
            if best is None or cand < best:
                best = cand
        if best is None:
            raise CertificateError(
                f"no adjacent pair across the line in rectangle {chosen.tl}-{chosen.br}"
            )
        _, t, a_key, b_key = best
        markings.append(
            Marking(
                chosen.br,
                chosen.tl,
                line_x2,
                (a_key, t),
                (b_key, t),
                superset.is_original((a_key, t)),
                superset.is_original((b_key, t)),
            )
        )
        remaining.remove(chosen)
    return markings


def extract_certificate(family: RectFamily, superset: PointSet) -> Certificate:
    """Marking loop over one orientation family against a satisfied superset.

    Backslash families are processed from the maximum key inward; slash
    families run the mirrored rule (minimum key) via key reflection.  The
    resulting markings are verified: distinct pairs, at most one endpoint in
    the original set, endpoints adjacent across the line inside their
    rectangle.
    """
    n = superset.n
    if family.orientation == BACKSLASH:
        markings = _extract_backslash(list(family.rects), superset)
    else:
        mirrored = [
            GoodRect((n + 1 - r.tl[0], r.tl[1]), (n + 1 - r.br[0], r.br[1]), r.marked)
            for r in family.rects
        ]
        raw = _extract_backslash(mirrored, _mirror_pointset(superset))
        markings = [
            Marking(
                (n + 1 - m.rect_p[0], m.rect_p[1]),
                (n + 1 - m.rect_q[0], m.rect_q[1]),
                2 * (n + 1) - m.line_x2,
                (n + 1 - m.b[0], m.b[1]),
                (n + 1 - m.a[0], m.a[1]),
                m.b_in_x,
                m.a_in_x,
            )
            for m in raw
        ]
    cert = Certificate(family.orientation, tuple(markings))
    problems = verify_certificate(cert, family, superset)
    if problems:
        raise CertificateError(f"certificate invariants violated: {problems[:3]}")
    return cert


def verify_certificate(
    cert: Certificate, family: RectFamily, superset: PointSet
) -> list[tuple]:
    out = []
    if len(cert.markings) != len(family.rects):
        out.append(("marking-count", len(cert.markings), len(family.rects)))
    seen_pairs = set()
    for m in cert.markings:
        pair = (m.a, m.b)
        if pair in seen_pairs:
            out.append(("duplicate-pair", pair))
        seen_pairs.add(pair)
        if m.a not in superset or m.b not in superset:
            out.append(("pair-not-in-superset", pair))
            continue
        if m.a[1] != m.b[1] or not m.a[0] < m.b[0]:
            out.append(("pair-not-horizontal", pair))
        if not (2 * m.a[0] < m.line_x2 < 2 * m.b[0]):
            out.append(("pair-not-straddling", pair, m.line_x2))
        if m.a_in_x and m.b_in_x:
            out.append(("both-endpoints-original", pair))
        row = superset.row(m.a[1])
        i = bisect.bisect_right(row, m.a[0])
        if i < len(row) and row[i] < m.b[0]:
            out.append(("pair-not-adjacent", pair))
        x1, x2 = sorted((m.rect_p[0], m.rect_q[0]))
        t1, t2 = sorted((m.rect_p[1], m.rect_q[1]))
        for cell in (m.a, m.b):
            if not (x1 <= cell[0] <= x2 and t1 <= cell[1] <= t2):
                out.append(("pair-outside-rectangle", pair))
                break
    return out


CERT_CSV_HEADER = (
    "orientation,rect_p_key,rect_p_time,rect_q_key,rect_q_time,line_x2,"
    "a_key,a_time,b_key,b_time"
)


def certificate_to_csv(certs: Sequence[Certificate]) -> str:
    buf = io.StringIO()
    buf.write(CERT_CSV_HEADER + "\n")
    for cert in certs:
        for m in cert.markings:
            buf.write(
                f"{cert.orientation},{m.rect_p[0]},{m.rect_p[1]},{m.rect_q[0]},{m.rect_q[1]},"
                f"{m.line_x2},{m.a[0]},{m.a[1]},{m.b[0]},{m.b[1]}\n"
            )
    return buf.getvalue()


# Exact OPT on tiny instances: iterative deepening over added grid points,
# branching on the empty cells of a currently unsatisfied rectangle.

def _find_branch_pair(cells: list[Cell], cell_set: set[Cell], forbidden: set[Cell]):
    """The unsatisfied pair with the fewest usable empty cells, or None."""
    best = None
    for i in range(len(cells)):
        xa, ta = cells[i]
        for j in range(i + 1, len(cells)):
            xb, tb = cells[j]
            if xa == xb or ta == tb:
                continue
            x1, x2 = (xa, xb) if xa < xb else (xb, xa)
            t1, t2 = (ta, tb) if ta < tb else (tb, ta)
            satisfied = False
            for (xc, tc) in cells:
                if x1 <= xc <= x2 and t1 <= tc <= t2 and (xc, tc) != cells[i] and (xc, tc) != cells[j]:
                    satisfied = True
                    break
            if satisfied:
                continue
            cands = [
                (x, t)
                for x in range(x1, x2 + 1)
                for t in range(t1, t2 + 1)
                if (x, t) not in cell_set and (x, t) not in forbidden
            ]
            if best is None or len(cands) < len(best):
                best = cands
                if not cands:
                    return best
    return best


def brute_force_opt(
    perm: Sequence[int], size_cap: int | None = None, limit: int = 6
) -> OptResult:
    """Minimum-cardinality satisfied superset within the grid-candidate model.

    Added points are restricted to cells (key of X, time of X); any satisfying
    point snaps onto this grid without breaking the rectangles it witnesses.
    Iterative deepening guarantees the first solution found is minimal.
    """
    validate_permutation(perm)
    n = len(perm)
    if n > limit:
        raise OptLimitError(f"exact OPT limited to n <= {limit}, got n = {n}")
    if size_cap is None:
        size_cap = greedy_sweep(perm).g_size
    originals = [(k, t) for t, k in enumerate(perm, start=1)]

    def search(cells: list[Cell], cell_set: set[Cell], forbidden: set[Cell], depth: int):
        cands = _find_branch_pair(cells, cell_set, forbidden)
        if cands is None:
            return []
        if depth == 0 or not cands:
            return None
        blocked = set(forbidden)
        for c in sorted(cands):
            cells.append(c)
            cell_set.add(c)
            sub = search(cells, cell_set, blocked, depth - 1)
            cells.pop()
            cell_set.remove(c)
            if sub is not None:
                return [c] + sub
            blocked = blocked | {c}
        return None

    solution = None
    for depth in range(0, size_cap + 1):
        solution = search(list(originals), set(originals), set(), depth)
        if solution is not None:
            break
    assert solution is not None  # depth = |G| always succeeds
    y = tuple(sorted(solution))
    pts = [Point(k, t, ORIGINAL) for (k, t) in originals]
    pts += [Point(k, t, MARKED) for (k, t) in y]
    return OptResult(y, len(y), PointSet(n, pts))


def check_independent(x_set: PointSet, rects: Sequence[tuple[Cell, Cell]]) -> bool:
    """Pairwise-independent unsatisfied rectangles over original points.

    Distinct rectangles, each unsatisfied within the originals alone, and no
    corner of one strictly inside another.
    """
    norm = []
    for (a, b) in rects:
        if a not in x_set or b not in x_set:
            return False
        if a[0] == b[0] or a[1] == b[1]:
            return False
        x1, x2 = sorted((a[0], b[0]))
        t1, t2 = sorted((a[1], b[1]))
        norm.append((x1, x2, t1, t2))
    if len(set(norm)) != len(norm):
        return False
    for (x1, x2, t1, t2) in norm:
        if x_set.count_in_rect(x1, x2, t1, t2) > 2:
            return False
    for r1, r2 in itertools.combinations(norm, 2):
        for (a, b) in ((r1, r2), (r2, r1)):
            corners = [(a[0], a[2]), (a[0], a[3]), (a[1], a[2]), (a[1], a[3])]
            for (cx, ct) in corners:
                if b[0] < cx < b[1] and b[2] < ct < b[3]:
                    return False
    return True


def max_independent_set(x_set: PointSet, limit: int = 6) -> list[tuple[Cell, Cell]]:
    """Maximum independent set of unsatisfied rectangles, by branch and bound."""
    if x_set.n > limit:
        raise OptLimitError(f"independent-set search limited to n <= {limit}")
    cells = x_set.cells()
    rects = []
    for a, b in itertools.combinations(cells, 2):
        if a[0] == b[0] or a[1] == b[1]:
            continue
        x1, x2 = sorted((a[0], b[0]))
        t1, t2 = sorted((a[1], b[1]))
        if x_set.count_in_rect(x1, x2, t1, t2) == 2:
            rects.append((a, b))
    m = len(rects)
    compat = [[False] * m for _ in range(m)]
    for i in range(m):
        for j in range(i + 1, m):
            ok = check_independent(x_set, [rects[i], rects[j]])
            compat[i][j] = compat[j][i] = ok
    best: list[int] = []

    def extend(cur: list[int], cand: list[int]) -> None:
        nonlocal best
        if len(cur) > len(best):
            best = list(cur)
        if len(cur) + len(cand) <= len(best):
            return
        for idx, r in enumerate(cand):
            cur.append(r)
            extend(cur, [s for s in cand[idx + 1 :] if compat[r][s]])
            cur.pop()

    extend([], list(range(m)))
    return [rects[i] for i in best]


def verify_goodbound(perm: Sequence[int], limit: int = 6) -> dict:
    """Both sides of the good-rectangle lower bound on one tiny instance."""
    aug = greedy_sweep(perm)
    tally, _ = classify_all(aug)
    opt = brute_force_opt(perm, limit=limit)
    n = aug.n
    return {
        "n": n,
        "gr": tally.gr,
        "opt_size": opt.size,
        "x_union_opt": n + opt.size,
        "gr_half_plus_n": tally.gr / 2 + n,
        "claim_holds": 2 * (n + opt.size) >= tally.gr + 2 * n,
    }
