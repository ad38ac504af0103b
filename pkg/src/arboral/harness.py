"""Instance pipeline: sweep, classify, check, and evaluate every bound.

This is the engine behind the command-line interface and the acceptance
suite: single-instance reports, the full structural-lemma battery, batched
exhaustive sweeps over all small permutations, and the deterministic
experiment grid (parallelism never changes the output bytes).
"""

from __future__ import annotations

import io
import itertools
import math
import random
from concurrent.futures import ProcessPoolExecutor
from typing import Iterable, Sequence

from .decomposition import DecompositionTree, generate_k_decomposable, infer_decomposition
from .geometry import is_arborally_satisfied
from .greedy import (
    AugmentedPointSet,
    check_greedy_property,
    check_hidden,
    check_nothing_above,
    greedy_sweep,
    greedy_sweep_reference,
)
from .lowerbound import (
    brute_force_opt,
    check_good_interactions,
    extract_certificate,
    good_rectangles,
    max_independent_set,
    verify_goodbound,
)
from .pairs import amc_all, check_sibling_distinctness, check_unique_coupling, classify_all
from .blockstats import check_block_lemmas

LOG_BASE = 2


def lg(k: int) -> float | int:
    """log2, exact integer for powers of two (the grid the bounds run on)."""
    if k >= 1 and k & (k - 1) == 0:
        return k.bit_length() - 1
    return math.log2(k)


def evaluate_bounds(tally, amc, n: int, k: int) -> dict[str, dict]:
    lgk = lg(k)
    obs_by_side = amc.observable_by_p
    obs_by_point: dict = {}
    for (side, p), c in obs_by_side.items():
        obs_by_point[p] = obs_by_point.get(p, 0) + c
    per_point = tally.max_per_point()
    bounds = {
        "bound_2nk1": (tally.mmc, 2 * n * (k - 1)),
        "bound_14nlgk": (tally.mmc, 14 * n * lgk),
        "bound_10nk1": (tally.br, 10 * n * (k - 1)),
        "bound_80nlgk": (tally.br, 80 * n * lgk),
        "bound_16nlgk": (tally.observable, 16 * n * lgk),
        "per_point_rmmc": (per_point["rmmc"], k - 1),
        "per_point_lmmc": (per_point["lmmc"], k - 1),
        "per_point_observable_side": (max(obs_by_side.values(), default=0), k - 1),
        "per_point_observable": (max(obs_by_point.values(), default=0), 2 * (k - 1)),
        "amc_preimages": (amc.max_preimages(), 2),
        "amc_mapped": (tally.mapped, 4 * tally.mmc),
        "coupling": (tally.g_total, 2 * tally.cp_pairs),
        "main_relaxed": (tally.g_total, 188 * n * lgk + 2 * tally.gr + 4 * n),
    }
    return {name: {"lhs": lhs, "rhs": rhs, "pass": lhs <= rhs} for name, (lhs, rhs) in bounds.items()}


def analyze(
    perm: Sequence[int],
    tree: DecompositionTree | None = None,
    seed: int | None = None,
    k: int | None = None,
    aug: AugmentedPointSet | None = None,
    grid=None,
) -> dict:
    """Full pipeline on one instance: sweep, classify, tally, bounds."""
    if aug is None:
        aug = greedy_sweep(perm)
    if tree is None:
        tree = infer_decomposition(perm)
        k_source = "inferred"
    else:
        k_source = "witness"
    if k is None:
        k = tree.k
    if grid is None:
        grid = aug.grid_index()
    tally, records = classify_all(aug, tree, grid)
    amc = amc_all(aug, records)
    bounds = evaluate_bounds(tally, amc, aug.n, k)
    invariant_failures = tally.invariant_failures()
    all_pass = not invariant_failures and all(b["pass"] for b in bounds.values())
    return {
        "seed": seed,
        "n": aug.n,
        "k": k,
        "k_source": k_source,
        "g_total": tally.g_total,
        "mmc": tally.mmc,
        "mfc": tally.mfc,
        "gr": tally.gr,
        "br": tally.br,
        "observable": tally.observable,
        "mapped": tally.mapped,
        "s1_prime_original": tally.s1_prime_original,
        "max_per_point": tally.max_per_point(),
        "bounds": bounds,
        "invariant_failures": invariant_failures,
        "all_pass": all_pass,
        "log_base": LOG_BASE,
    }


def structural_violations(
    aug: AugmentedPointSet,
    tree: DecompositionTree,
    pairwise_limit: int = 600,
    grid=None,
) -> list[tuple]:
    """The whole structural-lemma battery on one instance; empty when clean."""
    if grid is None:
        grid = aug.grid_index()
    tally, records = classify_all(aug, tree, grid)
    violations: list[tuple] = [("tally", f) for f in tally.invariant_failures()]
    violations += check_unique_coupling(records)
    violations += check_nothing_above(aug)
    violations += check_greedy_property(aug, grid)
    violations += check_hidden(aug, grid)
    violations += check_good_interactions(aug, records, grid, pairwise_limit)
    amc = amc_all(aug, records)
    if amc.max_preimages() > 2:
        violations.append(("amc-preimages", amc.max_preimages()))
    violations += check_sibling_distinctness(aug, tree, records, amc)
    violations += check_block_lemmas(aug, tree, records, amc, grid).violations
    return violations


def run_generated(n: int, k: int, seed: int, structural: bool = False) -> dict:
    perm, tree = generate_k_decomposable(n, k, seed)
    aug = greedy_sweep(perm)
    grid = aug.grid_index()
    report = analyze(perm, tree, seed=seed, k=k, aug=aug, grid=grid)
    if structural:
        report["structural_violations"] = structural_violations(aug, tree, grid=grid)
    return report


# Batched exhaustive drivers (picklable workers for process pools).

def _perm_slice(n: int, start: int, count: int) -> Iterable[list[int]]:
    todo = itertools.islice(itertools.permutations(range(1, n + 1)), start, start + count)
    return (list(p) for p in todo)


def batch_sweep_equivalence(task: tuple[int, int, int]) -> list[tuple]:
    n, start, count = task
    out = []
    for perm in _perm_slice(n, start, count):
        fast = sorted(greedy_sweep(perm).marks())
        ref = sorted(greedy_sweep_reference(perm).marks())
        if fast != ref:
            out.append((tuple(perm), tuple(fast), tuple(ref)))
    return out


def batch_structural(task: tuple[int, int, int]) -> dict:
    """Satisfaction + the full battery with inferred trees, over a perm slice."""
    n, start, count = task
    res = {"perms": 0, "satisfaction": 0, "structural": 0, "examples": []}
    for perm in _perm_slice(n, start, count):
        res["perms"] += 1
        aug = greedy_sweep(perm)
        if not is_arborally_satisfied(aug.point_set()).satisfied:
            res["satisfaction"] += 1
            res["examples"].append(("satisfaction", tuple(perm)))
            continue
        v = structural_violations(aug, infer_decomposition(perm))
        if v:
            res["structural"] += len(v)
            if len(res["examples"]) < 5:
                res["examples"].append((tuple(perm), v[:3]))
    return res


def batch_random_instances(task: tuple[int, int, int]) -> dict:
    """Random permutations (sizes up to n_max): satisfaction of X u G plus
    the pair-partition invariants.  task = (seed_start, count, n_max)."""
    start, count, n_max = task
    res = {
        "count": 0,
        "satisfaction_failures": [],
        "pair_failures": [],
        "max_n": 0,
        "g_total": 0,
    }
    for i in range(start, start + count):
        rng = random.Random(0xA5EED + i)
        n = rng.randint(1, n_max)
        perm = list(range(1, n + 1))
        rng.shuffle(perm)
        res["count"] += 1
        res["max_n"] = max(res["max_n"], n)
        aug = greedy_sweep(perm)
        res["g_total"] += aug.g_size
        if not is_arborally_satisfied(aug.point_set()).satisfied:
            res["satisfaction_failures"].append(tuple(perm))
            continue
        tally, records = classify_all(aug)
        fails = tally.invariant_failures()
        fails += [repr(v) for v in check_unique_coupling(records)]
        if fails:
            res["pair_failures"].append((tuple(perm), fails[:3]))
    return res


def batch_goodbound(task: tuple[int, int, int]) -> list[tuple]:
    """Lower-bound chain over a perm slice: exact OPT vs good rectangles,
    certificate extraction against both supersets, independent-set claim."""
    from .geometry import PointSet

    n, start, count = task
    failures = []
    for perm in _perm_slice(n, start, count):
        aug = greedy_sweep(perm)
        tally, records = classify_all(aug)
        opt = brute_force_opt(perm)
        if 2 * opt.size < tally.gr:
            failures.append(("goodbound", tuple(perm), opt.size, tally.gr))
            continue
        try:
            fb, fs = good_rectangles(records, aug)
            for fam in (fb, fs):
                for superset in (opt.superset, aug.point_set()):
                    cert = extract_certificate(fam, superset)
                    if len(cert) != len(fam):
                        failures.append(("certificate-size", tuple(perm), fam.orientation))
                if opt.size < len(fam):
                    failures.append(("family-exceeds-opt", tuple(perm), fam.orientation))
        except Exception as exc:  # extraction failure is a reportable finding
            failures.append(("certificate-error", tuple(perm), repr(exc)))
            continue
        mis = max_independent_set(PointSet.from_permutation(perm))
        if 2 * opt.size < len(mis):
            failures.append(("independent-set", tuple(perm), opt.size, len(mis)))
        lgk2 = lg(infer_decomposition(perm).k)
        if tally.g_total > 188 * n * lgk2 + 4 * (n + opt.size):
            failures.append(("main-inequality", tuple(perm)))
    return failures


def _pool_map(fn, tasks: list, jobs: int | None):
    if jobs is None or jobs <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, tasks, chunksize=1))


def exhaustive_tasks(n: int, slices: int = 16) -> list[tuple[int, int, int]]:
    total = math.factorial(n)
    step = max(1, total // slices)
    return [(n, start, min(step, total - start)) for start in range(0, total, step)]


# Experiment grid.

CSV_COLUMNS = [
    "seed", "n", "k", "k_source", "g_total", "mmc", "mfc", "gr", "br",
    "observable", "max_rmmc_p",
    "bound_2nk1", "bound_14nlgk", "bound_10nk1", "bound_80nlgk", "bound_16nlgk",
    "all_pass",
]


def _experiment_worker(task: tuple[int, int, int]) -> dict:
    n, k, seed = task
    return run_generated(n, k, seed, structural=False)


def _csv_value(v) -> str:
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, float):
        return f"{v:.6f}"
    return str(v)


def _report_row(rep: dict) -> dict:
    return {
        "seed": rep["seed"],
        "n": rep["n"],
        "k": rep["k"],
        "k_source": rep["k_source"],
        "g_total": rep["g_total"],
        "mmc": rep["mmc"],
        "mfc": rep["mfc"],
        "gr": rep["gr"],
        "br": rep["br"],
        "observable": rep["observable"],
        "max_rmmc_p": rep["max_per_point"]["rmmc"],
        "bound_2nk1": rep["bounds"]["bound_2nk1"]["rhs"],
        "bound_14nlgk": rep["bounds"]["bound_14nlgk"]["rhs"],
        "bound_10nk1": rep["bounds"]["bound_10nk1"]["rhs"],
        "bound_80nlgk": rep["bounds"]["bound_80nlgk"]["rhs"],
        "bound_16nlgk": rep["bounds"]["bound_16nlgk"]["rhs"],
        "all_pass": rep["all_pass"],
    }


def experiment(
    n_list: Sequence[int],
    k_list: Sequence[int],
    seeds: Sequence[int],
    jobs: int | None = None,
) -> tuple[list[dict], bool]:
    """One row per (n, k, seed), plus a mean-summary row per (n, k).

    Output is a pure function of the task list: the worker pool only changes
    wall time, never content or order.
    """
    for k in k_list:
        if k < 2:
            raise ValueError("k must be >= 2")
    tasks = [(n, k, s) for n in n_list for k in k_list for s in seeds]
    reports = _pool_map(_experiment_worker, tasks, jobs)
    rows = [_report_row(rep) for rep in reports]
    out: list[dict] = []
    all_ok = True
    idx = 0
    mean_cols = ["g_total", "mmc", "mfc", "gr", "br", "observable", "max_rmmc_p"]
    for n in n_list:
        for k in k_list:
            cell = rows[idx : idx + len(seeds)]
            idx += len(seeds)
            out.extend(cell)
            summary = {c: "" for c in CSV_COLUMNS}
            summary.update(
                {
                    "seed": "mean",
                    "n": n,
                    "k": k,
                    "k_source": cell[0]["k_source"] if cell else "witness",
                    "all_pass": all(r["all_pass"] for r in cell),
                }
            )
            for c in mean_cols:
                summary[c] = float(sum(r[c] for r in cell)) / max(len(cell), 1)
            for c in ("bound_2nk1", "bound_14nlgk", "bound_10nk1", "bound_80nlgk", "bound_16nlgk"):
                summary[c] = cell[0][c] if cell else ""
            out.append(summary)
            all_ok &= summary["all_pass"]
    return out, all_ok


def rows_to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    buf.write(",".join(CSV_COLUMNS) + "\n")
    for row in rows:
        buf.write(",".join(_csv_value(row[c]) for c in CSV_COLUMNS) + "\n")
    return buf.getvalue()


# Verification suites.

def verify_quick(seed: int = 0, jobs: int | None = None) -> dict:
    rng = random.Random(seed)
    report = {"level": "quick", "seed": seed, "failures": []}

    for _ in range(60):
        n = rng.randint(1, 48)
        perm = list(range(1, n + 1))
        rng.shuffle(perm)
        if sorted(greedy_sweep(perm).marks()) != sorted(greedy_sweep_reference(perm).marks()):
            report["failures"].append(("sweep-equivalence", tuple(perm)))

    for _ in range(40):
        n = rng.randint(1, 200)
        perm = list(range(1, n + 1))
        rng.shuffle(perm)
        aug = greedy_sweep(perm)
        if not is_arborally_satisfied(aug.point_set()).satisfied:
            report["failures"].append(("satisfaction", tuple(perm)))
        v = structural_violations(aug, infer_decomposition(perm))
        if v:
            report["failures"].append(("structural", tuple(perm), v[:3]))

    for k in (2, 4, 8, 16):
        for s in range(3):
            rep = run_generated(128, k, seed * 1000 + s, structural=True)
            if rep["structural_violations"] or not rep["all_pass"]:
                report["failures"].append(("generated", 128, k, s))

    for n in range(1, 5):
        for perm in itertools.permutations(range(1, n + 1)):
            g = verify_goodbound(list(perm))
            if not g["claim_holds"]:
                report["failures"].append(("goodbound", perm))

    for _ in range(25):
        n = rng.randint(2, 64)
        perm = list(range(1, n + 1))
        rng.shuffle(perm)
        aug = greedy_sweep(perm)
        tally, records = classify_all(aug)
        fb, fs = good_rectangles(records, aug)
        for fam in (fb, fs):
            extract_certificate(fam, aug.point_set())

    report["passed"] = not report["failures"]
    return report


def verify_exhaustive(jobs: int | None = None, max_n: int = 8, opt_max_n: int = 6) -> dict:
    report = {"level": "exhaustive", "failures": []}
    for n in range(1, max_n + 1):
        tasks = exhaustive_tasks(n)
        for mism in _pool_map(batch_sweep_equivalence, tasks, jobs):
            for item in mism:
                report["failures"].append(("sweep-equivalence", item[0]))
        for res in _pool_map(batch_structural, tasks, jobs):
            if res["satisfaction"] or res["structural"]:
                report["failures"].append(("structural", n, res["examples"][:3]))
    for n in range(1, opt_max_n + 1):
        tasks = exhaustive_tasks(n)
        for fails in _pool_map(batch_goodbound, tasks, jobs):
            report["failures"].extend(fails)
    report["passed"] = not report["failures"]
    return report
