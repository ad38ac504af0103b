"""Acceptance suite: every criterion runs at its stated scale and prints one
pass/fail line.  The heavy sweeps fan out over a process pool; results are
aggregated deterministically, so parallelism never changes an outcome.

Expected wall time on a 2-core box is roughly half an hour; the generated
grid (criteria 5/6) and the exhaustive size-8 sweeps dominate.
"""

import itertools
import math
import os

import pytest

from arboral import harness
from arboral.decomposition import generate_k_decomposable, infer_decomposition
from arboral.greedy import greedy_sweep
from arboral.harness import (
    batch_goodbound,
    batch_random_instances,
    batch_structural,
    batch_sweep_equivalence,
    exhaustive_tasks,
    experiment,
    rows_to_csv,
    run_generated,
)
from arboral.pairs import classify_all

JOBS = max(1, os.cpu_count() or 1)

EXHAUSTIVE_NS = range(1, 9)  # 46,233 permutations in total
RANDOM_COUNT = 10_000
RANDOM_MAX_N = 512
GRID_NS = (256, 1024, 4096)
GRID_KS = (2, 4, 8, 16)
GRID_SEEDS = 200


def _pool(fn, tasks):
    return harness._pool_map(fn, tasks, JOBS)


def _announce(criterion: str, ok: bool, detail: str = "") -> None:
    state = "PASS" if ok else "FAIL"
    print(f"[acceptance] {criterion}: {state}{(' - ' + detail) if detail else ''}")


@pytest.fixture(scope="session")
def exhaustive_structural():
    """Criteria 2/4/5 on every permutation of sizes 1..8 (inferred trees)."""
    agg = {"perms": 0, "satisfaction": 0, "structural": 0, "examples": []}
    for n in EXHAUSTIVE_NS:
        for res in _pool(batch_structural, exhaustive_tasks(n)):
            agg["perms"] += res["perms"]
            agg["satisfaction"] += res["satisfaction"]
            agg["structural"] += res["structural"]
            agg["examples"].extend(res["examples"][:2])
    return agg


@pytest.fixture(scope="session")
def random_instances():
    """Criteria 2/4 randomized leg: 10^4 seeded permutations, n <= 512."""
    step = 250
    tasks = [(s, min(step, RANDOM_COUNT - s), RANDOM_MAX_N) for s in range(0, RANDOM_COUNT, step)]
    agg = {"count": 0, "satisfaction_failures": [], "pair_failures": [], "max_n": 0}
    for res in _pool(batch_random_instances, tasks):
        agg["count"] += res["count"]
        agg["max_n"] = max(agg["max_n"], res["max_n"])
        agg["satisfaction_failures"].extend(res["satisfaction_failures"])
        agg["pair_failures"].extend(res["pair_failures"])
    return agg


def _grid_worker(task):
    n, k, seed = task
    rep = run_generated(n, k, seed, structural=True)
    return {
        "n": n,
        "k": k,
        "seed": seed,
        "violations": len(rep["structural_violations"]),
        "example": rep["structural_violations"][:2],
        "bounds": {name: b["pass"] for name, b in rep["bounds"].items()},
        "invariants": rep["invariant_failures"],
        "all_pass": rep["all_pass"],
    }


@pytest.fixture(scope="session")
def generated_grid():
    tasks = [(n, k, s) for n in GRID_NS for k in GRID_KS for s in range(GRID_SEEDS)]
    return _pool(_grid_worker, tasks)


@pytest.fixture(scope="session")
def opt_chain():
    """Criteria 7/8: the full lower-bound chain over every permutation n <= 6."""
    failures = []
    for n in range(1, 7):
        for fails in _pool(batch_goodbound, exhaustive_tasks(n)):
            failures.extend(fails)
    return failures


def test_criterion_1_sweep_oracle_equivalence():
    mismatches = []
    total = 0
    for n in EXHAUSTIVE_NS:
        total += math.factorial(n)
        for out in _pool(batch_sweep_equivalence, exhaustive_tasks(n)):
            mismatches.extend(out)
    ok = not mismatches and total == 46233
    _announce("criterion 1 (sweep oracle equivalence, n<=8)", ok, f"{total} permutations")
    assert ok, mismatches[:3]


def test_criterion_2_satisfaction(exhaustive_structural, random_instances):
    ok = (
        exhaustive_structural["satisfaction"] == 0
        and exhaustive_structural["perms"] == 46233
        and not random_instances["satisfaction_failures"]
        and random_instances["count"] == RANDOM_COUNT
    )
    _announce(
        "criterion 2 (X u G satisfied, exhaustive n<=8 + 10^4 random n<=512)",
        ok,
        f"max random n = {random_instances['max_n']}",
    )
    assert ok, (
        exhaustive_structural["examples"][:2],
        random_instances["satisfaction_failures"][:2],
    )


def test_criterion_3_fixtures():
    aug = greedy_sweep([3, 1, 2, 5, 4])
    tally, _ = classify_all(aug)
    fixture_ok = (
        sorted(aug.marks()) == [(1, 3), (3, 2), (3, 3), (3, 4), (3, 5), (5, 5)]
        and (tally.g_total, tally.mmc, tally.mfc, tally.gr, tally.br) == (6, 2, 4, 4, 0)
    )
    identity_ok = True
    for n in (2, 10, 100):
        a = greedy_sweep(list(range(1, n + 1)))
        t, _ = classify_all(a)
        identity_ok &= a.g_size == n - 1 and t.mmc == 0
    ok = fixture_ok and identity_ok
    _announce("criterion 3 (pinned fixtures)", ok)
    assert ok


def test_criterion_4_pair_partition(exhaustive_structural, random_instances):
    # Totality and per-side injectivity are part of the structural battery;
    # classification raises on a non-zig-non-zag configuration, so a clean
    # battery plus clean random leg is exactly the criterion.
    ok = (
        exhaustive_structural["structural"] == 0
        and not random_instances["pair_failures"]
    )
    _announce("criterion 4 (zig xor zag, injectivity, |G| <= 2|CP|)", ok)
    assert ok, random_instances["pair_failures"][:2]


def test_criterion_5_structural_lemma_suite(exhaustive_structural, generated_grid):
    grid_violations = [r for r in generated_grid if r["violations"]]
    ok = exhaustive_structural["structural"] == 0 and not grid_violations
    cells = sorted({(r["n"], r["k"]) for r in generated_grid})
    per_cell = {c: sum(1 for r in generated_grid if (r["n"], r["k"]) == c) for c in cells}
    ok &= all(v == GRID_SEEDS for v in per_cell.values()) and len(cells) == 12
    _announce(
        "criterion 5 (structural lemma suite, exhaustive n<=8 + 200x12 generated)",
        ok,
        f"{len(generated_grid)} generated instances",
    )
    assert ok, (exhaustive_structural["examples"][:2], [(r["n"], r["k"], r["seed"], r["example"]) for r in grid_violations[:3]])


def test_criterion_6_bound_suite(generated_grid):
    bad = [
        r
        for r in generated_grid
        if not r["all_pass"] or r["invariants"] or not all(r["bounds"].values())
    ]
    ok = not bad
    _announce("criterion 6 (bound suite on the generated grid)", ok)
    assert ok, [(r["n"], r["k"], r["seed"]) for r in bad[:5]]


def test_criterion_7_lower_bound_chain(opt_chain):
    chain_failures = [f for f in opt_chain if f[0] != "main-inequality"]
    ok = not chain_failures
    _announce("criterion 7 (exact OPT + certificates + independent set, n<=6)", ok)
    assert ok, chain_failures[:5]


def test_criterion_8_main_inequality(opt_chain, generated_grid):
    exact_failures = [f for f in opt_chain if f[0] == "main-inequality"]
    relaxed_failures = [r for r in generated_grid if not r["bounds"]["main_relaxed"]]
    ok = not exact_failures and not relaxed_failures
    _announce("criterion 8 (main inequality, exact n<=6 + relaxed on the grid)", ok)
    assert ok, (exact_failures[:3], [(r["n"], r["k"], r["seed"]) for r in relaxed_failures[:3]])


def test_criterion_9_experiment_determinism(tmp_path):
    ns, ks, seeds = [64, 128], [2, 4], [0, 1, 2]
    rows_a, ok_a = experiment(ns, ks, seeds, jobs=1)
    rows_b, ok_b = experiment(ns, ks, seeds, jobs=max(2, JOBS))
    rows_c, ok_c = experiment(ns, ks, seeds, jobs=max(2, JOBS))
    csv_a, csv_b, csv_c = rows_to_csv(rows_a), rows_to_csv(rows_b), rows_to_csv(rows_c)
    ok = ok_a and ok_b and ok_c and csv_a == csv_b == csv_c
    _announce("criterion 9 (experiment determinism across parallelism)", ok)
    assert ok
