"""Command-line interface.

Machine-readable results (JSON or CSV) go to stdout, human logs to stderr,
and the exit code is 0 exactly when every checked property passed.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import harness
from .decomposition import DecompositionError, DecompositionTree, generate_k_decomposable
from .geometry import PermutationError, read_permutation_file, write_permutation_file
from .greedy import greedy_sweep
from .lowerbound import (
    OptLimitError,
    brute_force_opt,
    certificate_to_csv,
    extract_certificate,
    good_rectangles,
)
from .pairs import classify_all

EXPERIMENT_HELP = (
    "CSV schema: one data row per (n,k,seed) plus a seed=mean summary row per "
    "(n,k); columns: " + ",".join(harness.CSV_COLUMNS) + ". The bound_* columns "
    "hold the bound values (lg = log base 2); all_pass is 1/0."
)


def _log(msg: str) -> None:
    print(msg, file=sys.stderr)


def _ints(text: str) -> list[int]:
    return [int(tok) for tok in text.split(",") if tok != ""]


def cmd_gen(args) -> int:
    try:
        perm, tree = generate_k_decomposable(args.n, args.k, args.seed)
    except DecompositionError as exc:
        _log(f"error: {exc}")
        return 2
    if args.out:
        write_permutation_file(args.out, perm)
        _log(f"wrote permutation of size {args.n} to {args.out}")
    else:
        print(" ".join(str(v) for v in perm))
    if args.emit_tree:
        with open(args.emit_tree, "w", encoding="utf-8") as fh:
            fh.write(tree.serialize() + "\n")
        _log(f"wrote witness tree to {args.emit_tree}")
    return 0


def cmd_run(args) -> int:
    try:
        perm = read_permutation_file(args.perm)
    except (OSError, PermutationError) as exc:
        _log(f"error: {exc}")
        return 2
    tree = None
    if args.tree:
        try:
            with open(args.tree, "r", encoding="utf-8") as fh:
                tree = DecompositionTree.parse(fh.read(), perm)
        except (OSError, DecompositionError) as exc:
            _log(f"error: {exc}")
            return 2
    report = harness.analyze(perm, tree)
    print(json.dumps(report, sort_keys=True, indent=2))
    if not report["all_pass"]:
        _log("bound or invariant failure; see report")
        return 1
    return 0


def cmd_experiment(args) -> int:
    try:
        rows, ok = harness.experiment(
            _ints(args.n), _ints(args.k), _ints(args.seed), jobs=args.jobs
        )
    except ValueError as exc:
        _log(f"error: {exc}")
        return 2
    csv_text = harness.rows_to_csv(rows)
    if args.out:
        try:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(csv_text)
        except OSError as exc:
            _log(f"error: {exc}")
            return 2
        _log(f"wrote {len(rows)} rows to {args.out}")
    else:
        sys.stdout.write(csv_text)
    return 0 if ok else 1


def cmd_verify(args) -> int:
    if args.level == "quick":
        report = harness.verify_quick(seed=args.seed, jobs=args.jobs)
    else:
        report = harness.verify_exhaustive(jobs=args.jobs)
    print(json.dumps(report, sort_keys=True, default=repr))
    return 0 if report["passed"] else 1


def cmd_opt(args) -> int:
    try:
        perm = read_permutation_file(args.perm)
        result = brute_force_opt(perm, limit=args.limit)
    except (OSError, PermutationError, OptLimitError) as exc:
        _log(f"error: {exc}")
        return 2
    print(
        json.dumps(
            {
                "n": len(perm),
                "opt_size": result.size,
                "x_union_opt": len(perm) + result.size,
                "y": list(result.y),
            },
            sort_keys=True,
        )
    )
    return 0


def cmd_certificate(args) -> int:
    try:
        perm = read_permutation_file(args.perm)
    except (OSError, PermutationError) as exc:
        _log(f"error: {exc}")
        return 2
    aug = greedy_sweep(perm)
    _, records = classify_all(aug)
    fam_b, fam_s = good_rectangles(records, aug)
    if args.opt:
        try:
            superset = brute_force_opt(perm, limit=args.limit).superset
        except OptLimitError as exc:
            _log(f"error: {exc}")
            return 2
    else:
        superset = aug.point_set()
    certs = [extract_certificate(fam_b, superset), extract_certificate(fam_s, superset)]
    csv_text = certificate_to_csv(certs)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(csv_text)
        _log(f"wrote {len(certs[0]) + len(certs[1])} markings to {args.out}")
    else:
        sys.stdout.write(csv_text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="arboral",
        description="Geometric sweep on permutation point sets: generate, run, classify, verify.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a block-decomposable permutation")
    p.add_argument("-n", type=int, required=True)
    p.add_argument("-k", type=int, required=True, help="fanout bound, >= 2")
    p.add_argument("-s", "--seed", type=int, default=0)
    p.add_argument("--out", help="permutation file (stdout when absent)")
    p.add_argument("--emit-tree", help="also write the witness tree serialization")
    p.set_defaults(fn=cmd_gen)

    p = sub.add_parser("run", help="sweep + classify + bound report (JSON)")
    p.add_argument("perm", help="permutation file")
    p.add_argument("--tree", help="witness tree file (inferred when absent)")
    p.set_defaults(fn=cmd_run)

    p = sub.add_parser("experiment", help="grid of runs to CSV", epilog=EXPERIMENT_HELP)
    p.add_argument("-n", required=True, help="comma-separated sizes")
    p.add_argument("-k", required=True, help="comma-separated fanout bounds (>= 2)")
    p.add_argument("-s", "--seed", required=True, help="comma-separated seeds")
    p.add_argument("--out", help="CSV path (stdout when absent)")
    p.add_argument("--jobs", type=int, default=None)
    p.set_defaults(fn=cmd_experiment)

    p = sub.add_parser("verify", help="randomized or exhaustive invariant suites")
    p.add_argument("--level", choices=["quick", "exhaustive"], default="quick")
    p.add_argument("-s", "--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=None)
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("opt", help="exact minimum satisfied superset (tiny n)")
    p.add_argument("perm")
    p.add_argument("--limit", type=int, default=6)
    p.set_defaults(fn=cmd_opt)

    p = sub.add_parser("certificate", help="good-rectangle marking certificate (CSV)")
    p.add_argument("perm")
    p.add_argument("--opt", action="store_true", help="mark against the exact-OPT superset")
    p.add_argument("--limit", type=int, default=6)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_certificate)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
