"""
Bound experiments over a generated grid
=======================================

Runs the full pipeline over a small (n, k, seed) grid and prints the CSV the
command-line `experiment` subcommand would emit.  Every data row carries the
counted set sizes next to the bound values they must stay under:

    zig   <= 2n(k-1)  and  14 n lg k
    bad   <= 10n(k-1) and  80 n lg k
    observable <= 16 n lg k
    |G|   <= 188 n lg k + 4(|GR|/2 + n)

The output is byte-identical whatever the worker count.
"""

from arboral.harness import experiment, rows_to_csv

rows, all_ok = experiment(n_list=[64, 256], k_list=[2, 8], seeds=[0, 1, 2, 3], jobs=2)
print(rows_to_csv(rows))
print("all bounds hold:", all_ok)

# The same instances, re-run sequentially, produce the same bytes.
rows_seq, _ = experiment(n_list=[64, 256], k_list=[2, 8], seeds=[0, 1, 2, 3], jobs=1)
print("deterministic across parallelism:", rows_to_csv(rows_seq) == rows_to_csv(rows))
