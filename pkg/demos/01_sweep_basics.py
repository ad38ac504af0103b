"""
The geometric sweep on a permutation
====================================

A permutation (p_1, ..., p_n) becomes a point set: key p_i at time i, with
time growing downward.  The sweep processes one row at a time and adds, on
the current row, the minimal set of marked points so that every rectangle
ending at the new point contains a third point.
"""

from arboral import greedy_sweep, greedy_sweep_reference, is_arborally_satisfied

perm = [3, 1, 2, 5, 4]
aug = greedy_sweep(perm)

print(f"access sequence: {perm}")
print(f"marked points:   {sorted(aug.marks())}")
print(f"|G| = {aug.g_size}")

# Draw the grid: * originals, o marked points.
for t in range(1, aug.n + 1):
    row = []
    for x in range(1, aug.n + 1):
        if aug.key_at_time[t] == x:
            row.append("*")
        elif aug.is_marked((x, t)):
            row.append("o")
        else:
            row.append(".")
    print(" ".join(row), f"  t={t}")

# The union is arborally satisfied: every pair of points either shares a
# line or spans a rectangle containing a third point.
report = is_arborally_satisfied(aug.point_set())
print(f"X u G arborally satisfied: {report.satisfied}")

# The output-sensitive staircase scan agrees with the literal definition.
reference = greedy_sweep_reference(perm)
print(f"staircase == literal definition: {sorted(aug.marks()) == sorted(reference.marks())}")
