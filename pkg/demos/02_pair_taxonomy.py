"""
Coupled pairs: zig, zag, good, bad
==================================

Every marked point is coupled to two originals: the one sharing its row and
the one owning the row of the first point above it.  The pair is a *zig*
when the upper original lands beyond the lower original, a *zag* when it
lands above or beyond the mark.  Zag pairs whose rectangle holds no original
in its interior are *good*; the rest are *bad*, and each bad pair is either
associated to a nearby zig point or stays *observable*.
"""

from arboral import amc_all, classify_all, greedy_sweep, records_to_csv

perm = [3, 1, 2, 5, 4]
aug = greedy_sweep(perm)
tally, records = classify_all(aug)

print(f"access sequence {perm}: |G| = {tally.g_total}")
print(f"zig = {tally.mmc}, zag = {tally.mfc}, good = {tally.gr}, bad = {tally.br}")
print()
print(records_to_csv(records))

# The smallest instance with a bad pair (an original sits strictly inside
# the zag rectangle), found by exhaustive scan:
bad_perm = [3, 4, 1, 6, 5, 2]
aug = greedy_sweep(bad_perm)
tally, records = classify_all(aug)
amc = amc_all(aug, records)
print(f"{bad_perm}: bad pairs = {tally.br}, mapped = {amc.mapped}, observable = {amc.observable}")
for outcome in amc.outcomes:
    print(f"  bad mark {outcome.marked} -> {outcome.status} {outcome.target or ''}")
