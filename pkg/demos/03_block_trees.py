"""
Block decompositions
====================

A block maps a contiguous stretch of accesses onto a contiguous key range.
Decomposing recursively gives a tree; the fanout bound k measures how easy
the sequence is.  The generator inflates random blocks; the inference runs
the substitution decomposition and rebrackets monotone nodes, reporting the
minimal k.
"""

from arboral import generate_k_decomposable, infer_decomposition, validate_tree

perm, tree = generate_k_decomposable(n=24, k=3, seed=42)
print("generated:", perm)
print("witness tree:", tree.serialize())
print("valid:", validate_tree(perm, tree), " max fanout:", tree.max_fanout())

inferred = infer_decomposition(perm)
print("inferred minimal k:", inferred.k)

for example in ([3, 1, 2, 5, 4], [1, 2, 3, 4, 5, 6], [2, 4, 1, 3]):
    t = infer_decomposition(example)
    print(f"{example}: k = {t.k}, tree = {t.serialize()}")

# Block queries: tops and the highest block each original tops.
t = infer_decomposition([3, 1, 2, 5, 4])
root = t.root
print("top of the root block:", t.top(root))
print("highest block topped by key 3:", t.rt((3, 1)).time_interval())
