import itertools
import random

import pytest

from arboral.decomposition import (
    DecompositionError,
    DecompositionTree,
    generate_k_decomposable,
    infer_decomposition,
    validate_tree,
)


def brute_blocks(perm):
    n = len(perm)
    out = set()
    for i in range(n):
        lo = hi = perm[i]
        for j in range(i, n):
            lo = min(lo, perm[j])
            hi = max(hi, perm[j])
            if hi - lo == j - i:
                out.add((i + 1, j + 1))
    return out


def test_generate_examples():
    perm, tree = generate_k_decomposable(1, 2, 0)
    assert perm == [1] and tree.root.is_leaf

    perm, tree = generate_k_decomposable(5, 2, 123)
    assert validate_tree(perm, tree)
    assert tree.max_fanout() <= 2

    a = generate_k_decomposable(100, 4, 0)
    b = generate_k_decomposable(100, 4, 0)
    assert a[0] == b[0] and a[1].serialize() == b[1].serialize()

    with pytest.raises(DecompositionError):
        generate_k_decomposable(5, 1, 0)


def test_infer_fixture():
    tree = infer_decomposition([3, 1, 2, 5, 4])
    assert tree.k == 2
    assert [c.time_interval() for c in tree.root.children] == [(1, 3), (4, 5)]
    assert (tree.root.children[0].k_lo, tree.root.children[0].k_hi) == (1, 3)
    assert (tree.root.children[1].k_lo, tree.root.children[1].k_hi) == (4, 5)


def test_infer_identity_chain():
    for n in (2, 5, 9):
        tree = infer_decomposition(list(range(1, n + 1)))
        assert tree.k == 2
        assert validate_tree(list(range(1, n + 1)), tree)
        assert tree.max_fanout() == 2


def test_infer_simple_permutation():
    tree = infer_decomposition([2, 4, 1, 3])
    assert tree.k == 4
    assert tree.root.fanout == 4
    assert all(c.is_leaf for c in tree.root.children)


def test_validate_tree_rejects_non_blocks():
    # A tree claiming [1,2] is a block of (2,4,1,3) must fail: keys {2,4}.
    perm = [2, 4, 1, 3]
    good = infer_decomposition(perm)
    assert validate_tree(perm, good)
    text = "([1,4]([1,2]([1,1])([2,2]))([3,4]([3,3])([4,4])))"
    with pytest.raises(DecompositionError):
        DecompositionTree.parse(text, perm)


def test_validate_tree_round_trip_and_singleton():
    perm, tree = generate_k_decomposable(23, 4, 5)
    assert validate_tree(perm, tree)
    again = DecompositionTree.parse(tree.serialize(), perm)
    assert again.serialize() == tree.serialize()
    single = infer_decomposition([1])
    assert validate_tree([1], single)


def test_block_queries():
    perm = [3, 1, 2, 5, 4]
    tree = infer_decomposition(perm)
    assert tree.rt((3, 1)) is tree.root
    assert tree.top(tree.root) == (3, 1)
    child13, child45 = tree.root.children
    assert tree.siblings(child45) == [child13]
    assert tree.parent(child45) is tree.root
    with pytest.raises(DecompositionError):
        tree.rt((1, 1))  # not an original of this permutation


def test_rt_total():
    perm, tree = generate_k_decomposable(40, 4, 2)
    for t, k in enumerate(perm, start=1):
        node = tree.rt((k, t))
        assert node.t_lo == t


def test_generate_infer_closure():
    rng = random.Random(0)
    for _ in range(30):
        n = rng.randint(1, 80)
        k = rng.randint(2, 8)
        seed = rng.randint(0, 10**6)
        perm, tree = generate_k_decomposable(n, k, seed)
        assert validate_tree(perm, tree)
        assert tree.max_fanout() <= k
        assert infer_decomposition(perm).k <= k


def test_inferred_nodes_are_blocks_exhaustive():
    for n in range(1, 7):
        for perm in itertools.permutations(range(1, n + 1)):
            perm = list(perm)
            tree = infer_decomposition(perm)
            assert validate_tree(perm, tree), perm
            blocks = brute_blocks(perm)
            for node in tree.nodes():
                assert (node.t_lo, node.t_hi) in blocks


def test_validate_matches_brute_blocks_medium():
    rng = random.Random(1)
    for _ in range(20):
        n = rng.randint(2, 10)
        perm = list(range(1, n + 1))
        rng.shuffle(perm)
        blocks = brute_blocks(perm)
        tree = infer_decomposition(perm)
        for node in tree.nodes():
            assert (node.t_lo, node.t_hi) in blocks
