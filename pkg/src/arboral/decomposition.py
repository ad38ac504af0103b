"""Block decompositions of permutations.

A block is a contiguous time interval mapped to a contiguous key interval.
``generate_k_decomposable`` builds random permutations by recursive block
inflation together with the witness tree; ``infer_decomposition`` recovers a
canonical tree (strong-interval / substitution decomposition, with monotone
nodes rebracketed to fanout 2) whose maximum fanout is the minimal k.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .geometry import PermutationError, validate_permutation


class DecompositionError(ValueError):
    """Invalid tree construction or query."""


@dataclass(eq=False)
class BlockNode:
    """One block: times [t_lo, t_hi], keys [k_lo, k_hi], children in time order."""

    t_lo: int
    t_hi: int
    k_lo: int
    k_hi: int
    children: list["BlockNode"] = field(default_factory=list)
    parent: "BlockNode | None" = None

    @property
    def size(self) -> int:
        return self.t_hi - self.t_lo + 1

    @property
    def is_leaf(self) -> bool:
        return not self.children

    @property
    def fanout(self) -> int:
        return len(self.children)

    def time_interval(self) -> tuple[int, int]:
        return (self.t_lo, self.t_hi)

    def __repr__(self) -> str:
        return f"BlockNode(t=[{self.t_lo},{self.t_hi}], k=[{self.k_lo},{self.k_hi}])"


class DecompositionTree:
    """Rooted block decomposition of a permutation, fanout bounded by k."""

    def __init__(self, perm: Sequence[int], root: BlockNode, k: int):
        validate_permutation(perm)
        self.perm = list(perm)
        self.n = len(perm)
        self.root = root
        self.k = k
        self._nodes = list(self._preorder(root))
        self._leaf_of_time: list[BlockNode | None] = [None] * (self.n + 1)
        for node in self._nodes:
            if node.is_leaf:
                if node.t_lo != node.t_hi:
                    raise DecompositionError(f"leaf {node} is not a singleton")
                self._leaf_of_time[node.t_lo] = node
        if any(leaf is None for leaf in self._leaf_of_time[1:]):
            raise DecompositionError("leaves do not cover all times")
        self._rt: list[BlockNode] = [None] * (self.n + 1)  # type: ignore[list-item]
        for t in range(1, self.n + 1):
            node = self._leaf_of_time[t]
            while node.parent is not None and node.parent.t_lo == t:
                node = node.parent
            self._rt[t] = node
        self._ids = {id(node) for node in self._nodes}

    @staticmethod
    def _preorder(node: BlockNode) -> Iterator[BlockNode]:
        stack = [node]
        while stack:
            cur = stack.pop()
            yield cur
            stack.extend(reversed(cur.children))

    def nodes(self) -> list[BlockNode]:
        return list(self._nodes)

    def internal_nodes(self) -> list[BlockNode]:
        return [nd for nd in self._nodes if not nd.is_leaf]

    def max_fanout(self) -> int:
        return max((nd.fanout for nd in self._nodes if not nd.is_leaf), default=0)

    def leaf_of_time(self, t: int) -> BlockNode:
        return self._leaf_of_time[t]

    # Block queries.

    def top(self, node: BlockNode) -> tuple[int, int]:
        """The first-in-time original of the block."""
        self._require(node)
        return (self.perm[node.t_lo - 1], node.t_lo)

    def rt(self, original: tuple[int, int]) -> BlockNode:
        """The block closest to the root whose top is ``original``."""
        k, t = original
        if not (1 <= t <= self.n) or self.perm[t - 1] != k:
            raise DecompositionError(f"{original} is not an original point of this permutation")
        return self._rt[t]

    def parent(self, node: BlockNode) -> BlockNode | None:
        self._require(node)
        return node.parent

    def siblings(self, node: BlockNode) -> list[BlockNode]:
        self._require(node)
        if node.parent is None:
            return []
        return [c for c in node.parent.children if c is not node]

    def _require(self, node: BlockNode) -> None:
        if not isinstance(node, BlockNode) or id(node) not in self._ids:
            raise DecompositionError("query about a node outside this tree")

    def serialize(self) -> str:
        """Nested parenthesized time intervals on one line."""
        parts: list[str] = []

        def emit(node: BlockNode) -> None:
            parts.append(f"([{node.t_lo},{node.t_hi}]")
            for child in node.children:
                emit(child)
            parts.append(")")

        emit(self.root)
        return "".join(parts)

    @classmethod
    def parse(cls, text: str, perm: Sequence[int]) -> "DecompositionTree":
        """Rebuild a tree from its serialization; key intervals come from perm."""
        validate_permutation(perm)
        pos = 0
        raw = re.findall(r"\(\[\d+,\d+\]|\)", text.strip())
        if not raw:
            raise DecompositionError("empty tree serialization")

        def build() -> BlockNode:
            nonlocal pos
            tok = raw[pos]
            if tok == ")":
                raise DecompositionError("malformed tree serialization")
            m = re.match(r"\(\[(\d+),(\d+)\]", tok)
            t_lo, t_hi = int(m.group(1)), int(m.group(2))
            pos += 1
            node = BlockNode(t_lo, t_hi, 0, 0)
            while pos < len(raw) and raw[pos] != ")":
                child = build()
                child.parent = node
                node.children.append(child)
            if pos >= len(raw):
                raise DecompositionError("unbalanced tree serialization")
            pos += 1  # closing paren
            return node

        root = build()
        if pos != len(raw):
            raise DecompositionError("trailing tokens in tree serialization")

        def fill_keys(node: BlockNode) -> None:
            keys = perm[node.t_lo - 1 : node.t_hi]
            node.k_lo, node.k_hi = min(keys), max(keys)
            for child in node.children:
                fill_keys(child)

        fill_keys(root)
        tree = cls(perm, root, k=max(2, _max_fanout(root)))
        if not validate_tree(perm, tree):
            raise DecompositionError("serialized tree is not a valid block decomposition")
        return tree


def _max_fanout(root: BlockNode) -> int:
    best = 0
    stack = [root]
    while stack:
        nd = stack.pop()
        if nd.children:
            best = max(best, len(nd.children))
            stack.extend(nd.children)
    return best


def validate_tree(perm: Sequence[int], tree: DecompositionTree) -> bool:
    """Every node is a block (contiguous times onto contiguous keys), children
    partition their parent's time interval, leaves are singletons."""
    try:
        validate_permutation(perm)
    except PermutationError:
        return False
    if list(perm) != tree.perm or tree.root.t_lo != 1 or tree.root.t_hi != len(perm):
        return False
    for node in tree.nodes():
        keys = perm[node.t_lo - 1 : node.t_hi]
        if not keys or min(keys) != node.k_lo or max(keys) != node.k_hi:
            return False
        if node.k_hi - node.k_lo != node.t_hi - node.t_lo:
            return False
        if node.children:
            if len(node.children) < 2:
                return False
            t = node.t_lo
            for child in node.children:
                if child.t_lo != t or child.parent is not node:
                    return False
                t = child.t_hi + 1
            if t != node.t_hi + 1:
                return False
        elif node.t_lo != node.t_hi:
            return False
    return True


def generate_k_decomposable(n: int, k: int, seed: int) -> tuple[list[int], DecompositionTree]:
    """Random k-decomposable permutation plus its witness tree.

    Recursively: pick a fanout uniform in [2, min(k, size)], split the size
    into that many positive parts uniformly, arrange the children by a
    uniformly random pattern permutation, recurse.  Deterministic in seed.
    """
    if n < 1:
        raise DecompositionError("n must be >= 1")
    if k < 2:
        raise DecompositionError("k must be >= 2")
    rng = random.Random(seed)
    perm = [0] * (n + 1)

    def rand_perm(f: int) -> list[int]:
        pat = list(range(f))
        for i in range(f - 1, 0, -1):
            j = rng.randrange(i + 1)
            pat[i], pat[j] = pat[j], pat[i]
        return pat

    def split(size: int, f: int) -> list[int]:
        # f-1 distinct cut positions in 1..size-1.
        cuts: list[int] = []
        pool = list(range(1, size))
        for _ in range(f - 1):
            i = rng.randrange(len(pool))
            cuts.append(pool.pop(i))
        cuts.sort()
        bounds = [0] + cuts + [size]
        return [bounds[i + 1] - bounds[i] for i in range(f)]

    def build(t_off: int, k_off: int, size: int) -> BlockNode:
        node = BlockNode(t_off + 1, t_off + size, k_off + 1, k_off + size)
        if size == 1:
            perm[t_off + 1] = k_off + 1
            return node
        f = rng.randrange(2, min(k, size) + 1)
        sizes = split(size, f)
        pat = rand_perm(f)
        key_offsets = [0] * f
        acc = 0
        for slot in range(f):
            for i in range(f):
                if pat[i] == slot:
                    key_offsets[i] = k_off + acc
                    acc += sizes[i]
        t = t_off
        for i in range(f):
            child = build(t, key_offsets[i], sizes[i])
            child.parent = node
            node.children.append(child)
            t += sizes[i]
        return node

    root = build(0, 0, n)
    tree = DecompositionTree(perm[1:], root, k)
    return perm[1:], tree


def _strong_intervals(perm: Sequence[int]) -> list[tuple[int, int]]:
    """All strong intervals (0-indexed, inclusive) of the permutation: blocks
    that overlap no other block."""
    p = np.asarray(perm, dtype=np.int64)
    n = len(p)
    if n == 1:
        return [(0, 0)]
    idx = np.arange(n, dtype=np.int64)

    def blocks_from(a: int) -> np.ndarray:
        seg = p[a:]
        mx = np.maximum.accumulate(seg)
        mn = np.minimum.accumulate(seg)
        return np.flatnonzero((mx - mn) == idx[: n - a]) + a

    # min_start[b]: smallest a with [a,b] a block; max_end[a] likewise.
    min_start = np.full(n, np.iinfo(np.int64).max, dtype=np.int64)
    max_end = np.full(n, -1, dtype=np.int64)
    for a in range(n):
        bs = blocks_from(a)
        max_end[a] = bs[-1]
        np.minimum.at(min_start, bs, a)
    # Sparse tables for range min of min_start and range max of max_end.
    st_min = [min_start]
    st_max = [max_end]
    span = 1
    while span * 2 <= n:
        prev_min, prev_max = st_min[-1], st_max[-1]
        st_min.append(np.minimum(prev_min[: n - 2 * span + 1], prev_min[span : n - span + 1]))
        st_max.append(np.maximum(prev_max[: n - 2 * span + 1], prev_max[span : n - span + 1]))
        span *= 2

    def range_min(lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
        length = hi - lo + 1
        lev = np.maximum(length.astype(np.int64), 1)
        lev = np.floor(np.log2(lev)).astype(np.int64)
        out = np.empty(len(lo), dtype=np.int64)
        for L in np.unique(lev):
            m = lev == L
            tbl = st_min[L]
            out[m] = np.minimum(tbl[lo[m]], tbl[hi[m] - (1 << int(L)) + 1])
        return out

    def range_max(lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
        length = hi - lo + 1
        lev = np.floor(np.log2(np.maximum(length, 1))).astype(np.int64)
        out = np.empty(len(lo), dtype=np.int64)
        for L in np.unique(lev):
            m = lev == L
            tbl = st_max[L]
            out[m] = np.maximum(tbl[lo[m]], tbl[hi[m] - (1 << int(L)) + 1])
        return out

    strong: list[tuple[int, int]] = []
    for a in range(n):
        bs = blocks_from(a)
        strong.append((a, a))
        cand = bs[bs > a]
        if len(cand) == 0:
            continue
        lo = np.full(len(cand), a, dtype=np.int64)
        cross_left = range_min(lo, cand - 1) < a
        cross_right = range_max(lo + 1, cand) > cand
        keep = cand[~(cross_left | cross_right)]
        for b in keep:
            strong.append((a, int(b)))
    return strong


def infer_decomposition(perm: Sequence[int]) -> DecompositionTree:
    """Canonical decomposition tree with minimal fanout bound.

    Strong intervals give the substitution decomposition; monotone internal
    nodes with more than two children are rebracketed into a left comb, so
    the reported k equals the largest simple quotient (or 2).
    """
    validate_permutation(perm)
    n = len(perm)
    intervals = sorted(_strong_intervals(perm), key=lambda iv: (iv[0], -(iv[1] - iv[0])))
    stack: list[BlockNode] = []
    root: BlockNode | None = None
    for (a, b) in intervals:
        keys = perm[a : b + 1]
        node = BlockNode(a + 1, b + 1, min(keys), max(keys))
        while stack and stack[-1].t_hi < node.t_hi:
            stack.pop()
        if stack:
            node.parent = stack[-1]
            stack[-1].children.append(node)
        else:
            root = node
        stack.append(node)

    def binarize(node: BlockNode) -> None:
        for child in node.children:
            binarize(child)
        if len(node.children) <= 2:
            return
        kids = node.children
        ascending = all(kids[i].k_hi < kids[i + 1].k_lo for i in range(len(kids) - 1))
        descending = all(kids[i].k_lo > kids[i + 1].k_hi for i in range(len(kids) - 1))
        if not (ascending or descending):
            return  # simple quotient: fanout is forced
        acc = kids[0]
        for nxt in kids[1:-1]:
            merged = BlockNode(acc.t_lo, nxt.t_hi, min(acc.k_lo, nxt.k_lo), max(acc.k_hi, nxt.k_hi))
            merged.children = [acc, nxt]
            acc.parent = merged
            nxt.parent = merged
            acc = merged
        last = kids[-1]
        node.children = [acc, last]
        acc.parent = node
        last.parent = node

    assert root is not None
    binarize(root)
    k = max(2, _max_fanout(root))
    return DecompositionTree(perm, root, k)
