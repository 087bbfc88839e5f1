"""Exact uniform sampling of rooted 4-regular planar maps in O(p).

Four steps: draw a uniform complete binary tree (random ballot word plus
the cycle lemma, no rejection), graft one bud per inner vertex in a uniform
corner, close the tree by matching buds to leaves around the infinite face
with a stack, and root at one of the two surviving leaves with a coin.
Closure is a (p+2)-to-2 correspondence onto rooted maps, so uniformity of
the tree ensemble transfers exactly.

``sample_map`` fuses the four steps in one kernel call but consumes the
generator stream identically to running the steps separately.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels as _k
from .errors import CapacityError, SizeError, StructuralError
from .maps import QuadMap
from .rng import Rng


@dataclass(frozen=True, eq=False)
class CompleteBinaryTree:
    """Planted complete binary tree, preorder code (+1 inner, -1 leaf)."""

    p: int
    code: np.ndarray

    def __post_init__(self):
        if self.p < 1:
            raise SizeError("trees need p >= 1 inner vertices")
        code = np.ascontiguousarray(self.code, dtype=np.int8)
        if code.shape != (2 * self.p + 1,):
            raise StructuralError("preorder code must have length 2p+1")
        walk = np.cumsum(code, dtype=np.int64)
        if walk[-1] != -1 or np.any(walk[:-1] < 0):
            raise StructuralError("not a valid preorder code")
        code.setflags(write=False)
        object.__setattr__(self, "code", code)

    @property
    def leaf_count(self) -> int:
        """External leaves plus the planted root leaf."""
        return self.p + 2


@dataclass(frozen=True, eq=False)
class BlossomTree:
    """Complete binary tree with one bud corner per inner vertex.

    ``buds[v]`` in {0, 1, 2} places vertex v's bud counterclockwise after
    the parent edge: 0 before the first child, 1 between the children, 2
    after the second child.  Vertices are indexed in preorder.
    """

    p: int
    code: np.ndarray
    buds: np.ndarray

    def __post_init__(self):
        CompleteBinaryTree(self.p, self.code)  # reuse the structure checks
        buds = np.ascontiguousarray(self.buds, dtype=np.int8)
        if buds.shape != (self.p,):
            raise StructuralError("need exactly one bud corner per vertex")
        if np.any(buds < 0) or np.any(buds > 2):
            raise StructuralError("bud corners must be in {0, 1, 2}")
        buds.setflags(write=False)
        object.__setattr__(self, "buds", buds)

    @property
    def bud_count(self) -> int:
        return self.p

    @property
    def leaf_count(self) -> int:
        return self.p + 2


@dataclass(frozen=True, eq=False)
class PartialClosure:
    """Closed 4-regular map with its two free leaves still unrooted."""

    p: int
    opposite: np.ndarray
    free: tuple[int, int]  # in contour order


def sample_binary_tree(p: int, rng: Rng) -> CompleteBinaryTree:
    """Uniform over the Catalan(p) complete binary trees, O(p) time."""
    if p < 1:
        raise SizeError("p must be >= 1")
    n = 2 * p + 1
    code = np.empty(n, np.int8)
    aux = np.empty(n, np.int8)
    _k.fill_ballot(code, aux, p, rng.state)
    return CompleteBinaryTree(p, code)


def attach_buds(tree: CompleteBinaryTree, rng: Rng) -> BlossomTree:
    """Uniform independent bud corner per vertex: each of the 3**p
    buddings of ``tree`` is equally likely."""
    buds = np.empty(tree.p, np.int8)
    _k.fill_buds(buds, tree.p, rng.state)
    return BlossomTree(tree.p, tree.code, buds)


def closure(bt: BlossomTree) -> PartialClosure:
    """Match every bud to a leaf around the infinite face; two leaves
    survive and become the map's pending half-edges."""
    p = bt.p
    opposite = np.empty(4 * p, np.int64)
    stack = np.empty(p + 1, np.int64)
    bud_stack = np.empty(max(p, 1), np.int64)
    unmatched = np.empty(p + 2, np.int64)
    status, a, b = _k.close_blossom(p, bt.code, bt.buds, opposite, stack,
                                    bud_stack, unmatched)
    if status != 0:
        raise StructuralError(f"blossom tree closure failed (code {status})")
    opposite.setflags(write=False)
    return PartialClosure(p, opposite, (int(a), int(b)))


def choose_root(pc: PartialClosure, rng: Rng) -> QuadMap:
    """Fair coin between the two rootings of a closed map."""
    if len(pc.free) != 2 or pc.free[0] == pc.free[1]:
        raise StructuralError("closure must leave exactly two free leaves")
    a, b = pc.free
    if rng.coin():
        a, b = b, a
    return QuadMap.from_opposite(pc.p, pc.opposite, a, b)


def root_both_ways(pc: PartialClosure) -> tuple[QuadMap, QuadMap]:
    """Both rootings, used by exhaustive enumeration."""
    a, b = pc.free
    return (QuadMap.from_opposite(pc.p, pc.opposite, a, b),
            QuadMap.from_opposite(pc.p, pc.opposite, b, a))


def sample_map(p: int, rng: Rng) -> QuadMap:
    """One uniform rooted 4-regular planar map with p vertices.

    Every map occurs with probability 1 / ((2/(p+2)) 3**p C(2p,p)/(p+1));
    deterministic given (p, rng seed) and O(p) time and memory.
    """
    if p < 1:
        raise SizeError("p must be >= 1")
    n = 2 * p + 1
    try:
        code = np.empty(n, np.int8)
        aux = np.empty(n, np.int8)
        buds = np.empty(p, np.int8)
        stack = np.empty(p + 1, np.int64)
        opposite = np.empty(4 * p, np.int64)
        bud_stack = np.empty(p, np.int64)
        unmatched = np.empty(p + 2, np.int64)
    except MemoryError as exc:
        raise CapacityError(f"p={p} exceeds available memory") from exc
    status, in_leg, out_leg = _k.sample_quadmap(p, rng.state, code, aux, buds,
                                                stack, opposite, bud_stack,
                                                unmatched)
    if status != 0:
        raise StructuralError(f"sampler kernel failed (code {status})")
    return QuadMap.from_opposite(p, opposite, in_leg, out_leg)
