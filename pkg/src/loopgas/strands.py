"""Strand tracing: loop counting, open-curve extraction, Gauss codes.

A strand advances straight through each degree-4 vertex: cross the current
edge to its opposite dart, then take ``next`` twice at the arrival vertex.
The strand through the legs is the doodle's open curve; every other strand
is a closed loop.  Each undirected strand corresponds to two orbits of the
successor map (one per direction), so tracing marks both directions and
counts each loop once.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels as _k
from .maps import QuadMap, _check_ranges


@dataclass(frozen=True)
class StrandDecomposition:
    """k loops plus the open curve, as dart-id sequences.

    open_curve runs from the in-leg to the out-leg; interior entries are
    the outgoing dart at each crossing passed.  loops holds one direction
    of each closed strand, starting at its smallest dart id.
    """

    k: int
    open_curve: list[int]
    loops: list[list[int]]


def strand_successor(m: QuadMap, d: int):
    """Next outgoing dart along the strand, or None at a leg
    (end-of-strand signal)."""
    o = m.opposite[d]
    if o < 0:
        return None
    return int(m.next[m.next[o]])


def count_loops(m: QuadMap) -> int:
    """Number of closed strands; 0 <= k <= p, O(p) time."""
    _check_ranges(m)
    visited = np.empty(m.dart_count, np.bool_)
    k = int(_k.count_loops_general(m.opposite, m.next, m.in_leg, visited))
    if k < 0:
        raise RuntimeError("strand walk did not terminate; validate the map")
    return k


def strand_decomposition(m: QuadMap) -> StrandDecomposition:
    _check_ranges(m)
    opposite = m.opposite
    nxt = m.next
    visited = np.zeros(m.dart_count, np.bool_)

    open_curve = [m.in_leg]
    visited[m.in_leg] = True
    x = int(nxt[nxt[m.in_leg]])
    while True:
        open_curve.append(x)
        visited[x] = True
        o = int(opposite[x])
        if o < 0:
            break
        visited[o] = True
        x = int(nxt[nxt[o]])

    loops: list[list[int]] = []
    for d in range(m.dart_count):
        if visited[d] or opposite[d] < 0:
            continue
        cyc = []
        x = d
        while not visited[x]:
            cyc.append(x)
            visited[x] = True
            o = int(opposite[x])
            visited[o] = True
            x = int(nxt[nxt[o]])
        loops.append(cyc)
    return StrandDecomposition(k=len(loops), open_curve=open_curve,
                               loops=loops)


def gauss_code(m: QuadMap) -> list[list[int]]:
    """Double-occurrence words over first-visit crossing labels.

    The first word follows the open curve; with k = 0 it is the classical
    Gauss code of the plane curve.  One further word per loop.  Every
    vertex label occurs exactly twice across the words (each crossing is
    passed by exactly two strand traversals).
    """
    dec = strand_decomposition(m)
    labels: dict[int, int] = {}

    def label(v: int) -> int:
        if v not in labels:
            labels[v] = len(labels) + 1
        return labels[v]

    # crossings passed by the open curve: one per outgoing dart, i.e.
    # every entry after the in-leg marker
    words = [[label(int(m.vertex[d])) for d in dec.open_curve[1:]]]
    for cyc in dec.loops:
        words.append([label(int(m.vertex[d])) for d in cyc])
    return words


def gauss_code_text(m: QuadMap) -> str:
    """One line per strand: open curve first ("O:"), then loops ("L:")."""
    words = gauss_code(m)
    lines = ["O: " + " ".join(map(str, words[0]))]
    lines += ["L: " + " ".join(map(str, w)) for w in words[1:]]
    return "\n".join(lines)
