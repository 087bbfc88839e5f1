"""Exact counts and brute-force exhaustive generation at small p.

This is the oracle layer: closed formulas evaluated in exact integer
arithmetic, and an exhaustive sweep over all blossom trees whose closure
census cross-checks the formulas and produces exact loop statistics.
asymptotic_ratio is the only operation here that touches floating point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product

import numpy as np

from .errors import CapacityError, SizeError
from .maps import QuadMap, canonical_code
from .sampler import BlossomTree, closure, root_both_ways
from .strands import count_loops

P_MAX_DEFAULT = 5
P_MAX_HARD = 7  # brute-force cost grows like 12**p


@dataclass(frozen=True)
class ExactCount:
    p: int
    maps: int
    blossom_trees: int
    mean_k: Fraction | None = None


def count_quartic_maps(p: int) -> int:
    """2 * 3**p * (2p)! / (p! (p+2)!), exactly."""
    if p < 1:
        raise SizeError("p must be >= 1")
    num = 2 * 3**p * math.factorial(2 * p)
    den = math.factorial(p) * math.factorial(p + 2)
    assert num % den == 0
    return num // den


def count_blossom_trees(p: int) -> int:
    """3**p times the Catalan number C(2p,p)/(p+1), exactly."""
    if p < 1:
        raise SizeError("p must be >= 1")
    return 3**p * (math.comb(2 * p, p) // (p + 1))


def asymptotic_ratio(p: int) -> float:
    """count_quartic_maps(p) over (2/sqrt(pi)) 12**p p**(-5/2).

    Evaluated in log space so it never overflows; tends to 1 from below as
    p grows.
    """
    if p < 1:
        raise SizeError("p must be >= 1")
    log_count = (math.log(2.0) + p * math.log(3.0)
                 + math.lgamma(2 * p + 1) - math.lgamma(p + 1)
                 - math.lgamma(p + 3))
    log_asym = (math.log(2.0 / math.sqrt(math.pi)) + p * math.log(12.0)
                - 2.5 * math.log(p))
    return math.exp(log_count - log_asym)


def binary_tree_codes(p: int):
    """All preorder codes of complete binary trees with p inner vertices."""
    if p == 0:
        yield (-1,)
        return
    for left in range(p):
        for lc in binary_tree_codes(left):
            for rc in binary_tree_codes(p - 1 - left):
                yield (1,) + lc + rc


def _check_capacity(p: int, p_max: int) -> None:
    if p < 1:
        raise SizeError("p must be >= 1")
    if p_max > P_MAX_HARD:
        raise CapacityError(f"p_max capped at {P_MAX_HARD}")
    if p > p_max:
        raise CapacityError(f"brute force limited to p <= {p_max}")


def closure_census(p: int, p_max: int = P_MAX_DEFAULT):
    """Close every budding of every tree, rooted both ways.

    Returns {canonical code: (map, multiplicity)}; the multiplicity of each
    distinct rooted map over all (blossom tree, rooting) pairs is p+2.
    """
    _check_capacity(p, p_max)
    census: dict[bytes, list] = {}
    for code in binary_tree_codes(p):
        code_arr = np.array(code, dtype=np.int8)
        for buds in product(range(3), repeat=p):
            bt = BlossomTree(p, code_arr, np.array(buds, dtype=np.int8))
            for m in root_both_ways(closure(bt)):
                key = canonical_code(m)
                entry = census.get(key)
                if entry is None:
                    census[key] = [m, 1]
                else:
                    entry[1] += 1
    return {key: (m, mult) for key, (m, mult) in census.items()}


def enumerate_maps_brute(p: int, p_max: int = P_MAX_DEFAULT) -> list[QuadMap]:
    """Every rooted 4-regular planar map with p vertices, one per
    isomorphism class, in canonical-code order."""
    census = closure_census(p, p_max)
    return [census[key][0] for key in sorted(census)]


def exact_mean_loops(p: int, p_max: int = P_MAX_DEFAULT) -> Fraction:
    """Average loop count over the uniform distribution, as an exact
    rational (brute-force sum over all distinct rooted maps)."""
    maps = enumerate_maps_brute(p, p_max)
    total = sum(count_loops(m) for m in maps)
    return Fraction(total, len(maps))


def exact_counts(p: int, p_max: int = P_MAX_DEFAULT,
                 with_mean: bool = True) -> ExactCount:
    mean = exact_mean_loops(p, p_max) if with_mean else None
    return ExactCount(p=p, maps=count_quartic_maps(p),
                      blossom_trees=count_blossom_trees(p), mean_k=mean)
