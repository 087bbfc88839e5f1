from collections import Counter

import numpy as np
import pytest
from scipy import stats

from loopgas.enumeration import (binary_tree_codes, count_blossom_trees,
                                 count_quartic_maps)
from loopgas.errors import SizeError, StructuralError
from loopgas.maps import canonical_code, face_count, validate
from loopgas.rng import Rng
from loopgas.sampler import (BlossomTree, CompleteBinaryTree, attach_buds,
                             choose_root, closure, root_both_ways,
                             sample_binary_tree, sample_map)

SIGNIFICANCE = 0.001


def _chisquare_uniform(counts):
    return stats.chisquare(np.asarray(list(counts))).pvalue


def test_size_errors():
    with pytest.raises(SizeError):
        sample_binary_tree(0, Rng(1))
    with pytest.raises(SizeError):
        sample_map(0, Rng(1))


def test_p1_tree_is_unique():
    for seed in range(5):
        t = sample_binary_tree(1, Rng(seed))
        assert t.code.tolist() == [1, -1, -1]


def test_tree_code_always_valid():
    # the dataclass validates the ballot property on construction
    for p in [1, 2, 3, 10, 257]:
        for seed in range(3):
            t = sample_binary_tree(p, Rng(seed * 31 + p))
            assert t.p == p
            assert int(np.sum(t.code == 1)) == p
            assert t.leaf_count == p + 2


def test_invalid_tree_code_rejected():
    with pytest.raises(StructuralError):
        CompleteBinaryTree(1, np.array([-1, 1, -1], np.int8))
    with pytest.raises(StructuralError):
        CompleteBinaryTree(2, np.array([1, -1, -1], np.int8))


def test_p2_tree_shapes_balanced():
    rng = Rng(11)
    counts = Counter()
    n = 20000
    for _ in range(n):
        counts[bytes(sample_binary_tree(2, rng).code.tobytes())] += 1
    assert len(counts) == 2
    assert _chisquare_uniform(counts.values()) > SIGNIFICANCE


def test_p3_tree_shapes_uniform_big():
    # 5 shapes at p=3, each with frequency 0.2
    shapes = {bytes(np.array(c, np.int8).tobytes())
              for c in binary_tree_codes(3)}
    assert len(shapes) == 5
    rng = Rng(12)
    counts = Counter()
    n = 10**6
    for _ in range(n):
        counts[bytes(sample_binary_tree(3, rng).code.tobytes())] += 1
    assert set(counts) == shapes
    assert _chisquare_uniform(counts.values()) > SIGNIFICANCE


def test_attach_buds_counts_and_uniformity():
    rng = Rng(13)
    t = sample_binary_tree(1, Rng(0))
    counts = Counter(int(attach_buds(t, rng).buds[0]) for _ in range(30000))
    assert set(counts) == {0, 1, 2}
    assert _chisquare_uniform(counts.values()) > SIGNIFICANCE


def test_p2_blossom_trees_18_equally_likely():
    rng = Rng(14)
    counts = Counter()
    n = 180000
    for _ in range(n):
        t = sample_binary_tree(2, rng)
        bt = attach_buds(t, rng)
        counts[bytes(bt.code.tobytes()) + bytes(bt.buds.tobytes())] += 1
    assert len(counts) == 18 == count_blossom_trees(2)
    assert _chisquare_uniform(counts.values()) > SIGNIFICANCE


def test_bud_count_equals_p():
    for p in [1, 4, 33]:
        bt = attach_buds(sample_binary_tree(p, Rng(p)), Rng(p + 1))
        assert bt.bud_count == p
        assert bt.leaf_count == p + 2


def test_blossom_tree_validation():
    t = sample_binary_tree(2, Rng(0))
    with pytest.raises(StructuralError):
        BlossomTree(2, t.code, np.array([0], np.int8))
    with pytest.raises(StructuralError):
        BlossomTree(2, t.code, np.array([0, 3], np.int8))


def test_p1_closures_exhaustive():
    # 3 blossom trees close to 1-vertex maps; rooted both ways they cover
    # the 2 rooted maps with multiplicity p+2 = 3
    code = np.array([1, -1, -1], np.int8)
    seen = Counter()
    for b in range(3):
        pc = closure(BlossomTree(1, code, np.array([b], np.int8)))
        assert pc.p == 1
        assert len(set(pc.free)) == 2
        for m in root_both_ways(pc):
            assert validate(m).ok
            seen[canonical_code(m)] += 1
    assert len(seen) == 2
    assert set(seen.values()) == {3}


def test_p2_closure_count_identity():
    # 18 blossom trees x 2 rootings = 36 = 9 maps x (p+2)
    seen = Counter()
    for code in binary_tree_codes(2):
        for b0 in range(3):
            for b1 in range(3):
                bt = BlossomTree(2, np.array(code, np.int8),
                                 np.array([b0, b1], np.int8))
                for m in root_both_ways(closure(bt)):
                    seen[canonical_code(m)] += 1
    assert len(seen) == 9 == count_quartic_maps(2)
    assert sum(seen.values()) == 36
    assert set(seen.values()) == {4}


def test_closure_output_validates_after_rooting():
    for p in [1, 2, 3, 20]:
        rng = Rng(p * 7 + 1)
        bt = attach_buds(sample_binary_tree(p, rng), rng)
        m = choose_root(closure(bt), rng)
        assert validate(m).ok


def test_choose_root_fair():
    rng = Rng(15)
    bt = attach_buds(sample_binary_tree(1, Rng(2)), Rng(3))
    pc = closure(bt)
    n = 10**5
    heads = 0
    for _ in range(n):
        m = choose_root(pc, rng)
        heads += m.in_leg == pc.free[0]
    assert abs(heads - n / 2) < 5 * np.sqrt(n / 4)


def test_rooting_preserves_structure():
    pc = closure(attach_buds(sample_binary_tree(9, Rng(4)), Rng(5)))
    m1, m2 = root_both_ways(pc)
    assert m1.p == m2.p == 9
    assert m1.dart_count == m2.dart_count
    assert face_count(m1) == face_count(m2) == 11
    assert m1.in_leg == m2.out_leg and m1.out_leg == m2.in_leg


def test_fused_equals_modular_pipeline():
    for p in [1, 2, 3, 17, 301]:
        m1 = sample_map(p, Rng(1000 + p))
        rng = Rng(1000 + p)
        t = sample_binary_tree(p, rng)
        bt = attach_buds(t, rng)
        m2 = choose_root(closure(bt), rng)
        assert m1.in_leg == m2.in_leg and m1.out_leg == m2.out_leg
        assert np.array_equal(m1.opposite, m2.opposite)


def test_sample_map_deterministic():
    a = canonical_code(sample_map(500, Rng(77)))
    b = canonical_code(sample_map(500, Rng(77)))
    assert a == b


def test_p1_map_frequencies():
    rng = Rng(16)
    counts = Counter(canonical_code(sample_map(1, rng)) for _ in range(20000))
    assert len(counts) == 2
    assert _chisquare_uniform(counts.values()) > SIGNIFICANCE


def test_p2_map_uniformity():
    rng = Rng(17)
    counts = Counter(canonical_code(sample_map(2, rng))
                     for _ in range(90000))
    assert len(counts) == 9
    assert _chisquare_uniform(counts.values()) > SIGNIFICANCE


def test_count_identity_through_census():
    # blossom trees x 2 = rooted maps x (p+2), exhaustively for p <= 4
    from loopgas.enumeration import closure_census
    for p in [1, 2, 3, 4]:
        census = closure_census(p)
        raw = sum(mult for _, mult in census.values())
        assert raw == 2 * count_blossom_trees(p)
        assert raw == (p + 2) * count_quartic_maps(p)
