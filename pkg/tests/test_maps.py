import io

import numpy as np
import pytest

from loopgas.enumeration import enumerate_maps_brute
from loopgas.errors import SizeError, StructuralError
from loopgas.maps import (QuadMap, canonical_code, face_count, read_maps,
                          read_maps_binary, read_maps_text, validate,
                          write_maps, write_maps_text)
from loopgas.rng import Rng
from loopgas.sampler import sample_map


def test_p1_maps_validate_and_have_3_faces():
    maps = enumerate_maps_brute(1)
    assert len(maps) == 2
    codes = {canonical_code(m) for m in maps}
    assert len(codes) == 2
    for m in maps:
        assert validate(m).ok
        assert face_count(m) == 3


def test_p2_maps_have_4_faces():
    maps = enumerate_maps_brute(2)
    assert len(maps) == 9
    assert all(face_count(m) == 4 for m in maps)
    assert len({canonical_code(m) for m in maps}) == 9


@pytest.mark.parametrize("p", [10, 100, 10**4])
def test_sampler_output_validates(p):
    m = sample_map(p, Rng(2024 + p))
    diag = validate(m)
    assert diag.ok, diag.violations
    assert face_count(m) == p + 2


def test_broken_involution_flagged_not_raised():
    m = sample_map(5, Rng(0))
    opp = m.opposite.copy()
    # repoint one non-leg dart at itself
    d = int(np.flatnonzero(opp >= 0)[0])
    opp[d] = d
    mutant = QuadMap(m.p, m.vertex, opp, m.next, m.in_leg, m.out_leg)
    diag = validate(mutant)
    assert not diag.ok
    assert any(rule == "involution" for rule, _ in diag.violations)


def test_extra_leg_flagged():
    m = sample_map(5, Rng(1))
    opp = m.opposite.copy()
    d = int(np.flatnonzero(opp >= 0)[0])
    opp[int(opp[d])] = -1
    opp[d] = -1
    mutant = QuadMap(m.p, m.vertex, opp, m.next, m.in_leg, m.out_leg)
    diag = validate(mutant)
    assert not diag.ok
    assert any(rule == "legs" for rule, _ in diag.violations)


def test_out_of_range_raises_structural():
    m = sample_map(3, Rng(2))
    opp = m.opposite.copy()
    opp[0] = 4 * m.p  # beyond the dart array
    mutant = QuadMap(m.p, m.vertex, opp, m.next, m.in_leg, m.out_leg)
    with pytest.raises(StructuralError):
        validate(mutant)


def test_bad_rotation_flagged():
    m = sample_map(4, Rng(3))
    nxt = m.next.copy()
    nxt[0] = 0  # fixed point breaks the 4-cycle at vertex 0
    mutant = QuadMap(m.p, m.vertex, m.opposite, nxt, m.in_leg, m.out_leg)
    diag = validate(mutant)
    assert not diag.ok
    assert any(rule == "rotation" for rule, _ in diag.violations)


def test_constructor_rejects_bad_sizes():
    with pytest.raises(SizeError):
        QuadMap(0, np.zeros(0, np.int64), np.zeros(0, np.int64),
                np.zeros(0, np.int64), 0, 1)
    m = sample_map(2, Rng(4))
    with pytest.raises(StructuralError):
        QuadMap(2, m.vertex[:-1], m.opposite[:-1], m.next[:-1], 0, 1)
    with pytest.raises(StructuralError):
        QuadMap(2, m.vertex, m.opposite, m.next, 3, 3)


def _relabel(m, perm):
    """Structure-preserving dart relabeling: dart d becomes perm[d]."""
    n = m.dart_count
    inv = np.empty(n, np.int64)
    inv[perm] = np.arange(n)
    vertex = np.empty(n, np.int64)
    opposite = np.empty(n, np.int64)
    nxt = np.empty(n, np.int64)
    for d in range(n):
        vertex[perm[d]] = m.vertex[d]
        o = m.opposite[d]
        opposite[perm[d]] = perm[o] if o >= 0 else -1
        nxt[perm[d]] = perm[m.next[d]]
    return QuadMap(m.p, vertex, opposite, nxt, int(perm[m.in_leg]),
                   int(perm[m.out_leg]))


def test_canonical_code_invariant_under_relabeling():
    rng = np.random.default_rng(5)
    for p in [1, 2, 3, 8, 40]:
        m = sample_map(p, Rng(p))
        code = canonical_code(m)
        for _ in range(3):
            perm = rng.permutation(4 * p).astype(np.int64)
            m2 = _relabel(m, perm)
            assert validate(m2).ok
            assert canonical_code(m2) == code


def test_immutability():
    m = sample_map(3, Rng(6))
    with pytest.raises(ValueError):
        m.opposite[0] = 5


def test_dart_view():
    m = sample_map(2, Rng(7))
    d = m.dart(m.in_leg)
    assert d.id == m.in_leg
    assert d.opposite == -1
    assert d.next == int(m.next[m.in_leg])


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def test_text_round_trip():
    maps = [sample_map(p, Rng(p + 50)) for p in (1, 2, 13)]
    buf = io.StringIO()
    write_maps_text(maps, buf, comments=["loopgas test"])
    buf.seek(0)
    back = read_maps_text(buf)
    assert len(back) == len(maps)
    for a, b in zip(maps, back):
        assert a.p == b.p and a.in_leg == b.in_leg and a.out_leg == b.out_leg
        assert np.array_equal(a.opposite, b.opposite)
        assert canonical_code(a) == canonical_code(b)


def test_binary_round_trip(tmp_path):
    maps = [sample_map(p, Rng(p)) for p in (1, 5, 64)]
    path = tmp_path / "maps.qmb"
    write_maps(path, maps, fmt="binary")
    back = read_maps(path)
    assert [canonical_code(m) for m in back] == \
        [canonical_code(m) for m in maps]


def test_read_sniffs_format(tmp_path):
    m = sample_map(3, Rng(8))
    t = tmp_path / "m.qm"
    b = tmp_path / "m.qmb"
    write_maps(t, [m], fmt="text")
    write_maps(b, [m], fmt="binary")
    assert canonical_code(read_maps(t)[0]) == canonical_code(read_maps(b)[0])


def test_binary_magic_layout(tmp_path):
    m = sample_map(1, Rng(9))
    path = tmp_path / "m.qmb"
    write_maps(path, [m], fmt="binary")
    raw = path.read_bytes()
    assert raw[:4] == b"QM01"
    words = np.frombuffer(raw[4:], dtype="<i8")
    assert words[0] == 1  # p
    assert len(raw) == 4 + 8 * (3 + 4 * 4 * m.p)


def test_text_malformed_inputs():
    with pytest.raises(StructuralError):
        read_maps_text(io.StringIO("NOTAMAP p=1 in=0 out=3\n"))
    with pytest.raises(StructuralError):
        read_maps_text(io.StringIO("QUADMAP p=1 in=0 out=3\n0 0 -1 1\n"))


def test_binary_malformed_inputs():
    with pytest.raises(StructuralError):
        read_maps_binary(io.BytesIO(b"XXXX"))
    with pytest.raises(StructuralError):
        read_maps_binary(io.BytesIO(b"QM01" + b"\x00" * 8))
