"""Numba kernels: PRNG core, blossom-tree closure, strand tracing.

Dart layout convention shared by every kernel: a map with p vertices has 4p
darts and vertex v owns darts 4v..4v+3 in counterclockwise rotation order.
Wherever a kernel is marked "implicit layout" it relies on
next(d) = 4*(d//4) + (d+1) % 4 instead of taking an explicit array; kernels
for deserialized maps with arbitrary labelings take explicit arrays.

All randomness is produced by xoshiro256++ over a 4-word uint64 state,
seeded through splitmix64.  Integer-only arithmetic keeps the streams
bit-identical across platforms.  Substream i of a 64-bit base key is the
(i+1)-th output of the splitmix64 sequence started at the base key.
"""

import numpy as np
from numba import njit

LEG = -1

U64 = np.uint64
_GOLDEN = U64(0x9E3779B97F4A7C15)
_MIX1 = U64(0xBF58476D1CE4E5B9)
_MIX2 = U64(0x94D049BB133111EB)


# ---------------------------------------------------------------------------
# PRNG
# ---------------------------------------------------------------------------

@njit(cache=True, nogil=True)
def _mix64(z):
    z = (z ^ (z >> U64(30))) * _MIX1
    z = (z ^ (z >> U64(27))) * _MIX2
    return z ^ (z >> U64(31))


@njit(cache=True, nogil=True)
def derive_key(base, index):
    """64-bit substream key for sample ``index`` under ``base``."""
    return _mix64(base + _GOLDEN * (U64(index) + U64(1)))


@njit(cache=True, nogil=True)
def seed_state(state, key):
    x = U64(key)
    for i in range(4):
        x = x + _GOLDEN
        state[i] = _mix64(x)
    if state[0] | state[1] | state[2] | state[3] == U64(0):
        state[0] = _GOLDEN


@njit(cache=True, nogil=True)
def _rotl(x, k):
    return (x << k) | (x >> (U64(64) - k))


@njit(cache=True, nogil=True)
def next64(state):
    s0, s1, s2, s3 = state[0], state[1], state[2], state[3]
    result = _rotl(s0 + s3, U64(23)) + s0
    t = s1 << U64(17)
    s2 ^= s0
    s3 ^= s1
    s1 ^= s2
    s0 ^= s3
    s2 ^= t
    s3 = _rotl(s3, U64(45))
    state[0] = s0
    state[1] = s1
    state[2] = s2
    state[3] = s3
    return result


@njit(cache=True, nogil=True)
def bounded(state, n):
    """Uniform uint64 in [0, n); rejection keeps the draw unbiased."""
    n = U64(n)
    threshold = (U64(0) - n) % n
    while True:
        r = next64(state)
        if r >= threshold:
            return r % n


@njit(cache=True, nogil=True)
def coin(state):
    return next64(state) >> U64(63)


# ---------------------------------------------------------------------------
# Tree sampling and closure
# ---------------------------------------------------------------------------

@njit(cache=True, nogil=True)
def fill_ballot(code, aux, p, state):
    """Uniform preorder code of a complete binary tree with p inner vertices.

    Shuffles p (+1) and p+1 (-1) symbols, then applies the cycle lemma: the
    rotation starting right after the first position where the prefix sum
    attains its minimum is the unique valid preorder code among the 2p+1
    rotations.  Result lands in ``code``; ``aux`` is scratch of equal size.
    """
    n = 2 * p + 1
    for i in range(p):
        aux[i] = 1
    for i in range(p, n):
        aux[i] = -1
    for i in range(n - 1, 0, -1):
        j = np.int64(bounded(state, U64(i + 1)))
        t = aux[i]
        aux[i] = aux[j]
        aux[j] = t
    s = 0
    smin = 2
    start = 0
    for i in range(n):
        s += aux[i]
        if s < smin:
            smin = s
            start = i + 1
    if start == n:
        start = 0
    for i in range(n):
        j = start + i
        if j >= n:
            j -= n
        code[i] = aux[j]


@njit(cache=True, nogil=True)
def fill_buds(buds, p, state):
    """Independent uniform corner in {0, 1, 2} for each inner vertex."""
    for v in range(p):
        buds[v] = np.int8(bounded(state, U64(3)))


@njit(cache=True, nogil=True)
def close_blossom(p, code, buds, opposite, stack, bud_stack, unmatched):
    """Close the blossom tree given by preorder ``code`` and bud corners.

    Walks the counterclockwise contour of the planted tree (root leaf first,
    then slots 1..3 of each inner vertex, depth first), matching each bud to
    the next free leaf with a stack; buds still on the stack at the end of
    the pass wrap around to the earliest unmatched leaves.  Fills
    ``opposite`` in the implicit dart layout and returns
    (status, free_a, free_b) with the two surviving half-edges in contour
    order.  status != 0 flags a malformed input.

    Slot assignment at vertex v with bud corner b: slot 0 is the parent
    edge, the bud sits in slot b+1, children fill the remaining slots in
    order.
    """
    n = 2 * p + 1
    if code[0] != 1:
        return 1, -1, -1
    bs = 0
    ul = 0
    unmatched[ul] = 0  # root leaf dangles from dart 0 of the top vertex
    ul += 1
    pos = 1
    v_count = 1
    sp = 0
    cur_v = 0
    cur_s = 1
    bud_slot = np.int64(buds[0]) + 1
    while True:
        if cur_s == 4:
            if sp == 0:
                break
            sp -= 1
            f = stack[sp]
            cur_v = f >> 3
            cur_s = f & 7
            bud_slot = np.int64(buds[cur_v]) + 1
            continue
        d = 4 * cur_v + cur_s
        if cur_s == bud_slot:
            bud_stack[bs] = d
            bs += 1
            cur_s += 1
        else:
            if pos >= n:
                return 2, -1, -1
            c = code[pos]
            pos += 1
            if c < 0:
                if bs > 0:
                    bs -= 1
                    b = bud_stack[bs]
                    opposite[d] = b
                    opposite[b] = d
                else:
                    unmatched[ul] = d
                    ul += 1
                cur_s += 1
            else:
                u = v_count
                if u >= p:
                    return 3, -1, -1
                v_count += 1
                opposite[d] = 4 * u
                opposite[4 * u] = d
                stack[sp] = (cur_v << 3) | (cur_s + 1)
                sp += 1
                cur_v = u
                cur_s = 1
                bud_slot = np.int64(buds[u]) + 1
    if pos != n or v_count != p or ul != bs + 2:
        return 4, -1, -1
    for i in range(bs):
        b = bud_stack[bs - 1 - i]
        l = unmatched[i]
        opposite[b] = l
        opposite[l] = b
    a = unmatched[bs]
    b2 = unmatched[bs + 1]
    opposite[a] = LEG
    opposite[b2] = LEG
    return 0, a, b2


@njit(cache=True, nogil=True)
def sample_quadmap(p, state, code, aux, buds, stack, opposite, bud_stack,
                   unmatched):
    """Draw one uniform rooted map; returns (status, in_leg, out_leg).

    Stream-compatible with running fill_ballot, fill_buds, close_blossom and
    a final coin on the same state: vertex ids are assigned in preorder, so
    buds are consumed in exactly the order fill_buds draws them.
    """
    fill_ballot(code, aux, p, state)
    fill_buds(buds, p, state)
    status, a, b = close_blossom(p, code, buds, opposite, stack, bud_stack,
                                 unmatched)
    if status != 0:
        return status, -1, -1
    if coin(state) == U64(0):
        return 0, a, b
    return 0, b, a


# ---------------------------------------------------------------------------
# Strand tracing
# ---------------------------------------------------------------------------

@njit(cache=True, nogil=True)
def count_loops_implicit(opposite, in_leg, visited):
    """Number of closed strands, implicit layout.

    Marks both traversal directions of every strand, so each undirected
    loop is counted exactly once.  Returns -1 if the open-curve walk fails
    to terminate (malformed opposite array).
    """
    m = opposite.size
    for i in range(m):
        visited[i] = False
    visited[in_leg] = True
    x = in_leg - (in_leg & 3) + ((in_leg + 2) & 3)
    steps = 0
    while True:
        visited[x] = True
        o = opposite[x]
        if o < 0:
            break
        visited[o] = True
        x = o - (o & 3) + ((o + 2) & 3)
        steps += 1
        if steps > m:
            return -1
    k = 0
    for d in range(m):
        if not visited[d] and opposite[d] >= 0:
            k += 1
            x = d
            while not visited[x]:
                visited[x] = True
                o = opposite[x]
                visited[o] = True
                x = o - (o & 3) + ((o + 2) & 3)
    return k


@njit(cache=True, nogil=True)
def count_loops_general(opposite, nxt, in_leg, visited):
    """Same as count_loops_implicit for an arbitrary dart labeling."""
    m = opposite.size
    for i in range(m):
        visited[i] = False
    visited[in_leg] = True
    x = nxt[nxt[in_leg]]
    steps = 0
    while True:
        visited[x] = True
        o = opposite[x]
        if o < 0:
            break
        visited[o] = True
        x = nxt[nxt[o]]
        steps += 1
        if steps > m:
            return -1
    k = 0
    for d in range(m):
        if not visited[d] and opposite[d] >= 0:
            k += 1
            x = d
            while not visited[x]:
                visited[x] = True
                o = opposite[x]
                visited[o] = True
                x = nxt[nxt[o]]
    return k


@njit(cache=True, nogil=True)
def face_count_kernel(opposite, nxt, in_leg, out_leg, seen):
    """Orbits of the face permutation, legs paired through infinity.

    Pairing the two legs (equivalent to restoring the uncut root edge with
    a degree-2 subdivision vertex at infinity) yields the p+2 faces of the
    underlying rooted map; bouncing off a leg instead would merge the two
    outer-face walks and undercount by one.
    """
    m = opposite.size
    for i in range(m):
        seen[i] = False
    faces = 0
    for d0 in range(m):
        if seen[d0]:
            continue
        faces += 1
        d = d0
        while not seen[d]:
            seen[d] = True
            o = opposite[d]
            if o < 0:
                o = out_leg if d == in_leg else in_leg
            d = nxt[o]
    return faces


@njit(cache=True, nogil=True)
def canonical_relabel(p, opposite, nxt, vertex, in_leg, queue, new_id,
                      visited_v, out_opp):
    """Root-anchored breadth-first dart relabeling.

    Vertices are ranked in discovery order starting from the in-leg's
    vertex; each vertex's darts take consecutive new ids following the
    rotation from its entry dart.  Rooted planar maps are rigid, so the
    relabeled opposite array is a complete isomorphism invariant.  Returns
    the number of vertices reached (== p iff connected).
    """
    m = 4 * p
    for d in range(m):
        new_id[d] = -1
    for v in range(p):
        visited_v[v] = False
    qn = 0
    queue[qn] = in_leg
    qn += 1
    visited_v[vertex[in_leg]] = True
    rank = 0
    i = 0
    while i < qn:
        entry = queue[i]
        i += 1
        d = entry
        for j in range(4):
            new_id[d] = 4 * rank + j
            d = nxt[d]
        d = entry
        for j in range(4):
            o = opposite[d]
            if o >= 0 and not visited_v[vertex[o]]:
                visited_v[vertex[o]] = True
                queue[qn] = o
                qn += 1
            d = nxt[d]
        rank += 1
    for d in range(m):
        nd = new_id[d]
        if nd >= 0:
            o = opposite[d]
            out_opp[nd] = new_id[o] if o >= 0 else LEG
    return rank


# ---------------------------------------------------------------------------
# Batched Monte Carlo
# ---------------------------------------------------------------------------

@njit(cache=True, nogil=True)
def mc_block(p, base_key, i0, i1):
    """Loop counts over samples [i0, i1); sample i is seeded from
    derive_key(base_key, i), so results do not depend on how the index
    range is split across workers.

    Returns (status, sum_k, sum_k2, k_min, k_max).  int64 accumulators are
    exact as long as (i1-i0) * p**2 < 2**63; callers chunk accordingly.
    """
    n = 2 * p + 1
    code = np.empty(n, np.int8)
    aux = np.empty(n, np.int8)
    buds = np.empty(p, np.int8)
    stack = np.empty(p + 1, np.int64)
    opposite = np.empty(4 * p, np.int64)
    bud_stack = np.empty(p, np.int64)
    unmatched = np.empty(p + 2, np.int64)
    visited = np.empty(4 * p, np.bool_)
    state = np.empty(4, np.uint64)
    sum_k = np.int64(0)
    sum_k2 = np.int64(0)
    k_min = np.int64(1) << 62
    k_max = np.int64(-1)
    for i in range(i0, i1):
        seed_state(state, derive_key(base_key, U64(i)))
        status, in_leg, _ = sample_quadmap(p, state, code, aux, buds, stack,
                                           opposite, bud_stack, unmatched)
        if status != 0:
            return np.int64(status), sum_k, sum_k2, k_min, k_max
        k = np.int64(count_loops_implicit(opposite, in_leg, visited))
        if k < 0 or k > p:
            return np.int64(100), sum_k, sum_k2, k_min, k_max
        sum_k += k
        sum_k2 += k * k
        if k < k_min:
            k_min = k
        if k > k_max:
            k_max = k
    return np.int64(0), sum_k, sum_k2, k_min, k_max


@njit(cache=True, nogil=True)
def sample_codes_block(p, base_key, i0, i1, out):
    """Canonical codes of samples [i0, i1) into out[(i-i0), :4p+1].

    Row layout: canonical opposite array followed by the canonical id of
    the out-leg.  Used by uniformity tests; same substream rule as
    mc_block.
    """
    n = 2 * p + 1
    m = 4 * p
    code = np.empty(n, np.int8)
    aux = np.empty(n, np.int8)
    buds = np.empty(p, np.int8)
    stack = np.empty(p + 1, np.int64)
    opposite = np.empty(m, np.int64)
    bud_stack = np.empty(p, np.int64)
    unmatched = np.empty(p + 2, np.int64)
    state = np.empty(4, np.uint64)
    queue = np.empty(p, np.int64)
    new_id = np.empty(m, np.int64)
    visited_v = np.empty(p, np.bool_)
    vertex = np.empty(m, np.int64)
    nxt = np.empty(m, np.int64)
    for d in range(m):
        vertex[d] = d // 4
        nxt[d] = d - (d & 3) + ((d + 1) & 3)
    for i in range(i0, i1):
        seed_state(state, derive_key(base_key, U64(i)))
        status, in_leg, out_leg = sample_quadmap(p, state, code, aux, buds,
                                                 stack, opposite, bud_stack,
                                                 unmatched)
        if status != 0:
            return np.int64(status)
        canonical_relabel(p, opposite, nxt, vertex, in_leg, queue, new_id,
                          visited_v, out[i - i0, :m])
        out[i - i0, m] = new_id[out_leg]
    return np.int64(0)
