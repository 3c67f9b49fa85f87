"""JIT-compiled query kernels.

Every structure keeps its data in packed numpy uint64 arrays; the functions
here walk those arrays per query. Python wrappers validate arguments, the
kernels assume valid input. Batch drivers amortize call overhead and
accumulate an answer XOR plus the maximum superblock-probe count.

Summary params vector (int64):
  0 n, 1 m, 2 log2_L0, 3 k, 4 num_l1, 5 num_l2, 6 log2_L1, 7 log2_L2,
  8 log2_L, 9 num_sb, 10 words_per_l0, 11 n_words

Sample-tree (3-level) params vector (int64):
  0 log2_a, 1 log2_b, 2 alpha, 3 gap_class(alpha), 4 a//b, 5 top_count,
  6 top_width, 7 w_o, 8 w_g, 9 w_kappa, 10 w_rho_hat, 11 w_h, 12 w_c,
  13 m_x, 14 bit_value, 15 b

Sample-tree (2-level) params vector (int64):
  0 log2_a, 1 alpha, 2 top_count, 3 w_o, 4 w_g, 5 m_x, 6 bit_value, 7 a
"""

import numpy as np
from numba import int64, njit, uint64

_MASK47 = uint64((1 << 47) - 1)
_ONES64 = uint64(0xFFFFFFFFFFFFFFFF)


@njit(inline="always")
def _popcount(x):
    x = x - ((x >> uint64(1)) & uint64(0x5555555555555555))
    x = (x & uint64(0x3333333333333333)) + ((x >> uint64(2)) & uint64(0x3333333333333333))
    x = (x + (x >> uint64(4))) & uint64(0x0F0F0F0F0F0F0F0F)
    return int64((x * uint64(0x0101010101010101)) >> uint64(56))


@njit(inline="always")
def _selword(w, j):
    # position of the rank-j set bit; j < popcount(w)
    base = 0
    while True:
        c = _popcount(w & uint64(0xFF))
        if j < c:
            break
        j -= c
        w = w >> uint64(8)
        base += 8
    bb = int64(w & uint64(0xFF))
    pos = 0
    while True:
        if bb & 1:
            if j == 0:
                return base + pos
            j -= 1
        bb >>= 1
        pos += 1


@njit(inline="always")
def _bl(x):
    n = 0
    while x > 0:
        x >>= 1
        n += 1
    return n


@njit(inline="always")
def _maskv(w):
    if w >= 64:
        return _ONES64
    return (uint64(1) << uint64(w)) - uint64(1)


@njit(inline="always")
def _pget(raw, bitoff, width):
    # read a width-bit field at an absolute bit offset, little-endian
    if width <= 0:
        return uint64(0)
    w = bitoff >> 6
    s = bitoff & 63
    v = raw[w] >> uint64(s)
    if s + width > 64:
        v |= raw[w + 1] << uint64(64 - s)
    return v & _maskv(width)


@njit(inline="always")
def _delta(blocks, j, d):
    return int64(_pget(blocks, j * 512 + 112 + 12 * d, 12))


@njit(inline="always")
def _cum(blocks, j, t):
    return int64(_pget(blocks, j * 512 + 400 + 16 * t, 16))


@njit(cache=True)
def _rank1(words, blocks, sp, i):
    n = sp[0]
    if i >= n:
        return sp[1]
    log2l0 = sp[2]
    j1 = i >> sp[6]
    acc = int64(blocks[j1 * 8])
    jw = (i >> log2l0) & 31
    q = jw >> 2
    if q > 0:
        acc += _cum(blocks, j1, q - 1)
    for u in range(jw - (q << 2)):
        acc += _delta(blocks, j1, 3 * q + u)
    w0 = ((j1 << 5) + jw) * sp[10]
    bitpos = i & ((1 << log2l0) - 1)
    fw = bitpos >> 6
    for t in range(fw):
        acc += _popcount(words[w0 + t])
    rem = bitpos & 63
    if rem:
        acc += _popcount(words[w0 + fw] & ((uint64(1) << uint64(rem)) - uint64(1)))
    return acc


@njit(inline="always")
def _sb_ones(blocks, l2, sp, sb):
    # 1-bits strictly before superblock sb; sentinel sb == num_sb gives m
    if sb >= sp[9]:
        return sp[1]
    if sp[3] == 2:
        return int64(blocks[sb * 8])
    return int64(l2[sb * 8] & _MASK47)


@njit(cache=True)
def _sel_sb(words, blocks, l2, sp, start_sb, target, bitv, budget):
    """Locate the target-th bitv-bit starting at superblock start_sb.

    target is the absolute 0-based rank of the sought bit. Returns
    (position, probes); position -1 means the probe budget was exhausted.
    """
    m = sp[1]
    log2l0 = sp[2]
    k = sp[3]
    num_l1 = sp[4]
    log2l1 = sp[6]
    log2l = sp[8]
    num_sb = sp[9]
    wpl0 = sp[10]
    n_words = sp[11]
    l0 = 1 << log2l0

    sb = start_sb
    probes = 1
    while sb + 1 <= num_sb:
        nxt = _sb_ones(blocks, l2, sp, sb + 1)
        if bitv == 0:
            nxt = ((sb + 1) << log2l) - nxt
        if nxt <= target:
            if probes >= budget:
                return -1, probes
            sb += 1
            probes += 1
        else:
            break

    ones = _sb_ones(blocks, l2, sp, sb)
    loc = target - (ones if bitv else (sb << log2l) - ones)

    if k == 3:
        w0 = l2[sb * 8]
        t = 0
        base = 0
        while t < 15:
            if t == 0:
                e = int64(w0 >> uint64(47))
            else:
                e = int64(_pget(l2, sb * 512 + 64 + 32 * (t - 1), 32))
            if bitv == 0:
                e = ((t + 1) << log2l1) - e
            if loc < e:
                break
            base = e
            t += 1
        j1 = sb * 16 + t
        loc -= base
    else:
        j1 = sb

    l1v = int64(blocks[j1 * 8])
    l1n = int64(blocks[(j1 + 1) * 8]) if j1 + 1 < num_l1 else m
    tot_ones = l1n - l1v

    prev_ones = 0
    q = 7
    for qq in range(8):
        ge_ones = _cum(blocks, j1, qq) if qq < 7 else tot_ones
        ge = ge_ones if bitv else (((qq + 1) << 2) << log2l0) - ge_ones
        if loc < ge:
            q = qq
            break
        prev_ones = ge_ones

    bx = prev_ones if bitv else ((q << 2) << log2l0) - prev_ones
    blk = (q << 2) + 3
    for u in range(3):
        d = _delta(blocks, j1, 3 * q + u)
        cnt = d if bitv else l0 - d
        if loc < bx + cnt:
            blk = (q << 2) + u
            break
        bx += cnt
    rem = loc - bx

    wbase = ((j1 << 5) + blk) * wpl0
    for t in range(wpl0):
        wi = wbase + t
        wv = words[wi] if wi < n_words else uint64(0)
        if bitv == 0:
            wv = ~wv
        c = _popcount(wv)
        if rem < c:
            return wi * 64 + _selword(wv, rem), probes
        rem -= c
    return -1, probes


@njit(cache=True)
def _select3(words, blocks, l2, sp, traw, mraw, kraw, braw, mst, kst, bst, tp, i):
    log2a = tp[0]
    log2b = tp[1]
    alpha = tp[2]
    gca = tp[3]
    apb = tp[4]
    wt = tp[6]
    wo = tp[7]
    wg = tp[8]
    bitv = tp[14]
    b = tp[15]

    j = i >> log2a
    off = j * wt
    ev = _pget(traw, off, wt)
    o = int64(ev & _maskv(wo))
    r = int64(_pget(traw, off + wt, wt) & _maskv(wo)) - o
    if r < alpha:
        return _sel_sb(words, blocks, l2, sp, o, i, bitv, alpha)

    g = int64((ev >> uint64(wo)) & _maskv(wg))
    kap = int64(ev >> uint64(wo + wg))
    wod = _bl(r)
    rho = wod + kap
    stride = tp[10] + tp[11] + apb * rho
    gb = mst[rho] + g * stride
    rho_hat = int64(_pget(mraw, gb, tp[10]))
    h = int64(_pget(mraw, gb + tp[10], tp[11]))
    e = (i & ((1 << log2a) - 1)) >> log2b
    eb = gb + tp[10] + tp[11] + e * rho
    mev = _pget(mraw, eb, rho)
    od = int64(mev & _maskv(wod))
    c = int64(mev >> uint64(wod))
    if e + 1 < apb:
        nxt = int64(_pget(mraw, eb + rho, rho) & _maskv(wod))
    else:
        nxt = r
    rp = nxt - od
    if rp < alpha:
        return _sel_sb(words, blocks, l2, sp, o + od, i, bitv, alpha)

    cls = _bl(rp)
    cglob = int64(_pget(kraw, kst[rho_hat] + (h + cls - gca) * tp[12], tp[12]))
    idx = (c + cglob) * b + (i & (b - 1))
    odd = int64(_pget(braw, bst[cls] + idx * cls, cls))
    return _sel_sb(words, blocks, l2, sp, o + od + odd, i, bitv, 1)


@njit(cache=True)
def _select2(words, blocks, l2, sp, traw, draw, dst, tp, i):
    log2a = tp[0]
    alpha = tp[1]
    wo = tp[3]
    bitv = tp[6]
    a = tp[7]
    wt = wo + tp[4]

    j = i >> log2a
    ev = _pget(traw, j * wt, wt)
    o = int64(ev & _maskv(wo))
    r = int64(_pget(traw, (j + 1) * wt, wt) & _maskv(wo)) - o
    if r < alpha:
        return _sel_sb(words, blocks, l2, sp, o, i, bitv, alpha)

    g = int64(ev >> uint64(wo))
    cls = _bl(r)
    rel = int64(_pget(draw, dst[cls] + (g * a + (i & (a - 1))) * cls, cls))
    return _sel_sb(words, blocks, l2, sp, o + rel, i, bitv, 1)


@njit(cache=True)
def _rank_batch(words, blocks, sp, qs, bitv):
    out = np.empty(len(qs), np.int64)
    for x in range(len(qs)):
        r = _rank1(words, blocks, sp, qs[x])
        out[x] = r if bitv else qs[x] - r
    return out


@njit(cache=True)
def _rank_xor(words, blocks, sp, qs, bitv):
    acc = uint64(0)
    for x in range(len(qs)):
        r = _rank1(words, blocks, sp, qs[x])
        if bitv == 0:
            r = qs[x] - r
        acc ^= uint64(r)
    return acc


@njit(cache=True)
def _select3_batch(words, blocks, l2, sp, traw, mraw, kraw, braw, mst, kst, bst, tp, qs):
    out = np.empty(len(qs), np.int64)
    mp = 0
    for x in range(len(qs)):
        pos, pr = _select3(words, blocks, l2, sp, traw, mraw, kraw, braw, mst, kst, bst, tp, qs[x])
        out[x] = pos
        if pr > mp:
            mp = pr
    return out, mp


@njit(cache=True)
def _select3_xor(words, blocks, l2, sp, traw, mraw, kraw, braw, mst, kst, bst, tp, qs):
    acc = uint64(0)
    mp = 0
    for x in range(len(qs)):
        pos, pr = _select3(words, blocks, l2, sp, traw, mraw, kraw, braw, mst, kst, bst, tp, qs[x])
        acc ^= uint64(pos)
        if pr > mp:
            mp = pr
    return acc, mp


@njit(cache=True)
def _select2_batch(words, blocks, l2, sp, traw, draw, dst, tp, qs):
    out = np.empty(len(qs), np.int64)
    mp = 0
    for x in range(len(qs)):
        pos, pr = _select2(words, blocks, l2, sp, traw, draw, dst, tp, qs[x])
        out[x] = pos
        if pr > mp:
            mp = pr
    return out, mp


@njit(cache=True)
def _select2_xor(words, blocks, l2, sp, traw, draw, dst, tp, qs):
    acc = uint64(0)
    mp = 0
    for x in range(len(qs)):
        pos, pr = _select2(words, blocks, l2, sp, traw, draw, dst, tp, qs[x])
        acc ^= uint64(pos)
        if pr > mp:
            mp = pr
    return acc, mp


@njit(cache=True)
def _fnv1a(data):
    h = uint64(0xCBF29CE484222325)
    for x in range(len(data)):
        h = (h ^ uint64(data[x])) * uint64(0x100000001B3)
    return h
