"""Three-level bit-compressed sample tree for constant-probe select.

Level roles: the top level samples the superblock of every a-th x-bit; top
gaps of at least alpha superblocks split into a mid-group sampling every b-th
x-bit; mid gaps of at least alpha split into a bot-group holding the exact
superblock offset of every covered x-bit. Offsets are class-segregated by
width so each array packs to the minimum bit count, with globally fixed field
widths determined in a first pass and packed bit-precise in a second.

Gaps are classified by gap_class(r) = bits_for_range(r + 1): a sampled bit can
share a superblock with the next higher-level sample, so stored offsets range
over 0..r inclusive.
"""

from __future__ import annotations

import math

import numpy as np

from . import _kernels as K
from .bitcore import BitVector, BitWriter, PackedArray, bits_for_range, _scatter_bits
from .errors import ConfigError, InvariantError, QueryError
from .summary import SummaryTree

HEADER_BITS = 512  # fixed parameter header accounted by measured_size
MAX_CLASS = 64


def gap_class(r: int) -> int:
    """Width class of a gap: bits needed to store offsets 0..r."""
    return r.bit_length()


def _pow2_ceil(x: int) -> int:
    return 1 << max(0, (x - 1).bit_length()) if x > 1 else 1


def _check_rates(a: int, b: int, alpha: int) -> None:
    if a < 1 or a & (a - 1):
        raise ConfigError(f"sample rate a must be a power of two, got {a}")
    if b < 1 or b & (b - 1) or b > a:
        raise ConfigError(f"sample rate b must be a power of two <= a, got {b}")
    if alpha & (alpha - 1) or not 2 <= alpha <= 64:
        raise ConfigError(f"scan threshold alpha must be a power of two in 2..64, got {alpha}")


def optimal_a(n: int, m: int, L: int, alpha: int) -> int:
    """Space-minimizing top rate, rounded up to a power of two."""
    if m < 1:
        raise ConfigError("optimal_a needs at least one sampled bit")
    if alpha < 2:
        raise ConfigError("alpha must be at least 2")
    log_a = max(1.0, math.log2(alpha))
    log_nl = max(1.0, math.log2(n / L))
    val = (3.0 * m / (math.sqrt(2.0) * n) * (alpha / log_a) * L * log_nl) ** (2.0 / 3.0)
    return _pow2_ceil(max(1, math.ceil(val)))


def optimal_b(a: int) -> int:
    """Next power of two >= sqrt(2a), capped at a."""
    p = 1
    while p * p < 2 * a:
        p <<= 1
    return min(p, a)


def a_fast(n: int, m: int, L: int, alpha: int) -> int:
    """Denser-than-alpha*L top rate for query speed: alpha*L*m / (3n), rounded up."""
    if m < 1:
        raise ConfigError("a_fast needs at least one sampled bit")
    val = -(-alpha * L * m // (3 * n))
    return max(1, _pow2_ceil(val))


def default_grid(n: int, m: int, L: int, alpha: int) -> list[tuple[int, int]]:
    """Power-of-two pairs within a factor 8 of the analytic optimum."""
    a0 = optimal_a(n, m, L, alpha)
    b0 = optimal_b(a0)
    pairs = set()
    for da in range(-3, 4):
        a = max(1, a0 * 2**da if da >= 0 else a0 // 2**-da)
        for db in range(-3, 4):
            b = max(1, b0 * 2**db if db >= 0 else b0 // 2**-db)
            pairs.add((a, min(b, a)))
    return sorted(pairs)


def a_min(
    v: BitVector,
    summary: SummaryTree,
    alpha: int,
    grid: list[tuple[int, int]] | None = None,
    bit_value: int = 1,
) -> tuple[int, int]:
    """The grid pair giving the smallest measured tree; ties go to larger a, then larger b."""
    if grid is None:
        m_x = summary.m if bit_value else summary.n - summary.m
        if m_x == 0:
            return 1, 1
        grid = default_grid(summary.n, m_x, summary.L, alpha)
    if not grid:
        raise ConfigError("a_min requires a non-empty grid")
    best = None
    for a, b in sorted(set(grid)):
        size = build_sample3(v, summary, bit_value, a, b, alpha).measured_size()
        if best is None or size < best[0] or (size == best[0] and (a, b) > best[1]):
            best = (size, (a, b))
    return best[1]


class SampleTree3:
    """Packed arrays of the three-level sample tree plus the global widths."""

    def __init__(
        self,
        bit_value: int,
        a: int,
        b: int,
        alpha: int,
        L: int,
        n: int,
        m_x: int,
        T: PackedArray,
        m_raw: np.ndarray,
        m_groups: np.ndarray,
        k_raw: np.ndarray,
        k_len: np.ndarray,
        b_raw: np.ndarray,
        b_len: np.ndarray,
        widths: tuple[int, int, int, int, int, int],
    ):
        self.bit_value = bit_value
        self.a = a
        self.b = b
        self.alpha = alpha
        self.L = L
        self.n = n
        self.m_x = m_x
        self.T = T
        self.m_raw = m_raw
        self.m_groups = m_groups
        self.k_raw = k_raw
        self.k_len = k_len
        self.b_raw = b_raw
        self.b_len = b_len
        self.w_o, self.w_g, self.w_kappa, self.w_rho_hat, self.w_h, self.w_c = widths
        self.top_count = -(-m_x // a) if m_x else 0

        apb = a // b
        self.m_start = np.zeros(MAX_CLASS + 1, dtype=np.int64)
        off = 0
        for rho in range(MAX_CLASS + 1):
            self.m_start[rho] = off
            off += int(m_groups[rho]) * (self.w_rho_hat + self.w_h + apb * rho)
        self.k_start = np.zeros(MAX_CLASS + 1, dtype=np.int64)
        off = 0
        for rho in range(MAX_CLASS + 1):
            self.k_start[rho] = off
            off += int(k_len[rho]) * self.w_c
        self.b_start = np.zeros(MAX_CLASS + 1, dtype=np.int64)
        off = 0
        for rho in range(MAX_CLASS + 1):
            self.b_start[rho] = off
            off += int(b_len[rho]) * rho

        self.params = np.array(
            [
                a.bit_length() - 1,
                b.bit_length() - 1,
                alpha,
                gap_class(alpha),
                apb,
                self.top_count,
                self.T.width,
                self.w_o,
                self.w_g,
                self.w_kappa,
                self.w_rho_hat,
                self.w_h,
                self.w_c,
                m_x,
                bit_value,
                b,
            ],
            dtype=np.int64,
        )

    def kernel_args(self, v: BitVector, summary: SummaryTree) -> tuple:
        return (
            v.words,
            summary.blocks,
            summary.l2blocks,
            summary.params,
            self.T.raw,
            self.m_raw,
            self.k_raw,
            self.b_raw,
            self.m_start,
            self.k_start,
            self.b_start,
            self.params,
        )

    def select_with_probes(self, v: BitVector, summary: SummaryTree, i: int) -> tuple[int, int]:
        if not 0 <= i < self.m_x:
            raise QueryError(f"select rank {i} outside 0..{self.m_x - 1}")
        pos, probes = K._select3(*self.kernel_args(v, summary), i)
        if pos < 0:
            raise InvariantError("sample tree invariant violated: probe budget exhausted")
        return int(pos), int(probes)

    def select(self, v: BitVector, summary: SummaryTree, i: int) -> int:
        return self.select_with_probes(v, summary, i)[0]

    def select_batch(self, v: BitVector, summary: SummaryTree, queries: np.ndarray) -> tuple[np.ndarray, int]:
        out, mp = K._select3_batch(*self.kernel_args(v, summary), np.ascontiguousarray(queries, dtype=np.int64))
        return out, int(mp)

    def measured_size(self) -> int:
        """Exact packed bits across all arrays plus the fixed parameter header."""
        apb = self.a // self.b
        bits = HEADER_BITS + self.T.bit_size
        for rho in range(MAX_CLASS + 1):
            bits += int(self.m_groups[rho]) * (self.w_rho_hat + self.w_h + apb * rho)
            bits += int(self.k_len[rho]) * self.w_c
            bits += int(self.b_len[rho]) * rho
        return bits


def build_sample3(
    v: BitVector, summary: SummaryTree, bit_value: int, a: int, b: int, alpha: int
) -> SampleTree3:
    """Two passes: extract every offset, gap, counter and the width maxima, then pack."""
    _check_rates(a, b, alpha)
    prefix = summary.prefix_array(bit_value)
    m_x = int(prefix[-1])
    s_ceil = summary.num_superblocks
    w_o = bits_for_range(s_ceil + 1)
    apb = a // b
    gca = gap_class(alpha)

    if m_x == 0:
        T = PackedArray.from_values([s_ceil], w_o)
        zeros = np.zeros(MAX_CLASS + 1, dtype=np.int64)
        return SampleTree3(
            bit_value, a, b, alpha, summary.L, summary.n, 0, T,
            np.zeros(0, dtype=np.uint64), zeros.copy(),
            np.zeros(0, dtype=np.uint64), zeros.copy(),
            np.zeros(0, dtype=np.uint64), zeros.copy(),
            (w_o, 0, 0, 0, 0, 0),
        )

    # pass 1: offsets, gaps, group structure
    tn = -(-m_x // a)
    top_q = np.arange(tn, dtype=np.int64) * a
    top_o = np.searchsorted(prefix, top_q, side="right").astype(np.int64) - 1
    o_ext = np.append(top_o, s_ceil)
    gaps = np.diff(o_ext)
    top_g = np.zeros(tn, dtype=np.int64)
    top_kappa = np.zeros(tn, dtype=np.int64)

    g_count: dict[int, int] = {}
    m_families: dict[int, list] = {}  # rho -> [(rho_hat, h, entry_vals, wod)]
    k_families: dict[int, list[int]] = {}
    b_families: dict[int, list[np.ndarray]] = {}
    bot_count: dict[int, int] = {}

    for j in np.flatnonzero(gaps >= alpha):
        j = int(j)
        o = int(top_o[j])
        r = int(gaps[j])
        wod = gap_class(r)
        q0 = j * a
        ords = np.minimum(q0 + np.arange(apb, dtype=np.int64) * b, m_x - 1)
        offs = np.searchsorted(prefix, ords, side="right").astype(np.int64) - 1 - o
        nxt = np.append(offs[1:], r)
        rp = nxt - offs
        valid = q0 + np.arange(apb, dtype=np.int64) * b < m_x
        split = np.flatnonzero((rp >= alpha) & valid)

        cvals = np.zeros(apb, dtype=np.int64)
        percls: dict[int, int] = {}
        rho_hat = 0
        for e in split:
            cls = gap_class(int(rp[e]))
            cvals[e] = percls.get(cls, 0)
            percls[cls] = cvals[e] + 1
            rho_hat = max(rho_hat, cls)
        c_max = int(cvals[split].max()) if len(split) else 0
        kappa = bits_for_range(c_max + 1)
        rho = wod + kappa
        if rho > MAX_CLASS:
            raise InvariantError(f"mid entry width {rho} exceeds {MAX_CLASS}")
        g = g_count.get(rho, 0)
        g_count[rho] = g + 1
        top_g[j] = g
        top_kappa[j] = kappa

        if len(split):
            runs = k_families.setdefault(rho_hat, [])
            h = len(runs)
            runs.extend(bot_count.get(w, 0) for w in range(gca, rho_hat + 1))
        else:
            rho_hat = 0
            h = 0
        for e in split:
            e = int(e)
            cls = gap_class(int(rp[e]))
            bords = np.minimum(q0 + e * b + np.arange(b, dtype=np.int64), m_x - 1)
            boffs = np.searchsorted(prefix, bords, side="right").astype(np.int64) - 1 - (o + int(offs[e]))
            b_families.setdefault(cls, []).append(boffs)
            bot_count[cls] = bot_count.get(cls, 0) + 1

        entries = offs | (cvals << wod)
        m_families.setdefault(rho, []).append((rho_hat, h, entries, wod))

    w_g = bits_for_range(int(top_g.max()) + 1)
    w_kappa = bits_for_range(int(top_kappa.max()) + 1)
    max_rho_hat = max((grp[0] for fam in m_families.values() for grp in fam), default=0)
    w_rho_hat = bits_for_range(max_rho_hat + 1)
    max_h = max((grp[1] for fam in m_families.values() for grp in fam), default=0)
    w_h = bits_for_range(max_h + 1)
    max_c = max((c for fam in k_families.values() for c in fam), default=0)
    w_c = bits_for_range(max_c + 1)

    # pass 2: pack everything bit-precise
    w_t = w_o + w_g + w_kappa
    if w_t > 64:
        raise InvariantError(f"top entry width {w_t} exceeds one word")
    tvals = np.append(
        top_o | (top_g << w_o) | (top_kappa << (w_o + w_g)),
        np.int64(s_ceil),
    )
    T = PackedArray.from_values(tvals, w_t)

    writer = BitWriter()
    m_groups = np.zeros(MAX_CLASS + 1, dtype=np.int64)
    for rho in range(MAX_CLASS + 1):
        for rho_hat, h, entries, wod in m_families.get(rho, ()):
            writer.put(rho_hat, w_rho_hat)
            writer.put(h, w_h)
            for val in entries.tolist():
                writer.put(int(val), rho)
        m_groups[rho] = len(m_families.get(rho, ()))
    m_raw = writer.finish()

    k_len = np.zeros(MAX_CLASS + 1, dtype=np.int64)
    for rho in range(MAX_CLASS + 1):
        k_len[rho] = len(k_families.get(rho, ()))
    k_raw = np.zeros((int(k_len.sum()) * w_c + 63) // 64, dtype=np.uint64)
    off = 0
    for rho in range(MAX_CLASS + 1):
        vals = k_families.get(rho)
        if vals:
            _scatter_bits(k_raw, off + np.arange(len(vals), dtype=np.int64) * w_c, w_c, np.array(vals, dtype=np.uint64))
        off += int(k_len[rho]) * w_c

    b_len = np.zeros(MAX_CLASS + 1, dtype=np.int64)
    total_b_bits = 0
    for rho in range(MAX_CLASS + 1):
        b_len[rho] = sum(len(g) for g in b_families.get(rho, ()))
        total_b_bits += int(b_len[rho]) * rho
    b_raw = np.zeros((total_b_bits + 63) // 64, dtype=np.uint64)
    off = 0
    for rho in range(MAX_CLASS + 1):
        groups = b_families.get(rho)
        if groups:
            vals = np.concatenate(groups).astype(np.uint64)
            _scatter_bits(b_raw, off + np.arange(len(vals), dtype=np.int64) * rho, rho, vals)
        off += int(b_len[rho]) * rho

    return SampleTree3(
        bit_value, a, b, alpha, summary.L, summary.n, m_x, T,
        m_raw, m_groups, k_raw, k_len, b_raw, b_len,
        (w_o, w_g, w_kappa, w_rho_hat, w_h, w_c),
    )


def _clog(x: float) -> float:
    """log2 clamped below at 1 (the bound's lower-order terms stay defined)."""
    if x <= 2.0:
        return 1.0
    return math.log2(x)


def size_bound_bits(n: int, m: int, L: int, a: int, b: int, alpha: int) -> float:
    """Analytic upper bound on the packed tree size, in bits.

    Evaluates the closed form with s = n/(alpha*L), t = m/a, G = min(s, t);
    every logarithm is clamped below at 1.
    """
    s = n / (alpha * L)
    t = m / a
    G = max(min(s, t), 1.0)
    top = t * (_clog(n / L) + _clog(G) + _clog(_clog(a / b)))
    mid_counters = G * (_clog(s / G) + 1.0) * _clog(s)
    mid = G * (2.0 * (a / b) * _clog(alpha * s / G) + _clog(_clog(alpha * s / G)) + _clog(G))
    bot = s * b * _clog(alpha)
    return top + mid_counters + mid + bot
