"""Two-level sample tree baseline: plain top level plus one dense level.

Top entries store (superblock offset, dense-group ordinal). A top gap of at
least alpha superblocks stores a dense group of a exact relative offsets,
segregated by gap width class. Used for cross-validation against the
three-level tree and as a space/time comparison point.
"""

from __future__ import annotations

import math

import numpy as np

from . import _kernels as K
from .bitcore import BitVector, PackedArray, bits_for_range, _scatter_bits
from .errors import ConfigError, InvariantError, QueryError
from .sample3 import MAX_CLASS, HEADER_BITS, _check_rates, _pow2_ceil, gap_class
from .summary import SummaryTree


def space2_bits(n: int, m: int, L: int, a: int, alpha: int) -> float:
    """Analytic size 2(m/a)log(n/L) + (a n/(alpha L)) log alpha, logs clamped at 1."""
    log_nl = max(1.0, math.log2(n / L)) if n > L else 1.0
    log_a = max(1.0, math.log2(alpha))
    return 2.0 * (m / a) * log_nl + (a * n / (alpha * L)) * log_a


def optimal_a2(n: int, m: int, L: int, alpha: int) -> int:
    """Power of two minimizing the analytic size.

    The real minimizer is sqrt(2 m log(n/L) alpha L / (n log alpha)); of the
    two bracketing powers of two we return the one with the smaller size, so
    both the half and the double evaluate no better.
    """
    if m < 1:
        raise ConfigError("optimal_a2 needs at least one sampled bit")
    log_nl = max(1.0, math.log2(n / L)) if n > L else 1.0
    log_a = max(1.0, math.log2(alpha))
    root = math.sqrt(2.0 * m * log_nl * alpha * L / (n * log_a))
    lo = max(1, 1 << int(math.floor(math.log2(root))) if root >= 1 else 1)
    hi = _pow2_ceil(max(1, math.ceil(root)))
    if space2_bits(n, m, L, hi, alpha) <= space2_bits(n, m, L, lo, alpha):
        return hi
    return lo


class SampleTree2:
    """Packed top level plus the dense family arrays."""

    def __init__(
        self,
        bit_value: int,
        a: int,
        alpha: int,
        L: int,
        n: int,
        m_x: int,
        T: PackedArray,
        d_raw: np.ndarray,
        d_len: np.ndarray,
        w_o: int,
        w_g: int,
    ):
        self.bit_value = bit_value
        self.a = a
        self.alpha = alpha
        self.L = L
        self.n = n
        self.m_x = m_x
        self.T = T
        self.d_raw = d_raw
        self.d_len = d_len
        self.w_o = w_o
        self.w_g = w_g
        self.top_count = -(-m_x // a) if m_x else 0

        self.d_start = np.zeros(MAX_CLASS + 1, dtype=np.int64)
        off = 0
        for rho in range(MAX_CLASS + 1):
            self.d_start[rho] = off
            off += int(d_len[rho]) * rho

        self.params = np.array(
            [a.bit_length() - 1, alpha, self.top_count, w_o, w_g, m_x, bit_value, a],
            dtype=np.int64,
        )

    def kernel_args(self, v: BitVector, summary: SummaryTree) -> tuple:
        return (
            v.words,
            summary.blocks,
            summary.l2blocks,
            summary.params,
            self.T.raw,
            self.d_raw,
            self.d_start,
            self.params,
        )

    def select_with_probes(self, v: BitVector, summary: SummaryTree, i: int) -> tuple[int, int]:
        if not 0 <= i < self.m_x:
            raise QueryError(f"select rank {i} outside 0..{self.m_x - 1}")
        pos, probes = K._select2(*self.kernel_args(v, summary), i)
        if pos < 0:
            raise InvariantError("sample tree invariant violated: probe budget exhausted")
        return int(pos), int(probes)

    def select(self, v: BitVector, summary: SummaryTree, i: int) -> int:
        return self.select_with_probes(v, summary, i)[0]

    def select_batch(self, v: BitVector, summary: SummaryTree, queries: np.ndarray) -> tuple[np.ndarray, int]:
        out, mp = K._select2_batch(*self.kernel_args(v, summary), np.ascontiguousarray(queries, dtype=np.int64))
        return out, int(mp)

    def measured_size(self) -> int:
        bits = HEADER_BITS + self.T.bit_size
        for rho in range(MAX_CLASS + 1):
            bits += int(self.d_len[rho]) * rho
        return bits


def build_sample2(v: BitVector, summary: SummaryTree, bit_value: int, a: int, alpha: int) -> SampleTree2:
    _check_rates(a, a, alpha)
    prefix = summary.prefix_array(bit_value)
    m_x = int(prefix[-1])
    s_ceil = summary.num_superblocks
    w_o = bits_for_range(s_ceil + 1)

    if m_x == 0:
        T = PackedArray.from_values([s_ceil], w_o)
        return SampleTree2(
            bit_value, a, alpha, summary.L, summary.n, 0, T,
            np.zeros(0, dtype=np.uint64), np.zeros(MAX_CLASS + 1, dtype=np.int64), w_o, 0,
        )

    tn = -(-m_x // a)
    top_q = np.arange(tn, dtype=np.int64) * a
    top_o = np.searchsorted(prefix, top_q, side="right").astype(np.int64) - 1
    gaps = np.diff(np.append(top_o, s_ceil))
    top_g = np.zeros(tn, dtype=np.int64)

    g_count: dict[int, int] = {}
    d_families: dict[int, list[np.ndarray]] = {}
    for j in np.flatnonzero(gaps >= alpha):
        j = int(j)
        cls = gap_class(int(gaps[j]))
        top_g[j] = g_count.get(cls, 0)
        g_count[cls] = top_g[j] + 1
        ords = np.minimum(j * a + np.arange(a, dtype=np.int64), m_x - 1)
        rel = np.searchsorted(prefix, ords, side="right").astype(np.int64) - 1 - int(top_o[j])
        d_families.setdefault(cls, []).append(rel)

    w_g = bits_for_range(int(top_g.max()) + 1)
    w_t = w_o + w_g
    if w_t > 64:
        raise InvariantError(f"top entry width {w_t} exceeds one word")
    tvals = np.append(top_o | (top_g << w_o), np.int64(s_ceil))
    T = PackedArray.from_values(tvals, w_t)

    d_len = np.zeros(MAX_CLASS + 1, dtype=np.int64)
    total_bits = 0
    for rho in range(MAX_CLASS + 1):
        d_len[rho] = sum(len(g) for g in d_families.get(rho, ()))
        total_bits += int(d_len[rho]) * rho
    d_raw = np.zeros((total_bits + 63) // 64, dtype=np.uint64)
    off = 0
    for rho in range(MAX_CLASS + 1):
        groups = d_families.get(rho)
        if groups:
            vals = np.concatenate(groups).astype(np.uint64)
            _scatter_bits(d_raw, off + np.arange(len(vals), dtype=np.int64) * rho, rho, vals)
        off += int(d_len[rho]) * rho

    return SampleTree2(bit_value, a, alpha, summary.L, summary.n, m_x, T, d_raw, d_len, w_o, w_g)
