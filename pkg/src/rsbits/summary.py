"""k-level summary tree: constant-time rank and in-superblock select.

Layout per 512-bit L1 record (one cache line):
  bits   0..63   count of 1-bits before this L1-block (widened to 64 bits,
                 the remainder of the historical pointer fields is zeroed)
  bits  64..111  reserved, zero
  bits 112..399  24 x 12-bit individual counts for L0-blocks {4t, 4t+1, 4t+2}
  bits 400..511  7 x 16-bit cumulative counts through L0-blocks {4t+3}, t=0..6
The count of L0-block 31 is implicit in the next record's prefix.

Layout per 512-bit L2 record (k = 3 only):
  bits  0..46   count of 1-bits before this L2-block
  bits 47..63   cumulative count through L1-block 0 of this L2-block
  bits 64..511  14 x 32-bit cumulative counts through L1-blocks 1..14
"""

from __future__ import annotations

import numpy as np

from . import _kernels as K
from .bitcore import BitVector, _scatter_bits
from .errors import ConfigError, InvariantError, QueryError

SUPPORTED_L0 = (512, 1024, 2048)
L1_FANOUT = 32
L2_FANOUT = 16


class L1BlockView:
    """Read-only view of one L1 record."""

    __slots__ = ("_raw", "index")

    def __init__(self, raw: np.ndarray, index: int):
        self._raw = raw
        self.index = index

    @property
    def l1(self) -> int:
        return int(self._raw[self.index * 8])

    def delta(self, d: int) -> int:
        assert 0 <= d < 24
        return _read_field(self._raw, self.index * 512 + 112 + 12 * d, 12)

    def cum(self, t: int) -> int:
        assert 0 <= t < 7
        return _read_field(self._raw, self.index * 512 + 400 + 16 * t, 16)

    @property
    def deltas(self) -> list[int]:
        return [self.delta(d) for d in range(24)]

    @property
    def cums(self) -> list[int]:
        return [self.cum(t) for t in range(7)]


class L2BlockView:
    """Read-only view of one L2 record."""

    __slots__ = ("_raw", "index")

    def __init__(self, raw: np.ndarray, index: int):
        self._raw = raw
        self.index = index

    @property
    def l2(self) -> int:
        return int(self._raw[self.index * 8]) & ((1 << 47) - 1)

    def entry(self, t: int) -> int:
        assert 0 <= t < 15
        if t == 0:
            return int(self._raw[self.index * 8]) >> 47
        return _read_field(self._raw, self.index * 512 + 64 + 32 * (t - 1), 32)

    @property
    def entries(self) -> list[int]:
        return [self.entry(t) for t in range(15)]


def _read_field(raw: np.ndarray, bitoff: int, width: int) -> int:
    w, s = bitoff >> 6, bitoff & 63
    v = int(raw[w]) >> s
    if s + width > 64:
        v |= int(raw[w + 1]) << (64 - s)
    return v & ((1 << width) - 1)


class SummaryTree:
    """Array of L1 (and for k = 3 also L2) records over a bit vector.

    Immutable after build; safe for concurrent readers.
    """

    def __init__(self, blocks: np.ndarray, l2blocks: np.ndarray, n: int, m: int, L0: int, k: int):
        self.blocks = blocks
        self.l2blocks = l2blocks
        self.n = n
        self.m = m
        self.L0 = L0
        self.k = k
        self.L1 = L1_FANOUT * L0
        self.L2 = L2_FANOUT * self.L1
        self.L = self.L1 if k == 2 else self.L2
        self.num_l1 = (n + self.L1 - 1) // self.L1
        self.num_l2 = (n + self.L2 - 1) // self.L2 if k == 3 else 0
        self.num_superblocks = (n + self.L - 1) // self.L
        self.params = np.array(
            [
                n,
                m,
                L0.bit_length() - 1,
                k,
                self.num_l1,
                self.num_l2,
                self.L1.bit_length() - 1,
                self.L2.bit_length() - 1,
                self.L.bit_length() - 1,
                self.num_superblocks,
                L0 // 64,
                (n + 63) // 64,
            ],
            dtype=np.int64,
        )
        self._prefix_cache: dict[int, np.ndarray] = {}

    @property
    def bit_size(self) -> int:
        return 512 * self.num_l1 + 512 * self.num_l2

    def l1_block(self, j: int) -> L1BlockView:
        return L1BlockView(self.blocks, j)

    def l2_block(self, j: int) -> L2BlockView:
        return L2BlockView(self.l2blocks, j)

    def prefix_array(self, bit_value: int = 1) -> np.ndarray:
        """ones (or zeros) strictly before each superblock; index num_sb holds the total."""
        arr = self._prefix_cache.get(bit_value)
        if arr is None:
            sbs = np.arange(self.num_superblocks, dtype=np.int64)
            if self.k == 2:
                ones = self.blocks[0::8][: self.num_superblocks].astype(np.int64)
            else:
                ones = (self.l2blocks[0::8][: self.num_superblocks] & np.uint64((1 << 47) - 1)).astype(np.int64)
            if bit_value:
                arr = np.append(ones, self.m)
            else:
                arr = np.append(sbs * self.L - ones, self.n - self.m)
            self._prefix_cache[bit_value] = arr
        return arr

    def rank1(self, v: BitVector, i: int) -> int:
        if not 0 <= i <= self.n:
            raise QueryError(f"rank position {i} outside 0..{self.n}")
        return int(K._rank1(v.words, self.blocks, self.params, i))

    def rank0(self, v: BitVector, i: int) -> int:
        return i - self.rank1(v, i)

    def superblock_prefix(self, sb: int, bit_value: int = 1) -> int:
        if not 0 <= sb <= self.num_superblocks:
            raise QueryError(f"superblock {sb} outside 0..{self.num_superblocks}")
        return int(self.prefix_array(bit_value)[sb])

    def cumulative_l0_counts(self, j: int) -> list[int]:
        """All 32 cumulative L0 counts of L1-block j.

        The last one is not stored in the record; it comes from the adjacent
        prefix (or the total for the final block).
        """
        b = self.l1_block(j)
        out = [0] * 32
        run = 0
        for t in range(8):
            for u in range(3):
                run += b.delta(3 * t + u)
                out[4 * t + u] = run
            if t < 7:
                run = b.cum(t)
            else:
                nxt = int(self.blocks[(j + 1) * 8]) if j + 1 < self.num_l1 else self.m
                run = nxt - b.l1
            out[4 * t + 3] = run
        return out

    def select_from_superblock(
        self, v: BitVector, start_sb: int, j: int, bit_value: int, probe_budget: int
    ) -> tuple[int, int]:
        """Position of the (j+1)-th bit_value-bit at or after superblock start_sb.

        j counts from the start of start_sb. Returns (position, probes used).
        """
        if not 0 <= start_sb < self.num_superblocks:
            raise QueryError(f"superblock {start_sb} outside 0..{self.num_superblocks - 1}")
        target = self.superblock_prefix(start_sb, bit_value) + j
        total = self.m if bit_value else self.n - self.m
        if not 0 <= target < total:
            raise QueryError(f"no bit with rank {target}; total {total}")
        pos, probes = K._sel_sb(
            v.words, self.blocks, self.l2blocks, self.params, start_sb, target, bit_value, probe_budget
        )
        if pos < 0:
            raise InvariantError("sample tree invariant violated: probe budget exhausted")
        return int(pos), int(probes)


def build_summary(v: BitVector, L0: int, k: int = 2) -> SummaryTree:
    """Single pass over the words of v; all counts packed bit-precise."""
    if L0 not in SUPPORTED_L0:
        raise ConfigError(f"L0 must be one of {SUPPORTED_L0}, got {L0}")
    if k not in (2, 3):
        raise ConfigError(f"summary levels k must be 2 or 3, got {k}")
    if v.n < 1:
        raise ConfigError("bit vector must be non-empty")
    if k == 3 and v.n >= 1 << 47:
        raise ConfigError("k = 3 limits n to 2^47 - 1")

    wpl0 = L0 // 64
    L1 = L1_FANOUT * L0
    num_l1 = (v.n + L1 - 1) // L1
    total_l0 = num_l1 * L1_FANOUT

    wc = np.bitwise_count(v.words).astype(np.int64)
    pad = total_l0 * wpl0 - len(wc)
    if pad:
        wc = np.concatenate([wc, np.zeros(pad, dtype=np.int64)])
    grid = wc.reshape(total_l0, wpl0).sum(axis=1).reshape(num_l1, L1_FANOUT)
    l1tot = grid.sum(axis=1)
    m = int(l1tot.sum())
    l1pre = np.zeros(num_l1, dtype=np.int64)
    np.cumsum(l1tot[:-1], out=l1pre[1:])
    cums = grid.cumsum(axis=1)

    raw = np.zeros(num_l1 * 8, dtype=np.uint64)
    raw[0::8] = l1pre.astype(np.uint64)
    didx = np.array([4 * t + u for t in range(8) for u in range(3)], dtype=np.int64)
    doffs = np.arange(num_l1, dtype=np.int64)[:, None] * 512 + 112 + 12 * np.arange(24, dtype=np.int64)[None, :]
    _scatter_bits(raw, doffs.ravel(), 12, grid[:, didx].ravel())
    cidx = np.array([4 * t + 3 for t in range(7)], dtype=np.int64)
    coffs = np.arange(num_l1, dtype=np.int64)[:, None] * 512 + 400 + 16 * np.arange(7, dtype=np.int64)[None, :]
    _scatter_bits(raw, coffs.ravel(), 16, cums[:, cidx].ravel())

    l2raw = np.zeros(0, dtype=np.uint64)
    if k == 3:
        L2 = L2_FANOUT * L1
        num_l2 = (v.n + L2 - 1) // L2
        padded = np.zeros(num_l2 * L2_FANOUT, dtype=np.int64)
        padded[: len(l1tot)] = l1tot
        l2grid = padded.reshape(num_l2, L2_FANOUT)
        l2cums = l2grid.cumsum(axis=1)
        l2tot = l2grid.sum(axis=1)
        l2pre = np.zeros(num_l2, dtype=np.int64)
        np.cumsum(l2tot[:-1], out=l2pre[1:])
        l2raw = np.zeros(num_l2 * 8, dtype=np.uint64)
        l2raw[0::8] = l2pre.astype(np.uint64) | (l2cums[:, 0].astype(np.uint64) << np.uint64(47))
        eoffs = np.arange(num_l2, dtype=np.int64)[:, None] * 512 + 64 + 32 * np.arange(14, dtype=np.int64)[None, :]
        _scatter_bits(l2raw, eoffs.ravel(), 32, l2cums[:, 1:15].ravel())

    return SummaryTree(raw, l2raw, v.n, m, L0, k)
