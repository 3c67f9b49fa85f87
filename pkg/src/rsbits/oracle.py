"""Naive reference implementations used as ground truth in tests.

Everything here works from a plain unpacked bit sequence and shares no query
logic with the main structures.
"""

from __future__ import annotations

import numpy as np

from .bitcore import BitVector
from .errors import QueryError


class NaiveIndex:
    """Positions of all bits of each value, built by one linear scan."""

    def __init__(self, bits: np.ndarray):
        bits = np.asarray(bits, dtype=bool)
        self.n = len(bits)
        self.positions1 = np.flatnonzero(bits).astype(np.int64)
        self.positions0 = np.flatnonzero(~bits).astype(np.int64)

    @classmethod
    def from_bitvector(cls, v: BitVector) -> "NaiveIndex":
        return cls(v.to_bools())

    def count(self, x: int) -> int:
        return len(self.positions1) if x else len(self.positions0)

    def rank(self, x: int, i: int) -> int:
        if not 0 <= i <= self.n:
            raise QueryError(f"rank position {i} outside 0..{self.n}")
        pos = self.positions1 if x else self.positions0
        return int(np.searchsorted(pos, i, side="left"))

    def select(self, x: int, i: int) -> int:
        pos = self.positions1 if x else self.positions0
        if not 0 <= i < len(pos):
            raise QueryError(f"select rank {i} outside 0..{len(pos) - 1}")
        return int(pos[i])


def naive_rank(v: BitVector, x: int, i: int) -> int:
    return NaiveIndex.from_bitvector(v).rank(x, i)


def naive_select(v: BitVector, x: int, i: int) -> int:
    return NaiveIndex.from_bitvector(v).select(x, i)


def naive_block_counts(v: BitVector, block_size: int) -> tuple[list[int], list[int]]:
    """Per-block popcounts and their exclusive prefix sums.

    Works for any block size >= 1, so worked examples with tiny blocks can be
    checked directly. prefix[t] is the number of 1-bits before block t;
    prefix has one more entry than counts.
    """
    if block_size < 1:
        raise ValueError("block_size must be >= 1")
    bits = v.to_bools().astype(np.int64)
    nblocks = (v.n + block_size - 1) // block_size
    padded = np.zeros(nblocks * block_size, dtype=np.int64)
    padded[: v.n] = bits
    counts = padded.reshape(nblocks, block_size).sum(axis=1)
    prefix = np.zeros(nblocks + 1, dtype=np.int64)
    np.cumsum(counts, out=prefix[1:])
    return counts.tolist(), prefix.tolist()
