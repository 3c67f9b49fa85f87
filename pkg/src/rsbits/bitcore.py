"""Bit-vector storage, word-level rank/select primitives, and packed integer arrays.

Bit position 0 is the least-significant bit of word 0. All multi-word storage
is little-endian across 64-bit word boundaries, so serialized layouts are
bit-exact across platforms.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

WORD = 64
MASK64 = (1 << 64) - 1

_POP8 = [bin(i).count("1") for i in range(256)]


def bits_for_range(r: int) -> int:
    """Minimal width w such that every value in 0..r-1 fits in w bits.

    bits_for_range(1) == 0 by convention (the single value 0 needs no bits).
    """
    if r < 1:
        raise ValueError("bits_for_range requires r >= 1")
    return (r - 1).bit_length()


def popcount_word(w: int) -> int:
    """Number of set bits in a 64-bit word."""
    return (w & MASK64).bit_count()


def rank_word_prefix(w: int, i: int) -> int:
    """Number of set bits at positions 0..i-1 of w (i may be 0..64)."""
    assert 0 <= i <= 64
    if i == 0:
        return 0
    return (w & (MASK64 >> (64 - i))).bit_count()


def select_in_word(w: int, j: int) -> int:
    """Position of the set bit with 0-based rank j inside a 64-bit word.

    Byte-skipping table walk; hardware pdep/tzcnt would produce identical
    results. j must be < popcount_word(w).
    """
    w &= MASK64
    assert j < w.bit_count(), "select_in_word rank out of range"
    base = 0
    while True:
        c = _POP8[w & 0xFF]
        if j < c:
            break
        j -= c
        w >>= 8
        base += 8
    b = w & 0xFF
    pos = 0
    while True:
        if b & 1:
            if j == 0:
                return base + pos
            j -= 1
        b >>= 1
        pos += 1


class BitVector:
    """Immutable bit sequence backed by an array of 64-bit words.

    Invariants: len(words) == ceil(n / 64) and all bits at positions >= n in
    the last word are zero.
    """

    __slots__ = ("words", "n", "_ones")

    def __init__(self, words: np.ndarray, n: int):
        words = np.ascontiguousarray(words, dtype=np.uint64)
        if len(words) != (n + 63) // 64:
            raise ValueError("word count does not match bit length")
        if n % 64 and len(words):
            tail = int(words[-1]) >> (n % 64)
            if tail:
                raise ValueError("padding bits above position n must be zero")
        self.words = words
        self.n = n
        self._ones: int | None = None

    def __len__(self) -> int:
        return self.n

    @classmethod
    def from_bools(cls, bits) -> "BitVector":
        bits = np.asarray(list(bits) if not isinstance(bits, np.ndarray) else bits, dtype=bool)
        n = len(bits)
        packed = np.packbits(bits, bitorder="little")
        pad = (-len(packed)) % 8
        if pad:
            packed = np.concatenate([packed, np.zeros(pad, dtype=np.uint8)])
        return cls(packed.view(np.uint64), n)

    def get_bit(self, i: int) -> int:
        if not 0 <= i < self.n:
            raise IndexError(f"bit index {i} out of range 0..{self.n - 1}")
        return (int(self.words[i >> 6]) >> (i & 63)) & 1

    def count_ones(self) -> int:
        if self._ones is None:
            self._ones = int(np.bitwise_count(self.words).sum())
        return self._ones

    def to_bools(self) -> np.ndarray:
        """Unpack to a boolean array (test/oracle convenience)."""
        u8 = self.words.view(np.uint8)
        return np.unpackbits(u8, bitorder="little")[: self.n].astype(bool)


def build_bitvector(bits: Iterable[int]) -> BitVector:
    return BitVector.from_bools(bits)


class BitWriter:
    """Appends variable-width values into a little-endian word stream."""

    def __init__(self):
        self._words: list[int] = []
        self._cur = 0
        self._fill = 0  # bits used in _cur

    @property
    def pos(self) -> int:
        """Current bit offset."""
        return len(self._words) * 64 + self._fill

    def put(self, value: int, width: int) -> None:
        if width == 0:
            assert value == 0
            return
        assert 0 <= value < (1 << width), "value does not fit the field width"
        self._cur |= value << self._fill
        self._fill += width
        while self._fill >= 64:
            self._words.append(self._cur & MASK64)
            self._cur >>= 64
            self._fill -= 64

    def align64(self) -> None:
        if self._fill:
            self._words.append(self._cur & MASK64)
            self._cur = 0
            self._fill = 0

    def finish(self) -> np.ndarray:
        self.align64()
        return np.array(self._words, dtype=np.uint64)


def _scatter_bits(raw: np.ndarray, offsets: np.ndarray, width: int, values: np.ndarray) -> None:
    """OR packed fields of uniform width into raw at the given bit offsets."""
    if width == 0 or len(offsets) == 0:
        return
    w = (offsets >> 6).astype(np.int64)
    s = (offsets & 63).astype(np.uint64)
    vals = values.astype(np.uint64)
    np.bitwise_or.at(raw, w, vals << s)
    spill = (s.astype(np.int64) + width) > 64
    if spill.any():
        np.bitwise_or.at(raw, w[spill] + 1, vals[spill] >> (np.uint64(64) - s[spill]))


class PackedArray:
    """Fixed-width bit-compressed integer array.

    Elements are stored contiguously at bit offset i*width with no padding;
    an element may straddle two words and is read with at most two loads.
    Width 0 stores nothing and every element reads as 0.
    """

    __slots__ = ("width", "len", "raw")

    def __init__(self, width: int, length: int, raw: np.ndarray | None = None):
        if not 0 <= width <= 64:
            raise ValueError("width must be in 0..64")
        nwords = (length * width + 63) // 64
        if raw is None:
            raw = np.zeros(nwords, dtype=np.uint64)
        else:
            raw = np.ascontiguousarray(raw, dtype=np.uint64)
            if len(raw) != nwords:
                raise ValueError("raw word count does not match len*width")
        self.width = width
        self.len = length
        self.raw = raw

    @classmethod
    def from_values(cls, values, width: int) -> "PackedArray":
        values = np.asarray(values, dtype=np.uint64)
        arr = cls(width, len(values))
        if width:
            if len(values) and width < 64 and int(values.max()) >= (1 << width):
                raise ValueError("value does not fit the field width")
            offsets = np.arange(len(values), dtype=np.int64) * width
            _scatter_bits(arr.raw, offsets, width, values)
        elif len(values) and values.any():
            raise ValueError("width-0 array can only hold zeros")
        return arr

    def get(self, i: int) -> int:
        assert 0 <= i < self.len
        if self.width == 0:
            return 0
        off = i * self.width
        w, s = off >> 6, off & 63
        v = int(self.raw[w]) >> s
        if s + self.width > 64:
            v |= int(self.raw[w + 1]) << (64 - s)
        return v & ((1 << self.width) - 1)

    def set(self, i: int, x: int) -> None:
        assert 0 <= i < self.len
        if self.width == 0:
            assert x == 0
            return
        assert 0 <= x < (1 << self.width), "value does not fit the field width"
        off = i * self.width
        w, s = off >> 6, off & 63
        mask = ((1 << self.width) - 1) << s
        self.raw[w] = (int(self.raw[w]) & ~mask & MASK64) | ((x << s) & MASK64)
        if s + self.width > 64:
            hi_bits = s + self.width - 64
            hi_mask = (1 << hi_bits) - 1
            self.raw[w + 1] = (int(self.raw[w + 1]) & ~hi_mask & MASK64) | (x >> (64 - s))

    def to_list(self) -> list[int]:
        return [self.get(i) for i in range(self.len)]

    @property
    def bit_size(self) -> int:
        return self.len * self.width
