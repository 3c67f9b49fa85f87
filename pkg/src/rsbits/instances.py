"""Benchmark instance generation and the .bv container format.

Uniform instances use a splitmix64 stream: bit i is set iff output i compares
below density * 2^64. The generator state after i steps is seed + (i+1) * the
golden-ratio increment, so outputs are computed in closed form and identical
instances can be reproduced in any language.

Gap instances are uniform instances with a centered run of 10^d zero bits;
the bits flanking the run are forced to 1 so the maximal central zero-run is
exactly 10^d.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .bitcore import BitVector
from .errors import FormatError

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)

BV_MAGIC = b"RSBV"
BV_VERSION = 1

_CHUNK = 1 << 22


@dataclass(frozen=True)
class InstanceSpec:
    kind: str  # "uniform" | "gap"
    n: int
    density: float = 0.5
    d: int = 0  # zero-run exponent, gap kind only
    seed: int = 0

    def describe(self) -> str:
        if self.kind == "gap":
            return f"kind=gap;d={self.d}"
        return "kind=uniform"


def splitmix64(seed: int, start: int, count: int) -> np.ndarray:
    """Outputs start..start+count-1 of the splitmix64 stream for seed."""
    idx = np.arange(start + 1, start + count + 1, dtype=np.uint64)
    z = np.uint64(seed & 0xFFFFFFFFFFFFFFFF) + idx * _GOLDEN
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


def generate_uniform(n: int, density: float, seed: int) -> BitVector:
    if n < 1:
        raise ValueError("n must be >= 1")
    if density >= 1.0:
        words = np.full((n + 63) // 64, 0xFFFFFFFFFFFFFFFF, dtype=np.uint64)
        if n % 64:
            words[-1] = np.uint64((1 << (n % 64)) - 1)
        return BitVector(words, n)
    if density <= 0.0:
        return BitVector(np.zeros((n + 63) // 64, dtype=np.uint64), n)
    threshold = np.uint64(round(density * 2.0**64))
    chunks = []
    for start in range(0, n, _CHUNK):
        cnt = min(_CHUNK, n - start)
        bits = splitmix64(seed, start, cnt) < threshold
        pad = (-cnt) % 8
        if pad:
            bits = np.concatenate([bits, np.zeros(pad, dtype=bool)])
        chunks.append(np.packbits(bits, bitorder="little"))
    packed = np.concatenate(chunks)
    pad = (-len(packed)) % 8
    if pad:
        packed = np.concatenate([packed, np.zeros(pad, dtype=np.uint8)])
    return BitVector(packed.view(np.uint64), n)


def generate_gap(n: int, d: int, density: float, seed: int) -> BitVector:
    run = 10**d
    if run >= n:
        raise ValueError(f"zero run 10^{d} must be shorter than n={n}")
    v = generate_uniform(n, density, seed)
    words = v.words.copy()
    start = (n - run) // 2
    end = start + run
    _clear_range(words, start, end)
    for edge in (start - 1, end):
        if 0 <= edge < n:
            words[edge >> 6] |= np.uint64(1 << (edge & 63))
    return BitVector(words, n)


def _clear_range(words: np.ndarray, start: int, end: int) -> None:
    if start >= end:
        return
    wa, wb = start >> 6, (end - 1) >> 6
    if wa == wb:
        mask = ((1 << (end - start)) - 1) << (start & 63)
        words[wa] &= np.uint64(~mask & 0xFFFFFFFFFFFFFFFF)
        return
    words[wa] &= np.uint64((1 << (start & 63)) - 1)
    words[wa + 1 : wb] = 0
    endbits = end & 63
    if endbits:
        words[wb] &= np.uint64(~((1 << endbits) - 1) & 0xFFFFFFFFFFFFFFFF)
    else:
        words[wb] = 0


def gen(spec: InstanceSpec) -> BitVector:
    if spec.kind == "uniform":
        return generate_uniform(spec.n, spec.density, spec.seed)
    if spec.kind == "gap":
        return generate_gap(spec.n, spec.d, spec.density, spec.seed)
    raise ValueError(f"unknown instance kind {spec.kind!r}")


def gap_bounds(spec: InstanceSpec) -> tuple[int, int]:
    """Half-open [start, end) of the zero run of a gap instance."""
    run = 10**spec.d
    start = (spec.n - run) // 2
    return start, start + run


def save_instance(path: str, spec: InstanceSpec, v: BitVector) -> None:
    with open(path, "wb") as f:
        f.write(BV_MAGIC)
        f.write(struct.pack("<H", BV_VERSION))
        kind = 0 if spec.kind == "uniform" else 1
        f.write(struct.pack("<BBQdQQ", kind, spec.d, spec.n, spec.density, spec.seed, len(v.words)))
        f.write(v.words.astype("<u8").tobytes())


def load_instance(path: str) -> tuple[InstanceSpec, BitVector]:
    with open(path, "rb") as f:
        data = f.read()
    if data[:4] != BV_MAGIC:
        raise FormatError("bad magic at byte 0")
    (version,) = struct.unpack_from("<H", data, 4)
    if version != BV_VERSION:
        raise FormatError(f"unsupported version {version} at byte 4")
    kind, d, n, density, seed, nwords = struct.unpack_from("<BBQdQQ", data, 6)
    off = 6 + struct.calcsize("<BBQdQQ")
    if len(data) < off + 8 * nwords:
        raise FormatError(f"truncated payload at byte {off}")
    words = np.frombuffer(data, dtype="<u8", count=nwords, offset=off).astype(np.uint64)
    spec = InstanceSpec("uniform" if kind == 0 else "gap", n, density, d, seed)
    return spec, BitVector(words, n)
