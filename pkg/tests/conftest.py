"""Shared test helpers."""

import numpy as np
import pytest

from rsbits import BitVector
from rsbits.instances import generate_uniform

# Worked example vector: 6 blocks of 32 bits (4 byte-sized sub-blocks each).
# The fifth block is all zeros, matching the published per-block prefix counts
# 0, 8, 12, 15, 19, 19 that the figure states for this vector.
FIG_BLOCKS = [
    "00010000 01000100 00100101 00110000",
    "00000000 00000000 00000000 01110010",
    "00000000 00000000 00000100 00100100",
    "01000001 10000000 00000000 10000000",
    "00000000 00000000 00000000 00000000",
    "10100100 00000000 00000000 00000000",
]


def fig_vector() -> BitVector:
    bits = [c == "1" for block in FIG_BLOCKS for c in block.replace(" ", "")]
    return BitVector.from_bools(bits)


def random_vector(n: int, density: float, seed: int) -> BitVector:
    return generate_uniform(n, density, seed)


def spiky_vector(n: int, seed: int, stride_superblocks: int = 4, superblock: int = 16384) -> BitVector:
    """Short bursts of ones separated by multi-superblock zero runs."""
    rng = np.random.default_rng(seed)
    bits = np.zeros(n, dtype=bool)
    p = int(rng.integers(0, min(n, 1000)))
    while p < n:
        burst = int(rng.integers(1, 8))
        bits[p : min(p + burst, n)] = True
        p += int(rng.integers(1, stride_superblocks * 2)) * superblock + int(rng.integers(0, 8192))
    return BitVector.from_bools(bits)


@pytest.fixture(scope="session")
def fig_v():
    return fig_vector()
