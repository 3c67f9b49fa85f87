import math

import numpy as np
import pytest

from rsbits import BitVector, NaiveIndex, build_summary
from rsbits.errors import ConfigError, QueryError
from rsbits.instances import generate_uniform
from rsbits.sample2 import build_sample2, optimal_a2, space2_bits
from rsbits.sample3 import build_sample3, optimal_a, optimal_b

from conftest import spiky_vector


def test_optimal_a2_neighbor_property():
    rng = np.random.default_rng(17)
    for _ in range(50):
        n = 1 << int(rng.integers(18, 28))
        m = max(1, int(n * rng.choice([0.01, 0.1, 0.5, 0.9, 1.0])))
        L = 1 << int(rng.choice([14, 15, 16]))
        alpha = int(rng.choice([2, 4, 8, 16, 32]))
        a = optimal_a2(n, m, L, alpha)
        s = space2_bits(n, m, L, a, alpha)
        assert space2_bits(n, m, L, max(1, a // 2), alpha) >= s
        assert space2_bits(n, m, L, 2 * a, alpha) >= s


def test_optimal_a2_regression_value():
    # m = n, L = 2^14, alpha = 16, n = 2^24: root is ~1145, the better bracket is 1024
    assert optimal_a2(1 << 24, 1 << 24, 1 << 14, 16) == 1024


def test_optimal_a2_alpha2_simplification():
    # log2(2) = 1 drops out of the denominator
    n, m, L = 1 << 24, 1 << 23, 1 << 14
    root = math.sqrt(2 * m * math.log2(n / L) * 2 * L / n)
    got = optimal_a2(n, m, L, 2)
    assert got in (1 << int(math.floor(math.log2(root))), 1 << int(math.ceil(math.log2(root))))


def test_optimal_a2_rejects_empty():
    with pytest.raises(ConfigError):
        optimal_a2(100, 0, 1 << 14, 8)


def test_all_ones_no_dense_groups():
    v = generate_uniform(1 << 18, 1.0, 0)
    st = build_summary(v, 512, 2)
    t = build_sample2(v, st, 1, 1024, 8)
    assert not t.d_len.any()
    for i in (0, 1, 5000, (1 << 18) - 1):
        assert t.select(v, st, i) == i


def test_gap_instance_reads_dense_group():
    bits = np.concatenate([np.ones(10**4, bool), np.zeros(10**6, bool), np.ones(10**4, bool)])
    v = BitVector.from_bools(bits)
    st = build_summary(v, 512, 2)
    t = build_sample2(v, st, 1, 1024, 8)
    assert t.d_len.sum() > 0
    idx = NaiveIndex.from_bitvector(v)
    got, mp = t.select_batch(v, st, np.arange(t.m_x, dtype=np.int64))
    assert np.array_equal(got, idx.positions1)
    assert mp <= 8


def test_uniform_dual_oracle():
    v = generate_uniform(1 << 20, 0.5, 11)
    st = build_summary(v, 2048, 2)
    idx = NaiveIndex.from_bitvector(v)
    a2 = optimal_a2(v.n, st.m, st.L, 16)
    t2 = build_sample2(v, st, 1, a2, 16)
    a3 = optimal_a(v.n, st.m, st.L, 16)
    t3 = build_sample3(v, st, 1, a3, optimal_b(a3), 16)
    qs = np.arange(st.m, dtype=np.int64)
    got2, mp2 = t2.select_batch(v, st, qs)
    got3, _ = t3.select_batch(v, st, qs)
    assert np.array_equal(got2, idx.positions1)
    assert np.array_equal(got2, got3)
    assert mp2 <= 16


def test_cross_check_on_varied_vectors():
    rng = np.random.default_rng(23)
    for trial in range(15):
        n = int(rng.integers(1000, 1 << 19))
        v = spiky_vector(n, int(rng.integers(1 << 30)), stride_superblocks=2)
        if v.count_ones() == 0:
            continue
        st = build_summary(v, 512, int(rng.choice([2, 3])))
        alpha = int(rng.choice([2, 8]))
        a = int(rng.choice([16, 64, 256]))
        t2 = build_sample2(v, st, 1, a, alpha)
        t3 = build_sample3(v, st, 1, a, max(1, a // 8), alpha)
        qs = np.arange(v.count_ones(), dtype=np.int64)
        got2, mp2 = t2.select_batch(v, st, qs)
        got3, mp3 = t3.select_batch(v, st, qs)
        assert np.array_equal(got2, got3)
        assert mp2 <= alpha and mp3 <= alpha


def test_space_bound2():
    SLACK = 64 * 66
    for n, dens, seed in [(1 << 20, 0.5, 1), (1 << 19, 0.05, 2)]:
        v = generate_uniform(n, dens, seed)
        st = build_summary(v, 1024, 2)
        a = optimal_a2(n, st.m, st.L, 16)
        t = build_sample2(v, st, 1, a, 16)
        assert t.measured_size() <= 1.25 * space2_bits(n, st.m, st.L, a, 16) + SLACK


def test_empty_and_query_errors():
    v = generate_uniform(5000, 0.0, 0)
    st = build_summary(v, 512, 2)
    t = build_sample2(v, st, 1, 64, 8)
    assert t.m_x == 0
    with pytest.raises(QueryError):
        t.select(v, st, 0)
