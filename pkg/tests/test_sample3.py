import math

import numpy as np
import pytest

from rsbits import BitVector, NaiveIndex, build_summary
from rsbits.bitcore import bits_for_range
from rsbits.errors import ConfigError, QueryError
from rsbits.instances import generate_uniform
from rsbits.sample3 import (
    SampleTree3,
    a_fast,
    a_min,
    build_sample3,
    default_grid,
    gap_class,
    optimal_a,
    optimal_b,
    size_bound_bits,
)

from conftest import spiky_vector


def test_optimal_a_worked_example():
    # n=2^27, m=2^26, L=2^16, alpha=16: the formula value lands between 2^14
    # and 2^15, so the rounded rate is 32768 and b becomes sqrt(2*32768) = 256
    n, m, L, alpha = 1 << 27, 1 << 26, 1 << 16, 16
    raw = (3 * m / (math.sqrt(2) * n) * (alpha / math.log2(alpha)) * L * math.log2(n / L)) ** (2 / 3)
    assert 1 << 14 < raw <= 1 << 15
    a = optimal_a(n, m, L, alpha)
    assert a == 32768
    assert optimal_b(a) == 256


def test_optimal_a_positivity():
    for L in (1 << 14, 1 << 16):
        for alpha in (2, 8, 64):
            for n in (1, 100, 1 << 22):
                assert optimal_a(n, n, L, alpha) >= 1


def test_optimal_a_alpha2_reduction():
    # log2(2) = 1, so the formula collapses to ((3m/(sqrt2 n)) * 2L * log(n/L))^(2/3)
    n, m, L = 1 << 24, 1 << 22, 1 << 14
    expect = (3 * m / (math.sqrt(2) * n) * 2 * L * math.log2(n / L)) ** (2 / 3)
    got = optimal_a(n, m, L, 2)
    assert got == 1 << math.ceil(math.log2(expect))


def test_optimal_a_rejects_empty():
    with pytest.raises(ConfigError):
        optimal_a(100, 0, 1 << 14, 8)


def test_a_fast_examples():
    assert a_fast(1 << 20, 1 << 20, 1 << 16, 8) == 262144  # ceil(8*65536/3) -> 2^18
    assert a_fast(10**6, 1, 1 << 16, 8) == 1
    n = 1 << 20
    assert a_fast(n, n // 2, 1 << 14, 2) == 8192  # ceil(16384/3) -> 2^13


def test_a_min_singleton_and_bruteforce():
    v = generate_uniform(1 << 16, 1.0, 0)
    st = build_summary(v, 512, 2)
    assert a_min(v, st, 8, grid=[(64, 8)]) == (64, 8)

    grid = [(a, b) for a in (4, 16, 64) for b in (1, 4) if b <= a]
    best = min(
        grid,
        key=lambda ab: (build_sample3(v, st, 1, ab[0], ab[1], 8).measured_size(), (-ab[0], -ab[1])),
    )
    assert a_min(v, st, 8, grid=grid) == best
    with pytest.raises(ConfigError):
        a_min(v, st, 8, grid=[])


def test_a_min_beats_or_matches_star():
    v = generate_uniform(1 << 22, 0.5, 13)
    st = build_summary(v, 2048, 2)
    a0 = optimal_a(v.n, st.m, st.L, 16)
    b0 = optimal_b(a0)
    star_size = build_sample3(v, st, 1, a0, b0, 16).measured_size()
    am, bm = a_min(v, st, 16)
    assert build_sample3(v, st, 1, am, bm, 16).measured_size() <= star_size


def test_build_empty():
    v = generate_uniform(10**4, 0.0, 0)
    st = build_summary(v, 512, 2)
    t = build_sample3(v, st, 1, 64, 8, 8)
    assert t.m_x == 0 and t.top_count == 0
    assert t.T.len == 1 and t.T.get(0) == st.num_superblocks
    assert not t.m_groups.any() and not t.k_len.any() and not t.b_len.any()
    with pytest.raises(QueryError):
        t.select(v, st, 0)


def test_build_all_ones_top_only():
    v = generate_uniform(1 << 20, 1.0, 0)
    st = build_summary(v, 2048, 2)
    a = 4096
    t = build_sample3(v, st, 1, a, 64, 16)
    # consecutive samples are a bits apart; every gap stays below alpha
    assert not t.m_groups.any() and not t.b_len.any()
    w_t = t.w_o + t.w_g + t.w_kappa
    assert t.measured_size() == 512 + ((1 << 20) // a + 1) * w_t
    for i in (0, 1, 12345, (1 << 20) - 1):
        assert t.select(v, st, i) == i


def test_build_gap_instance_descends():
    bits = np.concatenate([np.ones(10**5, bool), np.zeros(10**6, bool), np.ones(10**5, bool)])
    v = BitVector.from_bools(bits)
    st = build_summary(v, 512, 2)  # L = 2^14
    a, b = 4096, 64
    t = build_sample3(v, st, 1, a, b, 8)
    assert t.m_groups.sum() >= 1  # at least one top entry split
    first_after_gap = 10**5
    pos, probes = t.select_with_probes(v, st, first_after_gap)
    assert pos == 10**5 + 10**6
    assert probes <= 8
    idx = NaiveIndex.from_bitvector(v)
    got, mp = t.select_batch(v, st, np.arange(t.m_x, dtype=np.int64))
    assert np.array_equal(got, idx.positions1)
    assert mp <= 8


def test_select_examples():
    v = BitVector.from_bools([1, 0] * 32)
    st = build_summary(v, 512, 2)
    t = build_sample3(v, st, 1, 4, 2, 4)
    assert t.select(v, st, 3) == 6  # linear-scan oracle: ones at 0,2,4,...

    v = generate_uniform(1 << 22, 0.5, 9)
    st = build_summary(v, 2048, 2)
    a = optimal_a(v.n, st.m, st.L, 16)
    t = build_sample3(v, st, 1, a, optimal_b(a), 16)
    idx = NaiveIndex.from_bitvector(v)
    got, mp = t.select_batch(v, st, np.arange(t.m_x, dtype=np.int64))
    assert np.array_equal(got, idx.positions1)
    assert mp <= 16


def test_rank_select_inversion():
    v = generate_uniform(10**5, 0.3, 21)
    st = build_summary(v, 1024, 2)
    t = build_sample3(v, st, 1, 256, 16, 8)
    for i in range(0, t.m_x, 37):
        p = t.select(v, st, i)
        assert st.rank1(v, p) == i
        assert v.get_bit(p) == 1


def test_size_bound_degenerate_clamp():
    val = size_bound_bits(1 << 20, 1 << 19, 1 << 14, 64, 64, 8)
    assert math.isfinite(val) and val > 0


def test_size_bound_regression_value():
    # frozen from a direct evaluation of the closed form
    val = size_bound_bits(1 << 27, 1 << 26, 1 << 16, 32768, 256, 16)
    expect = 307701.4629  # regression baseline
    assert val == pytest.approx(expect, rel=1e-6)


def test_size_bound_bot_term_monotone():
    # the bot-level addend s*b*log(alpha) strictly grows when b doubles
    n, m, L, alpha = 1 << 24, 1 << 23, 1 << 14, 16
    s = n / (alpha * L)
    for b in (16, 32, 64):
        term = s * b * math.log2(alpha)
        term2 = s * (2 * b) * math.log2(alpha)
        assert term2 == 2 * term > term


def test_measured_size_examples():
    v = generate_uniform(1 << 16, 0.0, 0)
    st = build_summary(v, 2048, 2)
    t = build_sample3(v, st, 1, 64, 8, 8)
    assert t.measured_size() == 512 + t.T.width  # header plus the lone sentinel

    v = generate_uniform(1 << 20, 1.0, 0)
    st = build_summary(v, 2048, 2)
    t = build_sample3(v, st, 1, 4096, 64, 16)
    w_t = t.w_o + t.w_g + t.w_kappa
    assert t.measured_size() == 512 + ((1 << 20) // 4096 + 1) * w_t


def test_grid_optimality_sanity():
    for n, dens, seed in [(1 << 20, 0.5, 1), (1 << 19, 0.05, 2)]:
        v = generate_uniform(n, dens, seed)
        st = build_summary(v, 1024, 2)
        a0 = optimal_a(n, st.m, st.L, 16)
        b0 = optimal_b(a0)
        star = build_sample3(v, st, 1, a0, b0, 16).measured_size()
        sizes = [
            build_sample3(v, st, 1, a, b, 16).measured_size()
            for a, b in default_grid(n, st.m, st.L, 16)
        ]
        assert star <= 4 * min(sizes)


def test_space_bound_holds_at_star():
    SLACK = 64 * 66
    cases = [
        generate_uniform(1 << 20, 0.5, 3),
        generate_uniform(1 << 22, 0.1, 4),
        generate_uniform(1 << 19, 0.01, 5),
        spiky_vector(1 << 20, 6),
    ]
    for v in cases:
        for L0, alpha in [(2048, 16), (512, 8)]:
            st = build_summary(v, L0, 2)
            if st.m == 0:
                continue
            a = optimal_a(v.n, st.m, st.L, alpha)
            b = optimal_b(a)
            t = build_sample3(v, st, 1, a, b, alpha)
            bound = size_bound_bits(v.n, st.m, st.L, a, b, alpha)
            assert t.measured_size() <= 1.25 * bound + SLACK


# -- pack/unpack identity against an independent pass-1 re-derivation --------


def reference_tree_values(positions, n, L, s_ceil, a, b, alpha):
    """Re-derive every stored value straight from the bit positions."""
    m_x = len(positions)
    sb = [p // L for p in positions]
    apb = a // b
    gca = gap_class(alpha)
    tn = -(-m_x // a)
    top = []
    fams = {}
    kfams = {}
    bfams = {}
    bot_count = {}
    gcount = {}
    for j in range(tn):
        o = sb[j * a]
        nxt_o = sb[(j + 1) * a] if (j + 1) * a < m_x else s_ceil
        r = nxt_o - o
        if r < alpha:
            top.append((o, 0, 0))
            continue
        wod = gap_class(r)
        offs = [sb[min(j * a + e * b, m_x - 1)] - o for e in range(apb)]
        nxts = offs[1:] + [r]
        cvals = [0] * apb
        percls = {}
        rho_hat = 0
        splits = []
        for e in range(apb):
            if j * a + e * b >= m_x:
                continue
            rp = nxts[e] - offs[e]
            if rp < alpha:
                continue
            cls = gap_class(rp)
            cvals[e] = percls.get(cls, 0)
            percls[cls] = cvals[e] + 1
            rho_hat = max(rho_hat, cls)
            splits.append((e, cls))
        kappa = bits_for_range(max((cvals[e] for e, _ in splits), default=0) + 1)
        rho = wod + kappa
        g = gcount.get(rho, 0)
        gcount[rho] = g + 1
        top.append((o, g, kappa))
        if splits:
            h = len(kfams.setdefault(rho_hat, []))
            kfams[rho_hat].extend(bot_count.get(w, 0) for w in range(gca, rho_hat + 1))
        else:
            rho_hat, h = 0, 0
        for e, cls in splits:
            group = [sb[min(j * a + e * b + t, m_x - 1)] - (o + offs[e]) for t in range(b)]
            bfams.setdefault(cls, []).extend(group)
            bot_count[cls] = bot_count.get(cls, 0) + 1
        fams.setdefault(rho, []).append((rho_hat, h, [(offs[e], cvals[e]) for e in range(apb)], wod))
    top.append((s_ceil, 0, 0))
    return top, fams, kfams, bfams


def read_back(t: SampleTree3):
    """Unpack every stored value through the packed layouts."""

    def pread(raw, off, width):
        if width == 0:
            return 0
        w, s = off >> 6, off & 63
        v = int(raw[w]) >> s
        if s + width > 64:
            v |= int(raw[w + 1]) << (64 - s)
        return v & ((1 << width) - 1)

    top = []
    for j in range(t.T.len):
        ev = t.T.get(j)
        o = ev & ((1 << t.w_o) - 1)
        g = (ev >> t.w_o) & ((1 << t.w_g) - 1)
        kap = ev >> (t.w_o + t.w_g)
        top.append((o, g, kap))
    apb = t.a // t.b
    fams = {}
    for rho in range(65):
        stride = t.w_rho_hat + t.w_h + apb * rho
        for g in range(int(t.m_groups[rho])):
            base = int(t.m_start[rho]) + g * stride
            rho_hat = pread(t.m_raw, base, t.w_rho_hat)
            h = pread(t.m_raw, base + t.w_rho_hat, t.w_h)
            entries = []
            for e in range(apb):
                ev = pread(t.m_raw, base + t.w_rho_hat + t.w_h + e * rho, rho)
                entries.append(ev)
            fams.setdefault(rho, []).append((rho_hat, h, entries))
    kfams = {}
    for rho in range(65):
        vals = [pread(t.k_raw, int(t.k_start[rho]) + i * t.w_c, t.w_c) for i in range(int(t.k_len[rho]))]
        if vals:
            kfams[rho] = vals
    bfams = {}
    for rho in range(65):
        vals = [pread(t.b_raw, int(t.b_start[rho]) + i * rho, rho) for i in range(int(t.b_len[rho]))]
        if vals:
            bfams[rho] = vals
    return top, fams, kfams, bfams


def test_pack_unpack_identity():
    rng = np.random.default_rng(31337)
    for trial in range(25):
        n = int(rng.integers(1 << 15, 1 << 19))
        v = spiky_vector(n, int(rng.integers(1 << 30)), stride_superblocks=3)
        if v.count_ones() == 0:
            continue
        st = build_summary(v, 512, 2)
        a = int(rng.choice([8, 16, 32]))
        b = int(rng.choice([2, 4, 8]))
        alpha = int(rng.choice([2, 4]))
        t = build_sample3(v, st, 1, a, b, alpha)
        idx = NaiveIndex.from_bitvector(v)
        want_top, want_fams, want_k, want_b = reference_tree_values(
            idx.positions1.tolist(), n, st.L, st.num_superblocks, a, b, alpha
        )
        got_top, got_fams, got_k, got_b = read_back(t)
        assert got_top == want_top
        assert got_k == want_k
        assert got_b == want_b
        assert set(got_fams) >= {k for k, grp in want_fams.items() if grp}
        for rho, groups in want_fams.items():
            got_groups = got_fams.get(rho, [])
            assert len(got_groups) == len(groups)
            for (wrh, wh, wentries, wod), (grh, gh, gentries) in zip(groups, got_groups):
                assert (wrh, wh) == (grh, gh)
                packed = [(od | (c << wod)) for od, c in wentries]
                assert packed == gentries
