"""Facade combining bit vector, summary tree, and sample trees.

Also owns the RS3S byte format: magic "RS3S", version u16, a fixed config
block, a sequence of components (tag u8, width u8, element-count u64, payload
words u64 little-endian), and a trailing 64-bit FNV-1a checksum over all
preceding bytes.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, replace

import numpy as np

from . import _kernels as K
from .bitcore import BitVector, PackedArray, bits_for_range
from .errors import ConfigError, FormatError, QueryError
from .sample2 import SampleTree2, build_sample2, optimal_a2, space2_bits
from .sample3 import MAX_CLASS, SampleTree3, a_fast, a_min, build_sample3, default_grid, optimal_a, optimal_b
from .summary import SummaryTree, build_summary

MAGIC = b"RS3S"
VERSION = 1

_POLICIES = ("star", "fast", "min", "explicit")
_TREES = ("sample3", "sample2")


@dataclass(frozen=True)
class RsConfig:
    L0: int = 2048
    k: int = 2
    alpha: int = 16
    a_policy: str = "star"
    a: int | None = None  # explicit policy only
    b: int | None = None
    select_tree: str = "sample3"
    enable_select0: bool = True

    def validate(self) -> None:
        if self.a_policy not in _POLICIES:
            raise ConfigError(f"a_policy must be one of {_POLICIES}")
        if self.select_tree not in _TREES:
            raise ConfigError(f"select_tree must be one of {_TREES}")
        if self.a_policy == "explicit" and (self.a is None or (self.select_tree == "sample3" and self.b is None)):
            raise ConfigError("explicit policy requires a (and b for the 3-level tree)")

    def describe(self) -> str:
        return (
            f"L0={self.L0};k={self.k};alpha={self.alpha};policy={self.a_policy};"
            f"tree={self.select_tree};select0={int(self.enable_select0)}"
        )


PRESETS: dict[str, RsConfig] = {
    "small_fast": RsConfig(L0=512, k=2, alpha=2, a_policy="fast"),
    "robust": RsConfig(L0=2048, k=2, alpha=16, a_policy="star"),
    "large_fast": RsConfig(L0=2048, k=3, alpha=8, a_policy="fast"),
    "min_space": RsConfig(L0=2048, k=2, alpha=32, a_policy="min"),
}


@dataclass
class SpaceReport:
    n: int
    summary_bits: int
    sel1_bits: int
    sel0_bits: int

    @property
    def total_bits(self) -> int:
        return self.summary_bits + self.sel1_bits + self.sel0_bits

    def pct(self, bits: int) -> float:
        return 100.0 * bits / self.n

    @property
    def summary_pct(self) -> float:
        return self.pct(self.summary_bits)

    @property
    def sel1_pct(self) -> float:
        return self.pct(self.sel1_bits)

    @property
    def sel0_pct(self) -> float:
        return self.pct(self.sel0_bits)

    @property
    def total_pct(self) -> float:
        return self.pct(self.total_bits)


def _resolve_rates(v: BitVector, summary: SummaryTree, bit_value: int, config: RsConfig) -> tuple[int, int]:
    m_x = summary.m if bit_value else summary.n - summary.m
    if m_x == 0:
        return 1, 1
    n, L, alpha = summary.n, summary.L, config.alpha
    if config.a_policy == "explicit":
        a = config.a
        b = config.b if config.b is not None else optimal_b(a)
        return a, b
    if config.select_tree == "sample2":
        if config.a_policy == "star":
            a = optimal_a2(n, m_x, L, alpha)
        elif config.a_policy == "fast":
            a = a_fast(n, m_x, L, alpha)
        else:  # min: smallest measured tree over the default grid of top rates
            best = None
            for a_try in sorted({p[0] for p in default_grid(n, m_x, L, alpha)}):
                size = build_sample2(v, summary, bit_value, a_try, alpha).measured_size()
                if best is None or size < best[0] or (size == best[0] and a_try > best[1]):
                    best = (size, a_try)
            a = best[1]
        return a, a
    if config.a_policy == "star":
        a = optimal_a(n, m_x, L, alpha)
        return a, optimal_b(a)
    if config.a_policy == "fast":
        a = a_fast(n, m_x, L, alpha)
        return a, optimal_b(a)
    return a_min(v, summary, alpha, bit_value=bit_value)


class RankSelect:
    """Queryable rank/select structure, immutable after build."""

    def __init__(self, v, summary, sel1, sel0, config):
        self.v = v
        self.summary = summary
        self.sel1 = sel1
        self.sel0 = sel0
        self.config = config

    @classmethod
    def build(cls, v: BitVector, config: RsConfig | str = "robust") -> "RankSelect":
        if isinstance(config, str):
            config = PRESETS[config]
        config.validate()
        if v.n < 1:
            raise ConfigError("bit vector must be non-empty")
        summary = build_summary(v, config.L0, config.k)
        sel1 = cls._build_tree(v, summary, 1, config)
        sel0 = cls._build_tree(v, summary, 0, config) if config.enable_select0 else None
        return cls(v, summary, sel1, sel0, config)

    @staticmethod
    def _build_tree(v, summary, bit_value, config):
        a, b = _resolve_rates(v, summary, bit_value, config)
        if config.select_tree == "sample2":
            return build_sample2(v, summary, bit_value, a, config.alpha)
        return build_sample3(v, summary, bit_value, a, b, config.alpha)

    @property
    def n(self) -> int:
        return self.v.n

    @property
    def m(self) -> int:
        return self.summary.m

    def rank1(self, i: int) -> int:
        return self.summary.rank1(self.v, i)

    def rank0(self, i: int) -> int:
        return i - self.rank1(i)

    def select1(self, i: int) -> int:
        return self.sel1.select(self.v, self.summary, i)

    def select0(self, i: int) -> int:
        if self.sel0 is None:
            raise ConfigError("select0 support was not enabled at build time")
        return self.sel0.select(self.v, self.summary, i)

    def select1_with_probes(self, i: int) -> tuple[int, int]:
        return self.sel1.select_with_probes(self.v, self.summary, i)

    def select0_with_probes(self, i: int) -> tuple[int, int]:
        if self.sel0 is None:
            raise ConfigError("select0 support was not enabled at build time")
        return self.sel0.select_with_probes(self.v, self.summary, i)

    def rank_batch(self, queries: np.ndarray, bit_value: int = 1) -> np.ndarray:
        qs = np.ascontiguousarray(queries, dtype=np.int64)
        return K._rank_batch(self.v.words, self.summary.blocks, self.summary.params, qs, bit_value)

    def select_batch(self, queries: np.ndarray, bit_value: int = 1) -> tuple[np.ndarray, int]:
        tree = self.sel1 if bit_value else self.sel0
        if tree is None:
            raise ConfigError("select0 support was not enabled at build time")
        return tree.select_batch(self.v, self.summary, queries)

    def space_report(self) -> SpaceReport:
        return SpaceReport(
            n=self.n,
            summary_bits=self.summary.bit_size,
            sel1_bits=self.sel1.measured_size(),
            sel0_bits=self.sel0.measured_size() if self.sel0 else 0,
        )

    # -- RS3S serialization ------------------------------------------------

    def serialize(self) -> bytes:
        out = bytearray()
        out += MAGIC
        out += struct.pack("<H", VERSION)
        policy = _POLICIES.index(self.config.a_policy)
        tree = 3 if self.config.select_tree == "sample3" else 2
        out += struct.pack(
            "<IBBBBBBQQ",
            self.config.L0,
            self.config.k,
            self.config.alpha,
            tree,
            policy,
            1 if self.config.enable_select0 else 0,
            0,
            self.n,
            self.m,
        )
        _emit(out, 1, 64, len(self.v.words), self.v.words)
        _emit(out, 2, 64, len(self.summary.blocks), self.summary.blocks)
        if self.config.k == 3:
            _emit(out, 3, 64, len(self.summary.l2blocks), self.summary.l2blocks)
        self._emit_tree(out, self.sel1, 4)
        if self.sel0 is not None:
            self._emit_tree(out, self.sel0, 24)
        out += struct.pack("<Q", int(K._fnv1a(np.frombuffer(bytes(out), dtype=np.uint8))))
        return bytes(out)

    @staticmethod
    def _emit_tree(out: bytearray, tree, base_tag: int) -> None:
        if isinstance(tree, SampleTree3):
            params = np.zeros(12 + 3 * (MAX_CLASS + 1), dtype=np.uint64)
            params[:12] = [3, tree.bit_value, tree.a, tree.b, tree.alpha, tree.m_x,
                           tree.w_o, tree.w_g, tree.w_kappa, tree.w_rho_hat, tree.w_h, tree.w_c]
            params[12:77] = tree.m_groups
            params[77:142] = tree.k_len
            params[142:207] = tree.b_len
            _emit(out, base_tag, 64, len(params), params)
            _emit(out, base_tag + 1, tree.T.width, tree.T.len, tree.T.raw)
            _emit(out, base_tag + 2, 64, len(tree.m_raw), tree.m_raw)
            _emit(out, base_tag + 3, 64, len(tree.k_raw), tree.k_raw)
            _emit(out, base_tag + 4, 64, len(tree.b_raw), tree.b_raw)
        else:
            params = np.zeros(7 + MAX_CLASS + 1, dtype=np.uint64)
            params[:7] = [2, tree.bit_value, tree.a, tree.alpha, tree.m_x, tree.w_o, tree.w_g]
            params[7:72] = tree.d_len
            _emit(out, base_tag, 64, len(params), params)
            _emit(out, base_tag + 1, tree.T.width, tree.T.len, tree.T.raw)
            _emit(out, base_tag + 2, 64, len(tree.d_raw), tree.d_raw)

    @classmethod
    def deserialize(cls, data: bytes) -> "RankSelect":
        if len(data) < 14 + 8:
            raise FormatError(f"truncated stream: {len(data)} bytes")
        if data[:4] != MAGIC:
            raise FormatError("bad magic at byte 0")
        (version,) = struct.unpack_from("<H", data, 4)
        if version != VERSION:
            raise FormatError(f"unsupported version {version} at byte 4")
        (want,) = struct.unpack_from("<Q", data, len(data) - 8)
        got = int(K._fnv1a(np.frombuffer(data[:-8], dtype=np.uint8)))
        if got != want:
            raise FormatError(f"checksum mismatch at byte {len(data) - 8}")
        L0, k, alpha, tree_kind, policy, sel0_flag, _pad, n, m = struct.unpack_from("<IBBBBBBQQ", data, 6)
        off = 6 + struct.calcsize("<IBBBBBBQQ")
        comps: dict[int, tuple[int, int, np.ndarray]] = {}
        end = len(data) - 8
        while off < end:
            if off + 10 > end:
                raise FormatError(f"truncated component header at byte {off}")
            tag, width = data[off], data[off + 1]
            (count,) = struct.unpack_from("<Q", data, off + 2)
            off += 10
            nwords = (count * width + 63) // 64
            if off + 8 * nwords > end:
                raise FormatError(f"truncated component payload at byte {off}")
            words = np.frombuffer(data, dtype="<u8", count=nwords, offset=off).astype(np.uint64)
            comps[tag] = (width, count, words)
            off += 8 * nwords

        try:
            config = RsConfig(
                L0=L0, k=k, alpha=alpha,
                a_policy=_POLICIES[policy],
                select_tree="sample3" if tree_kind == 3 else "sample2",
                enable_select0=bool(sel0_flag),
            )
            v = BitVector(comps[1][2], n)
            summary = SummaryTree(
                comps[2][2],
                comps[3][2] if k == 3 else np.zeros(0, dtype=np.uint64),
                n, m, L0, k,
            )
            sel1 = cls._parse_tree(comps, 4, summary)
            sel0 = cls._parse_tree(comps, 24, summary) if sel0_flag else None
        except KeyError as exc:
            raise FormatError(f"missing component tag {exc}") from exc
        return cls(v, summary, sel1, sel0, config)

    @staticmethod
    def _parse_tree(comps, base_tag, summary):
        params = comps[base_tag][2]
        kind = int(params[0])
        t_width, t_count, t_words = comps[base_tag + 1]
        T = PackedArray(t_width, t_count, t_words)
        if kind == 3:
            bit_value, a, b, alpha, m_x = (int(params[i]) for i in range(1, 6))
            widths = tuple(int(params[i]) for i in range(6, 12))
            return SampleTree3(
                bit_value, a, b, alpha, summary.L, summary.n, m_x, T,
                comps[base_tag + 2][2], params[12:77].astype(np.int64),
                comps[base_tag + 3][2], params[77:142].astype(np.int64),
                comps[base_tag + 4][2], params[142:207].astype(np.int64),
                widths,
            )
        bit_value, a, alpha, m_x, w_o, w_g = (int(params[i]) for i in range(1, 7))
        return SampleTree2(
            bit_value, a, alpha, summary.L, summary.n, m_x, T,
            comps[base_tag + 2][2], params[7:72].astype(np.int64), w_o, w_g,
        )


def _emit(out: bytearray, tag: int, width: int, count: int, words: np.ndarray) -> None:
    out += struct.pack("<BBQ", tag, width, count)
    out += words.astype("<u8").tobytes()
