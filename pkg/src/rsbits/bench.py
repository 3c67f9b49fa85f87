"""Benchmark measurement, CSV emission, and the oracle-equivalence verifier.

CSV schema (fixed, header included, UTF-8, LF):
  structure,config,n,density,operation,queries,ns_per_query,space_overhead_percent,seed

Timing is wall-clock over one batch with answer-XOR accumulation so the
compiler cannot discard query results. The probe-count maximum is reported on
stdout, not in the CSV.
"""

from __future__ import annotations

import csv
import time
from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .instances import InstanceSpec, gap_bounds, splitmix64
from .oracle import NaiveIndex
from .rankselect import RankSelect

CSV_COLUMNS = [
    "structure",
    "config",
    "n",
    "density",
    "operation",
    "queries",
    "ns_per_query",
    "space_overhead_percent",
    "seed",
]

OPS = ("rank1", "rank0", "select1", "select0")


@dataclass
class BenchResult:
    row: dict
    checksum: int
    probe_max: int


def _query_range(rs: RankSelect, op: str) -> int:
    if op in ("rank1", "rank0"):
        return rs.n + 1
    if op == "select1":
        return rs.m
    return rs.n - rs.m


def make_queries(rs: RankSelect, spec: InstanceSpec, op: str, count: int, seed: int) -> np.ndarray:
    """Uniform random arguments; gap select1 targets the first 1-bit after the run."""
    if spec.kind == "gap" and op == "select1":
        _, end = gap_bounds(spec)
        return np.full(count, rs.rank1(end), dtype=np.int64)
    space = _query_range(rs, op)
    if space < 1:
        raise ValueError(f"{op} has no valid arguments on this instance")
    return (splitmix64(seed, 0, count) % np.uint64(space)).astype(np.int64)


def run_bench(
    rs: RankSelect, spec: InstanceSpec, op: str, count: int, seed: int, config_label: str
) -> BenchResult:
    qs = make_queries(rs, spec, op, count, seed)
    probe_max = 0
    sp = rs.summary.params
    if op in ("rank1", "rank0"):
        bitv = 1 if op == "rank1" else 0
        K._rank_xor(rs.v.words, rs.summary.blocks, sp, qs[:1], bitv)  # warm the JIT
        t0 = time.perf_counter()
        checksum = int(K._rank_xor(rs.v.words, rs.summary.blocks, sp, qs, bitv))
        dt = time.perf_counter() - t0
    else:
        bitv = 1 if op == "select1" else 0
        tree = rs.sel1 if bitv else rs.sel0
        if tree is None:
            raise ValueError("select0 requires a structure built with select0 support")
        args = tree.kernel_args(rs.v, rs.summary)
        kern = K._select3_xor if tree.__class__.__name__ == "SampleTree3" else K._select2_xor
        kern(*args, qs[:1])
        t0 = time.perf_counter()
        checksum, probe_max = kern(*args, qs)
        dt = time.perf_counter() - t0
        checksum, probe_max = int(checksum), int(probe_max)
    report = rs.space_report()
    row = {
        "structure": rs.config.select_tree,
        "config": f"{config_label};{spec.describe()}",
        "n": rs.n,
        "density": spec.density,
        "operation": op,
        "queries": count,
        "ns_per_query": dt / len(qs) * 1e9,
        "space_overhead_percent": report.total_pct,
        "seed": seed,
    }
    return BenchResult(row, checksum, probe_max)


def write_csv(path: str, rows: list[dict], append: bool = False) -> None:
    mode = "a" if append else "w"
    with open(path, mode, newline="\n", encoding="utf-8") as f:
        writer = csv.DictWriter(f, fieldnames=CSV_COLUMNS, lineterminator="\n")
        if not append or f.tell() == 0:
            writer.writeheader()
        writer.writerows(rows)


@dataclass
class VerifyResult:
    ok: bool
    checked: int
    mismatch: tuple[str, int, int, int] | None = None  # op, argument, got, want

    def describe(self) -> str:
        if self.ok:
            return f"ok ({self.checked} answers checked)"
        op, arg, got, want = self.mismatch
        return f"MISMATCH {op}({arg}) = {got}, oracle says {want}"


def _verify_args(n_args: int, limit: int, seed: int) -> np.ndarray:
    if n_args <= limit:
        return np.arange(n_args, dtype=np.int64)
    edges = np.array([0, 1, n_args - 1], dtype=np.int64)
    rnd = (splitmix64(seed, 0, limit) % np.uint64(n_args)).astype(np.int64)
    return np.unique(np.concatenate([edges, rnd]))


def verify_structure(rs: RankSelect, limit: int = 1 << 17, seed: int = 12345) -> VerifyResult:
    """Compare every operation against the naive oracle; exhaustive up to limit args."""
    index = NaiveIndex.from_bitvector(rs.v)
    checked = 0
    for op in OPS:
        if op == "select0" and rs.sel0 is None:
            continue
        bitv = 1 if op.endswith("1") else 0
        space = _query_range(rs, op)
        if space < 1:
            continue
        args = _verify_args(space, limit, seed)
        if op.startswith("rank"):
            got = rs.rank_batch(args, bitv)
            pos = index.positions1 if bitv else index.positions0
            want = np.searchsorted(pos, args, side="left")
        else:
            got, _ = rs.select_batch(args, bitv)
            pos = index.positions1 if bitv else index.positions0
            want = pos[args]
        bad = np.flatnonzero(got != want)
        checked += len(args)
        if len(bad):
            x = int(bad[0])
            return VerifyResult(False, checked, (op, int(args[x]), int(got[x]), int(want[x])))
    # structural spot check: stored superblock prefixes against recounted ones
    pref = rs.summary.prefix_array(1)
    bits = rs.v.to_bools().astype(np.int64)
    starts = np.arange(rs.summary.num_superblocks, dtype=np.int64) * rs.summary.L
    want = np.concatenate([[0], np.cumsum(np.add.reduceat(bits, starts))])
    bad = np.flatnonzero(pref != want)
    if len(bad):
        sb = int(bad[0])
        return VerifyResult(False, checked, ("superblock_prefix", sb, int(pref[sb]), int(want[sb])))
    return VerifyResult(True, checked)
