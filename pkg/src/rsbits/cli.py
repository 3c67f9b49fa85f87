"""Command-line harness: instance generation, benchmarking, verification, save/load."""

from __future__ import annotations

import argparse
import sys

from .bench import OPS, run_bench, verify_structure, write_csv
from .errors import FormatError
from .instances import InstanceSpec, gen, load_instance, save_instance
from .rankselect import PRESETS, RankSelect


def _add_preset(p: argparse.ArgumentParser) -> None:
    p.add_argument("--preset", default="robust", choices=sorted(PRESETS), help="structure configuration")


def _build(path: str, preset: str):
    spec, v = load_instance(path)
    return spec, v, RankSelect.build(v, PRESETS[preset])


def main(argv: list[str] | None = None) -> int:
    ap = argparse.ArgumentParser(prog="rsbits", description=__doc__)
    sub = ap.add_subparsers(dest="cmd", required=True)

    g = sub.add_parser("gen", help="generate a bit-vector instance")
    g.add_argument("--kind", choices=("uniform", "gap"), required=True)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--density", type=float, default=0.5)
    g.add_argument("--d", type=int, default=4, help="zero-run exponent for gap instances")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)

    b = sub.add_parser("bench", help="measure query latency and emit a CSV row")
    b.add_argument("--in", dest="infile", required=True)
    _add_preset(b)
    b.add_argument("--op", choices=OPS, required=True)
    b.add_argument("--queries", type=int, default=10**6)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--csv", required=True)
    b.add_argument("--append", action="store_true", help="append to an existing CSV")

    s = sub.add_parser("space", help="print the space breakdown for a preset")
    s.add_argument("--in", dest="infile", required=True)
    _add_preset(s)

    vf = sub.add_parser("verify", help="check all operations against the naive oracle")
    vf.add_argument("--in", dest="infile", required=True)
    _add_preset(vf)
    vf.add_argument("--limit", type=int, default=1 << 17, help="max sampled arguments per operation")

    sv = sub.add_parser("save", help="build a structure and write an RS3S file")
    sv.add_argument("--in", dest="infile", required=True)
    _add_preset(sv)
    sv.add_argument("--out", required=True)

    ld = sub.add_parser("load", help="load an RS3S file and print its summary")
    ld.add_argument("--in", dest="infile", required=True)

    args = ap.parse_args(argv)

    if args.cmd == "gen":
        if args.n < 1:
            ap.error("--n must be >= 1")
        if not 0.0 < args.density <= 1.0:
            ap.error("--density must be in (0, 1]")
        if args.kind == "gap" and 10**args.d >= args.n:
            ap.error("--d too large: the zero run must be shorter than n")
        spec = InstanceSpec(args.kind, args.n, args.density, args.d if args.kind == "gap" else 0, args.seed)
        v = gen(spec)
        save_instance(args.out, spec, v)
        print(f"wrote {args.out}: n={v.n} ones={v.count_ones()} ({100.0 * v.count_ones() / v.n:.3f}%)")
        return 0

    if args.cmd == "bench":
        spec, _, rs = _build(args.infile, args.preset)
        label = f"preset={args.preset};{rs.config.describe()};a={rs.sel1.a};b={getattr(rs.sel1, 'b', rs.sel1.a)}"
        res = run_bench(rs, spec, args.op, args.queries, args.seed, label)
        write_csv(args.csv, [res.row], append=args.append)
        print(
            f"{args.op}: {res.row['ns_per_query']:.1f} ns/query over {args.queries} queries, "
            f"checksum={res.checksum:#018x}, probe_max={res.probe_max}"
        )
        return 0

    if args.cmd == "space":
        _, _, rs = _build(args.infile, args.preset)
        rep = rs.space_report()
        print(f"n = {rep.n} bits")
        print(f"summary tree : {rep.summary_bits:>14} bits  {rep.summary_pct:.5f}%")
        print(f"select1 tree : {rep.sel1_bits:>14} bits  {rep.sel1_pct:.5f}%")
        print(f"select0 tree : {rep.sel0_bits:>14} bits  {rep.sel0_pct:.5f}%")
        print(f"total        : {rep.total_bits:>14} bits  {rep.total_pct:.5f}%")
        return 0

    if args.cmd == "verify":
        _, _, rs = _build(args.infile, args.preset)
        result = verify_structure(rs, limit=args.limit)
        print(result.describe())
        return 0 if result.ok else 1

    if args.cmd == "save":
        _, _, rs = _build(args.infile, args.preset)
        data = rs.serialize()
        with open(args.out, "wb") as f:
            f.write(data)
        print(f"wrote {args.out}: {len(data)} bytes")
        return 0

    if args.cmd == "load":
        with open(args.infile, "rb") as f:
            data = f.read()
        try:
            rs = RankSelect.deserialize(data)
        except FormatError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 1
        rep = rs.space_report()
        print(f"n={rs.n} ones={rs.m} config: {rs.config.describe()}")
        print(f"overhead: {rep.total_pct:.5f}% ({rep.total_bits} bits)")
        return 0

    return 2


if __name__ == "__main__":
    sys.exit(main())
