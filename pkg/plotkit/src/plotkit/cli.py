"""plotkit command line: render figures from bench CSV files."""

from __future__ import annotations

import argparse
import sys

from .core import KINDS, PlotError, PlotSpec, render


def main(argv: list[str] | None = None) -> int:
    ap = argparse.ArgumentParser(prog="plotkit")
    sub = ap.add_subparsers(dest="cmd", required=True)
    p = sub.add_parser("plot", help="render a figure from bench CSV files")
    p.add_argument("--kind", choices=KINDS, required=True)
    p.add_argument("--csv", nargs="+", required=True, help="one or more bench CSV files")
    p.add_argument("--out", required=True, help="output image path (.svg, .png, ...)")
    p.add_argument("--title", default=None)
    args = ap.parse_args(argv)

    try:
        out = render(PlotSpec(args.csv, args.kind, args.out, args.title))
    except (PlotError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
