"""Load benchmark CSV rows and render space/time figures.

Consumes the bench CSV schema only:
  structure,config,n,density,operation,queries,ns_per_query,space_overhead_percent,seed
Unknown columns are ignored; a missing required column aborts with its name.
Figures are deterministic: rows are sorted, and each structure label keeps a
fixed marker assigned by sorted label order. Axes are log-scaled.
"""

from __future__ import annotations

import csv
import re
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

KINDS = ("pareto", "density_curve", "gap_curve")
MARKERS = ["o", "s", "D", "^", "v", "<", ">", "P", "X", "*"]

_REQUIRED = {
    "pareto": ["structure", "ns_per_query", "space_overhead_percent"],
    "density_curve": ["structure", "density", "ns_per_query"],
    "gap_curve": ["structure", "config", "ns_per_query"],
}

_GAP_RE = re.compile(r"(?:^|;)d=(\d+)(?:;|$)")


class PlotError(ValueError):
    pass


@dataclass
class PlotSpec:
    csv_paths: list[str]
    kind: str
    out_path: str
    title: str | None = None


def load_rows(paths: list[str], required: list[str]) -> list[dict]:
    rows = []
    for path in paths:
        with open(path, newline="", encoding="utf-8") as f:
            reader = csv.DictReader(f)
            cols = reader.fieldnames or []
            for col in required:
                if col not in cols:
                    raise PlotError(f"missing required column: {col} in {path}")
            rows.extend(reader)
    return rows


def pareto_front(points: list[tuple[float, float]]) -> list[bool]:
    """Flag non-dominated points: no other point is <= in both axes with one strict."""
    flags = []
    for i, (si, ti) in enumerate(points):
        dominated = any(
            sj <= si and tj <= ti and (sj < si or tj < ti)
            for j, (sj, tj) in enumerate(points)
            if j != i
        )
        flags.append(not dominated)
    return flags


def _marker_map(labels: list[str]) -> dict[str, str]:
    return {lab: MARKERS[i % len(MARKERS)] for i, lab in enumerate(sorted(set(labels)))}


def _gap_exponent(config: str) -> int | None:
    m = _GAP_RE.search(config)
    return int(m.group(1)) if m else None


def render(spec: PlotSpec) -> str:
    if spec.kind not in KINDS:
        raise PlotError(f"unknown plot kind: {spec.kind}")
    rows = load_rows(spec.csv_paths, _REQUIRED[spec.kind])
    if not rows:
        raise PlotError("no data rows")
    fig, ax = plt.subplots(figsize=(6.5, 4.5))
    if spec.kind == "pareto":
        _render_pareto(ax, rows)
    elif spec.kind == "density_curve":
        _render_density(ax, rows)
    else:
        _render_gap(ax, rows)
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=8)
    if spec.title:
        ax.set_title(spec.title)
    fig.tight_layout()
    fig.savefig(spec.out_path)
    plt.close(fig)
    return spec.out_path


def _render_pareto(ax, rows):
    rows = sorted(rows, key=lambda r: (r["structure"], float(r["space_overhead_percent"]), float(r["ns_per_query"])))
    pts = [(float(r["space_overhead_percent"]), float(r["ns_per_query"])) for r in rows]
    front = pareto_front(pts)
    markers = _marker_map([r["structure"] for r in rows])
    for lab in sorted(markers):
        xs = [p[0] for r, p in zip(rows, pts) if r["structure"] == lab]
        ys = [p[1] for r, p in zip(rows, pts) if r["structure"] == lab]
        ax.scatter(xs, ys, marker=markers[lab], label=lab, alpha=0.85)
    fr = sorted((p for p, f in zip(pts, front) if f))
    ax.plot([p[0] for p in fr], [p[1] for p in fr], "k--", lw=1, alpha=0.6, label="pareto front")
    ax.scatter([p[0] for p in fr], [p[1] for p in fr], facecolors="none", edgecolors="k", s=120)
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("space overhead [%]")
    ax.set_ylabel("time per query [ns]")


def _render_density(ax, rows):
    markers = _marker_map([r["structure"] for r in rows])
    series: dict[str, list[tuple[float, float]]] = {}
    for r in sorted(rows, key=lambda r: (r["structure"], float(r["density"]))):
        series.setdefault(r["structure"], []).append((float(r["density"]), float(r["ns_per_query"])))
    for lab in sorted(series):
        xs, ys = zip(*series[lab])
        ax.plot(xs, ys, marker=markers[lab], label=lab)
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("density of sampled bits")
    ax.set_ylabel("time per query [ns]")


def _render_gap(ax, rows):
    markers = _marker_map([r["structure"] for r in rows])
    series: dict[str, list[tuple[int, float]]] = {}
    skipped = 0
    for r in sorted(rows, key=lambda r: r["structure"]):
        d = _gap_exponent(r.get("config", ""))
        if d is None:
            skipped += 1
            continue
        series.setdefault(r["structure"], []).append((d, float(r["ns_per_query"])))
    if not series:
        raise PlotError("no gap rows: no config value carries a d= entry")
    for lab in sorted(series):
        pts = sorted(series[lab])
        ax.plot([p[0] for p in pts], [p[1] for p in pts], marker=markers[lab], label=lab)
    ax.set_yscale("log")
    ax.set_xlabel("zero-run exponent d (run length 10^d)")
    ax.set_ylabel("time per query [ns]")
