"""results.csv, summary.json and comparison.svg writers."""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path
from xml.sax.saxutils import escape

from .config import ARMS
from .experiment import ExperimentResult


def csv_header(n: int) -> list:
    cols = ["arm", "run", "hellinger"]
    for group in ("e0_true", "e1_true", "e2_true", "e0_map", "e1_map", "e2_map", "acceptance"):
        cols += [f"{group}_q{j}" for j in range(1, n + 1)]
    cols.append("error")
    return cols


def _fmt(x):
    return "" if x is None else repr(float(x))


def results_csv(result: ExperimentResult) -> str:
    n = result.config.n
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(csv_header(n))
    for rec in result.records:
        row = [rec.arm, rec.run, _fmt(rec.hellinger)]
        for k in range(3):
            row += [_fmt(e.as_array()[k]) for e in rec.true_params]
        for k in range(3):
            row += [_fmt(e.as_array()[k]) for e in rec.map_params] if rec.map_params else [""] * n
        row += [_fmt(a) for a in rec.acceptance] if rec.acceptance else [""] * n
        row.append(rec.error)
        writer.writerow(row)
    return buf.getvalue()


def summary(result: ExperimentResult) -> dict:
    cfg = result.config
    arms = {}
    for arm in cfg.arms:
        rep = result.reports.get(arm)
        failed = sum(1 for r in result.records if r.arm == arm and r.error)
        arms[arm] = {**(rep.as_dict() if rep else {"runs": 0, "mean": None, "std": None}),
                     "failed_runs": failed}
    out = {"config": cfg.to_dict(), "arms": arms}
    if {"adaptive", "unmitigated"} <= set(cfg.arms):
        out["adaptive_wins_vs_unmitigated"] = result.paired_wins("adaptive", "unmitigated")
    if {"static", "unmitigated"} <= set(cfg.arms):
        out["static_wins_vs_unmitigated"] = result.paired_wins("static", "unmitigated")
    return out


_COLORS = {"unmitigated": "#d62728", "static": "#ff7f0e", "adaptive": "#1f77b4"}


def comparison_svg(result: ExperimentResult, width: int = 480, height: int = 320) -> str:
    """Bar (mean) and whisker (+/- one std) per arm, with the individual runs."""
    arms = [a for a in ARMS if a in result.reports]
    left, right, top, bottom = 60, 20, 30, 50
    plot_w, plot_h = width - left - right, height - top - bottom
    ymax = max([1e-9] + [max(result.reports[a].distances) for a in arms]
               + [result.reports[a].mean + result.reports[a].std for a in arms])
    ymax *= 1.1

    def y(v):
        return top + plot_h * (1.0 - v / ymax)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">',
        f'<text x="{width / 2:.1f}" y="18" text-anchor="middle">Hellinger distance to ideal</text>',
        f'<line x1="{left}" y1="{top}" x2="{left}" y2="{top + plot_h}" stroke="black"/>',
        f'<line x1="{left}" y1="{top + plot_h}" x2="{left + plot_w}" y2="{top + plot_h}" stroke="black"/>',
    ]
    for i in range(5):
        v = ymax * i / 4
        parts.append(f'<text x="{left - 6}" y="{y(v) + 4:.1f}" text-anchor="end">{v:.3f}</text>')
    slot = plot_w / max(len(arms), 1)
    for i, arm in enumerate(arms):
        rep = result.reports[arm]
        cx = left + slot * (i + 0.5)
        bw = slot * 0.5
        color = _COLORS[arm]
        parts.append(
            f'<rect x="{cx - bw / 2:.1f}" y="{y(rep.mean):.1f}" width="{bw:.1f}" '
            f'height="{top + plot_h - y(rep.mean):.1f}" fill="{color}" fill-opacity="0.6"/>'
        )
        lo, hi = max(rep.mean - rep.std, 0.0), rep.mean + rep.std
        parts.append(f'<line x1="{cx:.1f}" y1="{y(lo):.1f}" x2="{cx:.1f}" y2="{y(hi):.1f}" stroke="black"/>')
        for v in (lo, hi):
            parts.append(
                f'<line x1="{cx - 8:.1f}" y1="{y(v):.1f}" x2="{cx + 8:.1f}" y2="{y(v):.1f}" stroke="black"/>'
            )
        for d in rep.distances:
            parts.append(f'<circle cx="{cx:.1f}" cy="{y(d):.1f}" r="2.5" fill="black"/>')
        parts.append(
            f'<text x="{cx:.1f}" y="{top + plot_h + 18}" text-anchor="middle">{escape(arm)}</text>'
        )
        parts.append(
            f'<text x="{cx:.1f}" y="{top + plot_h + 34}" text-anchor="middle">{rep.mean:.3f}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def write_outputs(result: ExperimentResult, out_dir) -> dict:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {
        "csv": out / "results.csv",
        "summary": out / "summary.json",
        "svg": out / "comparison.svg",
    }
    paths["csv"].write_text(results_csv(result))
    paths["summary"].write_text(json.dumps(summary(result), indent=2) + "\n")
    paths["svg"].write_text(comparison_svg(result))
    return paths
