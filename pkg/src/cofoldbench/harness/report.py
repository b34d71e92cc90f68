"""Deterministic HTML/CSV/SVG report of one or more benchmark runs."""

from __future__ import annotations

import csv
import html
import io
from collections import defaultdict
from pathlib import Path

from cofoldbench.errors import BenchError

from .compare import compare_methods
from .run import RunResults

CRITERION_LABELS = {
    "rmsd<2": "RMSD < 2 Å",
    "rmsd<2&pb": "RMSD < 2 Å & PB-valid",
    "rmsd<1": "RMSD < 1 Å",
    "rmsd<1&pb": "RMSD < 1 Å & PB-valid",
    "lddt_pli": "lDDT-PLI",
}
PALETTE = ("#4c72b0", "#dd8452", "#55a868", "#c44e52", "#8172b3", "#937860", "#da8bc3", "#8c8c8c")

_W, _H = 760, 420
_LEFT, _RIGHT, _TOP, _BOTTOM = 60, 20, 40, 90


def _slug(text: str) -> str:
    return "".join(c if c.isalnum() or c in "-_" else "_" for c in text) or "dataset"


def _pct(x) -> str:
    return "" if x is None else f"{100 * x:.1f}"


def table_csv(runs: list[RunResults], k: int) -> str:
    """One row per method, one ``mean ± sem`` column per criterion (percent)."""
    criteria = list(runs[0].config.criteria)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["method", "n_structures"] + [f"{CRITERION_LABELS.get(c, c)} (best@{k})" for c in criteria])
    for run in runs:
        row = [run.method, run.aggregate(criteria[0], k).n_structures]
        for c in criteria:
            a = run.aggregate(c, k)
            row.append("" if a.mean is None else f"{_pct(a.mean)} ± {_pct(a.sem)}")
        w.writerow(row)
    return buf.getvalue()


def _stars_vs_reference(runs: list[RunResults], k: int, test: str) -> dict[tuple[int, str], str]:
    """Stars for each later method compared against the first (the reference)."""
    stars = {}
    if len(runs) < 2:
        return stars
    ref = runs[0]
    for m, run in enumerate(runs[1:], start=1):
        for c in ref.config.criteria:
            try:
                hi, lo = (ref, run) if ref.aggregate(c, k).mean >= run.aggregate(c, k).mean else (run, ref)
                cmp = compare_methods(hi, lo, k, c, method=test)
            except (BenchError, ValueError):
                continue
            if cmp.stars:
                stars[(m, c)] = cmp.stars
    return stars


def bar_chart_svg(runs: list[RunResults], k: int, title: str, stars: dict[tuple[int, str], str] | None = None) -> str:
    """Grouped bars (one group per criterion, one bar per method) with SEM whiskers."""
    stars = stars or {}
    criteria = list(runs[0].config.criteria)
    plot_w = _W - _LEFT - _RIGHT
    plot_h = _H - _TOP - _BOTTOM
    group_w = plot_w / len(criteria)
    bar_w = group_w * 0.8 / len(runs)

    def y(v: float) -> float:
        return _TOP + plot_h * (1.0 - v)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" viewBox="0 0 {_W} {_H}" font-family="sans-serif" font-size="11">',
        f'<text x="{_W / 2:.1f}" y="20" text-anchor="middle" font-size="14">{html.escape(title)}</text>',
    ]
    for tick in range(0, 101, 20):
        ty = y(tick / 100)
        out.append(f'<line x1="{_LEFT}" y1="{ty:.2f}" x2="{_W - _RIGHT}" y2="{ty:.2f}" stroke="#dddddd"/>')
        out.append(f'<text x="{_LEFT - 6}" y="{ty + 4:.2f}" text-anchor="end">{tick}</text>')
    out.append(f'<text x="14" y="{_TOP + plot_h / 2:.1f}" transform="rotate(-90 14 {_TOP + plot_h / 2:.1f})" text-anchor="middle">success (%)</text>')

    for g, c in enumerate(criteria):
        gx = _LEFT + g * group_w
        if g:
            out.append(f'<line x1="{gx:.2f}" y1="{_TOP}" x2="{gx:.2f}" y2="{_TOP + plot_h}" stroke="#999999" stroke-dasharray="4 3"/>')
        for m, run in enumerate(runs):
            a = run.aggregate(c, k)
            if a.mean is None:
                continue
            x = gx + group_w * 0.1 + m * bar_w
            top = y(a.mean)
            color = PALETTE[m % len(PALETTE)]
            out.append(f'<rect x="{x:.2f}" y="{top:.2f}" width="{bar_w:.2f}" height="{y(0) - top:.2f}" fill="{color}"><title>{html.escape(run.method)}: {_pct(a.mean)}</title></rect>')
            cx = x + bar_w / 2
            sem = a.sem or 0.0
            y_hi, y_lo = y(min(1.0, a.mean + sem)), y(max(0.0, a.mean - sem))
            out.append(f'<line x1="{cx:.2f}" y1="{y_hi:.2f}" x2="{cx:.2f}" y2="{y_lo:.2f}" stroke="black"/>')
            for yy in (y_hi, y_lo):
                out.append(f'<line x1="{cx - bar_w / 4:.2f}" y1="{yy:.2f}" x2="{cx + bar_w / 4:.2f}" y2="{yy:.2f}" stroke="black"/>')
            s = stars.get((m, c))
            if s:
                out.append(f'<text x="{cx:.2f}" y="{y_hi - 4:.2f}" text-anchor="middle" class="stars">{s}</text>')
        out.append(f'<text x="{gx + group_w / 2:.2f}" y="{_TOP + plot_h + 16}" text-anchor="middle">{html.escape(CRITERION_LABELS.get(c, c))}</text>')

    for m, run in enumerate(runs):
        lx = _LEFT + m * 150
        ly = _H - 24
        out.append(f'<rect x="{lx}" y="{ly - 10}" width="12" height="12" fill="{PALETTE[m % len(PALETTE)]}"/>')
        out.append(f'<text x="{lx + 16}" y="{ly}">{html.escape(run.method)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def render_report(runs: list[RunResults], out_dir: Path | str, k: int | None = None, test: str = "ttest") -> list[Path]:
    """Write ``index.html`` plus one CSV table and one SVG chart per dataset.

    ``k`` defaults to 5 when every run reports it, else the smallest shared k.
    Stars compare each method to the first run of the same dataset.
    """
    if not runs:
        raise ValueError("no results to report")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    by_dataset: dict[str, list[RunResults]] = defaultdict(list)
    for run in runs:
        by_dataset[run.dataset].append(run)

    written = []
    sections = []
    for dataset in sorted(by_dataset):
        group = by_dataset[dataset]
        shared = sorted(set.intersection(*(set(r.config.k_values) for r in group)))
        if not shared:
            raise ValueError(f"runs for {dataset!r} share no k value")
        kk = k if k is not None else (5 if 5 in shared else shared[0])
        slug = _slug(dataset)
        table = out / f"{slug}_best{kk}.csv"
        chart = out / f"{slug}_best{kk}.svg"
        table.write_text(table_csv(group, kk))
        chart.write_text(bar_chart_svg(group, kk, f"{dataset} (best@{kk})", _stars_vs_reference(group, kk, test)))
        written += [table, chart]

        rows = list(csv.reader(io.StringIO(table.read_text())))
        head = "".join(f"<th>{html.escape(h)}</th>" for h in rows[0])
        body = "".join("<tr>" + "".join(f"<td>{html.escape(c)}</td>" for c in r) + "</tr>" for r in rows[1:])
        sections.append(
            f"<h2>{html.escape(dataset)}</h2>\n"
            f'<img src="{chart.name}" alt="{html.escape(dataset)} chart"/>\n'
            f"<table><thead><tr>{head}</tr></thead><tbody>{body}</tbody></table>\n"
            f'<p><a href="{table.name}">{table.name}</a></p>'
        )
    index = out / "index.html"
    index.write_text(
        "<!DOCTYPE html>\n<html><head><meta charset=\"utf-8\"><title>Benchmark report</title>"
        "<style>table{border-collapse:collapse}td,th{border:1px solid #ccc;padding:4px 8px}</style>"
        "</head><body>\n<h1>Benchmark report</h1>\n" + "\n".join(sections) + "\n</body></html>\n"
    )
    written.append(index)
    return written
