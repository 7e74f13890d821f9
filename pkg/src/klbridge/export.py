"""Table and plot writers: CSV, JSON and a dependency-free SVG line plot."""
from __future__ import annotations

import csv
import io
import json
import math
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

CSV = "csv"
JSON = "json"
SVG = "svg"
FORMATS = (CSV, JSON, SVG)

SVG_WIDTH, SVG_HEIGHT = 800, 600
_MARGIN = 70
_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf", "#7f7f7f")


def _cell(v):
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def _json_value(v):
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        f = float(v)
        return f if math.isfinite(f) else None
    if isinstance(v, np.bool_):
        return bool(v)
    return v


def table_to_csv(columns: Sequence[str], rows: Sequence[Sequence]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_cell(v) for v in row])
    return buf.getvalue()


def table_to_json(columns: Sequence[str], rows: Sequence[Sequence], meta: Optional[dict] = None) -> str:
    data = [{c: _json_value(v) for c, v in zip(columns, row)} for row in rows]
    doc = {"meta": {k: _json_value(v) for k, v in (meta or {}).items()}, "data": data}
    return json.dumps(doc, indent=1, sort_keys=False) + "\n"


def read_json_table(path) -> Tuple[dict, List[dict]]:
    with open(path) as fh:
        doc = json.load(fh)
    return doc["meta"], doc["data"]


def _nice_range(lo: float, hi: float) -> Tuple[float, float]:
    if not (math.isfinite(lo) and math.isfinite(hi)):
        return 0.0, 1.0
    if hi - lo < 1e-300:
        pad = max(abs(lo), 1.0) * 0.05
        return lo - pad, hi + pad
    pad = 0.04 * (hi - lo)
    return lo - pad, hi + pad


def svg_plot(series: Dict[str, Tuple[Sequence[float], Sequence[float]]], title: str = "",
             xlabel: str = "", ylabel: str = "") -> str:
    """Line plot with axes, ticks and one ``<polyline>`` per series on an 800x600 viewBox."""
    xs = [float(x) for x, _ in series.values() for x in x]
    ys = [float(y) for _, y in series.values() for y in y if math.isfinite(float(y))]
    x0, x1 = _nice_range(min(xs, default=0.0), max(xs, default=1.0))
    y0, y1 = _nice_range(min(ys, default=0.0), max(ys, default=1.0))
    left, right = _MARGIN, SVG_WIDTH - 20
    top, bottom = 40, SVG_HEIGHT - _MARGIN

    def px(x):
        return left + (x - x0) / (x1 - x0) * (right - left)

    def py(y):
        return bottom - (y - y0) / (y1 - y0) * (bottom - top)

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {SVG_WIDTH} {SVG_HEIGHT}" '
        f'width="{SVG_WIDTH}" height="{SVG_HEIGHT}">',
        f'<rect x="0" y="0" width="{SVG_WIDTH}" height="{SVG_HEIGHT}" fill="white"/>',
        f'<g id="axes" stroke="black" stroke-width="1">'
        f'<line x1="{left}" y1="{bottom}" x2="{right}" y2="{bottom}"/>'
        f'<line x1="{left}" y1="{bottom}" x2="{left}" y2="{top}"/></g>',
    ]
    ticks = ['<g id="ticks" font-family="sans-serif" font-size="12">']
    for k in range(6):
        xv = x0 + (x1 - x0) * k / 5
        yv = y0 + (y1 - y0) * k / 5
        ticks.append(f'<line x1="{px(xv):.2f}" y1="{bottom}" x2="{px(xv):.2f}" y2="{bottom + 5}" stroke="black"/>')
        ticks.append(f'<text x="{px(xv):.2f}" y="{bottom + 20}" text-anchor="middle">{xv:.3g}</text>')
        ticks.append(f'<line x1="{left - 5}" y1="{py(yv):.2f}" x2="{left}" y2="{py(yv):.2f}" stroke="black"/>')
        ticks.append(f'<text x="{left - 8}" y="{py(yv) + 4:.2f}" text-anchor="end">{yv:.3g}</text>')
    ticks.append("</g>")
    out.extend(ticks)
    for i, (name, (x, y)) in enumerate(series.items()):
        pts = " ".join(f"{px(float(a)):.2f},{py(float(b)):.2f}"
                       for a, b in zip(x, y) if math.isfinite(float(b)))
        color = _PALETTE[i % len(_PALETTE)]
        out.append(f'<polyline data-series="{_escape(name)}" fill="none" stroke="{color}" '
                   f'stroke-width="1.5" points="{pts}"/>')
        out.append(f'<text x="{right - 10}" y="{top + 16 * (i + 1)}" text-anchor="end" fill="{color}" '
                   f'font-family="sans-serif" font-size="12">{_escape(name)}</text>')
    out.append(f'<text x="{SVG_WIDTH / 2}" y="24" text-anchor="middle" font-family="sans-serif" '
               f'font-size="15">{_escape(title)}</text>')
    out.append(f'<text x="{(left + right) / 2}" y="{SVG_HEIGHT - 20}" text-anchor="middle" '
               f'font-family="sans-serif" font-size="13">{_escape(xlabel)}</text>')
    out.append(f'<text x="18" y="{(top + bottom) / 2}" text-anchor="middle" font-family="sans-serif" '
               f'font-size="13" transform="rotate(-90 18 {(top + bottom) / 2})">{_escape(ylabel)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _escape(s: str) -> str:
    return (str(s).replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
            .replace('"', "&quot;"))


def paths_table(paths) -> Tuple[List[str], List[list]]:
    """Columns ``t, path_0, path_1, ...`` for a list of path samples on a shared grid."""
    if not paths:
        return ["t"], []
    t = paths[0].t_grid
    columns = ["t"] + [f"path_{p.path_index}" for p in paths]
    rows = [[t[i]] + [p.values[i] for p in paths] for i in range(len(t))]
    return columns, rows


def render(fmt: str, columns, rows, meta=None, plot=None) -> str:
    """Serialize a table in ``fmt``; ``plot`` is ``(series, title, xlabel, ylabel)`` for SVG."""
    if fmt == CSV:
        return table_to_csv(columns, rows)
    if fmt == JSON:
        return table_to_json(columns, rows, meta)
    if fmt == SVG:
        if plot is None:
            raise ValueError("no plot defined for this table")
        series, title, xlabel, ylabel = plot
        return svg_plot(series, title, xlabel, ylabel)
    raise ValueError(f"unknown format {fmt!r}")
