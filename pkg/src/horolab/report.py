"""CSV and SVG writers.

Floats are written with 17 significant digits so every value read back is
bit-identical.  SVG output is plain SVG 1.1 with no external references.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence
from xml.sax.saxutils import escape


def format_cell(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format(v, ".17g")
    if v is None:
        return ""
    return str(v)


def emit_csv(rows: Iterable[Sequence], path, header: Sequence[str]) -> None:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            if len(row) != len(header):
                raise ValueError(f"row has {len(row)} cells, header has {len(header)}")
            w.writerow([format_cell(v) for v in row])


def read_csv(path) -> tuple[list[str], list[list[str]]]:
    with Path(path).open(newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        return [], []
    return rows[0], rows[1:]


@dataclass
class Polyline:
    points: list[tuple[float, float]]
    label: str = ""


@dataclass
class Panel:
    title: str
    lines: list[Polyline] = field(default_factory=list)
    xlabel: str = ""
    ylabel: str = ""
    note: str = ""


_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2")
_W, _H = 640.0, 400.0


def _num(v: float) -> str:
    return format(v, ".6g")


def _bounds(panel: Panel):
    xs = [x for ln in panel.lines for x, y in ln.points if math.isfinite(x) and math.isfinite(y)]
    ys = [y for ln in panel.lines for x, y in ln.points if math.isfinite(x) and math.isfinite(y)]
    if not xs:
        return -1.0, 1.0, -1.0, 1.0
    x0, x1, y0, y1 = min(xs), max(xs), min(ys), max(ys)
    if x1 == x0:
        x0, x1 = x0 - 1.0, x1 + 1.0
    if y1 == y0:
        y0, y1 = y0 - 1.0, y1 + 1.0
    mx, my = 0.05 * (x1 - x0), 0.05 * (y1 - y0)
    return x0 - mx, x1 + mx, y0 - my, y1 + my


def _panel_svg(panel: Panel, top: float) -> list[str]:
    x0, x1, y0, y1 = _bounds(panel)

    def px(x):
        return (x - x0) / (x1 - x0) * _W

    def py(y):
        return top + _H - (y - y0) / (y1 - y0) * _H

    ax_y = 0.0 if y0 <= 0.0 <= y1 else y0
    ax_x = 0.0 if x0 <= 0.0 <= x1 else x0
    out = [
        f'<text x="8" y="{_num(top + 16)}" font-size="14" font-family="sans-serif">{escape(panel.title)}</text>',
        f'<line x1="0" y1="{_num(py(ax_y))}" x2="{_num(_W)}" y2="{_num(py(ax_y))}" stroke="#444" stroke-width="1"/>',
        f'<line x1="{_num(px(ax_x))}" y1="{_num(top)}" x2="{_num(px(ax_x))}" y2="{_num(top + _H)}" stroke="#444" stroke-width="1"/>',
        f'<text x="{_num(_W - 8)}" y="{_num(top + _H - 6)}" font-size="11" text-anchor="end" font-family="sans-serif">'
        f'{escape(panel.xlabel)} [{_num(x0)}, {_num(x1)}]</text>',
        f'<text x="8" y="{_num(top + 32)}" font-size="11" font-family="sans-serif">'
        f'{escape(panel.ylabel)} [{_num(y0)}, {_num(y1)}]</text>',
    ]
    if panel.note:
        out.append(f'<text x="8" y="{_num(top + 48)}" font-size="10" fill="#555" font-family="sans-serif">'
                   f'{escape(panel.note)}</text>')
    for k, ln in enumerate(panel.lines):
        pts = " ".join(f"{_num(px(x))},{_num(py(y))}" for x, y in ln.points if math.isfinite(x) and math.isfinite(y))
        color = _COLORS[k % len(_COLORS)]
        title = f"<title>{escape(ln.label)}</title>" if ln.label else ""
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.2" points="{pts}">{title}</polyline>')
    return out


def emit_svg_sheet(panels: Sequence[Panel], path) -> None:
    """Panels stacked vertically in one document."""
    height = _H * max(1, len(panels))
    body = []
    for k, panel in enumerate(panels):
        body.extend(_panel_svg(panel, k * _H))
    doc = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{_num(_W)}" height="{_num(height)}" '
        f'viewBox="0 0 {_num(_W)} {_num(height)}">',
        f'<rect x="0" y="0" width="{_num(_W)}" height="{_num(height)}" fill="white"/>',
        *body,
        "</svg>",
    ]
    Path(path).write_text("\n".join(doc) + "\n")


def emit_svg(polylines: Sequence[Polyline], path, title: str = "", xlabel: str = "", ylabel: str = "",
             note: str = "") -> None:
    emit_svg_sheet([Panel(title, list(polylines), xlabel, ylabel, note)], path)
