"""CSV / JSON / SVG writers. Output is deterministic for fixed inputs."""
import csv
import json
import math
from pathlib import Path
from typing import Iterable, List, Optional, Sequence
from xml.sax.saxutils import escape

import mpmath

from app.schemas.numeric import PrecisionContext


def sci(x, pc: PrecisionContext) -> str:
    """Scientific notation with as many digits as `bits` carries"""
    digits = max(int(pc.bits * math.log10(2)), 15)
    return mpmath.nstr(mpmath.mpf(x), digits, min_fixed=1, max_fixed=0)


def write_csv(rows: Iterable[Sequence], path: Optional[Path] = None, stream=None):
    """Write rows (header first) to a path or an open stream"""
    if path is not None:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="") as f:
            write_csv(rows, stream=f)
        return
    writer = csv.writer(stream, lineterminator="\n")
    for row in rows:
        writer.writerow(row)


def dump_json(document: dict) -> str:
    return json.dumps(document, indent=2, sort_keys=True)


def write_json(document: dict, path: Optional[Path] = None, stream=None):
    text = dump_json(document) + "\n"
    if path is not None:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        Path(path).write_text(text)
    else:
        stream.write(text)


# ---------------------------------------------------------------------------
# Minimal SVG chart: log-log polylines with axis labels
# ---------------------------------------------------------------------------

WIDTH, HEIGHT, MARGIN = 640, 420, 60
COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"]


def loglog_svg(series: List[tuple], x_label: str, y_label: str, title: str = "") -> str:
    """
    series: list of (name, xs, ys) with positive values.
    Non-positive points are dropped.
    """
    points = []
    for name, xs, ys in series:
        kept = [(float(mpmath.log10(x)), float(mpmath.log10(y))) for x, y in zip(xs, ys) if x > 0 and y > 0]
        points.append((name, kept))

    all_x = [px for _, pts in points for px, _ in pts] or [0.0, 1.0]
    all_y = [py for _, pts in points for _, py in pts] or [0.0, 1.0]
    x0, x1 = min(all_x), max(all_x)
    y0, y1 = min(all_y), max(all_y)
    if x1 == x0:
        x1 = x0 + 1
    if y1 == y0:
        y1 = y0 + 1

    def sx(v):
        return MARGIN + (v - x0) / (x1 - x0) * (WIDTH - 2 * MARGIN)

    def sy(v):
        return HEIGHT - MARGIN - (v - y0) / (y1 - y0) * (HEIGHT - 2 * MARGIN)

    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}">',
        f'<text x="{WIDTH / 2:.1f}" y="20" text-anchor="middle">{escape(title)}</text>',
        f'<line x1="{MARGIN}" y1="{HEIGHT - MARGIN}" x2="{WIDTH - MARGIN}" y2="{HEIGHT - MARGIN}" stroke="black"/>',
        f'<line x1="{MARGIN}" y1="{MARGIN}" x2="{MARGIN}" y2="{HEIGHT - MARGIN}" stroke="black"/>',
        f'<text x="{WIDTH / 2:.1f}" y="{HEIGHT - 15}" text-anchor="middle">{escape(x_label)}</text>',
        f'<text x="15" y="{HEIGHT / 2:.1f}" transform="rotate(-90 15 {HEIGHT / 2:.1f})" '
        f'text-anchor="middle">{escape(y_label)}</text>',
        f'<text x="{MARGIN}" y="{HEIGHT - MARGIN + 18}" text-anchor="middle">1e{x0:.1f}</text>',
        f'<text x="{WIDTH - MARGIN}" y="{HEIGHT - MARGIN + 18}" text-anchor="middle">1e{x1:.1f}</text>',
        f'<text x="{MARGIN - 5}" y="{HEIGHT - MARGIN}" text-anchor="end">1e{y0:.1f}</text>',
        f'<text x="{MARGIN - 5}" y="{MARGIN}" text-anchor="end">1e{y1:.1f}</text>',
    ]
    for i, (name, pts) in enumerate(points):
        color = COLORS[i % len(COLORS)]
        coords = " ".join(f"{sx(px):.2f},{sy(py):.2f}" for px, py in pts)
        parts.append(f'<polyline fill="none" stroke="{color}" points="{coords}"/>')
        parts.append(
            f'<text x="{WIDTH - MARGIN - 5}" y="{MARGIN + 16 * (i + 1)}" text-anchor="end" '
            f'fill="{color}">{escape(name)}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
