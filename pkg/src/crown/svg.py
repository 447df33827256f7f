"""Deterministic SVG rendering of a layout.

All coordinates are multiplied by the least common multiple of their
denominators, so the file holds integers only and is stable under diffs.
The y axis is flipped so that larger y is drawn higher up.
"""

from __future__ import annotations

import math
from fractions import Fraction
from xml.sax.saxutils import escape

from .model import POINT, PROPER, CrownError, Instance, SolveReport, contact, placed, validate

MARGIN = 1


class InvalidReport(CrownError):
    pass


def _contact_mark(a, b, kind):
    """Shared segment (x1, y1, x2, y2) or corner point (x, y, x, y) of two boxes."""
    x1, x2 = max(a.x, b.x), min(a.x2, b.x2)
    y1, y2 = max(a.y, b.y), min(a.y2, b.y2)
    return (x1, y1, x2, y2) if kind == PROPER else (x1, y1, x1, y1)


def render_svg(instance: Instance, report: SolveReport) -> str:
    problems = validate(instance, report.layout)
    if problems:
        raise InvalidReport("; ".join(str(p) for p in problems))
    boxes = [(vid, placed(instance, report.layout, vid)) for vid in instance.ids]
    marks = []
    for e in instance.edges:
        a, b = placed(instance, report.layout, e.u), placed(instance, report.layout, e.v)
        kind = contact(a, b)
        if kind == PROPER or (kind == POINT and instance.model == POINT):
            marks.append((kind, _contact_mark(a, b, kind)))

    if boxes:
        x0 = min(b.x for _, b in boxes) - MARGIN
        y0 = min(b.y for _, b in boxes) - MARGIN
        x1 = max(b.x2 for _, b in boxes) + MARGIN
        y1 = max(b.y2 for _, b in boxes) + MARGIN
    else:
        x0, y0, x1, y1 = Fraction(-MARGIN), Fraction(-MARGIN), Fraction(MARGIN), Fraction(MARGIN)
    coords = [x0, y0, x1, y1] + [c for _, b in boxes for c in (b.x, b.y)]
    scale = math.lcm(*(Fraction(c).denominator for c in coords))

    def sx(x) -> int:
        return int((x - x0) * scale)

    def sy(y) -> int:
        return int((y1 - y) * scale)

    width, height = sx(x1), sy(y0)
    font = max(1, scale // 2)
    stroke = max(1, scale // 8)
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {width} {height}" '
        f'width="{width}" height="{height}">',
        f'<g fill="#dde6f0" stroke="#345" stroke-width="{stroke}">',
    ]
    for vid, b in boxes:
        out.append(f'<rect x="{sx(b.x)}" y="{sy(b.y2)}" width="{b.w * scale}" height="{b.h * scale}"/>')
    out.append("</g>")
    out.append(f'<g font-family="monospace" font-size="{font}" text-anchor="middle" '
               f'dominant-baseline="middle">')
    for vid, b in boxes:
        cx, cy = sx(b.x) + b.w * scale // 2, sy(b.y2) + b.h * scale // 2
        out.append(f'<text x="{cx}" y="{cy}">{escape(str(vid))}</text>')
    out.append("</g>")
    out.append(f'<g stroke="#c22" fill="#c22" stroke-width="{3 * stroke}">')
    for kind, (ax, ay, bx, by) in marks:
        if kind == PROPER:
            out.append(f'<line x1="{sx(ax)}" y1="{sy(ay)}" x2="{sx(bx)}" y2="{sy(by)}"/>')
        else:
            out.append(f'<circle cx="{sx(ax)}" cy="{sy(ay)}" r="{3 * stroke}"/>')
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"
