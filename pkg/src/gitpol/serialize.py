"""Stable JSON/CSV/SVG emission helpers shared by the command line."""

from __future__ import annotations

import json
from fractions import Fraction

from .exact import rat, rat_str
from .regions import HalfPlane
from .setting import SchemaError


def dumps(obj) -> str:
    """Canonical JSON: sorted keys, two-space indent, newline-terminated."""
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def load_json(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise SchemaError(f"cannot read {path}: {exc}") from exc


def write_text(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def walls_csv(walls) -> str:
    lines = ["a,b,c"]
    for w in walls:
        if isinstance(w, tuple):
            lines.append(",".join(str(v) for v in w))
        else:
            lines.append(f"1,0,{rat_str(rat(w))}")
    return "\n".join(lines) + "\n"


def vertices_csv(vertices) -> str:
    lines = ["x,y"]
    for x, y in vertices:
        lines.append(f"{rat_str(x)},{rat_str(y)}")
    return "\n".join(lines) + "\n"


def _svg_coord(v: Fraction, lo: Fraction, hi: Fraction, size: int, flip: bool) -> str:
    t = (v - lo) / (hi - lo)
    if flip:
        t = 1 - t
    return f"{float(t * size):.3f}"


def region_svg(halfplanes: list[HalfPlane], vertices, walls, window,
               labels=("x", "y"), size: int = 420) -> str:
    """Deterministic plot: wall lines, the admissible polygon shaded."""
    (x0, x1), (y0, y1) = window
    x0, x1, y0, y1 = rat(x0), rat(x1), rat(y0), rat(y1)

    def pt(x, y):
        return (_svg_coord(x, x0, x1, size, False), _svg_coord(y, y0, y1, size, True))

    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size + 60}" '
             f'height="{size + 60}" viewBox="-40 -20 {size + 60} {size + 60}">',
             f'<rect x="0" y="0" width="{size}" height="{size}" fill="white" '
             'stroke="black" stroke-width="1"/>']
    if vertices:
        coords = " ".join(",".join(pt(x, y)) for x, y in vertices)
        parts.append(f'<polygon points="{coords}" fill="#9ecae1" '
                     'fill-opacity="0.6" stroke="#3182bd" stroke-width="1"/>')
    for wall in walls:
        a, b, c = (rat(v) for v in wall)
        segment = _clip_line_to_box(a, b, c, x0, x1, y0, y1)
        if segment:
            (px, py), (qx, qy) = segment
            p1, p2 = pt(px, py), pt(qx, qy)
            parts.append(f'<line x1="{p1[0]}" y1="{p1[1]}" x2="{p2[0]}" y2="{p2[1]}" '
                         'stroke="#de2d26" stroke-width="1.2"/>')
    parts.append(f'<text x="{size // 2}" y="{size + 30}" font-size="13" '
                 f'text-anchor="middle">{labels[0]}</text>')
    parts.append(f'<text x="-28" y="{size // 2}" font-size="13" '
                 f'text-anchor="middle" transform="rotate(-90 -28 {size // 2})">'
                 f'{labels[1]}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _clip_line_to_box(a, b, c, x0, x1, y0, y1):
    pts = []
    if b != 0:
        for xv in (x0, x1):
            yv = (c - a * xv) / b
            if y0 <= yv <= y1:
                pts.append((xv, yv))
    if a != 0:
        for yv in (y0, y1):
            xv = (c - b * yv) / a
            if x0 <= xv <= x1:
                pts.append((xv, yv))
    uniq = []
    for p in pts:
        if p not in uniq:
            uniq.append(p)
    return (uniq[0], uniq[1]) if len(uniq) >= 2 else None
