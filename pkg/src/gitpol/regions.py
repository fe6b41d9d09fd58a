"""Exact half-plane intersection and line arrangements in the plane.

Points are pairs of Fractions; half-planes are integer-coefficient affine
inequalities a*x + b*y >= c (or strict).  No floating point anywhere: polygon
clipping, region counting and interior-witness selection are all rational.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from .exact import ZERO, rat

Point = tuple[Fraction, Fraction]


@dataclass(frozen=True)
class HalfPlane:
    """a*x + b*y >= c, strict when `strict` is set; coefficients rational."""

    a: Fraction
    b: Fraction
    c: Fraction
    strict: bool = False
    label: str = ""

    def eval(self, p: Point) -> Fraction:
        return self.a * p[0] + self.b * p[1] - self.c

    def holds(self, p: Point) -> bool:
        v = self.eval(p)
        return v > 0 if self.strict else v >= 0

    def primitive(self) -> tuple[int, int, int]:
        """Integer-cleared (a, b, c) with gcd 1, keeping orientation."""
        den = self.a.denominator
        for q in (self.b, self.c):
            den = den * q.denominator // gcd(den, q.denominator)
        trip = (int(self.a * den), int(self.b * den), int(self.c * den))
        g = 0
        for v in trip:
            g = gcd(g, abs(v))
        return tuple(v // g for v in trip) if g else trip

    def is_trivial(self) -> bool:
        """0 >= c style inequality with no variables."""
        return self.a == 0 and self.b == 0


def line_primitive(a, b, c) -> tuple[int, int, int]:
    """Canonical primitive form of the line a*x + b*y = c (sign-normalized)."""
    a, b, c = rat(a), rat(b), rat(c)
    den = a.denominator
    for q in (b, c):
        den = den * q.denominator // gcd(den, q.denominator)
    ai, bi, ci = int(a * den), int(b * den), int(c * den)
    g = 0
    for v in (ai, bi, ci):
        g = gcd(g, abs(v))
    if g:
        ai, bi, ci = ai // g, bi // g, ci // g
    lead = ai if ai != 0 else bi
    if lead < 0:
        ai, bi, ci = -ai, -bi, -ci
    return ai, bi, ci


def box_polygon(x0, x1, y0, y1) -> list[Point]:
    x0, x1, y0, y1 = rat(x0), rat(x1), rat(y0), rat(y1)
    return [(x0, y0), (x1, y0), (x1, y1), (x0, y1)]


def clip_polygon(poly: list[Point], hp: HalfPlane) -> list[Point]:
    """Sutherland-Hodgman clip of a convex polygon by the CLOSURE of hp."""
    if not poly:
        return []
    out: list[Point] = []
    n = len(poly)
    for idx in range(n):
        cur, nxt = poly[idx], poly[(idx + 1) % n]
        vc, vn = hp.eval(cur), hp.eval(nxt)
        if vc >= 0:
            out.append(cur)
        if (vc > 0 and vn < 0) or (vc < 0 and vn > 0):
            t = vc / (vc - vn)
            out.append((cur[0] + t * (nxt[0] - cur[0]), cur[1] + t * (nxt[1] - cur[1])))
    # collapse duplicate consecutive vertices
    dedup: list[Point] = []
    for p in out:
        if not dedup or dedup[-1] != p:
            dedup.append(p)
    if len(dedup) > 1 and dedup[0] == dedup[-1]:
        dedup.pop()
    return dedup


def polygon_area_twice(poly: list[Point]) -> Fraction:
    total = ZERO
    n = len(poly)
    for i in range(n):
        x1, y1 = poly[i]
        x2, y2 = poly[(i + 1) % n]
        total += x1 * y2 - x2 * y1
    return abs(total)


def intersect_halfplanes(halfplanes: list[HalfPlane], bbox: list[Point]) -> list[Point]:
    """Closed polygon of the closures, clipped inside the bounding polygon."""
    poly = list(bbox)
    for hp in halfplanes:
        if hp.is_trivial():
            if (hp.c > 0) if not hp.strict else (hp.c >= 0):
                return []
            continue
        poly = clip_polygon(poly, hp)
        if not poly:
            return []
    return poly


def _segment_feasible(p: Point, q: Point, strict_hps: list[HalfPlane]) -> Point | None:
    """A point of the open segment interior (or endpoints) with all strict > 0."""
    lo, hi = Fraction(0), Fraction(1)
    lo_strict = hi_strict = False
    for hp in strict_hps:
        vp, vq = hp.eval(p), hp.eval(q)
        d = vq - vp
        if d == 0:
            if vp <= 0:
                return None
            continue
        t = -vp / d
        if d > 0:
            if t >= hi:
                return None
            if t > lo or (t == lo and not lo_strict):
                lo, lo_strict = t, True
        else:
            if t <= lo:
                return None
            if t < hi or (t == hi and not hi_strict):
                hi, hi_strict = t, True
    if lo > hi or (lo == hi and (lo_strict or hi_strict)):
        return None
    t = (lo + hi) / 2 if (lo_strict or hi_strict or lo != hi) else lo
    if lo == hi and not lo_strict and not hi_strict:
        t = lo
    return (p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1]))


def interior_witness(poly: list[Point], strict_hps: list[HalfPlane]) -> Point | None:
    """Exact point of the closed polygon satisfying every strict inequality."""
    if not poly:
        return None
    strict_hps = [hp for hp in strict_hps if not hp.is_trivial()]
    if len(poly) == 1:
        return poly[0] if all(hp.eval(poly[0]) > 0 for hp in strict_hps) else None
    if len(poly) == 2 or polygon_area_twice(poly) == 0:
        best = None
        for i in range(len(poly)):
            for j in range(i + 1, len(poly)):
                best = _segment_feasible(poly[i], poly[j], strict_hps)
                if best is not None:
                    return best
        return best
    # full-dimensional: blend the centroid toward vertices until off all lines
    cx = sum((p[0] for p in poly), ZERO) / len(poly)
    cy = sum((p[1] for p in poly), ZERO) / len(poly)
    candidates = [(cx, cy)]
    for p in poly:
        for k in (2, 3, 5, 7):
            candidates.append(((cx * (k - 1) + p[0]) / k, (cy * (k - 1) + p[1]) / k))
    for cand in candidates:
        if all(hp.eval(cand) > 0 for hp in strict_hps):
            return cand
    # exhaustive fallback over sub-segments of the polygon
    for i in range(len(poly)):
        w = _segment_feasible((cx, cy), poly[i], strict_hps)
        if w is not None:
            return w
    return None


def line_meets_open_box(a, b, c, x0, x1, y0, y1) -> bool:
    """Does a*x + b*y = c meet the open box?  (affine sign test at corners)"""
    vals = [rat(a) * x + rat(b) * y - rat(c)
            for x in (rat(x0), rat(x1)) for y in (rat(y0), rat(y1))]
    if all(v == 0 for v in vals):
        return False
    return min(vals) < 0 < max(vals)


def line_meets_open_convex(a, b, c, vertices: list[Point]) -> bool:
    """Does the line meet the interior of the convex hull of `vertices`?"""
    vals = [rat(a) * x + rat(b) * y - rat(c) for (x, y) in vertices]
    if all(v == 0 for v in vals):
        return False
    return min(vals) < 0 < max(vals)


def line_line_intersection(l1: tuple, l2: tuple) -> Point | None:
    a1, b1, c1 = (rat(v) for v in l1)
    a2, b2, c2 = (rat(v) for v in l2)
    det = a1 * b2 - a2 * b1
    if det == 0:
        return None
    return ((c1 * b2 - c2 * b1) / det, (a1 * c2 - a2 * c1) / det)


def count_arrangement_regions(lines: list[tuple], x0, x1, y0, y1) -> int:
    """Open regions the lines cut out of the open box (incremental formula)."""
    x0, x1, y0, y1 = rat(x0), rat(x1), rat(y0), rat(y1)
    crossing = [ln for ln in lines if line_meets_open_box(*ln, x0, x1, y0, y1)]
    regions = 1
    for j, ln in enumerate(crossing):
        pts = set()
        for prev in crossing[:j]:
            p = line_line_intersection(ln, prev)
            if p is not None and x0 < p[0] < x1 and y0 < p[1] < y1:
                pts.add(p)
        regions += 1 + len(pts)
    return regions


def arrangement_cells(lines: list[tuple], x0, x1, y0, y1,
                      max_lines: int = 12) -> list[list[Point]]:
    """Closed polygons of the open cells (sign-vector enumeration)."""
    x0, x1, y0, y1 = rat(x0), rat(x1), rat(y0), rat(y1)
    crossing = [ln for ln in lines if line_meets_open_box(*ln, x0, x1, y0, y1)]
    if len(crossing) > max_lines:
        raise ValueError("too many walls for cell enumeration")
    box = box_polygon(x0, x1, y0, y1)
    cells = []
    for mask in range(1 << len(crossing)):
        hps = []
        for idx, (a, b, c) in enumerate(crossing):
            sign = 1 if (mask >> idx) & 1 else -1
            hps.append(HalfPlane(rat(sign * a), rat(sign * b), rat(sign * c), strict=True))
        poly = intersect_halfplanes(hps, box)
        if poly and polygon_area_twice(poly) > 0:
            cells.append(poly)
    return cells
