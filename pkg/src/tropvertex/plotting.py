"""SVG pictures: diagrams with shaded chambers, broken lines, amoebas.

Geometry is exact up to the final coordinate formatting, except for the
amoeba, which samples roots numerically.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence
from xml.sax.saxutils import escape

import numpy as np
import sympy
from shapely.geometry import LineString, box
from shapely.ops import polygonize, unary_union

from .algebra import pretty
from .scattering import LINE, OUTGOING, ScatteringDiagram, singular_points
from .tropical import BrokenLine

WIDTH = HEIGHT = 600
PALETTE = ["#f2f0e6", "#e3eef7", "#eaf5e4", "#f7e8ec", "#efe7f6", "#f8efdf"]


class PlotError(ValueError):
    pass


def _bounds_for(points, pad=Fraction(3, 2)):
    if not points:
        return (-3.0, -3.0, 3.0, 3.0)
    xs = [float(p[0]) for p in points]
    ys = [float(p[1]) for p in points]
    span = max(max(xs) - min(xs), max(ys) - min(ys), 2.0)
    cx, cy = (max(xs) + min(xs)) / 2, (max(ys) + min(ys)) / 2
    half = span / 2 * float(pad) + 1
    return (cx - half, cy - half, cx + half, cy + half)


def check_bounds(bounds):
    x0, y0, x1, y1 = bounds
    if not (x0 < x1 and y0 < y1):
        raise PlotError(f"bounds {bounds} are not of the form xmin,ymin,xmax,ymax with min < max")
    return tuple(float(v) for v in bounds)


class Canvas:
    def __init__(self, bounds, width=WIDTH, height=HEIGHT):
        self.bounds = check_bounds(bounds)
        self.width, self.height = width, height
        self.items: list[str] = []

    def xy(self, p):
        x0, y0, x1, y1 = self.bounds
        return ((float(p[0]) - x0) / (x1 - x0) * self.width,
                self.height - (float(p[1]) - y0) / (y1 - y0) * self.height)

    def _pts(self, pts):
        return " ".join("%.2f,%.2f" % self.xy(p) for p in pts)

    def polygon(self, pts, fill):
        self.items.append(f'<polygon points="{self._pts(pts)}" fill="{fill}" stroke="none"/>')

    def polyline(self, pts, stroke, width=1.5, dash=None):
        extra = f' stroke-dasharray="{dash}"' if dash else ""
        self.items.append(
            f'<polyline points="{self._pts(pts)}" fill="none" stroke="{stroke}" stroke-width="{width}"{extra}/>'
        )

    def circle(self, p, r, fill):
        x, y = self.xy(p)
        self.items.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="{r}" fill="{fill}"/>')

    def text(self, p, s, size=11, fill="#222"):
        x, y = self.xy(p)
        anchor = "end" if x > self.width / 2 else "start"
        self.items.append(
            f'<text x="{x:.2f}" y="{y:.2f}" text-anchor="{anchor}" font-family="monospace" '
            f'font-size="{size}" fill="{fill}">{escape(s)}</text>'
        )

    def caption(self, s):
        self.items.append(
            f'<text x="8" y="{self.height - 8}" font-family="monospace" font-size="11" fill="#222">{escape(s)}</text>'
        )

    def render(self) -> str:
        head = (
            '<?xml version="1.0" encoding="UTF-8"?>\n'
            f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{self.width}" '
            f'height="{self.height}" viewBox="0 0 {self.width} {self.height}">\n'
            f'<rect x="0" y="0" width="{self.width}" height="{self.height}" fill="white"/>\n'
        )
        return head + "\n".join(self.items) + "\n</svg>\n"


def _clip(base, m, kind, bounds):
    """Segment of a line or ray inside the box, as two float points, or None."""
    x0, y0, x1, y1 = bounds
    bx, by = float(base[0]), float(base[1])
    dx, dy = float(m[0]), float(m[1])
    lo, hi = (-np.inf if kind == LINE else 0.0), np.inf
    for p, d, a, b in ((bx, dx, x0, x1), (by, dy, y0, y1)):
        if d == 0:
            if not (a <= p <= b):
                return None
            continue
        s0, s1 = (a - p) / d, (b - p) / d
        lo, hi = max(lo, min(s0, s1)), min(hi, max(s0, s1))
    if lo >= hi:
        return None
    return (bx + lo * dx, by + lo * dy), (bx + hi * dx, by + hi * dy)


def _chambers(segments, bounds):
    frame = box(*bounds)
    lines = [LineString(s) for s in segments] + [frame.exterior]
    faces = [f for f in polygonize(unary_union(lines)) if f.area > 1e-9]
    faces.sort(key=lambda f: (round(f.centroid.x, 6), round(f.centroid.y, 6)))
    return faces


def diagram_svg(d: ScatteringDiagram, bounds=None, title: str | None = None) -> str:
    if bounds is None:
        pts = list(singular_points(d)) + [w.base for w in d.walls] + list(d.excluded)
        bounds = _bounds_for(pts)
    c = Canvas(bounds)
    segs = []
    drawn = []
    for w in d.walls:
        seg = _clip(w.base, w.m, w.kind, c.bounds)
        if seg is not None:
            segs.append(seg)
            drawn.append((w, seg))
    for i, face in enumerate(_chambers(segs, c.bounds)):
        c.polygon(list(face.exterior.coords)[:-1], PALETTE[i % len(PALETTE)])
    for w, seg in drawn:
        if w.kind == LINE:
            color = "#111111"
        else:
            color = "#1f5fa8" if w.align == OUTGOING else "#b2302b"
        c.polyline(seg, color, width=1.6)
        a, b = seg
        at = (a[0] + 0.85 * (b[0] - a[0]), a[1] + 0.85 * (b[1] - a[1]))
        c.text(at, pretty(w.fn), size=10, fill=color)
    for i, p in enumerate(d.excluded, 1):
        c.circle(p, 4, "#000")
        c.text((float(p[0]) + 0.05, float(p[1]) + 0.05), f"P{i}")
    if title:
        c.caption(title)
    return c.render()


def broken_lines_svg(d: ScatteringDiagram, lines: Sequence[BrokenLine], Q, bounds=None,
                     title: str | None = None) -> str:
    """Walls in grey, one polyline per broken line ending at ``Q``."""
    if bounds is None:
        pts = list(d.excluded) + [Q] + [b.point for bl in lines for b in bl.bends]
        bounds = _bounds_for(pts)
    c = Canvas(bounds)
    for w in d.walls:
        seg = _clip(w.base, w.m, w.kind, c.bounds)
        if seg is not None:
            c.polyline(seg, "#9a9a9a", width=1.0, dash="4,3")
    colors = ["#1f5fa8", "#b2302b", "#2d7d2d", "#8a4fb0", "#c7781b", "#0f8a8a"]
    for k, bl in enumerate(lines):
        travel = [b.point for b in bl.bends] + [bl.endpoint]
        # the unbounded first segment came in along -m, so it reaches back along +m
        seg = _clip(travel[0], bl.monomials[0][0].m, "ray", c.bounds)
        far = seg[1] if seg is not None else travel[0]
        c.polyline([far] + travel, colors[k % len(colors)], width=1.8)
        for b in bl.bends:
            c.circle(b.point, 2.5, colors[k % len(colors)])
    for i, p in enumerate(d.excluded, 1):
        c.circle(p, 4, "#000")
        c.text((float(p[0]) + 0.05, float(p[1]) + 0.05), f"P{i}")
    c.circle(Q, 4, "#d11")
    c.text((float(Q[0]) + 0.05, float(Q[1]) - 0.25), "Q")
    if title:
        c.caption(title)
    return c.render()


# ------------------------------------------------------------------------------
# amoebas


def parse_laurent(text: str):
    """Laurent polynomial in ``z1, z2`` (``x, y`` also accepted) as ``{(a, b): coeff}``."""
    z1, z2 = sympy.symbols("z1 z2")
    try:
        expr = sympy.sympify(text, locals={"x": z1, "y": z2, "z1": z1, "z2": z2})
    except (sympy.SympifyError, SyntaxError, TypeError) as exc:
        raise PlotError(f"cannot parse Laurent polynomial {text!r}: {exc}") from exc
    extra = expr.free_symbols - {z1, z2}
    if extra:
        raise PlotError(f"unknown symbols {sorted(map(str, extra))}")
    expr = sympy.expand(expr)
    out: dict[tuple[int, int], complex] = {}
    for term in sympy.Add.make_args(expr):
        coeff, rest = term.as_coeff_Mul()
        powers = rest.as_powers_dict() if rest != 1 else {}
        a, b = int(powers.get(z1, 0)), int(powers.get(z2, 0))
        if set(powers) - {z1, z2} or any(not sympy.Integer(v) == v for v in powers.values()):
            raise PlotError(f"term {term} is not a Laurent monomial")
        out[(a, b)] = out.get((a, b), 0) + complex(coeff)
    out = {k: v for k, v in out.items() if v != 0}
    if len({b for _, b in out}) < 2:
        raise PlotError("the polynomial must involve at least two powers of z2")
    return out


def amoeba_points(poly: dict, tbase: float, bounds, samples: int = 3000, seed: int = 0):
    """Points ``(log_t |z1|, log_t |z2|)`` on the zero set, sampled along ``z1``."""
    if not tbase > 1:
        raise PlotError("the amoeba base t must exceed 1")
    x0, y0, x1, y1 = check_bounds(bounds)
    rng = np.random.default_rng(seed)
    bmin = min(b for _, b in poly)
    deg = max(b for _, b in poly) - bmin
    logt = np.log(tbase)
    u = rng.uniform(x0, x1, samples)
    theta = rng.uniform(0, 2 * np.pi, samples)
    z1 = np.exp(u * logt + 1j * theta)
    out = []
    for k in range(samples):
        coeffs = np.zeros(deg + 1, dtype=complex)
        for (a, b), c in poly.items():
            coeffs[deg - (b - bmin)] += c * z1[k] ** a
        if abs(coeffs[0]) < 1e-14:
            continue
        for r in np.roots(coeffs):
            if r == 0:
                continue
            v = np.log(abs(r)) / logt
            if y0 <= v <= y1:
                out.append((float(u[k]), float(v)))
    return out


def amoeba_svg(text: str, tbase: float, bounds=(-4, -4, 4, 4), samples: int = 3000, seed: int = 0) -> str:
    poly = parse_laurent(text)
    pts = amoeba_points(poly, tbase, bounds, samples, seed)
    c = Canvas(bounds)
    for p in pts:
        x, y = c.xy(p)
        c.items.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="0.9" fill="#1f5fa8"/>')
    c.caption(f"amoeba of {text} at t = {tbase:g} ({len(pts)} points)")
    return c.render()
