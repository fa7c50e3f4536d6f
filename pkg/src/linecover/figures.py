"""Static SVG figures: a curve, its clipped line family, and a box-grid overlay."""
from __future__ import annotations

from fractions import Fraction
from typing import Optional
from xml.sax.saxutils import escape

from .boxdim import occupied_cells
from .exactnum import Dyadic
from .lines import LineFamily, curve_by_name

__all__ = ["family_svg"]

SIZE = 480
PAD = 16


def _fmt(v: float) -> str:
    return f"{v:.3f}"


def family_svg(family: LineFamily, grid: Optional[int] = None, samples: int = 8, p: int = 40) -> str:
    """SVG with one ``<path>`` for the curve and one per clipped line.

    With ``grid`` set, cells of side ``2**-grid`` met by the family are drawn
    as shaded ``<rect>`` elements beneath the paths.
    """
    X0, Y0, X1, Y1 = (v.to_fraction() for v in (family.window.x0, family.window.y0, family.window.x1, family.window.y1))
    sx = (SIZE - 2 * PAD) / float(X1 - X0)
    sy = (SIZE - 2 * PAD) / float(Y1 - Y0)

    def px(x) -> str:
        return _fmt(PAD + float(Fraction(x) - X0) * sx)

    def py(y) -> str:
        return _fmt(SIZE - PAD - float(Fraction(y) - Y0) * sy)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">',
        f"<title>{escape(family.curve)}: {len(family.lines)} lines</title>",
        f'<rect x="0" y="0" width="{SIZE}" height="{SIZE}" fill="white"/>',
    ]
    segs = family.segments()
    if grid is not None:
        h = Fraction(1, 1 << grid)
        cells = occupied_cells(segs, grid, family.window)
        out.append(f'<g fill="#9ecae1" stroke="none" data-scale="{grid}" data-count="{len(cells)}">')
        for i, j in cells:
            x, y = X0 + i * h, Y0 + (j + 1) * h
            out.append(f'<rect x="{px(x)}" y="{py(y)}" width="{_fmt(float(h) * sx)}" height="{_fmt(float(h) * sy)}"/>')
        out.append("</g>")

    curve = curve_by_name(family.curve)
    n = 1 << samples
    pts = []
    for j in range(n + 1):
        x = Dyadic(j, samples)
        pts.append(f"{px(x.to_fraction())},{py(curve.F(x, p).mid.to_fraction())}")
    out.append(f'<path d="M {" L ".join(pts)}" fill="none" stroke="black" stroke-width="2"/>')
    for seg in segs:
        (xa, ya), (xb, yb) = seg.p0, seg.p1
        out.append(f'<path d="M {px(xa)},{py(ya)} L {px(xb)},{py(yb)}" stroke="#d62728" stroke-width="0.7"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
