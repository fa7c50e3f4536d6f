"""Exact dyadic-grid box counting and log-log dimension fits.

Grid cells are half-open ``[j h, (j+1) h)`` anchored at the window corner,
with ``h = 2**-k``; points on the closing (right or top) window edge belong
to the last column or row.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

import numpy as np

from .digit_curve import Curve, slope_block_image
from .exactnum import Dyadic, Enclosure, to_fraction
from .lines import LineFamily, Segment, Window

__all__ = [
    "BoxCountReport",
    "boxes_of_segments",
    "boxes_of_segments_bruteforce",
    "occupied_cells",
    "boxes_of_intervals",
    "slope_cover_check",
    "slope_interval_cover",
    "family_report",
    "fit_dimension",
    "merged_count",
]


def merged_count(ranges: Iterable[tuple]) -> int:
    """Number of integers covered by a collection of closed integer ranges."""
    total = 0
    end = None
    for lo, hi in sorted(ranges):
        if end is None or lo > end:
            total += hi - lo + 1
            end = hi
        elif hi > end:
            total += hi - end
            end = hi
    return total


def _floor_div(v: Fraction, h: Fraction) -> int:
    q = v / h
    return q.numerator // q.denominator


def _window_fracs(window: Window):
    return tuple(v.to_fraction() for v in (window.x0, window.y0, window.x1, window.y1))


def _grid_shape(window: Window, k: int):
    X0, Y0, X1, Y1 = _window_fracs(window)
    h = Fraction(1, 1 << k)
    nx = -_floor_div(-(X1 - X0), h)
    ny = -_floor_div(-(Y1 - Y0), h)
    return X0, Y0, X1, Y1, h, max(nx, 1), max(ny, 1)


def _segment_columns(seg: Segment, X0, Y0, h, nx, ny):
    """Yield ``(column, row_lo, row_hi)`` for every column the segment meets.

    Coordinates are rescaled to cell units over one common denominator so
    the sweep runs on integers only.
    """
    (Ua, Va, Ub, Vb), D = _scaled(seg, X0, Y0, h)
    if Ub < Ua:
        Ua, Va, Ub, Vb = Ub, Vb, Ua, Va

    def col(U):
        return min(U // D, nx - 1)

    if Ua == Ub:
        lo, hi = sorted((Va, Vb))
        yield col(Ua), min(lo // D, ny - 1), min(hi // D, ny - 1)
        return
    span = Ub - Ua
    den = D * span
    base = Va * span
    dv = Vb - Va
    for i in range(col(Ua), col(Ub) + 1):
        left = max(Ua, i * D)
        edge = (i + 1) * D
        closed = Ub < edge or i == nx - 1
        right = Ub if closed else edge
        n_left = base + dv * (left - Ua)
        n_right = base + dv * (right - Ua)
        lo, hi = (n_left, n_right) if n_left <= n_right else (n_right, n_left)
        j_lo = lo // den
        j_hi = hi // den
        # the open end sits at ``right``; its row is dropped only when it is
        # the top of a nondegenerate range and lies on a grid line
        if not closed and dv > 0 and hi % den == 0:
            j_hi -= 1
        yield i, min(j_lo, ny - 1), min(j_hi, ny - 1)


def occupied_cells(segments: Sequence[Segment], k: int, window: Optional[Window] = None) -> list:
    """Sorted ``(column, row)`` indices of the grid cells meeting the segments."""
    window = window or Window.unit()
    X0, Y0, X1, Y1, h, nx, ny = _grid_shape(window, k)
    columns: dict = {}
    for seg in segments:
        for i, jl, jh in _segment_columns(seg, X0, Y0, h, nx, ny):
            columns.setdefault(i, []).append((jl, jh))
    cells = set()
    for i, ranges in columns.items():
        for lo, hi in ranges:
            cells.update((i, j) for j in range(lo, hi + 1))
    return sorted(cells)


def boxes_of_segments(segments: Sequence[Segment], k: int, window: Optional[Window] = None) -> int:
    """Exact number of grid cells meeting the union of the segments."""
    window = window or Window.unit()
    X0, Y0, X1, Y1, h, nx, ny = _grid_shape(window, k)
    columns: dict = {}
    for seg in segments:
        for i, jl, jh in _segment_columns(seg, X0, Y0, h, nx, ny):
            columns.setdefault(i, []).append((jl, jh))
    return sum(merged_count(r) for r in columns.values())


def _scaled(seg: Segment, X0, Y0, h):
    """Endpoints in cell units over one common denominator ``D``."""
    (xa, ya), (xb, yb) = seg.p0, seg.p1
    us = [(Fraction(v) - o) / h for v, o in ((xa, X0), (ya, Y0), (xb, X0), (yb, Y0))]
    D = math.lcm(*(u.denominator for u in us))
    return tuple(u.numerator * (D // u.denominator) for u in us), D


def _meets_cell(pts, D, i, j, last_col, last_row) -> bool:
    """Does the scaled segment meet the half-open cell ``(i, j)``?

    Liang-Barsky clipping against the closed cell with parameters kept as
    integer ratios, then a check that the clipped piece is not confined to an
    excluded (closing) edge.
    """
    x0, y0, x1, y1 = pts
    dx, dy = x1 - x0, y1 - y0
    bx0, by0, bx1, by1 = i * D, j * D, (i + 1) * D, (j + 1) * D
    n0, d0, n1, d1 = 0, 1, 1, 1
    for p, q in ((-dx, x0 - bx0), (dx, bx1 - x0), (-dy, y0 - by0), (dy, by1 - y0)):
        if p == 0:
            if q < 0:
                return False
            continue
        if p < 0:
            # r = q / p = (-q) / (-p) enters the segment
            if -q * d0 > n0 * -p:
                n0, d0 = -q, -p
        elif q * d1 < n1 * p:
            n1, d1 = q, p
        if n0 * d1 > n1 * d0:
            return False
    # candidate points t0, t1 and their midpoint, each as (num, den)
    for tn, td in ((n0, d0), (n1, d1), (n0 * d1 + n1 * d0, 2 * d0 * d1)):
        if (x0 * td + tn * dx < bx1 * td or last_col) and (y0 * td + tn * dy < by1 * td or last_row):
            return True
    return False


def boxes_of_segments_bruteforce(segments: Sequence[Segment], k: int, window: Optional[Window] = None) -> int:
    """Test every cell against every segment (slow reference count)."""
    window = window or Window.unit()
    X0, Y0, X1, Y1, h, nx, ny = _grid_shape(window, k)
    scaled = [_scaled(seg, X0, Y0, h) for seg in segments]
    count = 0
    for i in range(nx):
        for j in range(ny):
            if any(_meets_cell(pts, D, i, j, i == nx - 1, j == ny - 1) for pts, D in scaled):
                count += 1
    return count


def _interval_cells(lo, hi, k: int) -> tuple:
    n = 1 << k
    lo_f, hi_f = to_fraction(lo), to_fraction(hi)
    jl = (lo_f.numerator << k) // lo_f.denominator
    jh = (hi_f.numerator << k) // hi_f.denominator
    return max(0, min(jl, n - 1)), max(0, min(jh, n - 1))


def boxes_of_intervals(intervals, k: int) -> int:
    """Cells of length ``2**-k`` in ``[0, 1]`` meeting the union of closed intervals."""
    ranges = []
    for iv in intervals:
        lo, hi = (iv.lo, iv.hi) if isinstance(iv, Enclosure) else iv
        ranges.append(_interval_cells(lo, hi, k))
    return merged_count(ranges)


def slope_cover_check(n: int, cap: int = 6) -> dict:
    """Certify that ``2**n`` block images of diameter ``<= 2**-(n*n)`` cover the slopes."""
    if not 1 <= n <= cap:
        raise ValueError(f"n must lie in 1..{cap}")
    ivs = [slope_block_image(n, k) for k in range(1 << n)]
    bound = Dyadic.pow2(-n * n)
    max_d = max(iv.width for iv in ivs)
    return {
        "n": n,
        "intervals": len(ivs),
        "max_diameter": max_d,
        "bound": bound,
        "certified": all(iv.width <= bound for iv in ivs),
        "cover": ivs,
    }


def slope_interval_cover(curve: Curve, depth: int, p: int = 64) -> list:
    """Normalised slope images ``[f(x_j+), f(x_{j+1}-)]`` of the depth grid.

    Slopes of a convex curve are monotone, so each image lies in that interval;
    when the slope has the intermediate value property it is the interval.
    """
    n = 1 << depth
    lo0 = curve.slope(Dyadic(0), "right", p).lo.to_fraction()
    hi1 = curve.slope(Dyadic(1), "left", p).hi.to_fraction()
    span = hi1 - lo0
    out = []
    for j in range(n):
        a = curve.slope(Dyadic(j, depth), "right", p).lo.to_fraction()
        b = curve.slope(Dyadic(j + 1, depth), "left", p).hi.to_fraction()
        out.append(((a - lo0) / span, (b - lo0) / span))
    return out


def fit_dimension(scales: Sequence[int], counts: Sequence[int], fit: Optional[tuple] = None) -> tuple:
    """Least-squares slope of ``log2 N`` against ``k`` and its RMS residual."""
    pairs = [(k, c) for k, c in zip(scales, counts) if fit is None or fit[0] <= k <= fit[1]]
    if len(pairs) < 2:
        raise ValueError("need at least two scales in the fit range")
    ks = np.array([k for k, _ in pairs], dtype=float)
    logs = np.log2(np.array([c for _, c in pairs], dtype=float))
    slope, intercept = np.polyfit(ks, logs, 1)
    resid = logs - (slope * ks + intercept)
    return float(slope), float(np.sqrt(np.mean(resid**2)))


@dataclass
class BoxCountReport:
    window: Window
    scales: list
    counts: list
    fit_range: tuple
    fitted_dim: float = field(init=False)
    residual: float = field(init=False)

    def __post_init__(self):
        self.fitted_dim, self.residual = fit_dimension(self.scales, self.counts, self.fit_range)

    def refinement_ok(self, planar: bool = True) -> bool:
        factor = 4 if planar else 2
        return all(b >= a and b <= factor * a for a, b in zip(self.counts, self.counts[1:]))

    def to_json(self) -> dict:
        return {
            "window": self.window.to_json(),
            "scales": list(self.scales),
            "counts": list(self.counts),
            "fit": {"range": list(self.fit_range), "dim": f"{self.fitted_dim:.6f}", "residual": f"{self.residual:.6f}"},
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1, sort_keys=True)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["k", "count"])
        for k, c in zip(self.scales, self.counts):
            w.writerow([k, c])
        return buf.getvalue()


def default_fit(kmin: int, kmax: int) -> tuple:
    """Drop the two coarsest scales when at least three remain."""
    return (kmin + 2, kmax) if kmax - kmin >= 4 else (kmin, kmax)


def family_report(family: LineFamily, kmin: int, kmax: int, fit: Optional[tuple] = None) -> BoxCountReport:
    segs = family.segments()
    scales = list(range(kmin, kmax + 1))
    counts = [boxes_of_segments(segs, k, family.window) for k in scales]
    return BoxCountReport(family.window, scales, counts, tuple(fit or default_fit(kmin, kmax)))
