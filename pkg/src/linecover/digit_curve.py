"""Certified evaluation of the digit-square curve and the smooth baseline.

The digit function sends ``x = sum w_i 2**-i`` to ``f(x) = sum w_i 2**-(i*i)``;
its integral ``F`` is strictly convex and every one-sided tangent slope lies
in the range of ``f``, a set that is covered by ``2**n`` intervals of
diameter ``2**-(n*n)``.

All evaluations return :class:`~linecover.exactnum.Enclosure` objects whose
width is at most ``2**-p``.
"""
from __future__ import annotations

import csv
import io
from fractions import Fraction
from functools import lru_cache

from .exactnum import DigitString, Dyadic, Enclosure, Point, as_point, to_digits, to_fraction

__all__ = [
    "Curve",
    "Parabola",
    "DigitCurve",
    "tbinc_f",
    "tbinc_f_sided",
    "tbinc_tail",
    "tbinc_F",
    "slope_block_image",
    "tail_depth",
    "riemann_bracket",
    "sample_rows",
    "rows_to_csv",
]

SIDES = ("left", "right", "twosided")
# digits beyond this are summed with a tail certificate instead of exactly
EXACT_DIGIT_CAP = 96


class Curve:
    """Graph of a convex ``F`` on ``[0, 1]`` with monotone slope ``f``.

    Subclasses provide certified values of ``F``, one-sided slopes, and a
    certified lower bound on how much the slope grows across an interval.
    """

    name = "curve"
    convex = True

    def F(self, x, p: int = 40) -> Enclosure:
        raise NotImplementedError

    def slope(self, x, side: str = "twosided", p: int = 40) -> Enclosure:
        raise NotImplementedError

    def f(self, x, p: int = 40) -> Enclosure:
        """Slope with the right-continuous convention (left limit at 1)."""
        x = as_point(x)
        return self.slope(x, "left" if x == 1 else "right", p)

    def increase_lower(self, x, y) -> Dyadic:
        """Certified ``L >= 0`` with ``f(y-) - f(x+) >= L`` for ``x < y``."""
        raise NotImplementedError

    def is_dyadic_break(self, x) -> bool:
        """True where left and right slopes may differ."""
        return False

    def __repr__(self):
        return f"{type(self).__name__}()"


def _check_unit(x) -> Point:
    x = as_point(x)
    if not 0 <= to_fraction(x) <= 1:
        raise ValueError(f"{x} outside [0, 1]")
    return x


class Parabola(Curve):
    """``F(x) = x**2`` with slope ``2x``; the smooth baseline."""

    name = "parabola"

    def F(self, x, p=40):
        x = as_point(x)
        return Enclosure.around(to_fraction(x) ** 2, p) if isinstance(x, Fraction) else Enclosure.exact(x * x)

    def slope(self, x, side="twosided", p=40):
        x = as_point(x)
        return Enclosure.around(2 * to_fraction(x), p)

    def increase_lower(self, x, y):
        return Dyadic.floor(2 * (to_fraction(y) - to_fraction(x)), 64)


# ---------------------------------------------------------------------------
# digit-square function


def tail_depth(p: int) -> int:
    """Smallest ``m`` with ``2**(1 - (m+1)**2) <= 2**-p``."""
    m = 0
    while (m + 1) ** 2 - 1 < p:
        m += 1
    return m


@lru_cache(maxsize=None)
def tbinc_tail(n: int, p: int = 40) -> Enclosure:
    """Enclosure of ``T_n = sum_{i>n} 2**-(i*i)`` with width ``<= 2**-p``.

    The lower end is an exact partial sum with at least one term, so it is
    strictly positive.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    N = max(n + 1, tail_depth(p))
    num = 0
    for i in range(n + 1, N + 1):
        num += 1 << (N * N - i * i)
    partial = Dyadic(num, N * N)
    return Enclosure(partial, partial + Dyadic.pow2(1 - (N + 1) ** 2))


def _head(digits) -> Dyadic:
    m = len(digits)
    num = 0
    for i, w in enumerate(digits, start=1):
        if w:
            num += 1 << (m * m - i * i)
    return Dyadic(num, m * m)


def tbinc_f(x, p: int = 40) -> Enclosure:
    """Enclosure of ``f(x)``; exact for dyadic ``x`` of moderate exponent.

    ``x`` may be a Dyadic, a Fraction, or a :class:`DigitString`; an inexact
    digit string stands for every number with those leading digits.
    """
    if isinstance(x, DigitString):
        head = _head(x.digits)
        if x.exact:
            return Enclosure.exact(head)
        return Enclosure(head, head + tbinc_tail(len(x.digits), p + 1).hi)
    x = _check_unit(x)
    if x == 1:
        return tbinc_tail(0, p)
    if isinstance(x, Dyadic) and x.exp <= max(EXACT_DIGIT_CAP, tail_depth(p)):
        if x.exp == 0:
            return Enclosure.exact(Dyadic(0))
        return Enclosure.exact(_head(to_digits(x, x.exp).digits))
    ds = to_digits(x, tail_depth(p + 1))
    return tbinc_f(ds, p) if not ds.exact else Enclosure.exact(_head(ds.digits))


def tbinc_f_sided(x, side: str, p: int = 40) -> Enclosure:
    """One-sided limit of ``f`` at ``x``.

    The right limit is ``f(x)`` itself.  At a dyadic ``x = k/2**n`` the left
    limit uses the expansion ending in ones:
    ``f(x-) = f(x - 2**-n) + T_n``.
    """
    x = _check_unit(x)
    if side == "right":
        if x == 1:
            raise ValueError("right limit undefined at 1")
        return tbinc_f(x, p)
    if side != "left":
        raise ValueError(f"bad side {side!r}")
    if x == 0:
        raise ValueError("left limit undefined at 0")
    if isinstance(x, Dyadic):
        n = x.exp
        return tbinc_f(x - Dyadic.pow2(-n), p + 1) + tbinc_tail(n, p + 1)
    return tbinc_f(x, p)


def tbinc_F(x, p: int = 40) -> Enclosure:
    """Enclosure of ``F(x) = integral_0^x f``.

    Uses the shift recursion on ``F_s``, the integral of
    ``f_s(t) = sum_i t_i 2**-((i+s)**2)``:

    * ``F_s(y) = F_{s+1}(2y) / 2`` for ``y <= 1/2``
    * ``F_s(y) = F_{s+1}(1)/4 + 2**-((1+s)**2) (y - 1/2) + F_{s+1}(2y-1) / 2``
    * ``F_s(1) = T_s / 2``
    """
    y = to_fraction(_check_unit(x))
    coef = Fraction(1)
    s = 0
    exact = Fraction(0)
    tails = []  # (coefficient, index) of T-terms
    cap = max(tail_depth(p + 2) + 2, 1)
    dyadic_exp = (y.denominator.bit_length() - 1) if y.denominator & (y.denominator - 1) == 0 else None
    if dyadic_exp is not None and dyadic_exp <= EXACT_DIGIT_CAP:
        cap = max(cap, dyadic_exp + 1)
    half = Fraction(1, 2)
    remainder = None
    for _ in range(cap):
        if y == 0:
            break
        if y == 1:
            tails.append((coef / 2, s))
            break
        if y <= half:
            y = 2 * y
        else:
            tails.append((coef / 4, s + 1))
            exact += coef * Fraction(1, 1 << (1 + s) ** 2) * (y - half)
            y = 2 * y - 1
        coef /= 2
        s += 1
    else:
        if y != 0:
            remainder = (coef / 2, s)  # F_s(y) in [0, T_s / 2]
    q = p + 4 + len(tails).bit_length()
    total = Enclosure.around(exact, q)
    for c, idx in tails:
        total = total + tbinc_tail(idx, q).scale(Dyadic.coerce(c))
    if remainder is not None:
        c, idx = remainder
        total = total + Enclosure(Dyadic(0), tbinc_tail(idx, q).hi * Dyadic.coerce(c))
    return total


def slope_block_image(n: int, k: int, p: int | None = None) -> Enclosure:
    """Interval containing ``f([k/2**n, (k+1)/2**n))``.

    The lower end is the exact head ``sum_{i<=n} w_i 2**-(i*i)`` of the
    block; the upper end adds an upper bound of ``T_n``.
    """
    if n < 0 or not 0 <= k < (1 << n):
        raise IndexError(f"block {k} out of range for depth {n}")
    head = _head(tuple(int(c) for c in format(k, f"0{n}b"))) if n else Dyadic(0)
    q = p if p is not None else n * n + 32
    return Enclosure(head, head + tbinc_tail(n, q).hi)


class DigitCurve(Curve):
    """Integral of the digit-square function; one-sided tangents only."""

    name = "tbinc"

    def F(self, x, p=40):
        return tbinc_F(x, p)

    def slope(self, x, side="twosided", p=40):
        x = as_point(x)
        if side == "twosided":
            if self.is_dyadic_break(x):
                raise ValueError(f"no two-sided slope at dyadic point {x}")
            return tbinc_f(x, p)
        return tbinc_f_sided(x, side, p)

    def is_dyadic_break(self, x):
        x = as_point(x)
        return isinstance(x, Dyadic) and 0 < x < 1

    def increase_lower(self, x, y):
        x, y = as_point(x), as_point(y)
        lo = Dyadic(0)
        q = 64
        while q <= 1 << 14:
            lo = tbinc_f_sided(y, "left", q).lo - tbinc_f_sided(x, "right", q).hi
            if lo > 0:
                return lo
            q *= 2
        return max(lo, Dyadic(0))


def riemann_bracket(curve: Curve, points, q: int, p: int = 64) -> list:
    """Lower/upper Riemann sums of the monotone slope on ``2**q`` panels.

    Each point must lie on the panel grid.  Since ``f`` is nondecreasing,
    ``f(left end) h <= integral over a panel <= f(right end) h``, so the
    result encloses ``F`` independently of any closed form.
    """
    idx = []
    for x in points:
        fx = to_fraction(as_point(x)) * (1 << q)
        if fx.denominator != 1 or not 0 <= fx <= 1 << q:
            raise ValueError(f"{x} is not on the 2**-{q} grid")
        idx.append(int(fx))
    top = max(idx, default=0)
    vals = [curve.f(Dyadic(j, q), p) for j in range(top + 1)]
    lo_sum, hi_sum = [Dyadic(0)], [Dyadic(0)]
    for j in range(top):
        lo_sum.append(lo_sum[-1] + vals[j].lo)
        hi_sum.append(hi_sum[-1] + vals[j + 1].hi)
    return [Enclosure(lo_sum[j].half(q), hi_sum[j].half(q)) for j in idx]


# ---------------------------------------------------------------------------
# sampling export


def sample_rows(curve: Curve, grid: int, p: int = 40):
    """Rows ``(x, f_lo, f_hi, F_lo, F_hi)`` on the grid ``j / 2**grid``."""
    rows = []
    for j in range((1 << grid) + 1):
        x = Dyadic(j, grid)
        fv, Fv = curve.f(x, p), curve.F(x, p)
        rows.append((x, fv.lo, fv.hi, Fv.lo, Fv.hi))
    return rows


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["x", "f_lo", "f_hi", "F_lo", "F_hi"])
    for r in rows:
        w.writerow([v.exact_decimal() for v in r])
    return buf.getvalue()
