"""Covering line families and their certificates.

A non-vertical line ``y = a x + b`` is stored through its code point
``(a, b)``; for tangent lines both coordinates are enclosures.  Vertical
lines have no code point.
"""
from __future__ import annotations

import csv
import enum
import io
import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .cantor_c1 import CantorCurve, cover_rule
from .digit_curve import Curve, DigitCurve, Parabola
from .exactnum import Dyadic, Enclosure, as_point, to_fraction

__all__ = [
    "Verdict",
    "PrecisionError",
    "Window",
    "Line",
    "LineFamily",
    "Segment",
    "SampleSpec",
    "BelowVerdict",
    "tangent_at",
    "vertical_at",
    "realize",
    "verify_code_lipschitz",
    "verify_below",
    "single_intersection",
    "covering_check",
    "build_family",
    "clip",
    "curve_by_name",
    "segments_to_csv",
]


class Verdict(enum.Enum):
    TRUE = "certified_true"
    FALSE = "certified_false"
    INCONCLUSIVE = "inconclusive"
    SINGLE = "certified_single"


class PrecisionError(RuntimeError):
    """Requested width not reached within the internal depth cap."""


def curve_by_name(name: str) -> Curve:
    curves = {"parabola": Parabola, "tbinc": DigitCurve, "tcantc": CantorCurve}
    try:
        return curves[name]()
    except KeyError:
        raise ValueError(f"unknown curve {name!r}; expected one of {sorted(curves)}") from None


@dataclass(frozen=True)
class Window:
    x0: Dyadic
    y0: Dyadic
    x1: Dyadic
    y1: Dyadic

    @classmethod
    def of(cls, x0, y0, x1, y1) -> "Window":
        return cls(*(Dyadic.coerce(as_point(v)) for v in (x0, y0, x1, y1)))

    @classmethod
    def unit(cls) -> "Window":
        return cls.of(0, 0, 1, 1)

    def to_json(self) -> list:
        return [v.to_json() for v in (self.x0, self.y0, self.x1, self.y1)]

    @classmethod
    def from_json(cls, obj) -> "Window":
        return cls(*(Dyadic.from_json(v) for v in obj))


@dataclass(frozen=True)
class Line:
    kind: str  # "tangent" | "vertical"
    x0: object
    side: Optional[str] = None
    a: Optional[Enclosure] = None
    b: Optional[Enclosure] = None
    curve: str = ""

    @property
    def is_vertical(self) -> bool:
        return self.kind == "vertical"

    def same_as(self, other: "Line") -> bool:
        """Same curve tangent (anchor and side), or the same code point."""
        if self.kind != other.kind:
            return False
        if self.curve and self.curve == other.curve:
            return (to_fraction(self.x0), self.side) == (to_fraction(other.x0), other.side)
        return self.is_vertical and self.x0 == other.x0 or (self.a, self.b) == (other.a, other.b)

    def to_json(self) -> dict:
        out = {"kind": self.kind, "x0": _point_json(self.x0)}
        if not self.is_vertical:
            out["side"] = self.side
            out["a"] = self.a.to_json()
            out["b"] = self.b.to_json()
        return out

    @classmethod
    def from_json(cls, obj: dict, curve: str = "") -> "Line":
        x0 = _point_from_json(obj["x0"])
        if obj["kind"] == "vertical":
            return cls("vertical", x0, curve=curve)
        return cls("tangent", x0, obj.get("side"), Enclosure.from_json(obj["a"]), Enclosure.from_json(obj["b"]), curve)


def _point_json(x):
    x = as_point(x)
    if isinstance(x, Dyadic):
        return x.to_json()
    return {"frac": f"{x.numerator}/{x.denominator}"}


def _point_from_json(obj):
    if "frac" in obj:
        return Fraction(obj["frac"])
    return Dyadic.from_json(obj)


@dataclass(frozen=True)
class Segment:
    p0: tuple
    p1: tuple


@dataclass
class LineFamily:
    curve: str
    lines: list
    window: Window

    def to_json(self) -> dict:
        return {"curve": self.curve, "window": self.window.to_json(), "lines": [ln.to_json() for ln in self.lines]}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1, sort_keys=True)

    @classmethod
    def from_json(cls, obj: dict) -> "LineFamily":
        curve = obj["curve"]
        return cls(curve, [Line.from_json(o, curve) for o in obj["lines"]], Window.from_json(obj["window"]))

    def segments(self) -> list:
        out = []
        for ln in self.lines:
            seg = clip(ln, self.window)
            if seg is not None:
                out.append(seg)
        return out


# ---------------------------------------------------------------------------
# construction


def tangent_at(curve: Curve, x0, side: str = "twosided", p: int = 40) -> Line:
    """Tangent line at ``x0`` with the chosen one-sided slope.

    Raises :class:`PrecisionError` when the code point cannot be enclosed to
    width ``2 * 2**-p``.
    """
    x0 = as_point(x0)
    if not 0 <= to_fraction(x0) <= 1:
        raise ValueError(f"{x0} outside [0, 1]")
    a = curve.slope(x0, side, p)
    Fx = curve.F(x0, p)
    xe = Enclosure.around(x0, p + 8)
    b = Fx - a * xe
    limit = Dyadic.pow2(1 - p)
    if a.width > limit or b.width > limit:
        raise PrecisionError(f"tangent at {x0}: widths {float(a.width):.3g}, {float(b.width):.3g} exceed 2^{1 - p}")
    return Line("tangent", x0, side, a, b, curve.name)


def vertical_at(x0, curve: str = "") -> Line:
    return Line("vertical", as_point(x0), curve=curve)


def realize(line: Line, t) -> tuple:
    """The point ``(t, a t + b)`` of a code-point line."""
    if line.is_vertical:
        raise TypeError("vertical lines have no code point")
    te = Enclosure.around(as_point(t), 64)
    return te, line.a * te + line.b


# ---------------------------------------------------------------------------
# certificates


def _lipschitz_verdict(l1: Line, l2: Line) -> Verdict:
    db = abs(l1.b - l2.b)
    da = abs(l1.a - l2.a)
    if db.hi <= da.lo:
        return Verdict.TRUE
    if db.lo > da.hi:
        return Verdict.FALSE
    return Verdict.INCONCLUSIVE


def verify_code_lipschitz(l1: Line, l2: Line, refine: bool = True, max_p: int = 1024) -> Verdict:
    """Certify ``|b1 - b2| <= |a1 - a2|`` for two tangent lines.

    When the stored enclosures straddle and both lines name their curve, the
    code points are recomputed at doubled precision up to ``max_p``.
    """
    if l1.is_vertical or l2.is_vertical:
        raise TypeError("code-point check needs tangent lines")
    if l1.same_as(l2):
        return Verdict.TRUE
    verdict = _lipschitz_verdict(l1, l2)
    if verdict is not Verdict.INCONCLUSIVE or not refine or not l1.curve or l1.curve != l2.curve:
        return verdict
    curve = curve_by_name(l1.curve)
    q = 64
    while verdict is Verdict.INCONCLUSIVE and q <= max_p:
        r1 = tangent_at(curve, l1.x0, l1.side, q)
        r2 = tangent_at(curve, l2.x0, l2.side, q)
        verdict = _lipschitz_verdict(r1, r2)
        q *= 2
    return verdict


@dataclass
class BelowVerdict:
    certified_below: bool
    equality_blocks: list
    inconclusive_blocks: list
    lower_bounds: dict = field(default_factory=dict)


def _right_bound(curve: Curve, line: Line, x0, u, p):
    t = (to_fraction(x0) + to_fraction(u)) / 2
    t = as_point(t)
    best = curve.increase_lower(x0, t)
    try:
        alt = curve.slope(t, "left", p).lo - line.a.hi
        best = max(best, alt)
    except ValueError:
        pass
    return Dyadic.floor(to_fraction(u) - to_fraction(t), 80) * best if best > 0 else Dyadic(0)


def _left_bound(curve: Curve, line: Line, x0, v, p):
    t = as_point((to_fraction(x0) + to_fraction(v)) / 2)
    best = curve.increase_lower(t, x0)
    try:
        alt = line.a.lo - curve.slope(t, "right", p).hi
        best = max(best, alt)
    except ValueError:
        pass
    return Dyadic.floor(to_fraction(t) - to_fraction(v), 80) * best if best > 0 else Dyadic(0)


def verify_below(curve: Curve, line: Line, g: int, p: int = 40) -> BelowVerdict:
    """Certify that a tangent line lies strictly below the curve off its touch point.

    ``[0, 1]`` is cut into ``2**g`` closed blocks.  Blocks whose closure
    holds the touch point ``x0`` are equality blocks.  Right of ``x0`` the gap
    ``F - line`` is nondecreasing (slopes are monotone), so its infimum on a
    block ``[u, v]`` is ``integral_{x0}^{u} (f - a)``, bounded below by
    ``(u - t) * (f(t-) - a)`` at the midpoint ``t`` of ``x0`` and ``u``.  Left
    blocks are handled symmetrically.  A block is certified when that bound
    is positive; further blocks on the same side inherit it.
    """
    if line.is_vertical:
        raise TypeError("verify_below needs a tangent line")
    x0 = as_point(line.x0)
    xf = to_fraction(x0)
    n = 1 << g
    equality = [j for j in range(n) if Fraction(j, n) <= xf <= Fraction(j + 1, n)]
    inconclusive = []
    bounds = {}
    known = Dyadic(0)
    for j in range(equality[-1] + 1, n):
        u = Dyadic(j, g)
        if known <= 0:
            known = _right_bound(curve, line, x0, u, p)
        if known > 0:
            bounds[j] = known
        else:
            inconclusive.append(j)
    known = Dyadic(0)
    for j in range(equality[0] - 1, -1, -1):
        v = Dyadic(j + 1, g)
        if known <= 0:
            known = _left_bound(curve, line, x0, v, p)
        if known > 0:
            bounds[j] = known
        else:
            inconclusive.append(j)
    return BelowVerdict(not inconclusive, equality, sorted(inconclusive), bounds)


def single_intersection(curve: Curve, line: Line, g: int, p: int = 40) -> Verdict:
    """``SINGLE`` when the line meets the graph in one point at grid resolution."""
    if line.is_vertical:
        return Verdict.SINGLE
    res = verify_below(curve, line, g, p)
    eq = res.equality_blocks
    contiguous = eq == list(range(eq[0], eq[0] + len(eq)))
    if res.certified_below and contiguous and len(eq) <= 2:
        return Verdict.SINGLE
    return Verdict.INCONCLUSIVE


def _misses_point(curve: Curve, line: Line, x, Fx: Enclosure, p: int) -> bool:
    """Certify that ``line`` does not pass through ``(x, F(x))``."""
    if line.is_vertical:
        return line.x0 != x
    if line.x0 == x:
        return False
    _, y = realize(line, x)
    if y.hi < Fx.lo or y.lo > Fx.hi:
        return True
    # enclosures overlap: fall back on the structural gap F - line > 0
    bound = _right_bound(curve, line, line.x0, x, p) if x > line.x0 else _left_bound(curve, line, line.x0, x, p)
    return bound > 0


def covering_check(curve: Curve, family: LineFamily, p: int = 40) -> list:
    """For each line's anchor ``x0``, the number of family lines through ``(x0, F(x0))``.

    The anchor's own line counts when it passes through the point within
    enclosure widths; any other line counts unless it is certified to miss.
    A covering family gives 1 everywhere.
    """
    out = []
    for own in family.lines:
        x = own.x0
        Fx = curve.F(x, p)
        hits = 0
        for line in family.lines:
            if line is own:
                if line.is_vertical:
                    hits += 1
                else:
                    _, y = realize(line, x)
                    hits += y.overlaps(Fx)
            elif not _misses_point(curve, line, x, Fx, p):
                hits += 1
        out.append((x, hits))
    return out


# ---------------------------------------------------------------------------
# families


@dataclass(frozen=True)
class SampleSpec:
    """How tangent points are chosen.

    ``dyadic-grid``: ``count`` points ``j / count`` (``count`` a power of 2);
    ``seeded-random``: ``count`` distinct points of the grid ``2**-depth``;
    ``points``: the explicit ``points`` tuple.  ``sides`` is ``right``,
    ``left``, ``twosided`` or ``mixed`` (random one-sided choice).
    """

    count: int = 1
    scheme: str = "dyadic-grid"
    sides: str = "right"
    seed: int = 0
    depth: int = 10
    points: tuple = ()


def _sample_points(spec: SampleSpec) -> list:
    if spec.count < 1 and spec.scheme != "points":
        raise ValueError("count must be >= 1")
    if spec.scheme == "points":
        return [as_point(x) for x in spec.points]
    if spec.scheme == "dyadic-grid":
        return [as_point(Fraction(j, spec.count)) for j in range(spec.count)]
    if spec.scheme == "seeded-random":
        rng = random.Random(spec.seed)
        ks = sorted(rng.sample(range(1, 1 << spec.depth), spec.count))
        return [Dyadic(k, spec.depth) for k in ks]
    raise ValueError(f"unknown scheme {spec.scheme!r}")


def _side_for(curve: Curve, x, spec: SampleSpec, rng: random.Random) -> str:
    if not isinstance(curve, DigitCurve):
        return "twosided"
    if x == 0:
        return "right"
    if x == 1:
        return "left"
    if not curve.is_dyadic_break(x):
        return "twosided"
    if spec.sides == "mixed":
        return rng.choice(("left", "right"))
    return "right" if spec.sides == "twosided" else spec.sides


def build_family(curve: Curve, spec: SampleSpec, window: Optional[Window] = None, p: int = 40) -> LineFamily:
    """Deterministic covering family; the C^1 Cantor curve uses its cover rule."""
    window = window or Window.unit()
    rng = random.Random(spec.seed ^ 0x5EED)
    lines = []
    for x in _sample_points(spec):
        if isinstance(curve, CantorCurve):
            rule = cover_rule(x, registry=curve.registry)
            if rule["rule"] == "vertical":
                lines.append(vertical_at(x, curve.name))
                continue
        lines.append(tangent_at(curve, x, _side_for(curve, x, spec, rng), p))
    return LineFamily(curve.name, lines, window)


def clip(line: Line, window: Window) -> Optional[Segment]:
    """Part of the line inside the closed window, using the code-point midpoints."""
    X0, Y0, X1, Y1 = (v.to_fraction() for v in (window.x0, window.y0, window.x1, window.y1))
    if line.is_vertical:
        x = to_fraction(line.x0)
        if X0 <= x <= X1:
            return Segment((x, Y0), (x, Y1))
        return None
    a, b = line.a.mid.to_fraction(), line.b.mid.to_fraction()
    if a == 0:
        if Y0 <= b <= Y1:
            return Segment((X0, b), (X1, b))
        return None
    xa, xb = (Y0 - b) / a, (Y1 - b) / a
    lo, hi = max(X0, min(xa, xb)), min(X1, max(xa, xb))
    if lo > hi:
        return None
    return Segment((lo, a * lo + b), (hi, a * hi + b))


def _frac_str(v: Fraction) -> str:
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


def segments_to_csv(segments: Sequence[Segment]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["x0", "y0", "x1", "y1"])
    for s in segments:
        w.writerow([_frac_str(v) for v in (*s.p0, *s.p1)])
    return buf.getvalue()
