"""Iterated Cantor staircase with a strictly increasing continuous limit.

The base set ``C`` is the symmetric two-child Cantor set whose generation-``g``
intervals have length ``L_g = 2**-(g*(g+1))``.  ``phi`` is its staircase.
Stage-``n`` gaps are the maximal open intervals of ``[0,1] minus C_n``; every
stage-``n`` gap ``(a, b)`` with index ``i`` receives a copy of ``C`` (which
builds ``C_{n+1}``) and a copy of ``phi`` with weight ``2**-(n+i)``:

    f_{n+1}(x) = f_n(x) + sum_i 2**-(n+i) phi((x - a_{n,i}) / (b_{n,i} - a_{n,i}))

Child gaps are indexed by the pairing ``J(i, l) = (i+l)(i+l+1)/2 + l``
which is injective and always exceeds the parent index ``i``.
"""
from __future__ import annotations

import bisect
import json
import math
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Optional

from .digit_curve import Curve
from .exactnum import Dyadic, Enclosure, as_point, to_fraction

__all__ = [
    "CantorSpec",
    "GapRef",
    "GapRegistry",
    "Membership",
    "pair_index",
    "unpair_index",
    "phi",
    "in_Cstar",
    "cantor_fn",
    "cantor_f",
    "cantor_F",
    "gap_image_bound",
    "cover_rule",
    "CantorCurve",
    "DEFAULT_SPEC",
    "REGISTRY",
    "check_nesting",
    "check_disjoint",
    "PanelBudgetExceeded",
]


@dataclass(frozen=True)
class CantorSpec:
    """Length rule ``L_g = 2**-exponent(g)`` with ``exponent(g) = g*(g+1)``.

    ``scale`` multiplies the default schedule; ``scale=1`` is the standard set.
    """

    scale: int = 1

    def exponent(self, g: int) -> int:
        return self.scale * g * (g + 1)

    def length(self, g: int) -> Dyadic:
        return Dyadic.pow2(-self.exponent(g))

    def box_exponent(self, g: int) -> Fraction:
        """``log 2**g / log(1/L_g)``: the generation-``g`` box-count ratio."""
        return Fraction(g, self.exponent(g))

    def local_gap(self, l: int) -> tuple:
        """Endpoints of the ``l``-th gap of ``C`` (generation, then left to right)."""
        if l < 1:
            raise IndexError("gap index starts at 1")
        g = l.bit_length() - 1
        pos = l - (1 << g)
        c = Dyadic(0)
        for j in range(1, g + 1):
            if (pos >> (g - j)) & 1:
                c = c + self.length(j - 1) - self.length(j)
        return c + self.length(g + 1), c + self.length(g) - self.length(g + 1)


DEFAULT_SPEC = CantorSpec()


@lru_cache(maxsize=4096)
def _L(g: int, scale: int = 1) -> Fraction:
    return Fraction(1, 1 << (scale * g * (g + 1)))


def pair_index(i: int, l: int) -> int:
    """Global index of the ``l``-th local gap planted inside parent gap ``i``."""
    return (i + l) * (i + l + 1) // 2 + l


def unpair_index(j: int) -> Optional[tuple]:
    """Inverse of :func:`pair_index`, or ``None`` if ``j`` is not a child index."""
    if j < 4:
        return None
    w = (math.isqrt(8 * (j - 1) + 1) - 1) // 2
    l = j - w * (w + 1) // 2
    i = w - l
    if l < 1 or i < 1:
        return None
    return i, l


@dataclass(frozen=True)
class GapRef:
    n: int
    i: int
    a: Dyadic
    b: Dyadic

    @property
    def weight(self) -> Dyadic:
        return Dyadic.pow2(-(self.n + self.i))

    @property
    def length(self) -> Dyadic:
        return self.b - self.a

    def child(self, l: int, spec: CantorSpec = DEFAULT_SPEC) -> "GapRef":
        la, lb = spec.local_gap(l)
        d = self.length
        return GapRef(self.n + 1, pair_index(self.i, l), self.a + d * la, self.a + d * lb)

    def contains(self, other: "GapRef") -> bool:
        return self.a <= other.a and other.b <= self.b

    def to_json(self) -> dict:
        return {"n": self.n, "i": self.i, "a": self.a.to_json(), "b": self.b.to_json()}


# ---------------------------------------------------------------------------
# staircase


@dataclass(frozen=True)
class _Descent:
    lo: Dyadic
    hi: Dyadic
    kind: str  # "endpoint" | "gap" | "member"
    gap: int = 0  # local gap index when kind == "gap"
    generations: int = 0


def _descend(s: Fraction, gens: int, scale: int = 1) -> _Descent:
    if s <= 0:
        return _Descent(Dyadic(0), Dyadic(0), "endpoint" if s == 0 else "outside")
    if s >= 1:
        return _Descent(Dyadic(1), Dyadic(1), "endpoint" if s == 1 else "outside")
    c = Fraction(0)
    pos = 0
    for g in range(gens):
        Lg = _L(g, scale)
        if s == c:
            return _Descent(Dyadic(pos, g), Dyadic(pos, g), "endpoint", generations=g)
        if s == c + Lg:
            return _Descent(Dyadic(pos + 1, g), Dyadic(pos + 1, g), "endpoint", generations=g)
        Lc = _L(g + 1, scale)
        if s <= c + Lc:
            pos = 2 * pos
        elif s >= c + Lg - Lc:
            c = c + Lg - Lc
            pos = 2 * pos + 1
        else:
            v = Dyadic(2 * pos + 1, g + 1)
            return _Descent(v, v, "gap", gap=(1 << g) + pos, generations=g + 1)
    return _Descent(Dyadic(pos, gens), Dyadic(pos + 1, gens), "member", generations=gens)


def phi(x, d: int = 40, spec: CantorSpec = DEFAULT_SPEC) -> Enclosure:
    """Cantor staircase of ``C``; 0 left of the unit interval, 1 right of it."""
    r = _descend(to_fraction(x), d, spec.scale)
    return Enclosure(r.lo, r.hi)


def _phi_integral(s: Fraction, gens: int, scale: int = 1) -> tuple:
    """Bounds on ``integral_0^s phi`` for ``s`` in ``[0, 1]``.

    Each generation-``g`` member interval is symmetric, so the mean of ``phi``
    over it is its left plateau value plus ``2**-(g+1)``.
    """
    if s <= 0:
        return Fraction(0), Fraction(0)
    if s >= 1:
        return Fraction(1, 2) + (s - 1), Fraction(1, 2) + (s - 1)
    total = Fraction(0)
    c = Fraction(0)
    pos = 0
    for g in range(gens):
        Lg = _L(g, scale)
        base = Fraction(pos, 1 << g)
        if s == c:
            return total, total
        if s == c + Lg:
            total += Lg * (base + Fraction(1, 1 << (g + 1)))
            return total, total
        Lc = _L(g + 1, scale)
        left_full = Lc * (base + Fraction(1, 1 << (g + 2)))
        plateau = base + Fraction(1, 1 << (g + 1))
        if s <= c + Lc:
            pos = 2 * pos
        elif s >= c + Lg - Lc:
            total += left_full + (Lg - 2 * Lc) * plateau
            c = c + Lg - Lc
            pos = 2 * pos + 1
        else:
            total += left_full + (s - c - Lc) * plateau
            return total, total
    base = Fraction(pos, 1 << gens)
    return total + (s - c) * base, total + (s - c) * (base + Fraction(1, 1 << gens))


# ---------------------------------------------------------------------------
# gap registry


class GapRegistry:
    """Stage-indexed gaps of ``C_n`` with indices up to a budget.

    Extension is serialised by a lock; readers get immutable per-stage
    tuples, so a snapshot can be shared freely once built.
    """

    def __init__(self, spec: CantorSpec = DEFAULT_SPEC):
        self.spec = spec
        self._stages: dict = {}
        self._lock = threading.Lock()
        self._tables: dict = {}

    def gap(self, n: int, i: int) -> Optional[GapRef]:
        """Gap ``(n, i)`` or ``None`` when ``i`` is not a registered index."""
        if n < 1 or i < 1:
            return None
        if n == 1:
            a, b = self.spec.local_gap(i)
            return GapRef(1, i, a, b)
        pi = unpair_index(i)
        if pi is None:
            return None
        parent = self.gap(n - 1, pi[0])
        return None if parent is None else parent.child(pi[1], self.spec)

    def gaps(self, n: int, budget: int) -> tuple:
        """All stage-``n`` gaps with index ``<= budget``, by index."""
        if n < 1:
            raise ValueError("stage must be >= 1")
        got = self._stages.get((n, budget))
        if got is not None:
            return got
        with self._lock:
            return self._gaps_unlocked(n, budget)

    def _gaps_unlocked(self, n: int, budget: int) -> tuple:
        key = (n, budget)
        got = self._stages.get(key)
        if got is not None:
            return got
        if n == 1:
            out = [self.gap(1, i) for i in range(1, budget + 1)]
        else:
            out = []
            for parent in self._gaps_unlocked(n - 1, budget):
                l = 1
                while pair_index(parent.i, l) <= budget:
                    out.append(parent.child(l, self.spec))
                    l += 1
            out.sort(key=lambda r: r.i)
        got = tuple(out)
        self._stages[key] = got
        return got

    def stages(self, budget: int) -> list:
        """Nonempty stages for this index budget (finite: indices grow)."""
        out = []
        n = 1
        while True:
            g = self.gaps(n, budget)
            if not g:
                return out
            out.append(g)
            n += 1

    def table(self, budget: int):
        """Per-stage arrays used by the evaluators, sorted by left endpoint."""
        t = self._tables.get(budget)
        if t is not None:
            return t
        stages = []
        for gs in self.stages(budget):
            rows = sorted(gs, key=lambda r: r.a)
            a_s = [r.a.to_fraction() for r in rows]
            b_s = [r.b.to_fraction() for r in rows]
            w_s = [r.weight for r in rows]
            # prefix sums: weights, and weight * (a+b)/2 for the antiderivative
            pw = [Dyadic(0)]
            pm = [Fraction(0)]
            for r, a, b in zip(rows, a_s, b_s):
                pw.append(pw[-1] + r.weight)
                pm.append(pm[-1] + r.weight.to_fraction() * (a + b) / 2)
            stages.append((rows, a_s, b_s, w_s, pw, pm))
        t = tuple(stages)
        with self._lock:
            self._tables.setdefault(budget, t)
        return self._tables[budget]

    def export(self, max_stage: int, budget: int) -> list:
        out = []
        for n in range(1, max_stage + 1):
            out.extend(r.to_json() for r in self.gaps(n, budget))
        return out

    def export_json(self, max_stage: int, budget: int) -> str:
        return json.dumps(self.export(max_stage, budget), indent=1)


REGISTRY = GapRegistry()


def check_nesting(registry: GapRegistry, max_stage: int, budget: int) -> list:
    """Violations of ``child inside parent => child index > parent index``."""
    bad = []
    for n in range(2, max_stage + 1):
        parents = registry.gaps(n - 1, budget)
        for ch in registry.gaps(n, budget):
            owners = [p for p in parents if p.contains(ch)]
            if len(owners) != 1 or owners[0].i >= ch.i:
                bad.append((ch, owners))
    return bad


def check_disjoint(registry: GapRegistry, n: int, budget: int) -> bool:
    rows = sorted(registry.gaps(n, budget), key=lambda r: r.a)
    return all(r.b <= s.a for r, s in zip(rows, rows[1:]))


# ---------------------------------------------------------------------------
# membership in C* = union of C_n


@dataclass(frozen=True)
class Membership:
    status: str  # "yes" | "no" | "unknown"
    stage: int
    chain: tuple = field(default=())

    def to_json(self) -> dict:
        return {"status": self.status, "stage": self.stage, "chain": [[g.n, str(g.i)] for g in self.chain]}


def in_Cstar(x, depth: int = 12, generations: int = 64, registry: GapRegistry = REGISTRY) -> Membership:
    """Decide ``x in C_n`` for ``n <= depth`` by descending through gaps.

    ``no`` means ``x`` lies in a gap of every stage up to ``depth`` (the chain
    of gaps is the witness); ``unknown`` means a descent inside one copy of
    ``C`` ran out of generations.
    """
    xf = to_fraction(x)
    if not 0 <= xf <= 1:
        raise ValueError(f"{x} outside [0, 1]")
    spec = registry.spec
    chain = []
    lo, hi = Fraction(0), Fraction(1)
    current = None
    for stage in range(1, depth + 1):
        r = _descend((xf - lo) / (hi - lo), generations, spec.scale)
        if r.kind == "endpoint":
            return Membership("yes", stage, tuple(chain))
        if r.kind == "member":
            return Membership("unknown", stage, tuple(chain))
        if current is None:
            current = registry.gap(1, r.gap)
        else:
            current = current.child(r.gap, spec)
        chain.append(current)
        lo, hi = current.a.to_fraction(), current.b.to_fraction()
    return Membership("no", depth, tuple(chain))


# ---------------------------------------------------------------------------
# f_m, f and F


def _budget(p: int) -> int:
    return p + 4


def cantor_fn(x, m: int, p: int = 40, registry: GapRegistry = REGISTRY) -> Enclosure:
    """Enclosure of the iterate ``f_m(x)`` (``f_1 = phi``)."""
    return _eval_f(x, m, p, registry, stage_tail=False)


def cantor_f(x, m: Optional[int] = None, p: int = 40, registry: GapRegistry = REGISTRY) -> Enclosure:
    """Enclosure of the limit ``f(x)``.

    With ``m`` given only stages ``< m`` are summed and the remaining stages
    add ``[0, 2**-(m-1)]``; otherwise every stage holding an index within the
    budget is summed.  Copies with index above the budget ``K`` add at most
    ``2**-K`` in total.
    """
    return _eval_f(x, m, p, registry, stage_tail=m is not None)


def _eval_f(x, m, p, registry, stage_tail):
    xf = to_fraction(x)
    if xf <= 0:
        return Enclosure.exact(0)
    K = _budget(p)
    d = p + 4
    scale = registry.spec.scale
    r = _descend(min(xf, Fraction(1)), d, scale)
    lo, hi = r.lo, r.hi
    table = registry.table(K)
    nstages = len(table) if m is None else min(m - 1, len(table))
    for n in range(nstages):
        rows, a_s, b_s, w_s, pw, pm = table[n]
        j = bisect.bisect_left(a_s, xf)  # gaps with a < x are rows[:j]
        full = j
        if j and xf < b_s[j - 1]:
            full = j - 1
            s = (xf - a_s[j - 1]) / (b_s[j - 1] - a_s[j - 1])
            q = _descend(s, d, scale)
            lo = lo + w_s[j - 1] * q.lo
            hi = hi + w_s[j - 1] * q.hi
        lo = lo + pw[full]
        hi = hi + pw[full]
    hi = hi + Dyadic.pow2(-K)
    if stage_tail and m is not None:
        hi = hi + Dyadic.pow2(-(m - 1))
    return Enclosure(lo, hi)


def cantor_F(x, p: int = 40, method: str = "antiderivative", registry: GapRegistry = REGISTRY, q: Optional[int] = None) -> Enclosure:
    """Enclosure of ``F(x) = integral_0^x f``.

    ``antiderivative`` integrates every copy of ``phi`` in closed form (mean
    value over a symmetric member interval is its mid plateau).
    ``riemann`` brackets the integral by lower/upper sums of the monotone
    ``f`` on ``2**q`` panels and serves as an independent check; without
    ``q`` it doubles the panels until the width is ``<= 2**-p`` and raises
    :class:`PanelBudgetExceeded` past ``2**16`` panels.
    """
    xf = to_fraction(x)
    if not 0 <= xf <= 1:
        raise ValueError(f"{x} outside [0, 1]")
    if xf == 0:
        return Enclosure.exact(0)
    if method == "riemann":
        if q is not None:
            return _riemann_F(xf, p, registry, q)
        # the bracket is at least x * (f(x) - f(0)) / 2**q wide, which fixes
        # the first panel count worth trying
        target = Dyadic.pow2(-p)
        spread = xf * cantor_f(xf, None, p, registry).lo.to_fraction()
        q = 1
        while spread / (1 << q) > target.to_fraction():
            q += 1
        while True:
            r = _riemann_F(xf, p, registry, q)
            if r.width <= target:
                return r
            q += 1
    if method != "antiderivative":
        raise ValueError(f"unknown method {method!r}")
    K = _budget(p)
    gens = p + 4
    scale = registry.spec.scale
    lo, hi = _phi_integral(xf, gens, scale)
    for rows, a_s, b_s, w_s, pw, pm in registry.table(K):
        j = bisect.bisect_left(a_s, xf)
        full = j
        if j and xf < b_s[j - 1]:
            full = j - 1
            a, b = a_s[j - 1], b_s[j - 1]
            s_lo, s_hi = _phi_integral((xf - a) / (b - a), gens, scale)
            w = w_s[j - 1].to_fraction()
            lo += w * (b - a) * s_lo
            hi += w * (b - a) * s_hi
        # fully passed copies: w * ((b - a)/2 + x - b) = w * (x - (a + b)/2)
        part = xf * pw[full].to_fraction() - pm[full]
        lo += part
        hi += part
    hi += xf * Fraction(1, 1 << K)
    bits = p + 8
    return Enclosure(Dyadic.floor(lo, bits), Dyadic.ceil(hi, bits))


class PanelBudgetExceeded(RuntimeError):
    pass


def _riemann_F(xf, p, registry, q, max_q: int = 16):
    if q > max_q:
        raise PanelBudgetExceeded(f"2**{q} panels exceeds the budget 2**{max_q}")
    n = 1 << q
    h = xf / n
    vals = [cantor_f(h * j, None, p, registry) for j in range(n + 1)]
    lower = sum((v.lo.to_fraction() for v in vals[:-1]), Fraction(0)) * h
    upper = sum((v.hi.to_fraction() for v in vals[1:]), Fraction(0)) * h
    bits = p + 8
    return Enclosure(Dyadic.floor(lower, bits), Dyadic.ceil(upper, bits))


# ---------------------------------------------------------------------------
# gap images


def gap_image_bound(ref: GapRef, p: int = 40, registry: GapRegistry = REGISTRY) -> dict:
    """Certified enclosure of ``f(b) - f(a)`` over a registered gap.

    ``f`` only moves across ``(a, b)`` through the copy planted in the gap
    itself (exactly ``2**-(n+i)``) and the copies planted in its descendant
    gaps; descendants with index above the budget ``K`` add at most
    ``2**-(n+K)``.
    """
    K = max(_budget(p) + ref.n, ref.i + 4)
    total = ref.weight
    frontier = [ref]
    while frontier:
        nxt = []
        for g in frontier:
            l = 1
            while pair_index(g.i, l) <= K:
                ch = g.child(l, registry.spec)
                total = total + ch.weight
                nxt.append(ch)
                l += 1
        frontier = nxt
    delta = Enclosure(total, total + Dyadic.pow2(-(ref.n + K)))
    relaxed = Dyadic.pow2(-(ref.n + ref.i - 1))
    sharp = Dyadic.pow2(-(ref.n + ref.i))
    return {
        "n": ref.n,
        "i": ref.i,
        "delta": delta,
        "certified_le_relaxed": delta.hi <= relaxed,
        "paper_bound_holds": delta.hi <= sharp,
        "sharp_bound_violated": delta.lo > sharp,
    }


# ---------------------------------------------------------------------------
# curve and cover rule


def cover_rule(x, depth: int = 12, generations: int = 64, registry: GapRegistry = REGISTRY) -> dict:
    """Vertical line on ``C*`` members, tangent line elsewhere."""
    mem = in_Cstar(x, depth, generations, registry)
    rule = "vertical" if mem.status == "yes" else "tangent" if mem.status == "no" else "undecided"
    return {"x": as_point(x), "rule": rule, "depth_used": mem.stage, "membership": mem}


class CantorCurve(Curve):
    """Integral of the iterated staircase; a strictly convex C^1 curve."""

    name = "tcantc"

    def __init__(self, registry: GapRegistry = REGISTRY, generations: int = 96):
        self.registry = registry
        self.generations = generations

    def F(self, x, p=40):
        return cantor_F(x, p, registry=self.registry)

    def slope(self, x, side="twosided", p=40):
        return cantor_f(x, None, p, self.registry)

    def increase_lower(self, x, y):
        """Lower bound on ``f(y) - f(x)`` from the first copy that separates them.

        Every copy of ``phi`` is nondecreasing, so the increment of any single
        copy bounds the total increment from below.  When ``x`` and ``y``
        share a plateau of the current copy, the plateau is a gap and the
        search moves into the copy planted there.
        """
        xf, yf = to_fraction(x), to_fraction(y)
        if yf <= xf:
            return Dyadic(0)
        spec = self.registry.spec
        lo, hi = Fraction(0), Fraction(1)
        weight = Dyadic(1)
        current = None
        while True:
            span = hi - lo
            rx = _descend((xf - lo) / span, self.generations, spec.scale)
            ry = _descend((yf - lo) / span, self.generations, spec.scale)
            diff = ry.lo - rx.hi
            if diff > 0:
                return weight * diff
            rm = _descend(((xf + yf) / 2 - lo) / span, self.generations, spec.scale)
            if rm.kind != "gap" or not rx.lo == rx.hi == ry.lo == ry.hi:
                return Dyadic(0)
            current = self.registry.gap(1, rm.gap) if current is None else current.child(rm.gap, spec)
            weight = current.weight
            lo, hi = current.a.to_fraction(), current.b.to_fraction()
