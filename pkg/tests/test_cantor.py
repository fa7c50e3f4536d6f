import json
import random
from fractions import Fraction

import pytest

from linecover.cantor_c1 import (
    DEFAULT_SPEC,
    REGISTRY,
    CantorCurve,
    PanelBudgetExceeded,
    cantor_F,
    cantor_f,
    cantor_fn,
    check_disjoint,
    check_nesting,
    cover_rule,
    gap_image_bound,
    in_Cstar,
    pair_index,
    phi,
    unpair_index,
)
from linecover.exactnum import Dyadic, Enclosure
from linecover.lines import SampleSpec, build_family, covering_check

P = 40


def L(g):
    return Fraction(1, 1 << (g * (g + 1)))


def phi_oracle(s: Fraction, g: int = 1, depth: int = 30) -> Fraction:
    """Staircase by self-similarity: each interval keeps two children of relative length L_g / L_{g-1}."""
    if depth == 0:
        return Fraction(0)
    r = L(g) / L(g - 1)
    if s <= r:
        return phi_oracle(s / r, g + 1, depth - 1) / 2
    if s >= 1 - r:
        return Fraction(1, 2) + phi_oracle((s - 1 + r) / r, g + 1, depth - 1) / 2
    return Fraction(1, 2)


def gaps_oracle(count: int) -> list:
    """First ``count`` gaps of C, built generation by generation from member intervals."""
    members = [(Fraction(0), Fraction(1))]
    out = []
    g = 0
    while len(out) < count:
        c = L(g + 1)
        out.extend((a + c, b - c) for a, b in members)
        members = [iv for a, b in members for iv in ((a, a + c), (b - c, b))]
        g += 1
    return out[:count]


def planted(parent, l):
    (a, b), local = parent, gaps_oracle(l)[l - 1]
    return a + (b - a) * local[0], a + (b - a) * local[1]


def f_oracle(x: Fraction, K: int = 30) -> tuple:
    """Truncated double sum over planted copies with indices <= K; returns (value, tail bound)."""
    total = phi_oracle(x)
    stage = [((a, b), i) for i, (a, b) in enumerate(gaps_oracle(K), 1)]
    n = 1
    while stage:
        nxt = []
        for (a, b), i in stage:
            s = min(max((x - a) / (b - a), Fraction(0)), Fraction(1))
            total += Fraction(1, 1 << (n + i)) * phi_oracle(s)
            l = 1
            while pair_index(i, l) <= K:
                nxt.append((planted((a, b), l), pair_index(i, l)))
                l += 1
        stage = nxt
        n += 1
    return total, Fraction(1, 1 << K) + Fraction(2, 1 << 30)


def test_phi_examples():
    assert phi(Dyadic(0)) == Enclosure.exact(Dyadic(0))
    assert phi(Dyadic(1, 1)) == Enclosure.exact(Dyadic(1, 1))
    assert phi(Dyadic(1, 3)) == Enclosure.exact(Dyadic(1, 2))
    assert phi(Fraction(-1)) == Enclosure.exact(Dyadic(0))
    assert phi(Fraction(2)) == Enclosure.exact(Dyadic(1))


def test_phi_matches_oracle():
    rng = random.Random(21)
    for _ in range(200):
        x = Fraction(rng.randint(0, 1 << 20), 1 << 20)
        e = phi(x, 30)
        v = phi_oracle(x)
        assert e.lo.to_fraction() - Fraction(1, 1 << 30) <= v <= e.hi.to_fraction() + Fraction(1, 1 << 30)


def test_phi_nondecreasing():
    xs = [Fraction(j, 1 << 12) for j in range((1 << 12) + 1)]
    vals = [phi(x, 40) for x in xs]
    assert all(a.lo <= b.hi for a, b in zip(vals, vals[1:]))


def test_spec_invariants():
    for g in range(1, 13):
        assert 2 * L(g) < L(g - 1)
        assert DEFAULT_SPEC.length(g).to_fraction() == L(g)
        assert DEFAULT_SPEC.box_exponent(g) == Fraction(1, g + 1)
        assert DEFAULT_SPEC.box_exponent(g + 1) < DEFAULT_SPEC.box_exponent(g)


def test_stage_one_gaps_examples():
    g = REGISTRY.gaps(1, 3)
    assert [(r.a.to_fraction(), r.b.to_fraction()) for r in g] == [
        (Fraction(1, 4), Fraction(3, 4)),
        (Fraction(1, 64), Fraction(15, 64)),
        (Fraction(49, 64), Fraction(63, 64)),
    ]


def test_stage_one_gaps_match_oracle():
    ours = [(r.a.to_fraction(), r.b.to_fraction()) for r in REGISTRY.gaps(1, 63)]
    assert ours == gaps_oracle(63)


def test_stage_two_first_gap():
    first = REGISTRY.gaps(2, 4)[0]
    assert (first.n, first.i) == (2, 4)
    assert (first.a.to_fraction(), first.b.to_fraction()) == (Fraction(3, 8), Fraction(5, 8))


def test_pairing():
    seen = set()
    for i in range(1, 120):
        for l in range(1, 120):
            j = pair_index(i, l)
            assert j > i
            assert j not in seen
            seen.add(j)
            assert unpair_index(j) == (i, l)
    assert unpair_index(1) is None and unpair_index(3) is None


@pytest.mark.parametrize("budget", [20, 60])
def test_nesting_and_disjointness(budget):
    assert check_nesting(REGISTRY, 4, budget) == []
    for n in range(1, 5):
        assert check_disjoint(REGISTRY, n, budget)


def test_registry_export_json():
    rows = json.loads(REGISTRY.export_json(2, 4))
    assert rows[0] == {"n": 1, "i": 1, "a": {"num": "1", "exp": 2}, "b": {"num": "3", "exp": 2}}
    assert {(r["n"], r["i"]) for r in rows} == {(1, 1), (1, 2), (1, 3), (1, 4), (2, 4)}


def test_membership():
    assert in_Cstar(Dyadic(1, 2)).status == "yes"
    assert in_Cstar(Dyadic(0)).status == "yes"
    half = in_Cstar(Dyadic(1, 1), depth=8)
    assert half.status == "no" and len(half.chain) == 8
    for outer, inner in zip(half.chain, half.chain[1:]):
        assert outer.contains(inner) and inner.i > outer.i
        assert inner.a < Dyadic(1, 1) < inner.b


def test_f_examples():
    assert cantor_f(Dyadic(0), p=P) == Enclosure.exact(Dyadic(0))
    q = cantor_f(Dyadic(1, 2), p=P)
    assert q.lo > Dyadic(1, 1) and q.width <= Dyadic.pow2(-P + 1)
    one = cantor_f(Dyadic(1), p=P)
    v, tail = f_oracle(Fraction(1))
    assert one.lo.to_fraction() - tail <= v <= one.hi.to_fraction() + tail


def test_f_matches_truncated_double_sum():
    rng = random.Random(22)
    for _ in range(25):
        x = Fraction(rng.randint(0, 1 << 12), 1 << 12)
        e = cantor_f(x, p=P)
        v, tail = f_oracle(x)
        assert e.lo.to_fraction() - tail <= v <= e.hi.to_fraction() + tail, x


def test_stage_iterates_converge_uniformly():
    for m in range(2, 9):
        for j in range(0, 257, 3):
            x = Dyadic(j, 8)
            a, b = cantor_fn(x, m, P), cantor_fn(x, m + 1, P)
            assert abs(b - a).hi <= Dyadic.pow2(-m) + a.width + b.width


def test_stage_approximation_width():
    e = cantor_f(Dyadic(3, 3), 6, P)
    assert e.width <= Dyadic.pow2(-5) + Dyadic.pow2(-P + 1)
    assert e.contains(cantor_f(Dyadic(3, 3), None, P).mid)


def test_f_monotone_on_separated_pairs():
    rng = random.Random(23)
    certified = 0
    for _ in range(300):
        x, y = sorted(Fraction(rng.randint(0, 1 << 10), 1 << 10) for _ in range(2))
        if x == y:
            continue
        fx, fy = cantor_f(x, p=P), cantor_f(y, p=P)
        assert not fy.certainly_lt(fx)
        certified += fx.certainly_lt(fy)
    assert certified >= 250


def test_F_examples_and_oracle():
    assert cantor_F(Dyadic(0)) == Enclosure.exact(Dyadic(0))
    half = cantor_F(Dyadic(1, 1), P)
    assert half.width <= Dyadic.pow2(-P)
    bracket = cantor_F(Dyadic(1, 1), P, method="riemann", q=12)
    assert bracket.overlaps(half)
    f1 = cantor_f(Dyadic(1), p=P).hi
    assert bracket.width <= f1 * Dyadic.pow2(-13) + Dyadic.pow2(-30)
    assert abs(float(half.mid) - 0.280547) < 1e-6


def test_F_riemann_panel_budget():
    with pytest.raises(PanelBudgetExceeded):
        cantor_F(Dyadic(1, 1), 40, method="riemann")
    coarse = cantor_F(Dyadic(1, 1), 8, method="riemann")
    assert coarse.width <= Dyadic.pow2(-8) and coarse.overlaps(cantor_F(Dyadic(1, 1), P))


def descendant_sum(n, i, a, b, K=40):
    """Own weight plus every planted descendant with index <= K."""
    total = Fraction(1, 1 << (n + i))
    frontier = [(i, n)]
    while frontier:
        nxt = []
        for pi, pn in frontier:
            l = 1
            while pair_index(pi, l) <= K:
                j = pair_index(pi, l)
                total += Fraction(1, 1 << (pn + 1 + j))
                nxt.append((j, pn + 1))
                l += 1
        frontier = nxt
    return total


def test_gap_image_bound_examples():
    r = gap_image_bound(REGISTRY.gap(1, 1), P)
    v = descendant_sum(1, 1, 0, 0, K=60)
    assert r["delta"].lo.to_fraction() - Fraction(1, 1 << 61) <= v <= r["delta"].hi.to_fraction()
    assert r["delta"].lo > Dyadic(1, 2) + Dyadic(1, 6)
    assert abs(float(r["delta"].mid) - 0.266634) < 1e-6
    assert r["certified_le_relaxed"] and r["sharp_bound_violated"] and not r["paper_bound_holds"]
    r = gap_image_bound(REGISTRY.gap(2, 4), P)
    assert Dyadic.pow2(-6) <= r["delta"].lo and r["delta"].hi <= Dyadic.pow2(-5)


def test_gap_image_bound_matches_function_values():
    ref = REGISTRY.gap(1, 2)
    r = gap_image_bound(ref, P)
    fa, fb = cantor_f(ref.a, p=P), cantor_f(ref.b, p=P)
    assert r["delta"].overlaps(fb - fa)


def test_slope_set_smallness_witness():
    for n in (1, 2, 3):
        total = Dyadic(0)
        for ref in REGISTRY.gaps(n, 14 - n):
            r = gap_image_bound(ref, P)
            assert r["delta"].lo >= ref.weight
            total = total + r["delta"].hi
        assert total <= Dyadic.pow2(-n + 1)


def test_cover_rule_and_correctness():
    curve = CantorCurve()
    fam = build_family(curve, SampleSpec(48, "seeded-random", "mixed", seed=5, depth=9))
    for line in fam.lines:
        rule = cover_rule(line.x0)
        assert rule["rule"] in ("vertical", "tangent")
        assert (rule["rule"] == "vertical") == (in_Cstar(line.x0).status == "yes") == line.is_vertical
    assert all(h == 1 for _, h in covering_check(curve, fam, P))
    assert cover_rule(Dyadic(1, 2))["rule"] == "vertical"
    # the centre is never in C*: it sits in nested central gaps of every stage
    assert cover_rule(Dyadic(1, 1))["rule"] == "tangent"
