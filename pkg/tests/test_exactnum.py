import json
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from linecover.exactnum import DigitString, Dyadic, Enclosure, from_digits, to_digits

dyadics = st.builds(Dyadic, st.integers(-(1 << 80), 1 << 80), st.integers(0, 120))


def canonical(d: Dyadic) -> bool:
    return d.exp >= 0 and (d.exp == 0 or d.num % 2 == 1)


def test_examples_arith():
    assert Dyadic(1, 1) + Dyadic(1, 2) == Dyadic(3, 2)
    assert Dyadic(3, 2) * Dyadic(3, 2) == Dyadic(9, 4)
    assert Dyadic(5, 3) > Dyadic(1, 1)


def test_canonical_constructor():
    d = Dyadic(12, 5)
    assert (d.num, d.exp) == (3, 3)
    assert Dyadic(8, 2) == Dyadic(2)
    assert Dyadic(0, 9).exp == 0


@pytest.mark.parametrize(
    "x, m, digits, exact",
    [
        (Dyadic(1, 1), 3, "100", True),
        (Fraction(1, 3), 4, "0101", False),
        (Dyadic(3, 2), 2, "11", True),
        (Dyadic(1), 3, "111", False),
    ],
)
def test_to_digits_examples(x, m, digits, exact):
    ds = to_digits(x, m)
    assert str(ds) == digits and ds.exact is exact


def test_to_digits_domain():
    with pytest.raises(ValueError):
        to_digits(Fraction(3, 2), 4)
    with pytest.raises(ValueError):
        to_digits(Dyadic(1, 1), 0)


def test_round_trip_seeded():
    rng = random.Random(20240917)
    for _ in range(1000):
        exp = rng.randint(0, 60)
        x = Dyadic(rng.randint(0, 1 << exp), exp)
        m = rng.randint(1, 64)
        ds = to_digits(x, m)
        v = from_digits(ds)
        if x == 1:
            # all-ones convention: the upper end is attained
            assert v + Dyadic.pow2(-m) == x and not ds.exact
            continue
        assert v <= x < v + Dyadic.pow2(-m)
        if x.exp <= m:
            assert ds.exact


@given(dyadics, dyadics)
def test_arith_matches_fractions(a, b):
    fa, fb = a.to_fraction(), b.to_fraction()
    for got, want in ((a + b, fa + fb), (a - b, fa - fb), (a * b, fa * fb)):
        assert got.to_fraction() == want
        assert canonical(got)
    assert (a < b) == (fa < fb) and (a == b) == (fa == fb)


@given(dyadics)
def test_json_round_trip(a):
    obj = json.loads(json.dumps(a.to_json()))
    assert isinstance(obj["num"], str)
    assert Dyadic.from_json(obj) == a


def test_huge_exponents_compare_without_overflow():
    tiny = Dyadic.pow2(-(1 << 40))
    assert Dyadic(0) < tiny < Dyadic.pow2(-1000)
    assert -tiny < Dyadic(0)
    assert float(tiny) == 0.0


def test_enclosure_examples():
    e = lambda lo, hi: Enclosure(Dyadic.coerce(lo), Dyadic.coerce(hi))
    assert e(0, 1) + e(2, 3) == e(2, 4)
    assert e(1, 2).scale(Dyadic(-1, 1)) == e(Fraction(-1), Fraction(-1, 2))
    assert e(0, 1).hull(e(3, 4)) == e(0, 4)


def test_enclosure_rejects_reversed():
    with pytest.raises(ValueError):
        Enclosure(Dyadic(1), Dyadic(0))


@given(dyadics, dyadics, dyadics, dyadics, st.integers(0, 3), st.integers(0, 3))
@settings(max_examples=200)
def test_enclosure_soundness(a, b, c, d, ta, tb):
    # members drawn from the interior and ends of each enclosure
    x = Enclosure(min(a, b), max(a, b))
    y = Enclosure(min(c, d), max(c, d))
    px = x.lo + (x.width * Dyadic(ta, 2))
    py = y.lo + (y.width * Dyadic(tb, 2))
    assert (x + y).contains(px + py)
    assert (x - y).contains(px - py)
    assert (x * y).contains(px * py)
    assert abs(x).contains(abs(px))
    assert (x + y).width == x.width + y.width


@pytest.mark.parametrize("value", [Fraction(1, 3), Fraction(-22, 7), Fraction(5, 8), Fraction(10**30 + 1, 3**40)])
@pytest.mark.parametrize("p", [1, 10, 64, 300])
def test_around_width_and_containment(value, p):
    e = Enclosure.around(value, p)
    assert e.contains(value)
    assert e.width <= Dyadic.pow2(-p)


def test_digitstring_json():
    ds = DigitString((0, 1, 0, 1), False)
    assert ds.to_json() == {"digits": "0101", "exact": False}
    assert DigitString.from_json(ds.to_json()) == ds
