"""Exact dyadic rationals, certified enclosures and binary digit expansions.

Every numeric value handled by the package is either a :class:`Dyadic`
(``num / 2**exp``), a :class:`fractions.Fraction` for non-dyadic rational
coordinates, or an :class:`Enclosure` with dyadic endpoints that is
guaranteed to contain some exact real.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Union

__all__ = [
    "Dyadic",
    "Enclosure",
    "DigitString",
    "to_digits",
    "from_digits",
    "to_fraction",
    "as_point",
    "Point",
]


class Dyadic:
    """Exact binary rational ``num / 2**exp`` in canonical form.

    Canonical means ``exp == 0`` or ``num`` is odd, so equal values are
    structurally equal.  ``exp`` may be an arbitrarily large Python int;
    comparisons against zero and products never shift, so tiny certified
    lower bounds such as ``2**-(10**100)`` stay cheap to build and compare.
    """

    __slots__ = ("num", "exp")

    def __init__(self, num: int = 0, exp: int = 0):
        if exp < 0:
            num, exp = num << -exp, 0
        if num == 0:
            exp = 0
        elif exp:
            tz = (num & -num).bit_length() - 1
            if tz:
                shift = min(tz, exp)
                num >>= shift
                exp -= shift
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "exp", exp)

    def __setattr__(self, name, value):
        raise AttributeError("Dyadic is immutable")

    # construction -----------------------------------------------------
    @classmethod
    def coerce(cls, value) -> "Dyadic":
        if isinstance(value, Dyadic):
            return value
        if isinstance(value, bool):
            return cls(int(value))
        if isinstance(value, int):
            return cls(value)
        if isinstance(value, Rational):
            fr = Fraction(value)
            den = fr.denominator
            if den & (den - 1):
                raise ValueError(f"{value} is not a dyadic rational")
            return cls(fr.numerator, den.bit_length() - 1)
        raise TypeError(f"cannot convert {type(value).__name__} to Dyadic")

    @classmethod
    def pow2(cls, k: int) -> "Dyadic":
        """``2**k`` for any integer ``k``."""
        return cls(1, -k)

    @classmethod
    def floor(cls, value, bits: int) -> "Dyadic":
        """Largest multiple of ``2**-bits`` that is ``<= value``."""
        fr = Fraction(value) if not isinstance(value, Dyadic) else value.to_fraction()
        return cls((fr.numerator << bits) // fr.denominator, bits)

    @classmethod
    def ceil(cls, value, bits: int) -> "Dyadic":
        fr = Fraction(value) if not isinstance(value, Dyadic) else value.to_fraction()
        return cls(-((-fr.numerator << bits) // fr.denominator), bits)

    # conversion -------------------------------------------------------
    def to_fraction(self) -> Fraction:
        return Fraction(self.num, 1 << self.exp)

    def __float__(self) -> float:
        if self.num == 0:
            return 0.0
        if abs(self.num).bit_length() - self.exp < -1080:
            return 0.0 if self.num > 0 else -0.0
        return float(self.to_fraction())

    def to_json(self) -> dict:
        return {"num": str(self.num), "exp": self.exp}

    @classmethod
    def from_json(cls, obj: dict) -> "Dyadic":
        return cls(int(obj["num"]), int(obj["exp"]))

    def __repr__(self) -> str:
        if self.exp == 0:
            return f"Dyadic({self.num})"
        return f"Dyadic({self.num}/2^{self.exp})"

    def __str__(self) -> str:
        return str(self.num) if self.exp == 0 else f"{self.num}/2^{self.exp}"

    def exact_decimal(self) -> str:
        """Finite decimal expansion (every dyadic has one)."""
        if self.exp == 0:
            return str(self.num)
        sign = "-" if self.num < 0 else ""
        digits = str(abs(self.num) * 5**self.exp).rjust(self.exp + 1, "0")
        return f"{sign}{digits[:-self.exp]}.{digits[-self.exp:]}"

    def decimal(self, places: int = 12) -> str:
        """Decimal string rounded toward zero at ``places`` digits."""
        fr = self.to_fraction()
        sign = "-" if fr < 0 else ""
        fr = abs(fr)
        scaled = fr.numerator * 10**places // fr.denominator
        ip, fp = divmod(scaled, 10**places)
        return f"{sign}{ip}.{fp:0{places}d}"

    # arithmetic -------------------------------------------------------
    def _align(self, other: "Dyadic"):
        e = max(self.exp, other.exp)
        return self.num << (e - self.exp), other.num << (e - other.exp), e

    def __add__(self, other):
        try:
            other = Dyadic.coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        if other.num == 0:
            return self
        if self.num == 0:
            return other
        a, b, e = self._align(other)
        return Dyadic(a + b, e)

    __radd__ = __add__

    def __neg__(self):
        return Dyadic(-self.num, self.exp)

    def __sub__(self, other):
        try:
            other = Dyadic.coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return Dyadic.coerce(other) - self

    def __mul__(self, other):
        try:
            other = Dyadic.coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        return Dyadic(self.num * other.num, self.exp + other.exp)

    __rmul__ = __mul__

    def __abs__(self):
        return self if self.num >= 0 else -self

    def half(self, k: int = 1) -> "Dyadic":
        """``self / 2**k``."""
        return Dyadic(self.num, self.exp + k)

    def sign(self) -> int:
        return (self.num > 0) - (self.num < 0)

    # ordering ---------------------------------------------------------
    def _cmp(self, other: "Dyadic") -> int:
        sa, sb = self.sign(), other.sign()
        if sa != sb or sa == 0:
            return (sa > sb) - (sa < sb)
        # same nonzero sign: compare magnitudes by binary order first
        ma = self.num.bit_length() - self.exp if sa > 0 else (-self.num).bit_length() - self.exp
        mb = other.num.bit_length() - other.exp if sb > 0 else (-other.num).bit_length() - other.exp
        if abs(ma - mb) >= 2:
            bigger = 1 if ma > mb else -1
            return bigger * sa
        a, b, _ = self._align(other)
        return (a > b) - (a < b)

    def __eq__(self, other):
        if isinstance(other, Dyadic):
            return self.num == other.num and self.exp == other.exp
        if isinstance(other, (int, Fraction)):
            return self.to_fraction() == other
        return NotImplemented

    def __hash__(self):
        return hash((self.num, self.exp))

    def __lt__(self, other):
        return self._cmp(Dyadic.coerce(other)) < 0

    def __le__(self, other):
        return self._cmp(Dyadic.coerce(other)) <= 0

    def __gt__(self, other):
        return self._cmp(Dyadic.coerce(other)) > 0

    def __ge__(self, other):
        return self._cmp(Dyadic.coerce(other)) >= 0


Point = Union[Dyadic, Fraction]


def to_fraction(x) -> Fraction:
    return x.to_fraction() if isinstance(x, Dyadic) else Fraction(x)


def as_point(x) -> Point:
    """Normalise a rational to ``Dyadic`` when possible, else ``Fraction``."""
    if isinstance(x, Dyadic):
        return x
    fr = Fraction(x)
    den = fr.denominator
    if den & (den - 1) == 0:
        return Dyadic(fr.numerator, den.bit_length() - 1)
    return fr


@dataclass(frozen=True)
class Enclosure:
    """Closed interval ``[lo, hi]`` with dyadic endpoints."""

    lo: Dyadic
    hi: Dyadic

    def __post_init__(self):
        lo, hi = Dyadic.coerce(self.lo), Dyadic.coerce(self.hi)
        if lo > hi:
            raise ValueError(f"empty enclosure [{lo}, {hi}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def exact(cls, value) -> "Enclosure":
        v = Dyadic.coerce(value)
        return cls(v, v)

    @classmethod
    def around(cls, value, p: int) -> "Enclosure":
        """Outward rounding of a rational to the grid ``2**-p``."""
        if isinstance(value, Dyadic):
            return cls(value, value)
        fr = Fraction(value)
        if fr.denominator & (fr.denominator - 1) == 0:
            return cls.exact(fr)
        return cls(Dyadic.floor(fr, p), Dyadic.ceil(fr, p))

    @property
    def width(self) -> Dyadic:
        return self.hi - self.lo

    @property
    def mid(self) -> Dyadic:
        return (self.lo + self.hi).half()

    def is_exact(self) -> bool:
        return self.lo == self.hi

    def contains(self, value) -> bool:
        if isinstance(value, Enclosure):
            return self.lo <= value.lo and value.hi <= self.hi
        if isinstance(value, Fraction) and not isinstance(value, Dyadic):
            return self.lo.to_fraction() <= value <= self.hi.to_fraction()
        return self.lo <= value <= self.hi

    __contains__ = contains

    def overlaps(self, other: "Enclosure") -> bool:
        return self.lo <= other.hi and other.lo <= self.hi

    def certainly_lt(self, other: "Enclosure") -> bool:
        return self.hi < other.lo

    def __add__(self, other):
        if not isinstance(other, Enclosure):
            other = Enclosure.exact(other)
        return Enclosure(self.lo + other.lo, self.hi + other.hi)

    __radd__ = __add__

    def __neg__(self):
        return Enclosure(-self.hi, -self.lo)

    def __sub__(self, other):
        if not isinstance(other, Enclosure):
            other = Enclosure.exact(other)
        return self + (-other)

    def __rsub__(self, other):
        return Enclosure.exact(other) - self

    def scale(self, factor) -> "Enclosure":
        f = Dyadic.coerce(factor)
        a, b = self.lo * f, self.hi * f
        return Enclosure(a, b) if f >= 0 else Enclosure(b, a)

    def __mul__(self, other):
        if not isinstance(other, Enclosure):
            return self.scale(other)
        prods = [self.lo * other.lo, self.lo * other.hi, self.hi * other.lo, self.hi * other.hi]
        return Enclosure(min(prods), max(prods))

    __rmul__ = __mul__

    def __abs__(self):
        if self.lo >= 0:
            return self
        if self.hi <= 0:
            return -self
        return Enclosure(Dyadic(0), max(-self.lo, self.hi))

    def hull(self, *others: "Enclosure") -> "Enclosure":
        lo, hi = self.lo, self.hi
        for o in others:
            lo, hi = min(lo, o.lo), max(hi, o.hi)
        return Enclosure(lo, hi)

    def to_json(self) -> dict:
        return {"lo": self.lo.to_json(), "hi": self.hi.to_json()}

    @classmethod
    def from_json(cls, obj: dict) -> "Enclosure":
        return cls(Dyadic.from_json(obj["lo"]), Dyadic.from_json(obj["hi"]))

    def __repr__(self) -> str:
        return f"[{float(self.lo):.12g}, {float(self.hi):.12g}]"


@dataclass(frozen=True)
class DigitString:
    """Binary digits ``w_1 .. w_m`` of a number in ``[0, 1]``.

    ``exact`` is true iff the number equals the finite sum of the digits.
    Dyadic points use the finite expansion.  The endpoint 1 has no finite
    expansion after the binary point, so it is stored as all ones with
    ``exact=False``: its true tail is taken to be all ones.
    """

    digits: tuple
    exact: bool

    def __post_init__(self):
        if any(d not in (0, 1) for d in self.digits):
            raise ValueError("digits must be 0 or 1")

    def __str__(self) -> str:
        return "".join(map(str, self.digits))

    def value(self) -> Dyadic:
        return from_digits(self)

    def to_json(self) -> dict:
        return {"digits": str(self), "exact": self.exact}

    @classmethod
    def from_json(cls, obj: dict) -> "DigitString":
        return cls(tuple(int(c) for c in obj["digits"]), bool(obj["exact"]))


def to_digits(x, m: int) -> DigitString:
    """First ``m`` binary digits of ``x`` in ``[0, 1]``."""
    if m < 1:
        raise ValueError("depth must be >= 1")
    fr = to_fraction(x)
    if not 0 <= fr <= 1:
        raise ValueError(f"{x} outside [0, 1]")
    if fr == 1:
        return DigitString((1,) * m, False)
    num, den = fr.numerator, fr.denominator
    digits = []
    for _ in range(m):
        num <<= 1
        d = 1 if num >= den else 0
        num -= d * den
        digits.append(d)
    return DigitString(tuple(digits), num == 0)


def from_digits(ds: DigitString) -> Dyadic:
    m = len(ds.digits)
    return Dyadic(int(str(ds), 2) if m else 0, m)
