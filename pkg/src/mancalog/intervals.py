"""Exact weight intervals: sub-intervals of [0, 1] with rational endpoints.

Every empty construction collapses to the single value ``EMPTY`` so that
equality is plain structural comparison.
"""

from __future__ import annotations

import re
from decimal import Decimal
from fractions import Fraction
from numbers import Rational
from typing import Union

RationalLike = Union[int, str, Fraction, Decimal]

_RATIONAL_RE = re.compile(r"^\s*(\d+)(?:\.(\d+)|/(\d+))?\s*$")

ZERO = Fraction(0)
ONE = Fraction(1)


def to_rational(value: RationalLike) -> Fraction:
    """Convert ``value`` to an exact ``Fraction``.

    Strings may be integers, decimals (``0.9``) or fractions (``9/10``);
    floats are refused because they are not exact.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, Decimal):
        return Fraction(value)
    if isinstance(value, str):
        m = _RATIONAL_RE.match(value)
        if not m:
            raise ValueError(f"not a rational literal: {value!r}")
        whole, frac, den = m.groups()
        if den is not None:
            if int(den) == 0:
                raise ValueError(f"zero denominator in {value!r}")
            return Fraction(int(whole), int(den))
        if frac is not None:
            return Fraction(int(whole + frac), 10 ** len(frac))
        return Fraction(int(whole))
    raise TypeError(f"cannot convert {type(value).__name__} to an exact rational")


def format_rational(q: Fraction) -> str:
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def decimal_string(q: Fraction, digits: int = 12) -> str:
    """Decimal rendering for human consumption; the fraction stays authoritative."""
    if q.denominator == 1:
        return str(q.numerator)
    scaled = round(q * 10**digits)
    text = f"{Decimal(scaled).scaleb(-digits):f}".rstrip("0").rstrip(".")
    return text or "0"


class WeightInterval:
    """A subset of [0, 1] with possibly open endpoints.

    Instances are immutable. Construct with ``WeightInterval(lo, hi,
    lo_open, hi_open)``; an empty combination returns ``EMPTY``.
    """

    __slots__ = ("lo", "hi", "lo_open", "hi_open", "_hash")

    lo: Fraction
    hi: Fraction
    lo_open: bool
    hi_open: bool

    def __new__(
        cls,
        lo: RationalLike,
        hi: RationalLike,
        lo_open: bool = False,
        hi_open: bool = False,
    ) -> WeightInterval:
        lo_q = to_rational(lo)
        hi_q = to_rational(hi)
        if lo_q < 0 or hi_q > 1 or lo_q > 1 or hi_q < 0:
            raise ValueError(f"interval endpoints must lie in [0, 1]: {lo_q}, {hi_q}")
        return _make(lo_q, hi_q, bool(lo_open), bool(hi_open))

    def __setattr__(self, name, value):
        raise AttributeError("WeightInterval is immutable")

    def __reduce__(self):
        if self.is_empty:
            return (_empty, ())
        return (WeightInterval, (self.lo, self.hi, self.lo_open, self.hi_open))

    @property
    def is_empty(self) -> bool:
        return self is EMPTY

    @property
    def is_full(self) -> bool:
        return self == FULL

    def key(self) -> tuple:
        return (self.lo, self.hi, self.lo_open, self.hi_open)

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        if not isinstance(other, WeightInterval):
            return NotImplemented
        return (
            self.lo == other.lo
            and self.hi == other.hi
            and self.lo_open == other.lo_open
            and self.hi_open == other.hi_open
        )

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"WeightInterval({self})"

    def __str__(self) -> str:
        if self.is_empty:
            return "empty"
        left = "(" if self.lo_open else "["
        right = ")" if self.hi_open else "]"
        return f"{left}{format_rational(self.lo)}, {format_rational(self.hi)}{right}"

    def intersect(self, other: WeightInterval) -> WeightInterval:
        return interval_intersect(self, other)

    def issubset(self, other: WeightInterval) -> bool:
        return interval_subseteq(self, other)

    __and__ = intersect
    __le__ = issubset

    def contains(self, x: RationalLike) -> bool:
        if self.is_empty:
            return False
        q = to_rational(x)
        above = q > self.lo or (q == self.lo and not self.lo_open)
        below = q < self.hi or (q == self.hi and not self.hi_open)
        return above and below


def _raw(lo: Fraction, hi: Fraction, lo_open: bool, hi_open: bool) -> WeightInterval:
    obj = object.__new__(WeightInterval)
    object.__setattr__(obj, "lo", lo)
    object.__setattr__(obj, "hi", hi)
    object.__setattr__(obj, "lo_open", lo_open)
    object.__setattr__(obj, "hi_open", hi_open)
    object.__setattr__(obj, "_hash", hash((lo, hi, lo_open, hi_open)))
    return obj


# The canonical empty interval; its endpoint fields are placeholders.
EMPTY = _raw(ONE, ZERO, True, True)
FULL = _raw(ZERO, ONE, False, False)


def _empty() -> WeightInterval:
    return EMPTY


def _make(lo: Fraction, hi: Fraction, lo_open: bool, hi_open: bool) -> WeightInterval:
    if lo > hi or (lo == hi and (lo_open or hi_open)):
        return EMPTY
    if lo == 0 and hi == 1 and not lo_open and not hi_open:
        return FULL
    return _raw(lo, hi, lo_open, hi_open)


def closed(lo: RationalLike, hi: RationalLike) -> WeightInterval:
    return WeightInterval(lo, hi)


def point(x: RationalLike) -> WeightInterval:
    return WeightInterval(x, x)


def interval_intersect(a: WeightInterval, b: WeightInterval) -> WeightInterval:
    """Exact set intersection, canonicalized to ``EMPTY`` when empty."""
    if a is EMPTY or b is EMPTY:
        return EMPTY
    if a is FULL:
        return b
    if b is FULL:
        return a
    if a.lo > b.lo:
        lo, lo_open = a.lo, a.lo_open
    elif a.lo < b.lo:
        lo, lo_open = b.lo, b.lo_open
    else:
        lo, lo_open = a.lo, a.lo_open or b.lo_open
    if a.hi < b.hi:
        hi, hi_open = a.hi, a.hi_open
    elif a.hi > b.hi:
        hi, hi_open = b.hi, b.hi_open
    else:
        hi, hi_open = a.hi, a.hi_open or b.hi_open
    if (lo, hi, lo_open, hi_open) == (a.lo, a.hi, a.lo_open, a.hi_open):
        return a
    if (lo, hi, lo_open, hi_open) == (b.lo, b.hi, b.lo_open, b.hi_open):
        return b
    return _make(lo, hi, lo_open, hi_open)


def interval_subseteq(a: WeightInterval, b: WeightInterval) -> bool:
    """True iff ``a`` is a subset of ``b`` as sets of reals."""
    if a is EMPTY:
        return True
    if b is EMPTY:
        return False
    if b is FULL or a is b:
        return True
    if a.lo < b.lo or (a.lo == b.lo and b.lo_open and not a.lo_open):
        return False
    if a.hi > b.hi or (a.hi == b.hi and b.hi_open and not a.hi_open):
        return False
    return True
