from decimal import Decimal
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from mancalog.intervals import (
    EMPTY,
    FULL,
    WeightInterval,
    closed,
    decimal_string,
    format_rational,
    interval_intersect,
    interval_subseteq,
    point,
    to_rational,
)


def iv(text: str) -> WeightInterval:
    """Test helper: '(0.5,0.8]' style literals."""
    lo_open = text[0] == "("
    hi_open = text[-1] == ")"
    a, b = text[1:-1].split(",")
    return WeightInterval(to_rational(a.strip()), to_rational(b.strip()), lo_open, hi_open)


class TestRationals:
    def test_decimal_and_fraction_agree(self):
        assert to_rational("0.9") == to_rational("9/10") == Fraction(9, 10)

    def test_accepts_exact_types(self):
        assert to_rational(1) == 1
        assert to_rational(Decimal("0.25")) == Fraction(1, 4)
        assert to_rational(Fraction(3, 7)) == Fraction(3, 7)

    def test_refuses_binary_floats(self):
        with pytest.raises(TypeError):
            to_rational(0.9)

    @pytest.mark.parametrize("bad", ["", "1/0", "-1", "abc", "0.", ".5"])
    def test_rejects_malformed(self, bad):
        with pytest.raises((ValueError, ZeroDivisionError)):
            to_rational(bad)

    def test_formatting(self):
        assert format_rational(Fraction(3, 5)) == "3/5"
        assert format_rational(Fraction(1)) == "1"
        assert decimal_string(Fraction(3, 5)) == "0.6"


class TestConstruction:
    def test_empty_constructions_are_canonical(self):
        assert WeightInterval(Fraction(1, 2), Fraction(1, 2), True, False) is EMPTY
        assert WeightInterval(Fraction(3, 4), Fraction(1, 4)) is EMPTY
        assert WeightInterval(Fraction(1, 2), Fraction(1, 2), False, True) == EMPTY

    def test_full_is_canonical(self):
        assert closed(0, 1) is FULL

    def test_out_of_range_rejected(self):
        with pytest.raises(ValueError):
            WeightInterval(Fraction(0), Fraction(2))

    def test_immutable(self):
        with pytest.raises(AttributeError):
            FULL.lo = Fraction(1, 2)

    def test_str_forms(self):
        assert str(iv("(1/2, 9/10]")) == "(1/2, 9/10]"
        assert str(EMPTY) == "empty"
        assert str(point(1)) == "[1, 1]"


class TestIntersect:
    def test_overlap(self):
        assert interval_intersect(iv("[0.2,0.8]"), iv("[0.5,1.0]")) == iv("[0.5,0.8]")

    @pytest.mark.parametrize("x", ["[0,1]", "(0.2,0.3)", "[1,1]", "[0,0.5)"])
    def test_full_is_identity(self, x):
        assert interval_intersect(FULL, iv(x)) == iv(x)

    def test_disjoint(self):
        assert interval_intersect(iv("[0,0.3]"), iv("[0.5,1.0]")) is EMPTY

    def test_touching_open_endpoint_is_empty(self):
        assert interval_intersect(iv("[0,0.5)"), iv("[0.5,1]")) is EMPTY
        assert interval_intersect(iv("[0,0.5]"), iv("[0.5,1]")) == point(Fraction(1, 2))

    def test_open_endpoint_wins_on_tie(self):
        assert interval_intersect(iv("(0.5,1]"), iv("[0.5,0.8]")) == iv("(0.5,0.8]")


class TestSubset:
    def test_plain(self):
        assert interval_subseteq(iv("[0.5,0.8]"), iv("[0.2,0.9]"))

    def test_empty(self):
        assert interval_subseteq(EMPTY, EMPTY)
        assert interval_subseteq(EMPTY, iv("[0.3,0.4]"))
        assert not interval_subseteq(iv("[0.3,0.4]"), EMPTY)

    def test_open_endpoints(self):
        assert interval_subseteq(iv("(0.5,0.8]"), iv("[0.5,0.8]"))
        assert not interval_subseteq(iv("[0.5,0.8]"), iv("(0.5,0.8]"))


fractions01 = st.fractions(min_value=0, max_value=1, max_denominator=24)


@st.composite
def intervals(draw):
    if draw(st.integers(0, 9)) == 0:
        return EMPTY
    a, b = sorted((draw(fractions01), draw(fractions01)))
    return WeightInterval(a, b, draw(st.booleans()), draw(st.booleans()))


@given(intervals(), intervals())
def test_intersection_is_lower_bound(a, b):
    c = interval_intersect(a, b)
    assert interval_subseteq(c, a) and interval_subseteq(c, b)


@given(intervals(), intervals(), intervals())
def test_intersection_laws(a, b, c):
    assert interval_intersect(a, b) == interval_intersect(b, a)
    assert interval_intersect(a, a) == a
    assert interval_intersect(interval_intersect(a, b), c) == interval_intersect(a, interval_intersect(b, c))


@given(intervals(), intervals(), fractions01)
def test_subset_agrees_with_membership(a, b, x):
    if interval_subseteq(a, b) and a.contains(x):
        assert b.contains(x)
    assert interval_intersect(a, b).contains(x) == (a.contains(x) and b.contains(x))
