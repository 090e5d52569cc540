from fractions import Fraction

from hypothesis import given
from hypothesis import strategies as st
import pytest

from haltlab.intervals import Interval, as_fraction, format_fraction

rationals = st.fractions(
    min_value=Fraction(-100), max_value=Fraction(100), max_denominator=997
)


def _interval(lo, hi):
    lo, hi = sorted([lo, hi])
    return Interval(lo, hi)


def test_parsing_and_formatting():
    assert as_fraction("3/4") == Fraction(3, 4)
    assert as_fraction(2) == Fraction(2)
    assert format_fraction(Fraction(1, 2)) == "1/2"
    assert format_fraction(Fraction(5)) == "5/1"  # integers keep the /1
    assert format_fraction(Fraction(0)) == "0/1"


def test_reversed_endpoints_rejected():
    with pytest.raises(ValueError):
        Interval(Fraction(1), Fraction(0))


def test_point_intervals():
    p = Interval.exact(Fraction(5, 8))
    assert p.is_point
    assert p.width == 0
    assert p.contains(Fraction(5, 8))


@given(rationals, rationals, rationals, rationals)
def test_addition_encloses_sums(a, b, c, d):
    x = _interval(a, b)
    y = _interval(c, d)
    z = x + y
    assert z.contains(x.lo + y.lo)
    assert z.contains(x.hi + y.hi)
    assert z.width == x.width + y.width


@given(rationals, rationals, rationals)
def test_scaling(a, b, f):
    x = _interval(a, b)
    y = x.scale(f)
    # scaling by a negative factor must swap endpoints, not invert the interval
    assert y.lo <= y.hi
    assert y.contains(x.lo * f)
    assert y.contains(x.hi * f)


@given(rationals, rationals)
def test_reciprocal_of_positive(a, b):
    x = _interval(a, b)
    if x.lo <= 0:
        with pytest.raises(ZeroDivisionError):
            x.reciprocal()
        return
    r = x.reciprocal()
    assert r.lo == 1 / x.hi and r.hi == 1 / x.lo


def test_cap_hi_tightens():
    x = Interval(Fraction(1, 4), Fraction(3, 4))
    assert x.cap_hi(Fraction(1, 2)).hi == Fraction(1, 2)
    assert x.cap_hi(Fraction(2)).hi == Fraction(3, 4)  # no-op when looser
    with pytest.raises(ValueError):
        x.cap_hi(Fraction(1, 8))  # cap below lo would invert


def test_string_form_never_floats():
    strings = Interval(Fraction(1, 3), Fraction(1, 2)).to_strings()
    assert strings == {"lo": "1/3", "hi": "1/2"}
