from fractions import Fraction
from math import gcd

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hamon.numeric import LiteralError, as_rational, divide, format_rational, parse_rational


@pytest.mark.parametrize(
    "text, value",
    [("8.5", Fraction(17, 2)), ("-0.25", Fraction(-1, 4)), ("34/3", Fraction(34, 3)), ("12", Fraction(12)),
     (".5", Fraction(1, 2)), ("+3", Fraction(3)), (" 7/14 ", Fraction(1, 2))],
)
def test_parse(text, value):
    assert parse_rational(text) == value


@pytest.mark.parametrize("text", ["", "abc", "1/0", "1e5", "1.2.3", "--1", "1/-2"])
def test_parse_rejects(text):
    with pytest.raises(LiteralError):
        parse_rational(text)


def test_arithmetic_examples():
    assert Fraction(17, 2) + Fraction(1, 2) == 9
    assert divide(Fraction(123 - 40), Fraction(10)) == Fraction(83, 10)
    assert Fraction(34, 3) * 3 == 34
    with pytest.raises(ZeroDivisionError):
        divide(Fraction(1), Fraction(0))


def test_floats_rejected():
    with pytest.raises(TypeError):
        as_rational(0.1)
    with pytest.raises(TypeError):
        as_rational(True)


rationals = st.fractions(max_denominator=10**6).filter(lambda q: abs(q) < 10**9)


@given(rationals, rationals)
def test_canonical_form(a, b):
    for r in (a + b, a - b, a * b) + ((a / b,) if b else ()):
        assert r.denominator > 0
        assert gcd(abs(r.numerator), r.denominator) == 1


@given(rationals, rationals, rationals)
def test_field_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c


@given(rationals)
def test_format_round_trip(q):
    assert parse_rational(format_rational(q)) == q
