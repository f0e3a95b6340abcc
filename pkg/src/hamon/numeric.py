"""Exact rational scalars.

``fractions.Fraction`` already keeps numerator/denominator in lowest terms
with a positive denominator after every operation, so it is used directly as
the rational type.  This module only adds the literal grammar shared by the
model and log file formats.
"""
from __future__ import annotations

import re
from fractions import Fraction

Rational = Fraction

_DECIMAL = re.compile(r"[+-]?(\d+(\.\d*)?|\.\d+)")
_FRACTION = re.compile(r"([+-]?\d+)\s*/\s*(\d+)")


class LiteralError(ValueError):
    """Raised for malformed rational literals."""


def parse_rational(text: str) -> Fraction:
    """Parse ``"8.5"``, ``"-0.25"``, ``"12"`` or ``"34/3"`` exactly."""
    s = text.strip()
    m = _FRACTION.fullmatch(s)
    if m:
        den = int(m.group(2))
        if den == 0:
            raise LiteralError(f"zero denominator in {text!r}")
        return Fraction(int(m.group(1)), den)
    if _DECIMAL.fullmatch(s):
        # Fraction parses decimal strings exactly (no binary rounding)
        return Fraction(s)
    raise LiteralError(f"malformed rational literal {text!r}")


def as_rational(value) -> Fraction:
    """Coerce ints, Fractions and literal strings; floats are rejected."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return parse_rational(value)
    raise TypeError(f"cannot use {type(value).__name__} as an exact rational")


def format_rational(q: Fraction) -> str:
    """Shortest exact literal: integers plain, finite decimals as decimals,
    everything else as ``p/q``."""
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    den = q.denominator
    twos = fives = 0
    while den % 2 == 0:
        den //= 2
        twos += 1
    while den % 5 == 0:
        den //= 5
        fives += 1
    if den == 1 and max(twos, fives) <= 6:
        digits = max(twos, fives)
        scaled = abs(q.numerator) * 10**digits // q.denominator
        sign = "-" if q < 0 else ""
        whole, frac = divmod(scaled, 10**digits)
        return f"{sign}{whole}.{frac:0{digits}d}".rstrip("0")
    return f"{q.numerator}/{q.denominator}"


def divide(a: Fraction, b: Fraction) -> Fraction:
    if b == 0:
        raise ZeroDivisionError("rational division by zero")
    return Fraction(a) / Fraction(b)
