"""Parsing and printing of exact rationals and floats."""

from fractions import Fraction
from numbers import Rational

from .errors import DomainError


def as_fraction(value):
    """Convert ints, Fractions and "p/q" strings to an exact Fraction.

    Floats are accepted only when they are exact binary values; use a
    string to pass a decimal such as "0.1".
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise DomainError(f"not a rational: {value!r}")
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise DomainError(f"not a rational: {value!r}") from exc
    raise DomainError(f"not a rational: {value!r}")


def format_rational(q):
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def format_float(x):
    return format(float(x), ".17g")


def format_number(x):
    if isinstance(x, (Fraction, int)) and not isinstance(x, bool):
        return format_rational(x)
    return format_float(x)
