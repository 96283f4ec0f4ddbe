"""Exact truth values in [0, 1].

Values are plain :class:`fractions.Fraction` objects. 0 means true, 1 means
false. Nothing in the package uses floating point for semantics.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Union

Value = Fraction
ZERO = Fraction(0)
ONE = Fraction(1)
HALF = Fraction(1, 2)

Rationalish = Union[Fraction, int, str]


def value(x: Rationalish) -> Fraction:
    """Coerce ``x`` to a Fraction and check it lies in [0, 1].

    Floats are refused on purpose.
    """
    if isinstance(x, float):
        raise TypeError(f"refusing float truth value {x!r}; use Fraction or a string")
    q = Fraction(x)
    if q < 0 or q > 1:
        raise ValueError(f"truth value {q} outside [0, 1]")
    return q


def tsub(r: Fraction, s: Fraction) -> Fraction:
    """Truncated subtraction max(r - s, 0)."""
    d = r - s
    return d if d > 0 else ZERO


def tadd(r: Fraction, s: Fraction) -> Fraction:
    """Truncated addition min(r + s, 1)."""
    t = r + s
    return t if t < 1 else ONE


def is_dyadic(q: Fraction) -> bool:
    d = q.denominator
    return d & (d - 1) == 0


def dyadic_exponent(q: Fraction) -> int:
    """The k with denominator 2**k. Raises for non-dyadic input."""
    if not is_dyadic(q):
        raise ValueError(f"{q} is not dyadic")
    return q.denominator.bit_length() - 1


def fmt(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def parse_value(text: str) -> Fraction:
    """Parse ``a/b``, ``a/2^k`` or an integer literal into a value in [0, 1]."""
    t = text.strip()
    if "^" in t:
        num, _, rest = t.partition("/")
        base, _, exp = rest.partition("^")
        if base.strip() != "2":
            raise ValueError(f"only powers of two allowed in {text!r}")
        return value(Fraction(int(num), 2 ** int(exp)))
    return value(Fraction(t))
