"""Exact money values.

All bids, payments and utilities are :class:`fractions.Fraction` (or plain
``int``, which compares and adds exactly with fractions). Nothing in the
package ever touches a float.
"""
from fractions import Fraction
from numbers import Rational
from typing import Union

Money = Fraction
MoneyLike = Union[Fraction, int, str]


def as_money(value: MoneyLike) -> Fraction:
    """Coerce ``value`` to a Fraction.

    Accepts ints, Fractions and decimal or ``p/q`` strings. Floats are refused
    because their binary expansion would leak into exact comparisons.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not money")
    if isinstance(value, Rational):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        try:
            return Fraction(text)
        except (ValueError, ZeroDivisionError):
            raise ValueError(f"not an exact decimal or fraction: {value!r}") from None
    raise TypeError(f"cannot use {type(value).__name__} as money")


def format_money(value) -> str:
    """Integers print bare, everything else as ``p/q``."""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"
