from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from netauction.money import as_money, format_money


def test_decimal_string_is_exact():
    assert as_money("2.5") == Fraction(5, 2)
    assert as_money("0.1") == Fraction(1, 10)


def test_fraction_string_and_int():
    assert as_money("7/2") == Fraction(7, 2)
    assert as_money(3) == 3


@pytest.mark.parametrize("bad", [0.5, True, None, [1]])
def test_rejects_inexact_types(bad):
    with pytest.raises(TypeError):
        as_money(bad)


def test_rejects_garbage_strings():
    with pytest.raises(ValueError):
        as_money("two")


def test_format_prints_integers_bare():
    assert format_money(Fraction(4)) == "4"
    assert format_money(Fraction(-1, 2)) == "-1/2"


@given(st.fractions())
def test_format_round_trips(x):
    assert as_money(format_money(x)) == x
