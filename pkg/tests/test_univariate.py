from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from nilkeller import univariate as up

coeff_lists = st.lists(st.integers(-5, 5).map(Fraction), max_size=5)


def test_basic_examples():
    assert up.strip([1, 2, 0, 0]) == [1, 2]
    assert up.degree([]) < 0
    assert up.degree([0, 0, 3]) == 2
    assert up.mul([1, 1], [-1, 1]) == [-1, 0, 1]
    assert up.derivative([5, 1, 3]) == [1, 6]
    assert up.antiderivative([1, 6]) == [0, 1, 3]
    assert up.gcd([-1, 0, 1], [1, 1]) == [1, 1]


def test_divmod_by_zero():
    with pytest.raises(ZeroDivisionError):
        up.divmod_([1, 2], [])


@given(coeff_lists, coeff_lists.filter(lambda q: up.strip(q)))
def test_divmod_identity(p, q):
    quo, rem = up.divmod_(p, q)
    assert up.add(up.mul(quo, q), rem) == up.strip(p)
    assert up.degree(rem) < up.degree(q)


@given(coeff_lists, coeff_lists)
def test_gcd_divides_both(p, q):
    g = up.gcd(p, q)
    if not g:
        assert not up.strip(p) and not up.strip(q)
        return
    assert g[-1] == 1
    assert up.divmod_(p, g)[1] == []
    assert up.divmod_(q, g)[1] == []


@given(coeff_lists)
def test_antiderivative_inverts_derivative(p):
    assert up.derivative(up.antiderivative(p)) == up.strip(p)
