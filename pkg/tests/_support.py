"""Shared strategies and oracle conversions for the test suite."""

from __future__ import annotations

from fractions import Fraction

import sympy
from hypothesis import strategies as st

from nilkeller.polycore import Poly, to_str

SYMS = sympy.symbols("x1:9") + (sympy.Symbol("t"),)


def to_sympy(p: Poly):
    return sympy.sympify(to_str(p).replace("^", "**"), locals={str(s): s for s in SYMS})


def sympy_matrix(M):
    return sympy.Matrix([[to_sympy(e) for e in row] for row in M.to_rows()])


coeffs = st.integers(-4, 4).map(Fraction) | st.fractions(min_value=-3, max_value=3, max_denominator=4)


@st.composite
def polys(draw, n: int = 3, max_terms: int = 4, max_exp: int = 2, with_t: bool = False):
    terms = {}
    for _ in range(draw(st.integers(0, max_terms))):
        m = [draw(st.integers(0, max_exp)) for _ in range(n)]
        m.append(draw(st.integers(0, 1)) if with_t else 0)
        terms[tuple(m)] = draw(coeffs)
    return Poly(n, terms)
