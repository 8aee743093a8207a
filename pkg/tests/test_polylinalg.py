from __future__ import annotations

import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from _support import polys, sympy_matrix, to_sympy
from nilkeller.errors import ShapeError
from nilkeller.polycore import Poly, parse_poly
from nilkeller.polylinalg import (
    PolyMatrix,
    det,
    hermite_row_reduce,
    is_nilpotent,
    matmul,
    matrix_power,
    principal_minor_sum,
    rank_over_fractions,
    unimodular_inverse,
)
from nilkeller.families import gen_essen_chain
from nilkeller.nilcheck import jacobian


def M(rows, n=2):
    return PolyMatrix.from_rows([[parse_poly(e, n) if isinstance(e, str) else e for e in r] for r in rows], n)


def test_matmul_examples():
    B = M([["x1", "x2"], [1, "x1*x2"]])
    assert matmul(PolyMatrix.identity(2, 2), B) == B
    N = M([[0, 1], [0, 0]])
    assert (N @ N).is_zero()
    assert M([["x1", 0], [0, "x2"]]) @ M([["x2"], ["x1"]]) == M([["x1*x2"], ["x1*x2"]])
    with pytest.raises(ValueError):
        B @ M([[1, 2, 3]])


def test_principal_minor_sum_examples():
    A = M([["x1", 2], [3, "x2"]])
    assert principal_minor_sum(A, 1) == parse_poly("x1+x2", 2)
    assert principal_minor_sum(M([[0, 1], [0, 0]]), 2).is_zero()
    assert principal_minor_sum(M([[1, 0], [0, -1]]), 2) == Poly.const(2, -1)
    with pytest.raises(ValueError):
        principal_minor_sum(A, 3)


def test_is_nilpotent_examples():
    assert is_nilpotent(PolyMatrix.zeros(3, 3, 2))
    assert not is_nilpotent(M([[1, 0], [0, -1]]))
    J = jacobian(gen_essen_chain(5, 2))
    assert is_nilpotent(J)
    assert matrix_power(J, 5).is_zero()
    with pytest.raises(ShapeError):
        is_nilpotent(M([[1, 2]]))


def test_rank_examples():
    assert rank_over_fractions(PolyMatrix.identity(4, 2)) == 4
    assert rank_over_fractions(M([["x2"], [1]])) == 1
    assert rank_over_fractions(M([["x2", "x2^2"], [1, "x2"]])) == 1
    assert rank_over_fractions(PolyMatrix.zeros(2, 3, 2)) == 0


def test_hermite_examples():
    hw = hermite_row_reduce(M([["x2"], [1]]))
    assert hw.A == M([[0, 1], [1, "-x2"]])
    assert hw.reduced == M([[1], [0]])
    assert hw.rank == 1
    assert hw.detA == -1
    hz = hermite_row_reduce(PolyMatrix.zeros(2, 2, 2))
    assert hz.A == PolyMatrix.identity(2, 2) and hz.rank == 0
    hi = hermite_row_reduce(PolyMatrix.identity(2, 2))
    assert hi.A == PolyMatrix.identity(2, 2) and hi.rank == 2
    with pytest.raises(ShapeError):
        hermite_row_reduce(M([["x1"]]))


def _check_hermite(Mx: PolyMatrix):
    hw = hermite_row_reduce(Mx)
    assert hw.A @ Mx == hw.reduced
    assert det(hw.A) == Poly.const(Mx.n, hw.detA) and hw.detA != 0
    for i in range(hw.reduced.rows):
        assert all(e.is_zero() for e in hw.reduced.row(i)) == (i >= hw.rank)
    assert hw.rank == rank_over_fractions(Mx)
    assert all(e.lies_in({2}) for e in hw.A.entries)


univariate_x2 = polys(n=2, max_terms=3, max_exp=3).map(lambda p: p.substitute({1: Poly.zero(2)}))


@settings(max_examples=60)
@given(st.integers(1, 4), st.integers(1, 3), st.data())
def test_hermite_invariants(rows, cols, data):
    entries = [[data.draw(univariate_x2) for _ in range(cols)] for _ in range(rows)]
    _check_hermite(PolyMatrix.from_rows(entries, 2))


def test_hermite_on_dependent_rows():
    _check_hermite(M([["x2", "x2^2+1"], ["x2^2", "x2^3+x2"], [1, 0]]))


@settings(max_examples=40)
@given(st.integers(1, 4), st.data())
def test_det_matches_sympy(size, data):
    A = PolyMatrix.from_rows([[data.draw(polys(n=2, max_terms=2)) for _ in range(size)] for _ in range(size)], 2)
    assert sympy.expand(to_sympy(det(A)) - sympy_matrix(A).det()) == 0


def test_bareiss_path_matches_sympy():
    rng = random.Random(5)
    size = 7
    rows = [[Poly.const(2, rng.randint(-2, 2)) + Poly.var(2, 1).scale(rng.randint(-1, 1)) for _ in range(size)]
            for _ in range(size)]
    A = PolyMatrix.from_rows(rows, 2)
    assert sympy.expand(to_sympy(det(A)) - sympy_matrix(A).det()) == 0


@settings(max_examples=30)
@given(st.data())
def test_minor_sums_are_charpoly_coefficients(data):
    A = PolyMatrix.from_rows([[data.draw(polys(n=2, max_terms=2)) for _ in range(3)] for _ in range(3)], 2)
    lam = sympy.Symbol("lam")
    cp = sympy.Poly(sympy_matrix(A).charpoly(lam).as_expr(), lam)
    for k in range(1, 4):
        coeff = cp.coeff_monomial(lam ** (3 - k))
        assert sympy.expand(to_sympy(principal_minor_sum(A, k)) - (-1) ** k * coeff) == 0


def test_unimodular_inverse():
    A = M([[1, "x2"], [0, 1]])
    assert A @ unimodular_inverse(A) == PolyMatrix.identity(2, 2)
    B = M([[Fraction(1, 2), 0], [0, 1]])
    assert B @ unimodular_inverse(B) == PolyMatrix.identity(2, 2)
    with pytest.raises(ShapeError):
        unimodular_inverse(M([["x2", 0], [0, 1]]))
