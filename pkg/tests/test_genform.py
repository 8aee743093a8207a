from __future__ import annotations

import random
from dataclasses import replace
from fractions import Fraction

import pytest
from hypothesis import given, settings

from _support import polys
from nilkeller.classifier import classify_theorem24, extract_theorem23
from nilkeller.errors import PreconditionError, ShapeError
from nilkeller.families import gen_generalized_sheared, gen_generalized_thm23
from nilkeller.genform import (
    IDEAL_X1_X2_X3SQ,
    IDEAL_X1_X3SQ,
    Theorem4CaseWitness,
    WeightVector,
    alpha_residuals,
    decompose_generalized,
    embed_fixing_slot2,
    extract_theorem4,
    hstar,
    hstar_partials,
    ideal_membership_monomial,
    phi,
    phi_of_H1,
    phi_splits,
    verify_theorem4_cases,
    weight_algorithm,
    weight_postconditions,
    wstar_degree,
)
from nilkeller.nilcheck import GeneralizedShape, PolyMap, eq_residuals_primed, keller
from nilkeller.polycore import T, Poly, parse_poly
from nilkeller.polylinalg import PolyMatrix
from nilkeller.tamedec import compose_word

F = Fraction


def P(s, n=3):
    return parse_poly(s, n)


def G(H1, H2, *h, n=3):
    return GeneralizedShape(P(H1, n), P(H2, n), tuple(P(x, n) for x in h))


RUNNING_G = G("-2*x2*(x1+x2^2)+x3", "x1+x2^2", "(x1+x2^2)^2")


def test_hstar_examples():
    assert hstar(P("x3^2")) == P("x3")
    assert hstar(P("x1+x2*x3")) == P("x2")
    assert hstar(P("x1*x2+5")).is_zero()
    with pytest.raises(ShapeError):
        hstar(P("x4", 4))


def test_hstar_partials_examples():
    assert hstar_partials(P("x1*x3^2")) == (P("x3"), Poly.zero(3), P("2*x1"))
    assert hstar_partials(P("x3")) == (Poly.zero(3),) * 3
    h = P("x3^2")
    assert hstar_partials(h)[2] == P("2")
    assert hstar(h).partial(3) == P("1")


@given(polys(n=3, max_exp=3))
def test_hstar_decomposition(h):
    x3 = Poly.var(3, 3)
    assert h == h.substitute({3: Poly.zero(3)}) + x3 * hstar(h)


@given(polys(n=3), polys(n=3))
def test_hstar_linear(a, b):
    assert hstar(a + b.scale(3)) == hstar(a) + hstar(b).scale(3)


def test_phi_examples():
    w = WeightVector.unit(3)
    f = P("x3*x2^5+x1*x3+x2")
    assert phi(f, w, 1) == P("x3*x2^5+x1*x3")
    assert phi(f, w, 0) == f
    assert phi(f, w, 5).is_zero()


def test_weight_vector_convention():
    with pytest.raises(ValueError):
        WeightVector((1, 0, 1))
    with pytest.raises(ValueError):
        WeightVector((0, 0, F(1, 2)))


def test_wstar_examples():
    w = WeightVector.unit(3)
    assert wstar_degree(Poly.zero(3), w, 1) is None
    assert wstar_degree(Poly.var(3, T), w, 2) == 2
    assert wstar_degree(P("x3*t"), w, 1) == 2


def test_wstar_matches_substitution_when_phi_vanishes():
    # w*(f) = w(f at t = H1) when the top-weight part of f does not cancel
    w = WeightVector((0, 0, 1, 2))
    H1 = P("x3^2+x4", 4)
    f = P("x3*t+x1*x4^2+x2", 4)
    assert wstar_degree(f, w, w.degree(H1)) == w.degree(f.substitute({T: H1}))


def test_ideal_membership_examples():
    assert ideal_membership_monomial(P("x1*x2+x3^3"), IDEAL_X1_X3SQ)
    assert not ideal_membership_monomial(P("x2"), IDEAL_X1_X3SQ)
    assert ideal_membership_monomial(P("x2"), IDEAL_X1_X2_X3SQ)
    assert ideal_membership_monomial(Poly.zero(3), IDEAL_X1_X3SQ)


def test_alpha_examples():
    assert alpha_residuals(RUNNING_G) == (Poly.zero(3), Poly.zero(3))
    assert alpha_residuals(G("x3", "0", "x1*x3"))[1] == Poly.one(3)


@settings(max_examples=100)
@given(polys(n=4, max_exp=3, with_t=True))
def test_phi_commutes_with_x1_x2(f):
    w = WeightVector((0, 0, 1, F(3, 2)))
    for theta in (0, 1, F(5, 2), 4):
        assert phi(f, w, theta).partial(1) == phi(f.partial(1), w, theta)
        assert phi(f, w, theta).partial(2) == phi(f.partial(2), w, theta)


@pytest.mark.parametrize(
    "H1,n,k,weights",
    [
        ("x3", 3, 3, (0, 0, 1)),
        ("x3+x4", 4, 3, (0, 0, 1, 1)),
        ("x3+x4^2", 4, 4, (0, 0, 1, 2)),
        ("x3*x4+x5^3+x4^2", 5, 5, (0, 0, 1, F(3, 2), F(3, 2))),
    ],
)
def test_weight_algorithm_examples(H1, n, k, weights):
    f = P(H1, n)
    res = weight_algorithm(f)
    assert res.k == k
    assert res.w == WeightVector(weights)
    assert weight_postconditions(f, res) == []
    assert list(res.history) == sorted(res.history)


def test_weight_algorithm_merges_linear_dependency():
    res = weight_algorithm(P("x3+x4", 4))
    assert res.transformed(P("x3+x4", 4)).lies_in({1, 2, 3})


def test_weight_algorithm_precondition():
    with pytest.raises(PreconditionError):
        weight_algorithm(P("x1*x2"))


def test_extract_theorem4_examples():
    w4 = extract_theorem4(RUNNING_G)
    assert w4.witness == extract_theorem23(RUNNING_G.realize())
    assert (w4.const1, w4.const2) == (0, 0)
    moved = GeneralizedShape(RUNNING_G.H1 + Poly.const(3, 5), RUNNING_G.H2, RUNNING_G.h)
    w5 = extract_theorem4(moved)
    assert w5.witness.params() == w4.witness.params()
    assert w5.const1 == 5
    with pytest.raises(PreconditionError):
        extract_theorem4(G("x3", "x1", "x3"))


def test_theorem4_case_examples():
    ident = embed_fixing_slot2(PolyMatrix.identity(2, 3))
    assert ident == PolyMatrix.identity(3, 3)
    assert verify_theorem4_cases(RUNNING_G, Theorem4CaseWitness("iii", ident, 3))
    bad = PolyMatrix.from_rows([[P("x2"), 0, 0], [0, 1, 0], [0, 0, 1]], 3)
    assert not verify_theorem4_cases(RUNNING_G, Theorem4CaseWitness("iii", bad, 3))
    # a case-(ii) normal form reinterpreted with trivial tails h_i
    H = PolyMap(tuple(P(s, 4) for s in ("x4^2", "x1^2", "x1+x2", "0")))
    w = classify_theorem24(H)
    assert w.T.is_constant()
    Gii = GeneralizedShape(H[1], H[2], (H[3], H[4]))
    idx = [0, 2, 3]
    S = PolyMatrix.from_rows([[w.T[i, j] for j in idx] for i in idx], 4)
    assert verify_theorem4_cases(Gii, Theorem4CaseWitness("ii", embed_fixing_slot2(S), w.k))


def test_generalized_corpus_properties():
    rng = random.Random(99)
    for i in range(8):
        inst = gen_generalized_sheared(rng, 4, 2 + i % 2, F(i % 3)) if i % 2 == 0 else gen_generalized_thm23(rng, 4)
        Gs = inst.shape
        assert eq_residuals_primed(Gs) == (Poly.zero(4),) * 3
        assert alpha_residuals(Gs)[0].is_zero()
        assert phi_of_H1(Gs.H1).partial(1).is_zero()
        if not Gs.H2.partial(1).is_zero():
            assert phi_splits(phi_of_H1(Gs.H1))
        if inst.kind == "sheared":
            dec = decompose_generalized(Gs)
            assert compose_word(dec.word, 4) == keller(Gs.realize())
            assert verify_theorem4_cases(Gs, dec.witness)
            assert not verify_theorem4_cases(Gs, replace(dec.witness, k=1))
        else:
            w4 = extract_theorem4(Gs)
            assert w4.witness.params() == inst.params.expected()


def test_phi_splits():
    assert phi_splits(P("x2^2*x3+x3", 4) * P("x3+x4", 4))
    assert not phi_splits(P("x2*x3+x4", 4))
    assert not phi_splits(P("x1*x3", 4))
