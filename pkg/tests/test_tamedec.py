from __future__ import annotations

import random

import pytest

from nilkeller.classifier import classify_theorem24
from nilkeller.errors import ShapeError
from nilkeller.families import gen_thm24_case
from nilkeller.nilcheck import PolyMap, keller
from nilkeller.polycore import T, parse_poly
from nilkeller.polylinalg import PolyMatrix
from nilkeller.tamedec import (
    ElementaryMap,
    LinearMap,
    compose_word,
    decompose_tame,
    invert_word,
    specialize_t,
    triangular_word,
    verify_inverse,
    verify_inverse_right,
    word_stats,
)


def pmap(*cs):
    n = len(cs)
    return PolyMap(tuple(parse_poly(c, n) for c in cs))


RUNNING = pmap("-2*x2*(x1+x2^2)+x3", "x1+x2^2", "(x1+x2^2)^2")


def elem(i, s, n=3):
    return ElementaryMap(i, parse_poly(s, n))


def test_compose_word_examples():
    assert compose_word([], 3).is_identity()
    e = elem(2, "t*x1^2")
    assert compose_word([e]) == pmap("x1", "x2+t*x1^2", "x3")
    word = [e, elem(1, "x3*t"), LinearMap(PolyMatrix.from_rows([[0, 1, 0], [1, 0, 0], [0, 0, 1]], 3))]
    assert compose_word(word + invert_word(word)).is_identity()


def test_order_convention():
    # [F1, F2] is F1 o F2: F2 acts first
    a, b = elem(1, "x2"), elem(2, "x1")
    assert compose_word([a, b]) == pmap("x1+x2+x1", "x2+x1", "x3")


def test_invert_word_examples():
    assert invert_word([elem(2, "t*x1^2")]) == [elem(2, "-t*x1^2")]
    assert invert_word([]) == []


def test_elementary_invariant():
    with pytest.raises(ShapeError):
        elem(1, "x1*x2")
    with pytest.raises(ShapeError):
        LinearMap(PolyMatrix.zeros(3, 3, 3))


def test_decompose_examples():
    H = pmap("0", "x1^2", "0")
    assert decompose_tame(H) == [elem(2, "t*x1^2")]
    assert decompose_tame(PolyMap.zero(3)) == []
    word = decompose_tame(RUNNING, classify_theorem24(RUNNING), shortcut=False)
    assert compose_word(word) == keller(RUNNING)
    assert verify_inverse(RUNNING, word)
    assert verify_inverse_right(RUNNING, word)


def test_specialize_examples():
    KH = keller(RUNNING)
    assert specialize_t(KH, 0).is_identity()
    x = PolyMap.identity(3)
    assert specialize_t(KH, 1) == x + RUNNING
    word = decompose_tame(RUNNING)
    inv = compose_word(specialize_t(invert_word(word), 1))
    assert (x + RUNNING).compose(inv).is_identity()


def test_triangular_word_rejects_cycles():
    with pytest.raises(ShapeError):
        triangular_word([parse_poly("x2", 2), parse_poly("x1", 2)])


@pytest.mark.parametrize("case,n,k", [("i", 4, 3), ("i", 5, 4), ("ii", 5, 3), ("iii", 4, 4), ("iii", 5, 3)])
def test_decompose_generated_without_shortcut(case, n, k):
    inst = gen_thm24_case(case, n, k, random.Random(7))
    H = inst.instance
    word = decompose_tame(H, shortcut=False)
    assert compose_word(word, n) == keller(H)
    assert verify_inverse(H, word)
    for f in word:
        if isinstance(f, ElementaryMap):
            assert not f.P.involves(f.i)
    stats = word_stats(word)
    assert stats["length"] == stats["elementary"] + stats["linear"]


def test_words_are_polynomial_in_t():
    word = decompose_tame(RUNNING, shortcut=False)
    t_degree = max(f.P.degree_wrt([T]) for f in word if isinstance(f, ElementaryMap))
    assert t_degree >= 1
    assert compose_word(specialize_t(word, 0)).is_identity()
