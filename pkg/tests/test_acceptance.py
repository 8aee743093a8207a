"""One test per acceptance criterion; every comparison is exact."""

from __future__ import annotations

import random
import time
from fractions import Fraction

import pytest

from nilkeller import fileio
from nilkeller.classifier import (
    check_lemma22,
    classify_theorem24,
    extract_theorem23,
    find_shift_b,
    verify_theorem24_witness,
)
from nilkeller.families import DEFAULT_SEED, build_corpus, gen_essen_chain, gen_quartic_n4
from nilkeller.genform import (
    WeightVector,
    alpha_residuals,
    decompose_generalized,
    extract_theorem4,
    hstar,
    phi,
    phi_of_H1,
    weight_algorithm,
    weight_postconditions,
)
from nilkeller.nilcheck import (
    PolyMap,
    divisibility_check,
    eq_residuals_primed,
    eq_residuals_section2,
    jacobian,
    jacobian_nilpotent,
    keller,
    linear_independence,
)
from nilkeller.polycore import T, Poly, parse_poly
from nilkeller.polylinalg import PolyMatrix, constant_inverse, det, is_nilpotent, matrix_power
from nilkeller.tamedec import compose_word, decompose_tame, verify_inverse


def pmap(*cs):
    n = len(cs)
    return PolyMap(tuple(parse_poly(c, n) for c in cs))


HAND_EXAMPLES = [
    pmap("0", "x1^2", "0"),
    pmap("-2*x2*(x1+x2^2)+x3", "x1+x2^2", "(x1+x2^2)^2"),
    PolyMap.zero(3),
]


@pytest.fixture(scope="module")
def corpus():
    return build_corpus(DEFAULT_SEED)


@pytest.fixture(scope="module")
def classified(corpus):
    return [(inst, classify_theorem24(inst.instance)) for inst in corpus.thm24]


def test_criterion_1_counterexample_grid():
    start = time.perf_counter()
    maps = [gen_essen_chain(n, d) for n in (5, 6, 7, 8) for d in (2, 3, 4, 5)]
    maps += [gen_quartic_n4(d) for d in (3, 4, 5, 6)]
    for F in maps:
        assert is_nilpotent(jacobian(F))
        assert linear_independence(F.components) is None
    assert time.perf_counter() - start < 10.0


def test_criterion_2_residuals_and_divisibility(corpus):
    maps = corpus.section2_maps()
    assert len(maps) == 160
    for F in maps:
        assert jacobian_nilpotent(F)
        n = F.dim
        assert eq_residuals_section2(F) == (Poly.zero(n),) * 3
        H2x1 = F[2].partial(1)
        if not H2x1.is_zero():
            assert divisibility_check(F) is True


def _univariate(coeffs, q):
    acc = Poly.zero(q.n)
    for c in reversed(coeffs):
        acc = acc * q + Poly.const(q.n, c)
    return acc


def test_criterion_3_shift_polynomial():
    rng = random.Random(DEFAULT_SEED)
    x1, x2 = Poly.var(2, 1), Poly.var(2, 2)

    def coeff():
        return Fraction(rng.randint(-5, 5), rng.randint(1, 3))

    for _ in range(200):
        b = _univariate([Fraction(0)] + [coeff() for _ in range(rng.randint(1, 4))], x2)
        dg = rng.randint(1, 4)
        g = [coeff() for _ in range(dg)] + [Fraction(rng.choice([-3, -2, -1, 1, 2, 3]))]
        assert find_shift_b(_univariate(g, x1 + b)) == b


def test_criterion_4_two_identity_round_trip(corpus):
    assert len(corpus.thm23) == 100
    for p, H in corpus.thm23:
        assert extract_theorem23(H).params() == p.expected()
        assert check_lemma22(H)


def test_criterion_5_normal_form_classification(corpus, classified):
    assert len(classified) == 60
    assert sorted({inst.case for inst, _ in classified}) == ["i", "ii", "iii"]
    for inst, w in classified:
        assert inst.instance.dim <= 6
        assert w.case_tag == inst.case
        assert verify_theorem24_witness(inst.instance, w).ok
        if inst.case == "i":
            hw = w.hermite
            assert hw.A @ hw.M == hw.reduced
            d = det(hw.A)
            assert d.is_constant() and d.constant_term() == hw.detA != 0
            for r in range(hw.rank, hw.reduced.rows):
                assert all(e.is_zero() for e in hw.reduced.row(r))


def test_criterion_6_tame_words(classified):
    pairs = [(inst.instance, w) for inst, w in classified] + [(H, None) for H in HAND_EXAMPLES]
    for H, w in pairs:
        word = decompose_tame(H, w, shortcut=w is None)
        assert compose_word(word, H.dim) == keller(H)
        assert verify_inverse(H, word)


def test_criterion_7_nilpotency_oracle():
    rng = random.Random(DEFAULT_SEED)
    n = 4
    agree = 0
    for i in range(200):
        if i % 2 == 0:
            N = [[rng.randint(-3, 3) if c > r else 0 for c in range(n)] for r in range(n)]
            while True:
                Tm = PolyMatrix.from_rows([[rng.randint(-2, 2) for _ in range(n)] for _ in range(n)], 1)
                if det(Tm).constant_term() != 0:
                    break
            A = constant_inverse(Tm) @ PolyMatrix.from_rows(N, 1) @ Tm
            assert is_nilpotent(A)
        else:
            A = PolyMatrix.from_rows([[rng.randint(-3, 3) for _ in range(n)] for _ in range(n)], 1)
        agree += is_nilpotent(A) == matrix_power(A, n).is_zero()
    assert agree == 200


def _random_poly(rng, n, tail_vars, with_t=False):
    terms = {}
    for _ in range(rng.randint(1, 5)):
        m = [rng.randint(0, 2) for _ in range(n)]
        for i in range(2, n):
            if i + 1 not in tail_vars:
                m[i] = 0
        m.append(rng.randint(0, 1) if with_t else 0)
        terms[tuple(m)] = Fraction(rng.randint(-4, 4), rng.randint(1, 2))
    return Poly(n, terms)


def test_criterion_8_weighted_parts_and_weights(corpus):
    rng = random.Random(DEFAULT_SEED)
    for _ in range(100):
        n = rng.randint(3, 6)
        f = _random_poly(rng, n, set(range(3, n + 1)), with_t=True)
        w = WeightVector((0, 0) + tuple(Fraction(rng.randint(2, 6), 2) for _ in range(n - 2)))
        theta = Fraction(rng.randint(0, 8), 2)
        assert phi(f, w, theta).partial(1) == phi(f.partial(1), w, theta)
        assert phi(f, w, theta).partial(2) == phi(f.partial(2), w, theta)
        h = _random_poly(rng, 3, {3})
        assert h == h.substitute({3: Poly.zero(3)}) + Poly.var(3, 3) * hstar(h)
    assert len(corpus.generalized) == 20
    for inst in corpus.generalized:
        G = inst.shape
        assert jacobian_nilpotent(G.realize())
        assert eq_residuals_primed(G) == (Poly.zero(G.n),) * 3
        assert alpha_residuals(G)[0].is_zero()
        assert phi_of_H1(G.H1).partial(1).is_zero()
    count = 0
    while count < 50:
        n = rng.randint(3, 6)
        H1 = _random_poly(rng, n, set(range(3, n + 1)))
        if H1.lies_in({1, 2}) or H1.involves(T):
            continue
        count += 1
        start = time.perf_counter()
        res = weight_algorithm(H1)
        assert time.perf_counter() - start < 1.0
        assert weight_postconditions(H1, res) == []


def test_criterion_9_lossless_files(corpus, classified):
    maps = [F for _, F in corpus.essen] + [F for _, F in corpus.quartic] + corpus.section2_maps()
    maps += [g.shape for g in corpus.generalized]
    for F in maps:
        text = fileio.dump_map(F)
        back = fileio.load_map(text)
        assert back == F and fileio.dump_map(back) == text
    docs = []
    for inst, w in classified:
        n = inst.instance.dim
        docs.append(("witness", fileio.witness_to_json(w, n)))
        docs.append(("word", fileio.word_to_json(decompose_tame(inst.instance, w, shortcut=False), n)))
    for _, H in corpus.thm23:
        docs.append(("witness", fileio.witness_to_json(extract_theorem23(H), H.n)))
    for g in corpus.generalized:
        if g.kind == "sheared":
            d = decompose_generalized(g.shape)
            docs.append(("witness", fileio.witness_to_json(d.witness, g.shape.n)))
            docs.append(("word", fileio.word_to_json(d.word, g.shape.n)))
        else:
            docs.append(("witness", fileio.witness_to_json(extract_theorem4(g.shape), g.shape.n)))
    for kind, doc in docs:
        text = fileio.dumps(doc)
        parsed = fileio.loads(text)
        if kind == "witness":
            obj = fileio.witness_from_json(parsed)
            again = fileio.witness_to_json(obj, parsed["n"])
        else:
            n, word = fileio.word_from_json(parsed)
            again = fileio.word_to_json(word, n)
        assert fileio.dumps(again) == text
