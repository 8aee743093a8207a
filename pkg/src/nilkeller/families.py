"""Generators for the explicit counterexample families and for synthetic
instances of every normal form, used to build the test corpus.

All randomness flows through a ``random.Random`` built from a seed, so a
corpus is reproducible from that seed alone.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import PreconditionError, ShapeError
from .nilcheck import GeneralizedShape, PolyMap, Section2Shape, conjugate, jacobian_nilpotent, linear_independence
from .polycore import Poly
from .polylinalg import PolyMatrix, constant_det, constant_inverse

DEFAULT_SEED = 1729
FAMILIES = ("essen_chain", "quartic_n4", "thm23", "thm24_case")


@dataclass(frozen=True)
class FamilySpec:
    family: str
    n: int
    d: int = 0
    params: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        if self.family == "essen_chain" and (self.n < 5 or self.d < 2):
            raise ValueError("essen_chain needs n >= 5 and d >= 2")
        if self.family == "quartic_n4" and (self.n != 4 or self.d < 3):
            raise ValueError("quartic_n4 needs n = 4 and d >= 3")


# -- explicit families ------------------------------------------------------------


def gen_essen_chain(n: int, d: int) -> PolyMap:
    """(x2, x1^2 - x4, x2^2, 2 x1 x2 - x3, x4^d, ..., x_{n-1}^d)."""
    if n < 5 or d < 2:
        raise ValueError("essen_chain needs n >= 5 and d >= 2")
    x = [None] + [Poly.var(n, i) for i in range(1, n + 1)]
    comps = [x[2], x[1] ** 2 - x[4], x[2] ** 2, x[1] * x[2] * 2 - x[3]]
    comps += [x[i] ** d for i in range(4, n)]
    return PolyMap(tuple(comps))


def gen_quartic_n4(d: int) -> PolyMap:
    """(-x2^{d-1} - (x1 + x2 x3) x3 + x4, x1 + x2 x3, x2^{d-2}, (x1 + x2 x3) x2^{d-2})."""
    if d < 3:
        raise ValueError("quartic_n4 needs d >= 3")
    n = 4
    x1, x2, x3, x4 = (Poly.var(n, i) for i in range(1, 5))
    u = x1 + x2 * x3
    return PolyMap((-(x2 ** (d - 1)) - u * x3 + x4, u, x2 ** (d - 2), u * x2 ** (d - 2)))


# -- the two-identity family -------------------------------------------------------


def _univariate_eval(coeffs: Sequence[Fraction], q: Poly) -> Poly:
    acc = Poly.zero(q.n)
    for c in reversed(list(coeffs)):
        acc = acc * q + Poly.const(q.n, c)
    return acc


@dataclass(frozen=True)
class Theorem23Params:
    """Parameters of a map satisfying both identities by construction.

    ``sigma`` holds sigma_2..sigma_n. ``free_tails`` maps slot i >= 3 to
    H_i; the slot ``solve_for`` (with sigma nonzero) is solved for so that
    b2 H2^2 = sigma . (H2, ..., Hn).
    """

    n: int
    b1: Fraction
    b2: Fraction
    sigma: Tuple[Fraction, ...]
    g: Tuple[Fraction, ...]
    free_tails: Dict[int, Poly] = field(default_factory=dict, compare=False)
    solve_for: Optional[int] = None

    def expected(self) -> dict:
        return {"b1": self.b1, "b2": self.b2, "sigma": self.sigma, "g": self.g}


def _check_thm23(p: Theorem23Params) -> int:
    if p.n < 3:
        raise ValueError("n >= 3")
    if len(p.sigma) != p.n - 1:
        raise ValueError(f"sigma needs {p.n - 1} entries")
    if p.b2 == 0:
        raise ValueError("b2 must be nonzero")
    if not p.g or p.g[0] != 0 or all(c == 0 for c in p.g):
        raise ValueError("g needs g(0) = 0 and positive degree")
    nonzero = [i for i in range(3, p.n + 1) if p.sigma[i - 2] != 0]
    if not nonzero:
        raise ValueError("some sigma_i with i >= 3 must be nonzero")
    j = p.solve_for if p.solve_for is not None else nonzero[0]
    if j not in nonzero:
        raise ValueError(f"sigma_{j} is zero, cannot solve for H{j}")
    return j


def gen_theorem23_instance(p: Theorem23Params) -> Section2Shape:
    j = _check_thm23(p)
    n = p.n
    x1, x2 = Poly.var(n, 1), Poly.var(n, 2)
    f = x1 + (x2 * x2).scale(p.b2) + x2.scale(p.b1)
    H2 = _univariate_eval(p.g, f)
    H = {2: H2}
    for i in range(3, n + 1):
        if i != j:
            t = p.free_tails.get(i, Poly.zero(n))
            if t.n != n or not t.lies_in({1, 2}):
                raise ValueError(f"free tail H{i} must lie in K[x1, x2]")
            H[i] = t
    rest = (H2 * H2).scale(p.b2) - H2.scale(p.sigma[0])
    for i in range(3, n + 1):
        if i != j:
            rest = rest - H[i].scale(p.sigma[i - 2])
    H[j] = rest.scale(1 / p.sigma[j - 2])
    H1 = -((x2.scale(2 * p.b2) + Poly.const(n, p.b1)) * H2)
    for i in range(2, n + 1):
        H1 = H1 + Poly.var(n, i).scale(p.sigma[i - 2])
    return Section2Shape(PolyMap((H1,) + tuple(H[i] for i in range(2, n + 1))))


def _small(rng: random.Random, lo: int = -3, hi: int = 3, nonzero: bool = False) -> Fraction:
    while True:
        v = rng.randint(lo, hi)
        if v or not nonzero:
            return Fraction(v)


def _random_poly(rng: random.Random, n: int, variables: Sequence[int], max_deg: int, terms: int, min_deg: int = 1) -> Poly:
    """Random poly in ``variables`` with total degree in [min_deg, max_deg]."""
    out = Poly.zero(n)
    for _ in range(terms):
        deg = rng.randint(min_deg, max_deg)
        m = Poly.one(n)
        for _ in range(deg):
            m = m * Poly.var(n, rng.choice(list(variables)))
        out = out + m.scale(_small(rng, nonzero=True))
    return out


def random_theorem23_params(rng: random.Random, n: Optional[int] = None) -> Theorem23Params:
    """Parameters whose instance has independent components and nilpotent JH."""
    for _ in range(100):
        nn = n if n is not None else rng.randint(3, 5)
        b2 = _small(rng, nonzero=True)
        b1 = _small(rng)
        deg = rng.randint(1, 3)
        g = (Fraction(0),) + tuple(_small(rng) for _ in range(deg - 1)) + (_small(rng, nonzero=True),)
        sigma = [_small(rng) for _ in range(nn - 1)]
        j = rng.randint(3, nn)
        sigma[j - 2] = _small(rng, nonzero=True)
        tails = {i: _random_poly(rng, nn, (1, 2), 3, 2) for i in range(3, nn + 1) if i != j}
        p = Theorem23Params(nn, b1, b2, tuple(sigma), g, tails, j)
        H = gen_theorem23_instance(p).source
        if linear_independence(H.components, include_one=True) is None and jacobian_nilpotent(H):
            return p
    raise RuntimeError("could not draw independent parameters")


# -- normal forms and their conjugates ----------------------------------------------


@dataclass(frozen=True)
class Thm24Instance:
    case: str
    k: int
    normal_form: PolyMap
    T: PolyMatrix  # the instance is T H~(T^-1 x) for the normal form H~

    @property
    def shape(self) -> Section2Shape:
        return Section2Shape(self.instance)

    @property
    def instance(self) -> PolyMap:
        Tinv = constant_inverse(self.T)
        return conjugate(self.normal_form, Tinv, self.T)


def random_form_preserving_T(rng: random.Random, n: int) -> PolyMatrix:
    """Integer T with det +-1 that keeps components 2..n inside K[x1, x2].

    Shape [[b11, b12, 0], [0, b22, 0], [0, c, D]] with b11, b22 = +-1 and D
    a product of random integer elementary matrices, entries in [-3, 3].
    """
    m = n - 2
    for _ in range(200):
        D = [[Fraction(int(i == j)) for j in range(m)] for i in range(m)]
        for _ in range(2 * m):
            a, b = rng.sample(range(m), 2) if m > 1 else (0, 0)
            if a == b:
                break
            q = _small(rng, -2, 2)
            D = [row[:] for row in D]
            D[a] = [x + q * y for x, y in zip(D[a], D[b])]
        if any(abs(v) > 3 for row in D for v in row):
            continue
        rows = [[Fraction(0)] * n for _ in range(n)]
        rows[0][0] = Fraction(rng.choice((-1, 1)))
        rows[0][1] = _small(rng)
        rows[1][1] = Fraction(rng.choice((-1, 1)))
        for i in range(m):
            rows[i + 2][1] = _small(rng)
            for j in range(m):
                rows[i + 2][j + 2] = D[i][j]
        Tm = PolyMatrix.from_rows(rows, n)
        if abs(constant_det(Tm)) == 1:
            return Tm
    raise RuntimeError("could not draw a bounded unimodular T")


def _normal_form_ii(rng: random.Random, n: int, k: int) -> PolyMap:
    if not 2 <= k < n:
        raise ValueError("case (ii) needs 2 <= k < n")
    # equal monomials can cancel, so redraw until H1 != 0 and H2 is not constant
    h1 = h2 = Poly.zero(n)
    while h1.is_zero():
        h1 = _random_poly(rng, n, range(k + 1, n + 1), 3, 2, min_deg=2)
    while h2.is_constant():
        h2 = _random_poly(rng, n, (1,), 3, 2)
    mids = [_random_poly(rng, n, (1, 2), 3, 2) for _ in range(3, k + 1)]
    zeros = [Poly.zero(n)] * (n - k)
    return PolyMap((h1, h2) + tuple(mids) + tuple(zeros))


def _normal_form_i(rng: random.Random, n: int, k: int) -> PolyMap:
    if not 2 <= k <= n:
        raise ValueError("case (i) needs 2 <= k <= n")
    x1 = Poly.var(n, 1)
    h1 = _random_poly(rng, n, [2] + list(range(k + 1, n + 1)), 3, 2, min_deg=2)
    # distinct x1-degrees keep the x1-parts independent over K[x2]
    mids = [x1 ** (i - 2) * (Poly.one(n) + _random_poly(rng, n, (2,), 2, 1)) + _random_poly(rng, n, (2,), 3, 1)
            for i in range(3, k + 1)]
    tails = [_random_poly(rng, n, (2,), 3, 1) for _ in range(k + 1, n + 1)]
    return PolyMap((h1, Poly.zero(n)) + tuple(mids) + tuple(tails))


def _normal_form_iii(rng: random.Random, n: int, k: int) -> PolyMap:
    if not 3 <= k <= n:
        raise ValueError("case (iii) needs 3 <= k <= n")
    x1, x2, x3 = (Poly.var(n, i) for i in range(1, 4))
    deg = rng.randint(1, 2)
    g = (Fraction(0),) + tuple(_small(rng) for _ in range(deg - 1)) + (_small(rng, nonzero=True),)
    h2 = _univariate_eval(g, x1 + x2 * x2)
    p = _random_poly(rng, n, range(k + 1, n + 1), 2, 1) if k < n else Poly.zero(n)
    h1 = x3 - x2.scale(2) * h2 + p
    mids = [_random_poly(rng, n, (1, 2), 3, 2) for _ in range(4, k + 1)]
    zeros = [Poly.zero(n)] * (n - k)
    return PolyMap((h1, h2, h2 * h2) + tuple(mids) + tuple(zeros))


_NORMAL_FORMS = {"i": _normal_form_i, "ii": _normal_form_ii, "iii": _normal_form_iii}


def gen_thm24_case(case: str, n: int, k: int, rng: Optional[random.Random] = None, conjugate_randomly: bool = True) -> Thm24Instance:
    """A nilpotent instance of the given normal form, optionally conjugated."""
    if case not in _NORMAL_FORMS:
        raise ValueError(f"unknown case {case!r}")
    if n < 3:
        raise ValueError("n >= 3")
    rng = rng or random.Random(DEFAULT_SEED)
    Ht = _NORMAL_FORMS[case](rng, n, k)
    if not jacobian_nilpotent(Ht):
        raise AssertionError("normal form is not nilpotent")
    Tm = random_form_preserving_T(rng, n) if conjugate_randomly else PolyMatrix.identity(n, n)
    inst = Thm24Instance(case, k, Ht, Tm)
    Section2Shape(inst.instance)
    return inst


# -- generalized shapes -------------------------------------------------------------


@dataclass(frozen=True)
class GeneralizedInstance:
    kind: str  # "sheared" (H2 constant) or "thm23" (H2 non-constant)
    shape: GeneralizedShape
    params: Optional[Theorem23Params] = None


def gen_generalized_sheared(rng: random.Random, n: int, k: int = 2, h2_const: Fraction = Fraction(0)) -> GeneralizedInstance:
    """Constant-H2 instance: a normal form conjugated by a K[x2]-shear.

    Start from (H~1(x2, x_{k+1}, ...), 0, h~3, ..., h~n) with h~_i in
    (x1, x2, x3^2) and h~_i in K[x2] for i > k, then replace x_i by
    x_i + a_i(x2) x1 with a_i in x2 K[x2]. The constant is added to H2 last.
    """
    if not 2 <= k <= n:
        raise ValueError("2 <= k <= n")
    x1, x2, x3 = (Poly.var(n, i) for i in range(1, 4))
    for _ in range(100):
        tail = list(range(k + 1, n + 1))
        if not tail:
            raise ValueError("k < n is needed so that H1 leaves K[x1, x2]")
        H1t = _random_poly(rng, n, [2] + tail, 3, 2, min_deg=1)
        if H1t.lies_in({1, 2}):
            continue
        ht = []
        for i in range(3, n + 1):
            if i <= k:
                h = x1.scale(_small(rng, nonzero=True)) + _random_poly(rng, n, (1, 2), 2, 1) * x1 + (x3 * x3).scale(_small(rng))
                h = h + (x2 * x3).scale(_small(rng))
            else:
                h = _random_poly(rng, n, (2,), 2, 1)
            ht.append(h)
        a = [x2.scale(_small(rng)) for _ in range(3, n + 1)]
        sub = {i: Poly.var(n, i) + a[i - 3] * x1 for i in range(3, n + 1)}
        H1 = H1t.substitute(sub)
        hs = [h - ai * x3 for h, ai in zip(ht, a)]
        G = GeneralizedShape(H1, Poly.const(n, h2_const), hs)
        if jacobian_nilpotent(G.realize()):
            return GeneralizedInstance("sheared", G)
    raise RuntimeError("could not draw a sheared instance")


def gen_generalized_thm23(rng: random.Random, n: int) -> GeneralizedInstance:
    """Non-constant H2: the two-identity family plus slots with sigma_i = 0
    holding h_i(x1, x2, H1) for h_i in (x1, x2, x3^2)."""
    if n < 4:
        raise ValueError("n >= 4 leaves room for an extra slot")
    x1, x2, x3 = (Poly.var(n, i) for i in range(1, 4))
    for _ in range(100):
        p = random_theorem23_params(rng, n)
        extra = [i for i in range(4, n + 1) if p.sigma[i - 2] == 0 and i != p.solve_for]
        if not extra:
            continue
        H = gen_theorem23_instance(p).source
        hs = [H[i] for i in range(3, n + 1)]
        for i in extra:
            h = (x3 * x3).scale(_small(rng, nonzero=True)) + (x1 * x3).scale(_small(rng)) + (x2 * x3).scale(_small(rng))
            hs[i - 3] = h + H[i]
        G = GeneralizedShape(H[1], H[2], hs)
        F = G.realize()
        if linear_independence(F.components, include_one=True) is None and jacobian_nilpotent(F):
            return GeneralizedInstance("thm23", G, p)
    raise RuntimeError("could not draw a generalized two-identity instance")


# -- corpus -------------------------------------------------------------------------


@dataclass
class Corpus:
    seed: int
    essen: List[Tuple[Tuple[int, int], PolyMap]]
    quartic: List[Tuple[int, PolyMap]]
    thm23: List[Tuple[Theorem23Params, Section2Shape]]
    thm24: List[Thm24Instance]
    generalized: List[GeneralizedInstance]

    def section2_maps(self) -> List[PolyMap]:
        out = [s.source for _, s in self.thm23]
        out += [inst.instance for inst in self.thm24]
        return out


def thm24_grid(rng: random.Random, per_case: int = 20, max_n: int = 6) -> List[Thm24Instance]:
    out = []
    for case in ("i", "ii", "iii"):
        for _ in range(per_case):
            n = rng.randint(3, max_n)
            if case == "ii":
                k = rng.randint(2, n - 1)
            elif case == "iii":
                k = rng.randint(3, n)
            else:
                k = rng.randint(2, n)
            out.append(gen_thm24_case(case, n, k, rng))
    return out


def build_corpus(seed: int = DEFAULT_SEED, thm23_count: int = 100, per_case: int = 20, generalized_count: int = 20) -> Corpus:
    rng = random.Random(seed)
    essen = [((n, d), gen_essen_chain(n, d)) for n in (5, 6, 7, 8) for d in (2, 3, 4, 5)]
    quartic = [(d, gen_quartic_n4(d)) for d in (3, 4, 5, 6)]
    thm23 = []
    for _ in range(thm23_count):
        p = random_theorem23_params(rng)
        thm23.append((p, gen_theorem23_instance(p)))
    thm24 = thm24_grid(rng, per_case)
    gen = []
    for i in range(generalized_count):
        if i % 2 == 0:
            n = rng.randint(3, 5)
            c = Fraction(rng.choice((0, 0, 1, -2)))
            gen.append(gen_generalized_sheared(rng, n, rng.randint(2, n - 1), c))
        else:
            gen.append(gen_generalized_thm23(rng, rng.randint(4, 5)))
    return Corpus(seed, essen, quartic, thm23, thm24, gen)
