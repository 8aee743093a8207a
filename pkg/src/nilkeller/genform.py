"""Maps of the form (H1, H2, h3(x1, x2, H1), ..., hn(x1, x2, H1)).

Weighted leading parts, the x3-quotient operator h*, the monomial ideal
conditions, the alpha residuals, the weight-finding loop, and the
constructive normal form for constant H2.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from .classifier import Theorem23Witness, _theorem23_core
from .errors import PreconditionError, RecipeDidNotClose, ShapeError, WitnessError
from .nilcheck import GeneralizedShape, PolyMap, conjugate, jacobian_nilpotent, keller, linear_independence
from .polycore import T, Poly
from .polylinalg import (
    PolyMatrix,
    coefficient_rows,
    constant_inverse,
    det,
    hermite_row_reduce,
    nullspace,
    rref,
    unimodular_inverse,
)

IDEAL_X1_X3SQ = "x1,x3^2"
IDEAL_X1_X2_X3SQ = "x1,x2,x3^2"


# -- the x3-quotient ----------------------------------------------------------------


def _require_xyz(h: Poly) -> None:
    if not h.lies_in({1, 2, 3}):
        raise ShapeError(f"{h} involves variables beyond x1, x2, x3")


def hstar(h: Poly) -> Poly:
    """(h(x1, x2, x3) - h(x1, x2, 0)) / x3."""
    _require_xyz(h)
    out = {}
    for m, c in h.terms.items():
        if m[2]:
            out[m[:2] + (m[2] - 1,) + m[3:]] = c
    return Poly(h.n, out)


def hstar_partials(h: Poly) -> Tuple[Poly, Poly, Poly]:
    """((h_x1)*, (h_x2)*, (h_x3)*); the first two commute with the quotient."""
    _require_xyz(h)
    s = hstar(h)
    a = hstar(h.partial(1))
    b = hstar(h.partial(2))
    if a != s.partial(1) or b != s.partial(2):
        raise AssertionError("quotient does not commute with d/dx1, d/dx2")
    return a, b, hstar(h.partial(3))


# -- weights ------------------------------------------------------------------------


@dataclass(frozen=True)
class WeightVector:
    """Rational weights for x1..xn; t always weighs 0."""

    w: Tuple[Fraction, ...]

    def __post_init__(self):
        w = tuple(Fraction(v) for v in self.w)
        object.__setattr__(self, "w", w)
        if len(w) < 2 or w[0] != 0 or w[1] != 0:
            raise ValueError("weights of x1 and x2 must be 0")
        if any(v < 1 for v in w[2:]):
            raise ValueError("weights of x3..xn must be at least 1")

    @classmethod
    def unit(cls, n: int) -> "WeightVector":
        return cls((0, 0) + (1,) * (n - 2))

    def of_monomial(self, m) -> Fraction:
        return sum((e * v for e, v in zip(m, self.w)), Fraction(0))

    def degree(self, f: Poly) -> Optional[Fraction]:
        """Weighted degree; None stands for the degree of 0."""
        if f.is_zero():
            return None
        return max(self.of_monomial(m) for m in f.terms)

    def to_json(self) -> List[str]:
        return [str(v) for v in self.w]

    @classmethod
    def from_json(cls, data) -> "WeightVector":
        return cls(tuple(Fraction(v) for v in data))


def phi(f: Poly, w: WeightVector, threshold) -> Poly:
    """Terms of f whose weight reaches ``threshold``."""
    threshold = Fraction(threshold)
    return Poly(f.n, {m: c for m, c in f.terms.items() if w.of_monomial(m) >= threshold})


def wstar_degree(f: Poly, w: WeightVector, wH1) -> Optional[Fraction]:
    """max over terms of w(term) + w(H1) deg_t(term); None for f = 0."""
    if f.is_zero():
        return None
    wH1 = Fraction(wH1)
    return max(w.of_monomial(m) + wH1 * m[-1] for m in f.terms)


def ideal_membership_monomial(h: Poly, which: str) -> bool:
    """Termwise membership in (x1, x3^2) or (x1, x2, x3^2)."""
    _require_xyz(h)
    if which == IDEAL_X1_X3SQ:
        use_x2 = False
    elif which == IDEAL_X1_X2_X3SQ:
        use_x2 = True
    else:
        raise ValueError(f"unknown ideal {which!r}")
    return all(m[0] >= 1 or m[2] >= 2 or (use_x2 and m[1] >= 1) for m in h.terms)


def alpha_residuals(G: GeneralizedShape) -> Tuple[Poly, Poly]:
    """(alpha3, alpha1) built from the starred partials evaluated at (x1, x2, H1)."""
    n = G.n
    sub = {3: G.H1}
    a3 = Poly.zero(n)
    a1 = Poly.zero(n)
    for i, h in enumerate(G.h, start=3):
        H1xi = G.H1.partial(i)
        if not H1xi:
            continue
        sx1, _, sx3 = hstar_partials(h)
        a3 = a3 + sx3.substitute(sub) * H1xi
        a1 = a1 + H1xi * sx1.substitute(sub)
    return a3, a1


def phi_of_H1(H1: Poly, w: Optional[WeightVector] = None) -> Poly:
    w = w or WeightVector.unit(H1.n)
    return phi(H1, w, w.degree(H1))


def phi_splits(P: Poly) -> bool:
    """Whether P = beta(x2) * q(x3, ..., xn) for some beta and q."""
    if P.is_zero():
        return True
    if P.involves(1) or P.involves(T):
        return False
    groups = {}
    for m, c in P.terms.items():
        groups.setdefault(m[2:], {})[m[1]] = c
    ref = None
    for g in groups.values():
        vec = dict(g)
        if ref is None:
            ref = vec
            continue
        # proportionality of the K[x2]-coefficients
        k0 = next(iter(ref))
        if set(vec) != set(ref):
            return False
        ratio = vec[k0] / ref[k0]
        if any(vec[e] != ratio * ref[e] for e in ref):
            return False
    return True


# -- weight-finding loop -------------------------------------------------------------


@dataclass(frozen=True)
class WeightAlgoResult:
    w: WeightVector
    T: PolyMatrix  # acts on x3..xn
    k: int
    iterations: int = 0
    history: Tuple[int, ...] = field(default=(), compare=False)

    def transformed(self, H1: Poly) -> Poly:
        return apply_tail_transform(H1, self.T)


def apply_tail_transform(f: Poly, Tm: PolyMatrix) -> Poly:
    """f(x1, x2, T x~) for a matrix T on x3..xn."""
    n = f.n
    xt = [Poly.var(n, i) for i in range(3, n + 1)]
    new = Tm.apply(xt)
    return f.substitute({i: p for i, p in zip(range(3, n + 1), new)})


def _tail_partials_basis_change(Phi: Poly, tail: Sequence[int]) -> Tuple[List[List[Fraction]], int]:
    """Matrix S on the tail block and the number of independent partials.

    Columns: standard vectors at the pivot positions, then kernel vectors.
    """
    parts = [Phi.partial(i) for i in tail]
    rows = coefficient_rows(parts)
    m = len(tail)
    if not rows:
        return [[Fraction(int(i == j)) for j in range(m)] for i in range(m)], 0
    _, pivots = rref(rows)
    kern = nullspace(rows, m)
    cols = [[Fraction(int(r == p)) for r in range(m)] for p in pivots] + kern
    S = [[cols[j][i] for j in range(m)] for i in range(m)]
    return S, len(pivots)


def weight_postconditions(H1: Poly, res: WeightAlgoResult) -> List[str]:
    """Structural checks of a weight-algorithm result; empty when all hold."""
    fails = []
    n = H1.n
    k = res.k
    if res.T.rows != n - 2 or not res.T.is_constant() or det(res.T).is_zero():
        return ["T is not an invertible constant matrix on x3..xn"]
    G = apply_tail_transform(H1, res.T)
    if not G.lies_in(set(range(1, k + 1))):
        fails.append(f"H1(Tx) not in K[x1..x{k}]")
    P = phi(G, res.w, res.w.degree(G))
    parts = [P.partial(i) for i in range(3, k + 1)]
    if linear_independence(parts) is not None or any(p.is_zero() for p in parts):
        fails.append("partials of the leading part are dependent")
    return fails


def weight_algorithm(H1: Poly, max_iter: int = 64) -> WeightAlgoResult:
    """Weights and a tail transform meeting the independence hypothesis.

    Start from unit weights; split the tail partials of the leading part into
    an independent block and a zero block by a linear change of the tail
    variables; raise the common tail weight to the smallest rational that
    brings new terms into the leading part; repeat until H1 only uses
    x1..xk.
    """
    n = H1.n
    if H1.lies_in({1, 2}):
        raise PreconditionError("H1 not in K[x1, x2]", str(H1))
    if H1.involves(T):
        raise ShapeError("H1 involves t")
    weights = [Fraction(0), Fraction(0)] + [Fraction(1)] * (n - 2)
    Tacc = [[Fraction(int(i == j)) for j in range(n - 2)] for i in range(n - 2)]
    cur = H1
    k = 2
    history = [k]
    for it in range(1, max_iter + 1):
        w = WeightVector(tuple(weights))
        theta = w.degree(cur)
        Phi = phi(cur, w, theta)
        tail = list(range(k + 1, n + 1))
        S_block, rank = _tail_partials_basis_change(Phi, tail)
        S = [[Fraction(int(i == j)) for j in range(n - 2)] for i in range(n - 2)]
        off = k - 2
        for i in range(len(tail)):
            for j in range(len(tail)):
                S[off + i][off + j] = S_block[i][j]
        Smat = PolyMatrix.from_rows(S, n)
        cur = apply_tail_transform(cur, Smat)
        Tacc = _matmul_q(Tacc, S)
        new_k = k + rank
        if new_k <= k and it > 1:
            raise RuntimeError("weight loop did not increase k")
        k = new_k
        history.append(k)
        if cur.lies_in(set(range(1, k + 1))):
            res = WeightAlgoResult(WeightVector(tuple(weights)), PolyMatrix.from_rows(Tacc, n), k, it, tuple(history))
            fails = weight_postconditions(H1, res)
            if fails:
                raise WitnessError("; ".join(fails))
            return res
        # raise the tail weight until a new term reaches theta
        wt = weights[k] if k < n else None
        gamma = None
        for m in cur.terms:
            e = sum(m[k:n])
            if e == 0:
                continue
            wb = sum(m[s] * weights[s] for s in range(2, k))
            g = (theta - wb) / e
            if gamma is None or g < gamma:
                gamma = g
        if gamma is None or (wt is not None and gamma <= wt):
            raise RuntimeError("no admissible tail weight")
        for s in range(k, n):
            weights[s] = gamma
    raise RuntimeError("weight loop exceeded its iteration bound")


def _matmul_q(A, B):
    return [[sum((A[i][k] * B[k][j] for k in range(len(B))), Fraction(0)) for j in range(len(B[0]))] for i in range(len(A))]


# -- extraction with constants ------------------------------------------------------


@dataclass(frozen=True)
class Theorem4Witness:
    witness: Theorem23Witness
    const1: Fraction  # H1 + (2 b2 x2 + b1) H2 - sigma . x
    const2: Fraction  # b2 H2^2 - sigma . (H2, ..., Hn)


def extract_theorem4(G: GeneralizedShape) -> Theorem4Witness:
    """b1, b2, sigma for a generalized map; the identities hold up to constants."""
    F = G.realize()
    n = G.n
    if linear_independence(F.components, include_one=True) is not None:
        raise PreconditionError("components of (H, 1) linearly independent over Q")
    if G.H2.is_constant():
        raise PreconditionError("H2 not constant")
    for i, h in enumerate(G.h, start=3):
        if not ideal_membership_monomial(h, IDEAL_X1_X2_X3SQ):
            raise PreconditionError("h_i in (x1, x2, x3^2)", f"h{i} = {h}")
    if not jacobian_nilpotent(F):
        raise PreconditionError("JH nilpotent")
    tails = {i: F[i] for i in range(3, n + 1)}
    core = _theorem23_core(F[1], F[2], tails, range(3, n + 1), allow_constants=True)
    c1 = core.remainder
    if not c1.is_constant():
        raise WitnessError(f"first identity residual {c1} is not constant")
    return Theorem4Witness(core.witness, c1.constant_term(), core.remainder2.constant_term())


# -- constructive normal form for constant H2 ------------------------------------------


@dataclass(frozen=True)
class Theorem4CaseWitness:
    """S (embedded as an n x n matrix fixing slot 2) and k for one of the cases."""

    case: str
    S: PolyMatrix
    k: int
    h2_const: Fraction = Fraction(0)


def embed_fixing_slot2(S: PolyMatrix) -> PolyMatrix:
    """(n-1) x (n-1) matrix to the n x n matrix acting on (x1, x3, ..., xn)."""
    m = S.rows
    n = S.n
    if m != n - 1:
        raise ShapeError("S must be (n-1) x (n-1)")
    idx = [0] + list(range(2, n))
    rows = [[Poly.zero(n) for _ in range(n)] for _ in range(n)]
    rows[1][1] = Poly.one(n)
    for a in range(m):
        for b in range(m):
            rows[idx[a]][idx[b]] = S[a, b]
    return PolyMatrix.from_rows(rows, n)


def conjugate_generalized(F: PolyMap, S_full: PolyMatrix) -> PolyMap:
    """S^-1(x2) H(Sx) for S over K[x2] fixing slot 2."""
    Sinv = constant_inverse(S_full) if S_full.is_constant() else unimodular_inverse(S_full)
    return conjugate(F, S_full, Sinv)


def verify_theorem4_cases(G: GeneralizedShape, w: Theorem4CaseWitness) -> bool:
    return not theorem4_case_failures(G, w)


def theorem4_case_failures(G: GeneralizedShape, w: Theorem4CaseWitness) -> List[str]:
    n = G.n
    F = G.realize()
    if G.H1.lies_in({1, 2}):
        raise PreconditionError("H1 not in K[x1, x2]")
    if w.case not in ("i", "ii", "iii"):
        raise ValueError(f"unknown case {w.case!r}")
    S = w.S
    if S.rows != n or S.cols != n:
        return ["S has the wrong size"]
    if w.case in ("i", "ii"):
        for j in range(n):
            want = 1 if j == 1 else 0
            if S[1, j] != Poly.const(n, want) or (j != 1 and S[j, 1] != Poly.zero(n)):
                return ["S does not fix slot 2"]
    if any(not e.lies_in({2}) for e in S.entries):
        return ["S has entries outside K[x2]"]
    if w.case != "i" and not S.is_constant():
        return ["S is not constant"]
    d = det(S)
    if not d.is_constant() or d.is_zero():
        return ["det S is not a nonzero constant"]
    k = w.k
    if not 2 <= k <= n:
        return [f"k = {k} out of range"]
    H2c = Poly.const(n, w.h2_const)
    if w.h2_const:
        F = PolyMap((F[1], F[2] - H2c) + tuple(F.components[2:]))
    Ht = conjugate_generalized(F, S)
    fails = []
    tail = set(range(k + 1, n + 1))
    x1, x2 = Poly.var(n, 1), Poly.var(n, 2)
    if w.case == "i":
        if not Ht[1].lies_in({2} | tail):
            fails.append("H~1 not in K[x2, x_{k+1}, ..., x_n]")
        if not Ht[2].is_zero():
            fails.append("H~2 != 0")
        for j in tail:
            if not Ht[j].lies_in({2}):
                fails.append(f"H~{j} not in K[x2]")
    elif w.case == "ii":
        if not Ht[1].lies_in(tail):
            fails.append("H~1 not in K[x_{k+1}, ..., x_n]")
        if not Ht[2].lies_in({1}) or Ht[2].is_constant():
            fails.append("H~2 not in K[x1] \\ K")
        for j in tail:
            if not Ht[j].is_constant():
                fails.append(f"H~{j} not constant")
    else:
        if not (Ht[1] + x2.scale(2) * Ht[2] - Poly.var(n, 3)).lies_in(tail):
            fails.append("H~1 + 2 x2 H~2 - x3 not in K[x_{k+1}, ..., x_n]")
        if not Ht[2].substitute({1: x1 - x2 * x2}).lies_in({1}) or Ht[2].is_constant():
            fails.append("H~2 not in K[x1 + x2^2] \\ K")
        if not (Ht[3] - Ht[2] * Ht[2]).is_constant():
            fails.append("H~3 - H~2^2 not constant")
        for j in tail:
            if not Ht[j].is_constant():
                fails.append(f"H~{j} not constant")
    return fails


@dataclass(frozen=True)
class GeneralizedDecomposition:
    witness: Theorem4CaseWitness
    word: list
    htilde: Tuple[Poly, ...]  # the conjugated map S^-1 H(Sx)


def normal_form_constant_h2(G: GeneralizedShape) -> Tuple[Theorem4CaseWitness, PolyMatrix, PolyMatrix, object]:
    """S over K[x2] for constant H2, via a K[x2]-shear and Hermite reduction.

    Returns the witness, the shear S1, the block matrix A and its Hermite data.
    Raises RecipeDidNotClose when an intermediate claim fails for this input.
    """
    n = G.n
    if not G.H2.is_constant():
        raise PreconditionError("H2 constant")
    if G.H1.lies_in({1, 2}):
        raise PreconditionError("H1 not in K[x1, x2]")
    if not jacobian_nilpotent(G.realize()):
        raise PreconditionError("JH nilpotent")
    c = G.H2.constant_term()
    x1 = Poly.var(n, 1)
    # shear x_i -> x_i + a_i(x2) x1 removes the x2^j x3 terms of h_i
    S1_rows = [[Poly.const(n, int(i == j)) for j in range(n)] for i in range(n)]
    a = []
    for i, h in enumerate(G.h, start=3):
        lin = Poly(n, {m[:2] + (0,) + m[3:]: v for m, v in h.terms.items() if m[2] == 1 and m[0] == 0})
        a.append(lin)
        S1_rows[i - 1][0] = lin
    S1 = PolyMatrix.from_rows(S1_rows, n)
    H1s = G.H1.substitute({i: Poly.var(n, i) + S1[i - 1, 0] * x1 for i in range(3, n + 1)})
    hs = [h - ai * Poly.var(n, 3) for h, ai in zip(G.h, a)]
    if not H1s.partial(1).is_zero():
        raise RecipeDidNotClose("trace identity fails after the shear")
    # M collects x1- and x3-derivatives of the tails, coefficientwise over x1^a x3^b
    derivs = [[h.partial(1) for h in hs], [h.partial(3) for h in hs]]
    keys = sorted({(m[0], m[2], which) for which, ds in enumerate(derivs) for d in ds for m in d.terms})
    if not keys:
        keys = [(0, 0, 0)]
    rows = []
    for r in range(n - 2):
        row = []
        for (ea, eb, which) in keys:
            d = derivs[which][r]
            row.append(Poly(n, {(0, m[1], 0) + m[3:]: v for m, v in d.terms.items() if m[0] == ea and m[2] == eb}))
        rows.append(row)
    M = PolyMatrix.from_rows(rows, n)
    hw = hermite_row_reduce(M)
    k = hw.rank + 2
    A = hw.A
    Ainv = unimodular_inverse(A)
    blk = [[Poly.const(n, int(i == j)) for j in range(n)] for i in range(n)]
    for i in range(n - 2):
        for j in range(n - 2):
            blk[i + 2][j + 2] = Ainv[i, j]
    S2 = PolyMatrix.from_rows(blk, n)
    S_full = S1 @ S2
    idx = [0] + list(range(2, n))
    S_small = PolyMatrix.from_rows([[S_full[i, j] for j in idx] for i in idx], n)
    w = Theorem4CaseWitness("i", embed_fixing_slot2(S_small), k, c)
    return w, S1, A, hw


def decompose_generalized(G: GeneralizedShape) -> GeneralizedDecomposition:
    """Tame word for x + tH with H2 constant, checked by exact composition."""
    from .tamedec import (
        ElementaryMap,
        check_word,
        hermite_factors,
        invert_word,
        triangular_word,
    )
    from .errors import CompositionMismatch

    n = G.n
    F = G.realize()
    w, S1, A, hw = normal_form_constant_h2(G)
    fails = theorem4_case_failures(G, w)
    if fails:
        raise RecipeDidNotClose("; ".join(fails))
    c = w.h2_const
    F0 = PolyMap((F[1], F[2] - Poly.const(n, c)) + tuple(F.components[2:]))
    Ht = conjugate_generalized(F0, w.S)
    try:
        inner = triangular_word(Ht.components)
    except ShapeError as exc:
        raise RecipeDidNotClose(str(exc)) from exc
    x1 = Poly.var(n, 1)
    shear = [ElementaryMap(i, S1[i - 1, 0] * x1) for i in range(3, n + 1) if not S1[i - 1, 0].is_zero()]
    gword = hermite_factors(hw.ops, n)
    # S = S1 * diag(1, 1, A^-1) as a map is shear o G^-1
    Sword = shear + invert_word(gword)
    word = Sword + inner + invert_word(Sword)
    if c:
        word = [ElementaryMap(2, Poly.const(n, c) * Poly.var(n, T))] + word
    try:
        check_word(word, keller(F))
    except CompositionMismatch as exc:
        raise RecipeDidNotClose(str(exc)) from exc
    return GeneralizedDecomposition(w, word, Ht.components)
