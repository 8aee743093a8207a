"""Classification witnesses for maps whose Jacobian is nilpotent.

Covers the shift polynomial b with q in K[x1 + b(x2)], the sigma/b data of
the linearly independent case, and the three normal forms reached by a
linear conjugation T^-1 H(Tx) when the components may be dependent.

Construction and verification are separate: ``classify_theorem24`` builds a
witness and ``verify_theorem24_witness`` re-checks any witness from scratch.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from . import univariate as up
from .errors import CorpusAnomaly, PreconditionError, ShapeError, WitnessError
from .nilcheck import (
    PolyMap,
    Section2Shape,
    conjugate,
    express_in,
    independent_subset,
    jacobian_nilpotent,
    linear_independence,
)
from .polycore import Poly, content_wrt_tail, divides, from_univariate, homog_part_wrt, to_univariate
from .polylinalg import (
    HermiteWitness,
    PolyMatrix,
    constant_det,
    constant_inverse,
    det,
    hermite_row_reduce,
    unimodular_inverse,
)

CASES = ("i", "ii", "iii", "lower")


# -- shift polynomial ------------------------------------------------------------


def find_shift_b(q: Poly) -> Poly:
    """b in K[x2] with b(0) = 0 and q in K[x1 + b(x2)].

    Requires q_{x1} != 0, q_{x1} free of factors in K[x2] minus K, and
    q_{x1} | q_{x2}^k for some k <= deg q.
    """
    n = q.n
    if not q.lies_in({1, 2}):
        raise PreconditionError("q in K[x1, x2]", str(q))
    qx1 = q.partial(1)
    if qx1.is_zero():
        raise PreconditionError("q_x1 != 0", str(q))
    if content_wrt_tail(qx1) != Poly.one(n):
        raise PreconditionError("q_x1 has no factor in K[x2] \\ K", f"content {content_wrt_tail(qx1)}")
    qx2 = q.partial(2)
    if qx2.is_zero():
        return Poly.zero(n)
    if not any(divides(qx1, qx2 ** k) is not None for k in range(1, max(1, q.degree()) + 1)):
        raise PreconditionError("q_x1 | q_x2^k", str(q))
    quo = divides(qx1, qx2)
    if quo is None or not quo.lies_in({2}):
        raise PreconditionError("q_x2 / q_x1 in K[x2]", str(q))
    b = from_univariate(up.antiderivative(to_univariate(quo, 2)), n, 2)
    shifted = q.substitute({1: Poly.var(n, 1) - b})
    if not shifted.lies_in({1}):
        raise WitnessError(f"q(x1 - b, x2) = {shifted} still involves x2")
    return b


def find_shift_b_general(q: Poly, w_coeffs: Sequence) -> Poly:
    """Shift polynomial under the weaker hypothesis q_{x1} | w(q) q_{x2}^k."""
    n = q.n
    if not q.lies_in({1, 2}):
        raise PreconditionError("q in K[x1, x2]", str(q))
    qx1 = q.partial(1)
    if qx1.is_zero():
        raise PreconditionError("q_x1 != 0", str(q))
    if content_wrt_tail(qx1) != Poly.one(n):
        raise PreconditionError("q_x1 has no factor in K[x2] \\ K", str(q))
    w = up.strip([Fraction(c) for c in w_coeffs])
    if not w:
        raise PreconditionError("w != 0")
    wq = _eval_univariate(w, q)
    qx2 = q.partial(2)
    if not any(divides(qx1, wq * qx2 ** k) is not None for k in range(0, max(1, q.degree()) + 2)):
        raise PreconditionError("q_x1 | w(q) q_x2^k", str(q))
    # Q with dQ/dq = w satisfies the hypotheses of find_shift_b
    Q = _eval_univariate(up.antiderivative(w), q)
    b = find_shift_b(Q)
    shifted = q.substitute({1: Poly.var(n, 1) - b})
    if not shifted.lies_in({1}):
        raise WitnessError(f"q(x1 - b, x2) = {shifted} still involves x2")
    return b


def _eval_univariate(coeffs: Sequence[Fraction], q: Poly) -> Poly:
    acc = Poly.zero(q.n)
    for c in reversed(list(coeffs)):
        acc = acc * q + Poly.const(q.n, c)
    return acc


# -- independent case ---------------------------------------------------------------


@dataclass(frozen=True)
class Theorem23Witness:
    b1: Fraction
    b2: Fraction
    sigma: Tuple[Fraction, ...]  # sigma_2 .. sigma_m
    f: Poly
    g_coeffs: Tuple[Fraction, ...]

    def params(self) -> dict:
        return {"b1": self.b1, "b2": self.b2, "sigma": self.sigma, "g": self.g_coeffs}


@dataclass(frozen=True)
class _Core:
    witness: Theorem23Witness
    remainder: Poly  # part of H1 + b'H2 - sigma.x that lies in the inert variables
    remainder2: Poly  # b2 H2^2 - sigma . (H2, H3, ...)


def _theorem23_core(
    H1: Poly,
    H2: Poly,
    tails: Dict[int, Poly],
    active: Sequence[int],
    inert: Sequence[int] = (),
    allow_constants: bool = False,
) -> _Core:
    n = H1.n
    active = list(active)
    bar = homog_part_wrt(H1, active, 1)
    if H1.degree_wrt(active) != 1:
        raise PreconditionError("leading homogeneous part has degree 1", f"degree {H1.degree_wrt(active)}")
    sig_tail = []
    for i in active:
        ci = bar.partial(i)
        if not ci.is_constant():
            raise WitnessError(f"coefficient of x{i} in the linear part is {ci}, not a constant")
        sig_tail.append(ci.constant_term())
    if all(s == 0 for s in sig_tail):
        raise WitnessError("all sigma_i with i >= 3 vanish")
    b = find_shift_b(H2)
    bu = to_univariate(b, 2)
    if len(bu) > 3:
        raise WitnessError(f"shift polynomial {b} has degree > 2")
    bu = bu + [Fraction(0)] * (3 - len(bu))
    b1, b2 = bu[1], bu[2]
    if b2 == 0:
        raise WitnessError("b2 = 0")
    x1 = Poly.var(n, 1)
    g_poly = H2.substitute({1: x1 - b})
    g = to_univariate(g_poly, 1)
    if not allow_constants and g and g[0] != 0:
        raise WitnessError("g(0) != 0")
    lin = Poly.zero(n)
    for i, s in zip(active, sig_tail):
        lin = lin + Poly.var(n, i).scale(s)
    c = H1 + b.partial(2) * H2 - lin
    inert_part = _restrict_to(c, set(inert))
    rest = c - inert_part
    if not rest.lies_in({2}) or rest.degree() > 1:
        raise WitnessError(f"c(x2) = {rest} is not a multiple of x2")
    sigma2 = rest.coeff(_mono(n, 2))
    if not allow_constants and inert_part.constant_term() != 0:
        raise WitnessError("nonzero constant in the first identity")
    sigma = (sigma2,) + tuple(sig_tail)
    lhs2 = H2 * H2 * b2 - H2.scale(sigma2)
    for i, s in zip(active, sig_tail):
        if s:
            lhs2 = lhs2 - tails[i].scale(s)
    if not lhs2.is_constant() or (not allow_constants and not lhs2.is_zero()):
        raise WitnessError(f"second identity fails: residual {lhs2}")
    f = x1 + b
    w = Theorem23Witness(b1=b1, b2=b2, sigma=sigma, f=f, g_coeffs=tuple(g))
    return _Core(w, inert_part, lhs2)


def _restrict_to(p: Poly, allowed: set) -> Poly:
    """Terms of p that only involve variables in ``allowed``."""
    slots = {i - 1 for i in allowed}
    return Poly(p.n, {m: c for m, c in p.terms.items() if all(e == 0 or s in slots for s, e in enumerate(m))})


def _mono(n: int, i: int) -> Tuple[int, ...]:
    m = [0] * (n + 1)
    m[i - 1] = 1
    return tuple(m)


def _check_section2_preconditions(H: Section2Shape, independence: bool) -> None:
    if any(not c.constant_term() == 0 for c in H.source):
        raise PreconditionError("H(0) = 0")
    if independence and linear_independence(H.source.components) is not None:
        raise PreconditionError("components linearly independent over Q")
    if not jacobian_nilpotent(H.source):
        raise PreconditionError("JH nilpotent")


def _as_shape(H) -> Section2Shape:
    return H if isinstance(H, Section2Shape) else Section2Shape(H)


def extract_theorem23(H) -> Theorem23Witness:
    """b1, b2, sigma and g for a nilpotent map with independent components."""
    H = _as_shape(H)
    if H.n < 3:
        raise PreconditionError("n >= 3")
    _check_section2_preconditions(H, independence=True)
    tails = {i: H[i] for i in range(3, H.n + 1)}
    core = _theorem23_core(H[1], H[2], tails, range(3, H.n + 1))
    return core.witness


def check_lemma22(H) -> bool:
    """Whether the leading part of H1 in x3..xn has degree exactly 1."""
    H = _as_shape(H)
    if H.n < 3:
        raise PreconditionError("n >= 3")
    _check_section2_preconditions(H, independence=True)
    return H[1].degree_wrt(range(3, H.n + 1)) == 1


# -- classification of the possibly dependent case ----------------------------------


@dataclass(frozen=True)
class Theorem24Witness:
    """Normal-form witness: T^-1 H(Tx) is in the shape named by ``case_tag``.

    ``lower`` is the triangular form reached when the exceptional component
    sits in a slot >= 3.
    """

    case_tag: str
    T: PolyMatrix
    k: int
    hermite: Optional[HermiteWitness] = None
    extra: dict = field(default_factory=dict, compare=False)


def _permutation(n: int, perm: Sequence[int]) -> PolyMatrix:
    """Matrix P with (Px)_i = x_{perm[i]} (0-based)."""
    rows = [[int(perm[i] == j) for j in range(n)] for i in range(n)]
    return PolyMatrix.from_rows(rows, n)


def _block(n: int, entries: Dict[Tuple[int, int], Fraction]) -> PolyMatrix:
    rows = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for (i, j), v in entries.items():
        rows[i][j] = Fraction(v)
    return PolyMatrix.from_rows(rows, n)


def _conj(H: PolyMap, Tm: PolyMatrix) -> PolyMap:
    return conjugate(H, Tm, constant_inverse(Tm))


def tail_minus_origin(Ht: PolyMap) -> List[Poly]:
    """(H_i(x1, x2) - H_i(0, x2)) for i = 3..n."""
    zero = Poly.zero(Ht.dim)
    return [Ht[i] - Ht[i].substitute({1: zero}) for i in range(3, Ht.dim + 1)]


def hermite_matrix(Ht: PolyMap) -> PolyMatrix:
    """M over K[x2] with (d/dx1 H_i)_{i>=3} = M (1, x1, ..., x1^{d-1})^T."""
    n = Ht.dim
    derivs = [Ht[i].partial(1) for i in range(3, n + 1)]
    d = max((p.degree_in(1) + 1 for p in derivs), default=0)
    d = max(d, 1)
    rows = []
    for p in derivs:
        row = []
        for e in range(d):
            coeff = {m[:0] + (0,) + m[1:]: c for m, c in p.terms.items() if m[0] == e}
            row.append(Poly(n, coeff))
        rows.append(row)
    return PolyMatrix.from_rows(rows, n)


def classify_theorem24(H) -> Theorem24Witness:
    """Normal form of a nilpotent map whose components 2..n lie in K[x1, x2]."""
    H = _as_shape(H)
    n = H.n
    if n < 3:
        raise PreconditionError("n >= 3")
    _check_section2_preconditions(H, independence=False)
    F = H.source
    if H[2].is_constant() and not H[2].is_zero():
        raise PreconditionError("H2 not a nonzero constant")
    dep = linear_independence([F[1], F[2]])
    if dep is not None or F[1].is_zero() or F[2].is_zero():
        w = _classify_dependent(F, dep)
    else:
        w = _classify_independent(F)
    report = verify_theorem24_witness(F, w)
    if not report.ok:
        raise WitnessError("constructed witness failed verification: " + "; ".join(report.failures))
    return w


def _classify_dependent(F: PolyMap, dep) -> Theorem24Witness:
    n = F.dim
    # T^-1 on the (x1, x2) block with second row (a, b) where a H1 + b H2 = 0
    if F[2].is_zero():
        T1 = PolyMatrix.identity(n, n)
    else:
        if F[1].is_zero():
            a, b = Fraction(1), Fraction(0)
        else:
            a, b = dep
        Tinv = _block(n, {(0, 0): Fraction(0) if a != 0 else 1, (0, 1): 1 if a != 0 else 0, (1, 0): a, (1, 1): b})
        T1 = constant_inverse(Tinv)
    Ht = _conj(F, T1)
    if not Ht[2].is_zero():
        raise WitnessError(f"normalization left H2 = {Ht[2]}")
    M = hermite_matrix(Ht)
    hw = hermite_row_reduce(M)
    return Theorem24Witness("i", T1, hw.rank + 2, hw, {"Htilde": Ht})


def _classify_independent(F: PolyMap) -> Theorem24Witness:
    n = F.dim
    comps = list(F.components)
    basis = independent_subset(comps)
    if basis[:2] != [0, 1]:
        raise CorpusAnomaly("H1, H2 not leading the independent basis")
    k = len(basis)
    dependents = [i for i in range(n) if i not in basis]
    # E: row_m -= sum c_mj row_j for each dependent m
    E_rows = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for m in dependents:
        coeffs = express_in(comps[m], [comps[j] for j in basis])
        if coeffs is None:
            raise CorpusAnomaly(f"component {m + 1} not in the span of the basis")
        for j, c in zip(basis, coeffs):
            E_rows[m][j] -= c
    E = PolyMatrix.from_rows(E_rows, n)
    P = _permutation(n, basis + dependents)
    T1 = constant_inverse(P @ E)
    Ht = _conj(F, T1)
    head = set(range(1, 3)) | set(range(k + 1, n + 1))
    if Ht[1].lies_in(head):
        return _finish_case_ii(F, T1, Ht, k)
    return _finish_case_iii(F, T1, Ht, k)


def _finish_case_ii(F: PolyMap, T1: PolyMatrix, Ht: PolyMap, k: int) -> Theorem24Witness:
    n = F.dim
    P11, P12 = Ht[1].partial(1), Ht[1].partial(2)
    P21, P22 = Ht[2].partial(1), Ht[2].partial(2)
    if P21.is_zero():
        raise CorpusAnomaly("lower-left entry of the leading 2x2 block vanishes")
    c = divides(P21, P11)
    if c is None or not c.is_constant() or P12 != c * P22:
        raise CorpusAnomaly("rows of the leading 2x2 block are not dependent over Q")
    cc = c.constant_term()
    T2 = _block(n, {(0, 1): cc})
    Tm = T1 @ T2
    return Theorem24Witness("ii", Tm, k, None, {"Htilde": _conj(F, Tm)})


def _finish_case_iii(F: PolyMap, T1: PolyMatrix, Ht: PolyMap, k: int) -> Theorem24Witness:
    n = F.dim
    active = list(range(3, k + 1))
    inert = list(range(k + 1, n + 1))
    tails = {i: Ht[i] for i in active}
    core = _theorem23_core(Ht[1], Ht[2], tails, active, inert, allow_constants=True)
    w = core.witness
    if not core.remainder2.is_zero():
        raise CorpusAnomaly(f"second identity residual {core.remainder2}")
    if core.remainder.constant_term() != 0:
        raise CorpusAnomaly("first identity has a nonzero constant")
    sig = list(w.sigma)  # sigma_2, sigma_3, ..., sigma_k
    j = next(idx for idx in range(3, k + 1) if sig[idx - 2] != 0)
    perm = list(range(n))
    perm[2], perm[j - 1] = perm[j - 1], perm[2]
    Pm = _permutation(n, perm)
    sig[1], sig[j - 2] = sig[j - 2], sig[1]
    # row 3 of T^-1 becomes (sigma_2, sigma_3, ..., sigma_k) / b2
    entries = {(2, 2): sig[1] / w.b2, (2, 1): sig[0] / w.b2}
    for idx in range(4, k + 1):
        entries[(2, idx - 1)] = sig[idx - 2] / w.b2
    R = _block(n, entries)
    T2 = Pm @ constant_inverse(R)
    # (Tx)_1 = b2 x1 - b1 x2 gives b2 = 1, b1 = 0
    T3 = _block(n, {(0, 0): w.b2, (0, 1): -w.b1})
    Tm = T1 @ T2 @ T3
    return Theorem24Witness("iii", Tm, k, None, {"Htilde": _conj(F, Tm), "theorem23": w})


# -- routing by the exceptional component ---------------------------------------------


def exceptional_index(F: PolyMap) -> Optional[int]:
    """Index i with F_j in K[x1, x2] for all j != i (1 if there is no exception).

    None when two or more components leave K[x1, x2].
    """
    outside = [i for i in range(1, F.dim + 1) if not F[i].lies_in({1, 2})]
    if len(outside) > 1:
        return None
    return outside[0] if outside else 1


def classify_any(F: PolyMap) -> Theorem24Witness:
    """Classify a nilpotent map with at most one component outside K[x1, x2].

    Exceptional slot 1 goes straight to the normal-form classification;
    slot 2 is first swapped into slot 1; slots >= 3 lead to the triangular
    form (0, H2(x1), H3(x1, x2), ..., Hn(x1, ..., x_{n-1})).
    """
    n = F.dim
    if n < 3:
        raise PreconditionError("n >= 3")
    i = exceptional_index(F)
    if i is None:
        raise ShapeError("more than one component lies outside K[x1, x2]")
    if any(c.constant_term() != 0 for c in F):
        raise PreconditionError("H(0) = 0")
    if i == 1:
        return classify_theorem24(Section2Shape(F))
    if i == 2:
        perm = list(range(n))
        perm[0], perm[1] = 1, 0
        S = _permutation(n, perm)
        inner = classify_theorem24(Section2Shape(_conj(F, S)))
        Tm = S @ inner.T
        extra = {key: v for key, v in inner.extra.items() if key != "Htilde"}
        extra["Htilde"] = _conj(F, Tm)
        w = Theorem24Witness(inner.case_tag, Tm, inner.k, inner.hermite, extra)
        report = verify_theorem24_witness(F, w)
        if not report.ok:
            raise WitnessError("; ".join(report.failures))
        return w
    if not jacobian_nilpotent(F):
        raise PreconditionError("JH nilpotent")
    perm = list(range(n))
    perm[i - 1], perm[n - 1] = perm[n - 1], perm[i - 1]
    S = _permutation(n, perm)
    Ht = _conj(F, S)
    if Ht[n].involves(n):
        raise CorpusAnomaly("last component depends on its own variable")
    dep = linear_independence([Ht[1], Ht[2]])
    if Ht[1].is_zero():
        T2 = PolyMatrix.identity(n, n)
    elif Ht[2].is_zero():
        T2 = _permutation(n, [1, 0] + list(range(2, n)))
    elif dep is None:
        raise CorpusAnomaly("leading 2x2 block has independent rows")
    else:
        a, b = dep
        row2 = (Fraction(1), Fraction(0)) if b != 0 else (Fraction(0), Fraction(1))
        Tinv = _block(n, {(0, 0): a, (0, 1): b, (1, 0): row2[0], (1, 1): row2[1]})
        T2 = constant_inverse(Tinv)
    Tm = S @ T2
    w = Theorem24Witness("lower", Tm, n, None, {"Htilde": _conj(F, Tm)})
    report = verify_theorem24_witness(F, w)
    if not report.ok:
        raise WitnessError("; ".join(report.failures))
    return w


# -- verification -----------------------------------------------------------------


@dataclass
class VerifyReport:
    ok: bool
    failures: List[str]
    Htilde: Optional[PolyMap] = None

    def __bool__(self) -> bool:
        return self.ok


def _in_ring(p: Poly, idx) -> bool:
    return p.lies_in(set(idx))


def verify_theorem24_witness(H, w: Theorem24Witness) -> VerifyReport:
    """Re-check every claim of ``w`` against H by exact arithmetic."""
    F = H.source if isinstance(H, Section2Shape) else H
    n = F.dim
    fails: List[str] = []
    if w.case_tag not in CASES:
        return VerifyReport(False, [f"unknown case {w.case_tag!r}"])
    Tm = w.T
    if Tm.rows != n or Tm.cols != n or not Tm.is_constant():
        return VerifyReport(False, ["T is not a constant n x n matrix"])
    if constant_det(Tm) == 0:
        return VerifyReport(False, ["T is singular"])
    Ht = _conj(F, Tm)
    k = w.k
    tail_idx = range(k + 1, n + 1)
    if w.case_tag == "lower":
        if not Ht[1].is_zero():
            fails.append("first component is not 0")
        if not Ht[2].lies_in({1}):
            fails.append("second component not in K[x1]")
        for j in range(3, n):
            if not Ht[j].lies_in({1, 2}):
                fails.append(f"component {j} not in K[x1, x2]")
        if not Ht[n].lies_in(set(range(1, n))):
            fails.append("last component involves its own variable")
        return VerifyReport(not fails, fails, Ht)
    if not Section2Shape.matches(Ht):
        return VerifyReport(False, ["conjugated map does not keep the shape"], Ht)
    if w.case_tag == "i":
        if not 2 <= k <= n:
            return VerifyReport(False, [f"k = {k} outside 2..n"], Ht)
        if not Ht[2].is_zero():
            fails.append("H~2 != 0")
        if w.hermite is None:
            return VerifyReport(False, fails + ["case (i) needs a Hermite witness"], Ht)
        A = w.hermite.A
        if A.rows != n - 2 or A.cols != n - 2:
            return VerifyReport(False, fails + ["A has the wrong size"], Ht)
        if any(not e.lies_in({2}) for e in A.entries):
            fails.append("A has entries outside K[x2]")
            return VerifyReport(False, fails, Ht)
        dA = det(A)
        if not dA.is_constant() or dA.is_zero():
            fails.append("det A is not a nonzero constant")
            return VerifyReport(False, fails, Ht)
        if w.hermite.detA != dA.constant_term():
            fails.append("recorded det A is wrong")
        Ainv = unimodular_inverse(A)
        # H~1(x1, x2, A^-1 x~) must lie in K[x2, x_{k+1}, ..., x_n]
        xt = [Poly.var(n, i) for i in range(3, n + 1)]
        new_xt = Ainv.apply(xt)
        H1sub = Ht[1].substitute({i: p for i, p in zip(range(3, n + 1), new_xt)})
        if not H1sub.lies_in({2} | set(tail_idx)):
            fails.append("H~1 not in K[x2, A_{k-1} x~, ..., A_{n-2} x~]")
        # A (H~_tail - H~_tail(0, x2)) vanishes below row k-2
        Av = A.apply(tail_minus_origin(Ht))
        if any(not p.is_zero() for p in Av[k - 2:]):
            fails.append("tail is not a combination of the first k-2 columns of A^-1")
        hw = w.hermite
        if hw.M is not None and hw.reduced is not None:
            if hw.M.rows == n - 2 and (A @ hw.M) != hw.reduced:
                fails.append("A M != reduced")
            if any(not e.is_zero() for r in range(hw.rank, hw.reduced.rows) for e in hw.reduced.row(r)):
                fails.append("reduced has nonzero rows past the rank")
        return VerifyReport(not fails, fails, Ht)
    if w.case_tag == "ii":
        if not 2 <= k <= n:
            return VerifyReport(False, [f"k = {k} outside 2..n"], Ht)
        if not Ht[2].lies_in({1}) or Ht[2].is_constant():
            fails.append("H~2 not in K[x1] \\ K")
        if not Ht[1].lies_in(set(tail_idx)):
            fails.append("H~1 not in K[x_{k+1}, ..., x_n]")
        for j in tail_idx:
            if not Ht[j].is_zero():
                fails.append(f"H~{j} != 0")
        return VerifyReport(not fails, fails, Ht)
    # case iii
    if not 3 <= k <= n:
        return VerifyReport(False, [f"k = {k} outside 3..n"], Ht)
    x1, x2 = Poly.var(n, 1), Poly.var(n, 2)
    if not Ht[2].substitute({1: x1 - x2 * x2}).lies_in({1}):
        fails.append("H~2 not in K[x1 + x2^2]")
    if Ht[3] != Ht[2] * Ht[2]:
        fails.append("H~3 != H~2^2")
    if not (Ht[1] + x2.scale(2) * Ht[2] - Poly.var(n, 3)).lies_in(set(tail_idx)):
        fails.append("H~1 + 2 x2 H~2 - x3 not in K[x_{k+1}, ..., x_n]")
    for j in tail_idx:
        if not Ht[j].is_zero():
            fails.append(f"H~{j} != 0")
    return VerifyReport(not fails, fails, Ht)
