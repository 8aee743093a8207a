"""Tame words over K[t] and decompositions of x + tH.

A word ``[F1, ..., Fm]`` denotes F1 o F2 o ... o Fm: the rightmost factor is
applied first and the leftmost last. Factors are elementary maps
``(i, P)`` (add P to coordinate i, P free of x_i) or invertible constant
linear maps.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from graphlib import CycleError, TopologicalSorter
from typing import List, Optional, Sequence, Union

from .classifier import Theorem24Witness, classify_any, verify_theorem24_witness
from .errors import CompositionMismatch, PreconditionError, ShapeError
from .nilcheck import PolyMap, keller
from .polycore import T, Poly
from .polylinalg import PolyMatrix, RowOp, constant_det, constant_inverse, hermite_row_reduce


@dataclass(frozen=True)
class ElementaryMap:
    i: int
    P: Poly

    def __post_init__(self):
        if not 1 <= self.i <= self.P.n:
            raise ShapeError(f"index {self.i} outside 1..{self.P.n}")
        if self.P.involves(self.i):
            raise ShapeError(f"elementary factor for x{self.i} involves x{self.i}: {self.P}")

    @property
    def n(self) -> int:
        return self.P.n

    def inverse(self) -> "ElementaryMap":
        return ElementaryMap(self.i, -self.P)

    def apply(self, v: List[Poly]) -> List[Poly]:
        out = list(v)
        out[self.i - 1] = v[self.i - 1] + self.P.substitute({j + 1: p for j, p in enumerate(v)})
        return out

    def specialize_t(self, value) -> "ElementaryMap":
        return ElementaryMap(self.i, self.P.substitute({T: Poly.const(self.n, value)}))


@dataclass(frozen=True)
class LinearMap:
    M: PolyMatrix

    def __post_init__(self):
        if not self.M.is_square() or not self.M.is_constant():
            raise ShapeError("linear factors must be constant square matrices")
        if constant_det(self.M) == 0:
            raise ShapeError("linear factor is singular")

    @property
    def n(self) -> int:
        return self.M.rows

    def inverse(self) -> "LinearMap":
        return LinearMap(constant_inverse(self.M))

    def apply(self, v: List[Poly]) -> List[Poly]:
        return list(self.M.apply(v))

    def specialize_t(self, value) -> "LinearMap":
        return self


Factor = Union[ElementaryMap, LinearMap]
TameWord = List[Factor]


def compose_word(word: Sequence[Factor], n: Optional[int] = None) -> PolyMap:
    """The composite F1 o ... o Fm of a word [F1, ..., Fm]."""
    if n is None:
        if not word:
            raise ValueError("dimension needed for the empty word")
        n = word[0].n
    v = [Poly.var(n, i) for i in range(1, n + 1)]
    for f in reversed(list(word)):
        if f.n != n:
            raise ShapeError(f"factor of dimension {f.n} in a word of dimension {n}")
        v = f.apply(v)
    return PolyMap(tuple(v))


def invert_word(word: Sequence[Factor]) -> TameWord:
    return [f.inverse() for f in reversed(list(word))]


def specialize_t(F, value):
    """Substitute t -> value in a map or in every factor of a word."""
    if isinstance(F, PolyMap):
        return F.specialize_t(value)
    return [f.specialize_t(value) for f in F]


# -- building blocks -------------------------------------------------------------


def triangular_word(P: Sequence[Poly]) -> TameWord:
    """Word for x + tP when the dependency graph of P is acyclic.

    P_a involving x_b forces the factor for a to act before the one for b
    changes x_b, so factors are emitted in a topological order.
    """
    n = len(P)
    t = Poly.var(n, T)
    deps = {}
    for a, p in enumerate(P, start=1):
        if p.is_zero():
            continue
        if p.involves(a):
            raise ShapeError(f"component {a} depends on its own variable")
        # a must be applied before every b that p reads
        deps.setdefault(a, set())
        for b in p.variables():
            if b != T and not P[b - 1].is_zero():
                deps.setdefault(b, set()).add(a)
    try:
        order = list(TopologicalSorter(deps).static_order())
    except CycleError as exc:
        raise ShapeError("dependency graph of the map is cyclic") from exc
    applied = [ElementaryMap(a, t * P[a - 1]) for a in order]
    return list(reversed(applied))


def _row_op_factor(op: RowOp, n: int) -> Factor:
    """The map x~ -> op x~ on coordinates 3..n as a word factor."""
    if op.kind == "swap":
        perm = list(range(n))
        perm[op.i + 2], perm[op.j + 2] = perm[op.j + 2], perm[op.i + 2]
        return LinearMap(PolyMatrix.from_rows([[int(perm[r] == c) for c in range(n)] for r in range(n)], n))
    return ElementaryMap(op.i + 3, op.q * Poly.var(n, op.j + 3))


def unimodular_factors(A: PolyMatrix) -> List[Factor]:
    """Word for G = (x1, x2, A x~) with A unimodular over K[x2]."""
    m = A.rows
    n = A.n
    hw = hermite_row_reduce(A)
    R = [list(r) for r in hw.reduced.to_rows()]
    ops: List[RowOp] = list(hw.ops)
    # clear above the diagonal; the diagonal is constant since det A is
    for c in range(m - 1, -1, -1):
        d = R[c][c]
        if not d.is_constant() or d.is_zero():
            raise ShapeError("matrix is not unimodular over K[x2]")
        inv = 1 / d.constant_term()
        for r in range(c):
            if R[r][c]:
                q = -(R[r][c].scale(inv))
                ops.append(RowOp("add", r, c, q))
                R[r] = [a + q * b for a, b in zip(R[r], R[c])]
    # ops_last ... ops_first A = D, so A = ops_first^-1 ... ops_last^-1 D
    diag = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for c in range(m):
        diag[c + 2][c + 2] = R[c][c].constant_term()
    factors: List[Factor] = [_row_op_factor(op.inverse(), n) for op in ops]
    D = PolyMatrix.from_rows(diag, n)
    if D != PolyMatrix.identity(n, n):
        factors.append(LinearMap(D))
    return factors


def hermite_factors(ops: Sequence[RowOp], n: int) -> List[Factor]:
    """Word for G = (x1, x2, A x~) with A = ops[-1] ... ops[0]."""
    return [_row_op_factor(op, n) for op in reversed(list(ops))]


def _linear_factor(M: PolyMatrix) -> List[Factor]:
    return [] if M == PolyMatrix.identity(M.rows, M.n) else [LinearMap(M)]


# -- decomposition -----------------------------------------------------------------


def _normal_form_word(Ht: PolyMap, w: Theorem24Witness) -> TameWord:
    n = Ht.dim
    if w.case_tag in ("lower", "ii"):
        return triangular_word(Ht.components)
    if w.case_tag == "iii":
        k = w.k
        x1, x2, x3 = Poly.var(n, 1), Poly.var(n, 2), Poly.var(n, 3)
        t = Poly.var(n, T)
        p = Ht[1] + x2.scale(2) * Ht[2] - x3
        shifted = Ht[2].substitute({1: x1 - x2 * x2})
        inner = [p, shifted, shifted * shifted]
        for j in range(4, n + 1):
            inner.append(Ht[j].substitute({1: x1 - x2 * x2}))
        left = ElementaryMap(1, -(x2 * x2) + t * x3)
        right = ElementaryMap(1, x2 * x2)
        if any(not inner[j - 1].is_zero() for j in range(k + 1, n + 1)):
            raise CompositionMismatch("tail components are not zero in case (iii)")
        return [left] + triangular_word(inner) + [right]
    # case i: conjugate by G = (x1, x2, A x~)
    A = w.hermite.A
    ops = w.hermite.ops
    if ops and _ops_product(ops, A.rows, n) == A:
        gword = hermite_factors(ops, n)
    else:
        gword = unimodular_factors(A)
    G = compose_word(gword, n) if gword else PolyMap.identity(n)
    Ginv = compose_word(invert_word(gword), n) if gword else PolyMap.identity(n)
    # x + tH* = G o (x + tH~) o G^-1
    star = PolyMap(tuple(c - Poly.var(n, i + 1) for i, c in enumerate(G.compose(keller(Ht).compose(Ginv)))))
    t = Poly.var(n, T)
    Pstar = []
    for c in star:
        q = _divide_by_t(c, t)
        Pstar.append(q)
    return invert_word(gword) + triangular_word(Pstar) + gword


def _divide_by_t(c: Poly, t: Poly) -> Poly:
    out = {}
    for m, v in c.terms.items():
        if m[-1] == 0:
            raise CompositionMismatch(f"conjugated map has a t-free term in {c}")
        mm = m[:-1] + (m[-1] - 1,)
        out[mm] = v
    q = Poly(c.n, out)
    if q.involves(T):
        raise CompositionMismatch("conjugated map is not affine in t")
    return q


def _ops_product(ops: Sequence[RowOp], size: int, n: int) -> PolyMatrix:
    A = PolyMatrix.identity(size, n)
    for op in ops:
        A = op.matrix(size, n) @ A
    return A


def decompose_tame(H, w: Optional[Theorem24Witness] = None, shortcut: bool = True) -> TameWord:
    """A word composing exactly to x + tH, built from a normal-form witness.

    With ``shortcut`` a map whose dependency graph is already acyclic gets
    its triangular word directly, without conjugation.
    """
    F = H.source if hasattr(H, "source") else H
    if all(c.is_zero() for c in F):
        return []
    if shortcut:
        try:
            word = triangular_word(F.components)
        except ShapeError:
            pass
        else:
            check_word(word, keller(F))
            return word
    if w is None:
        w = classify_any(F)
    report = verify_theorem24_witness(F, w)
    if not report.ok:
        raise PreconditionError("witness verifies", "; ".join(report.failures))
    Ht = report.Htilde
    word = _linear_factor(w.T) + _normal_form_word(Ht, w) + _linear_factor(constant_inverse(w.T))
    check_word(word, keller(F))
    return word


def check_word(word: Sequence[Factor], target: PolyMap) -> None:
    got = compose_word(word, target.dim)
    for i, (a, b) in enumerate(zip(got, target), start=1):
        if a != b:
            raise CompositionMismatch(f"component {i}: word gives {a}, expected {b}", component=i)


def verify_inverse(H, word: Sequence[Factor]) -> bool:
    """Whether the inverse word at t = 1 inverts x + H.

    The factors of the inverse word are peeled off x + H one at a time,
    which keeps intermediate polynomials small. A one-sided inverse of the
    polynomial automorphism x + H is two-sided, so this also certifies
    (x + H) o (inverse word) = identity.
    """
    F = H.source if hasattr(H, "source") else H
    v = list(keller(F).specialize_t(1))
    for f in reversed(specialize_t(invert_word(word), 1)):
        v = f.apply(v)
    return PolyMap(tuple(v)).is_identity()


def verify_inverse_right(H, word: Sequence[Factor]) -> bool:
    """(x + H) o (inverse word at t = 1) = identity, by full substitution."""
    F = H.source if hasattr(H, "source") else H
    n = F.dim
    inv = compose_word(specialize_t(invert_word(word), 1), n) if word else PolyMap.identity(n)
    return keller(F).specialize_t(1).compose(inv).is_identity()


def word_stats(word: Sequence[Factor]) -> dict:
    return {
        "length": len(word),
        "elementary": sum(isinstance(f, ElementaryMap) for f in word),
        "linear": sum(isinstance(f, LinearMap) for f in word),
    }
