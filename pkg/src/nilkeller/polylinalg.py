"""Matrices with polynomial entries.

Determinants, sums of principal minors, ranks over the fraction field and
Hermite-style row reduction over K[x2].
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Dict, FrozenSet, List, Sequence, Tuple, Union

from . import univariate as up
from .errors import ContextMismatch, ShapeError
from .polycore import Poly, divides, from_univariate, to_univariate

Entry = Union[Poly, int, Fraction]

# cofactor expansion up to this size, fraction-free elimination above
_COFACTOR_LIMIT = 6


@dataclass(frozen=True)
class PolyMatrix:
    rows: int
    cols: int
    entries: Tuple[Poly, ...]

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise ValueError("negative dimension")
        if len(self.entries) != self.rows * self.cols:
            raise ValueError("entry count does not match dimensions")
        if self.entries:
            n = self.entries[0].n
            if any(e.n != n for e in self.entries):
                raise ContextMismatch("matrix entries live in different contexts")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[Entry]], n: int) -> "PolyMatrix":
        r = len(rows)
        c = len(rows[0]) if r else 0
        if any(len(row) != c for row in rows):
            raise ValueError("ragged rows")
        flat = tuple(e if isinstance(e, Poly) else Poly.const(n, e) for row in rows for e in row)
        return cls(r, c, flat)

    @classmethod
    def identity(cls, size: int, n: int) -> "PolyMatrix":
        return cls.from_rows([[1 if i == j else 0 for j in range(size)] for i in range(size)], n)

    @classmethod
    def zeros(cls, rows: int, cols: int, n: int) -> "PolyMatrix":
        return cls.from_rows([[0] * cols for _ in range(rows)], n)

    @property
    def n(self) -> int:
        return self.entries[0].n

    def __getitem__(self, ij: Tuple[int, int]) -> Poly:
        i, j = ij
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> Tuple[Poly, ...]:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def col(self, j: int) -> Tuple[Poly, ...]:
        return tuple(self.entries[i * self.cols + j] for i in range(self.rows))

    def to_rows(self) -> List[List[Poly]]:
        return [list(self.row(i)) for i in range(self.rows)]

    def is_square(self) -> bool:
        return self.rows == self.cols

    def is_constant(self) -> bool:
        return all(e.is_constant() for e in self.entries)

    def is_zero(self) -> bool:
        return all(e.is_zero() for e in self.entries)

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "PolyMatrix":
        return PolyMatrix(len(rows), len(cols), tuple(self[i, j] for i in rows for j in cols))

    def transpose(self) -> "PolyMatrix":
        return PolyMatrix(self.cols, self.rows, tuple(self[i, j] for j in range(self.cols) for i in range(self.rows)))

    def __matmul__(self, other: "PolyMatrix") -> "PolyMatrix":
        return matmul(self, other)

    def apply(self, vec: Sequence[Poly]) -> Tuple[Poly, ...]:
        """Matrix times a column vector of polynomials."""
        if len(vec) != self.cols:
            raise ValueError("dimension mismatch")
        out = []
        for i in range(self.rows):
            acc = Poly.zero(vec[0].n if vec else self.n)
            for j in range(self.cols):
                a = self[i, j]
                if a and vec[j]:
                    acc = acc + a * vec[j]
            out.append(acc)
        return tuple(out)

    def map_entries(self, fn) -> "PolyMatrix":
        return PolyMatrix(self.rows, self.cols, tuple(fn(e) for e in self.entries))

    def __str__(self) -> str:
        return "[" + ", ".join("[" + ", ".join(str(e) for e in self.row(i)) + "]" for i in range(self.rows)) + "]"


def matmul(A: PolyMatrix, B: PolyMatrix) -> PolyMatrix:
    if A.cols != B.rows:
        raise ValueError(f"dimension mismatch {A.rows}x{A.cols} @ {B.rows}x{B.cols}")
    n = A.n if A.entries else B.n
    out = []
    for i in range(A.rows):
        for j in range(B.cols):
            acc = Poly.zero(n)
            for k in range(A.cols):
                a, b = A[i, k], B[k, j]
                if a and b:
                    acc = acc + a * b
            out.append(acc)
    return PolyMatrix(A.rows, B.cols, tuple(out))


def _det_cofactor(A: PolyMatrix) -> Poly:
    size = A.rows
    n = A.n
    # expansion along rows with memoisation on the set of remaining columns
    memo: Dict[FrozenSet[int], Poly] = {frozenset(): Poly.one(n)}

    def minor(r: int, cols: FrozenSet[int]) -> Poly:
        if cols in memo:
            return memo[cols]
        acc = Poly.zero(n)
        ordered = sorted(cols)
        for pos, j in enumerate(ordered):
            a = A[r, j]
            if not a:
                continue
            sub = minor(r + 1, cols - {j})
            if not sub:
                continue
            term = a * sub
            acc = acc - term if pos % 2 else acc + term
        memo[cols] = acc
        return acc

    return minor(0, frozenset(range(size)))


def _det_bareiss(A: PolyMatrix) -> Poly:
    m = A.to_rows()
    size = A.rows
    n = A.n
    sign = 1
    prev = Poly.one(n)
    for k in range(size - 1):
        if not m[k][k]:
            for i in range(k + 1, size):
                if m[i][k]:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return Poly.zero(n)
        for i in range(k + 1, size):
            for j in range(k + 1, size):
                num = m[k][k] * m[i][j] - m[i][k] * m[k][j]
                q = divides(prev, num)
                if q is None:
                    raise ArithmeticError("inexact Bareiss step")
                m[i][j] = q
            m[i][k] = Poly.zero(n)
        prev = m[k][k]
    d = m[size - 1][size - 1]
    return d if sign > 0 else -d


def det(A: PolyMatrix) -> Poly:
    if not A.is_square():
        raise ShapeError("determinant of a non-square matrix")
    if A.rows == 0:
        raise ShapeError("determinant of an empty matrix")
    if A.rows <= _COFACTOR_LIMIT:
        return _det_cofactor(A)
    return _det_bareiss(A)


def principal_minor_sum(A: PolyMatrix, k: int) -> Poly:
    """Sum of det(A[S, S]) over all k-subsets S of the indices."""
    if not A.is_square():
        raise ShapeError("principal minors of a non-square matrix")
    if not 1 <= k <= A.rows:
        raise ValueError(f"minor size {k} out of range 1..{A.rows}")
    acc = Poly.zero(A.n)
    for S in combinations(range(A.rows), k):
        acc = acc + det(A.submatrix(S, S))
    return acc


def is_nilpotent(A: PolyMatrix) -> bool:
    """All principal-minor sums vanish, i.e. the characteristic polynomial is lambda^n."""
    if not A.is_square():
        raise ShapeError("nilpotency of a non-square matrix")
    return all(principal_minor_sum(A, k).is_zero() for k in range(1, A.rows + 1))


def matrix_power(A: PolyMatrix, e: int) -> PolyMatrix:
    out = PolyMatrix.identity(A.rows, A.n)
    for _ in range(e):
        out = out @ A
    return out


def rank_over_fractions(A: PolyMatrix) -> int:
    """Rank over the fraction field of the entry ring, by fraction-free elimination."""
    m = A.to_rows()
    rows, cols = A.rows, A.cols
    if rows == 0 or cols == 0:
        return 0
    n = A.n
    prev = Poly.one(n)
    rank = 0
    for k in range(min(rows, cols)):
        pivot = next(((i, j) for j in range(k, cols) for i in range(k, rows) if m[i][j]), None)
        if pivot is None:
            break
        pi, pj = pivot
        m[k], m[pi] = m[pi], m[k]
        if pj != k:
            for row in m:
                row[k], row[pj] = row[pj], row[k]
        for i in range(k + 1, rows):
            for j in range(k + 1, cols):
                num = m[k][k] * m[i][j] - m[i][k] * m[k][j]
                q = divides(prev, num)
                if q is None:
                    raise ArithmeticError("inexact Bareiss step")
                m[i][j] = q
            m[i][k] = Poly.zero(n)
        prev = m[k][k]
        rank += 1
    return rank


def constant_inverse(A: PolyMatrix) -> PolyMatrix:
    """Inverse of a constant invertible matrix, by Gauss-Jordan over Q."""
    if not A.is_square() or not A.is_constant():
        raise ShapeError("constant_inverse needs a constant square matrix")
    size = A.rows
    m = [[A[i, j].constant_term() for j in range(size)] + [Fraction(int(i == j)) for j in range(size)]
         for i in range(size)]
    for c in range(size):
        p = next((r for r in range(c, size) if m[r][c] != 0), None)
        if p is None:
            raise ZeroDivisionError("singular matrix")
        m[c], m[p] = m[p], m[c]
        pv = m[c][c]
        m[c] = [v / pv for v in m[c]]
        for r in range(size):
            if r != c and m[r][c] != 0:
                f = m[r][c]
                m[r] = [a - f * b for a, b in zip(m[r], m[c])]
    return PolyMatrix.from_rows([row[size:] for row in m], A.n)


def constant_det(A: PolyMatrix) -> Fraction:
    if not A.is_constant():
        raise ShapeError("constant_det needs a constant matrix")
    return det(A).constant_term()


# -- Hermite reduction over K[x2] ------------------------------------------


@dataclass(frozen=True)
class RowOp:
    """Elementary row operation.

    ``kind == "swap"``: exchange rows ``i`` and ``j``.
    ``kind == "add"``: row_i += q * row_j with q in K[x2].
    """

    kind: str
    i: int
    j: int
    q: Poly | None = None

    def matrix(self, size: int, n: int) -> PolyMatrix:
        rows = [[Poly.const(n, int(r == c)) for c in range(size)] for r in range(size)]
        if self.kind == "swap":
            rows[self.i], rows[self.j] = rows[self.j], rows[self.i]
        else:
            rows[self.i][self.j] = self.q
        return PolyMatrix.from_rows(rows, n)

    def inverse(self) -> "RowOp":
        return self if self.kind == "swap" else RowOp("add", self.i, self.j, -self.q)


@dataclass(frozen=True)
class HermiteWitness:
    A: PolyMatrix
    detA: Fraction
    reduced: PolyMatrix
    rank: int
    M: PolyMatrix
    ops: Tuple[RowOp, ...] = ()


def _apply_op(rows: List[List], op: RowOp, mul, add) -> None:
    if op.kind == "swap":
        rows[op.i], rows[op.j] = rows[op.j], rows[op.i]
    else:
        rows[op.i] = [add(a, mul(op.q, b)) for a, b in zip(rows[op.i], rows[op.j])]


def hermite_row_reduce(M: PolyMatrix) -> HermiteWitness:
    """Row-reduce ``M`` over the Euclidean domain K[x2].

    Pivots on the minimal-degree nonzero entry of each column and clears the
    rest of the column below it by quotient-remainder steps. The transform
    is recorded as a sequence of elementary row operations, so that
    ``A = ops[-1] ... ops[0]`` and ``A @ M == reduced``.
    """
    n = M.n
    for e in M.entries:
        if not e.lies_in({2}):
            raise ShapeError(f"entry {e} is not in K[x2]")
    rows = [[to_univariate(M[i, j], 2) for j in range(M.cols)] for i in range(M.rows)]
    ops: List[RowOp] = []

    def record(op_kind, i, j, q=None):
        op = RowOp(op_kind, i, j, None if q is None else from_univariate(q, n, 2))
        uop = RowOp(op_kind, i, j, q)
        _apply_op(rows, uop, up.mul, up.add)
        ops.append(op)

    r = 0
    for c in range(M.cols):
        if r >= M.rows:
            break
        while True:
            live = [i for i in range(r, M.rows) if rows[i][c]]
            if not live:
                break
            p = min(live, key=lambda i: (up.degree(rows[i][c]), i))
            if p != r:
                record("swap", r, p)
            others = [i for i in range(r + 1, M.rows) if rows[i][c]]
            if not others:
                r += 1
                break
            for i in others:
                q, _ = up.divmod_(rows[i][c], rows[r][c])
                record("add", i, r, [-x for x in q])
    reduced = PolyMatrix.from_rows([[from_univariate(e, n, 2) for e in row] for row in rows], n)
    A = PolyMatrix.identity(M.rows, n)
    for op in ops:
        A = op.matrix(M.rows, n) @ A
    swaps = sum(op.kind == "swap" for op in ops)
    return HermiteWitness(A=A, detA=Fraction((-1) ** swaps), reduced=reduced, rank=r, M=M, ops=tuple(ops))


def unimodular_inverse(A: PolyMatrix) -> PolyMatrix:
    """Inverse of a square matrix over K[x2] whose determinant is a nonzero constant.

    Computed from the adjugate; every entry stays polynomial.
    """
    if not A.is_square():
        raise ShapeError("inverse of a non-square matrix")
    d = det(A)
    if not d.is_constant() or d.is_zero():
        raise ShapeError(f"determinant {d} is not a nonzero constant")
    size = A.rows
    inv_d = 1 / d.constant_term()
    if size == 1:
        return PolyMatrix.from_rows([[Poly.const(A.n, inv_d)]], A.n)
    out = []
    for i in range(size):
        row = []
        for j in range(size):
            # (A^-1)_{ij} = (-1)^{i+j} det(A without row j, column i) / det A
            rs = [r for r in range(size) if r != j]
            cs = [c for c in range(size) if c != i]
            cof = det(A.submatrix(rs, cs))
            row.append(cof.scale(inv_d if (i + j) % 2 == 0 else -inv_d))
        out.append(row)
    return PolyMatrix.from_rows(out, A.n)


# -- dense linear algebra over Q ---------------------------------------------


def rref(rows: Sequence[Sequence[Fraction]]) -> Tuple[List[List[Fraction]], List[int]]:
    """Reduced row echelon form over Q with ascending-index pivoting."""
    m = [[Fraction(v) for v in row] for row in rows]
    pivots: List[int] = []
    if not m:
        return m, pivots
    cols = len(m[0])
    r = 0
    for c in range(cols):
        p = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        pv = m[r][c]
        m[r] = [v / pv for v in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m, pivots


def nullspace(rows: Sequence[Sequence[Fraction]], cols: int) -> List[List[Fraction]]:
    """Basis of {v : rows . v = 0}, one vector per free column, in ascending order."""
    if not rows:
        return [[Fraction(int(i == j)) for i in range(cols)] for j in range(cols)]
    m, pivots = rref(rows)
    basis = []
    for free in (c for c in range(cols) if c not in pivots):
        v = [Fraction(0)] * cols
        v[free] = Fraction(1)
        for r, pc in enumerate(pivots):
            v[pc] = -m[r][free]
        basis.append(v)
    return basis


def coefficient_rows(ps: Sequence[Poly]) -> List[List[Fraction]]:
    """Matrix whose column j holds the coefficients of ps[j], one row per monomial."""
    monos = sorted({m for p in ps for m in p.terms})
    return [[p.coeff(m) for p in ps] for m in monos]
