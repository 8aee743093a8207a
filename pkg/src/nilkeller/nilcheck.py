"""Polynomial maps, Jacobians, shape predicates and the nilpotency residuals.

A map whose Jacobian is nilpotent satisfies a handful of polynomial
identities; the residual functions here return their left-hand sides so a
caller can see which one fails and by how much.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, Tuple

from .errors import ContextMismatch, ShapeError
from .polycore import T, Poly, divides, homog_part_wrt
from .polylinalg import PolyMatrix, coefficient_rows, is_nilpotent, nullspace

Triple = Tuple[Poly, Poly, Poly]


@dataclass(frozen=True)
class PolyMap:
    """An n-tuple of polynomials in the context of n x-variables (plus t)."""

    components: Tuple[Poly, ...]

    def __post_init__(self):
        comps = tuple(self.components)
        object.__setattr__(self, "components", comps)
        if len(comps) < 2:
            raise ShapeError("a polynomial map needs dimension at least 2")
        n = len(comps)
        for c in comps:
            if c.n != n:
                raise ContextMismatch(f"component {c} has context {c.n}, map has dimension {n}")

    @classmethod
    def identity(cls, n: int) -> "PolyMap":
        return cls(tuple(Poly.var(n, i) for i in range(1, n + 1)))

    @classmethod
    def zero(cls, n: int) -> "PolyMap":
        return cls(tuple(Poly.zero(n) for _ in range(n)))

    @property
    def dim(self) -> int:
        return len(self.components)

    def __getitem__(self, i: int) -> Poly:
        """1-based component access, matching the variable names."""
        if not 1 <= i <= self.dim:
            raise IndexError(i)
        return self.components[i - 1]

    def __iter__(self):
        return iter(self.components)

    def __len__(self) -> int:
        return self.dim

    def __add__(self, other: "PolyMap") -> "PolyMap":
        return PolyMap(tuple(a + b for a, b in zip(self, other)))

    def __sub__(self, other: "PolyMap") -> "PolyMap":
        return PolyMap(tuple(a - b for a, b in zip(self, other)))

    def scale(self, c) -> "PolyMap":
        return PolyMap(tuple(c * a for a in self))

    def compose(self, inner: "PolyMap") -> "PolyMap":
        """self o inner: substitute x_i -> inner_i into every component."""
        if inner.dim != self.dim:
            raise ShapeError("dimension mismatch in composition")
        bindings = {i + 1: g for i, g in enumerate(inner)}
        return PolyMap(tuple(f.substitute(bindings) for f in self))

    def at(self, point: Sequence[Poly]) -> Tuple[Poly, ...]:
        bindings = {i + 1: g for i, g in enumerate(point)}
        return tuple(f.substitute(bindings) for f in self)

    def specialize_t(self, value) -> "PolyMap":
        c = Poly.const(self.dim, value)
        return PolyMap(tuple(f.substitute({T: c}) for f in self))

    def involves_t(self) -> bool:
        return any(f.involves(T) for f in self)

    def is_identity(self) -> bool:
        return self == PolyMap.identity(self.dim)

    def __str__(self) -> str:
        return "(" + ", ".join(str(c) for c in self) + ")"


def keller(H: PolyMap) -> PolyMap:
    """The map x + tH."""
    n = H.dim
    t = Poly.var(n, T)
    return PolyMap(tuple(Poly.var(n, i + 1) + t * h for i, h in enumerate(H)))


def jacobian(F: PolyMap) -> PolyMatrix:
    n = F.dim
    return PolyMatrix.from_rows([[f.partial(j) for j in range(1, n + 1)] for f in F], n)


def jacobian_nilpotent(F: PolyMap) -> bool:
    return is_nilpotent(jacobian(F))


def linear_map(rows: Sequence[Sequence], n: int) -> PolyMap:
    """The map x -> Mx for a constant (or polynomial) square matrix M."""
    if isinstance(rows, PolyMatrix):
        rows = rows.to_rows()
    xs = [Poly.var(n, i) for i in range(1, n + 1)]
    out = []
    for row in rows:
        acc = Poly.zero(n)
        for a, x in zip(row, xs):
            acc = acc + (a * x if isinstance(a, Poly) else x.scale(a))
        out.append(acc)
    return PolyMap(tuple(out))


def conjugate(H: PolyMap, Tm: PolyMatrix, Tinv: PolyMatrix) -> PolyMap:
    """T^-1 H(Tx)."""
    n = H.dim
    inner = linear_map(Tm, n)
    return PolyMap(Tinv.apply(H.compose(inner).components))


# -- shapes --------------------------------------------------------------


@dataclass(frozen=True)
class Section2Shape:
    """H1 arbitrary in x1..xn; H2..Hn in K[x1, x2]; no t anywhere."""

    source: PolyMap

    def __post_init__(self):
        H = self.source
        if not isinstance(H, PolyMap):
            object.__setattr__(self, "source", PolyMap(tuple(H)))
            H = self.source
        for i, f in enumerate(H, start=1):
            if f.involves(T):
                raise ShapeError(f"component {i} involves t")
            if i >= 2 and not f.lies_in({1, 2}):
                raise ShapeError(f"component {i} = {f} is not in K[x1, x2]")

    @property
    def n(self) -> int:
        return self.source.dim

    def __getitem__(self, i: int) -> Poly:
        return self.source[i]

    @staticmethod
    def matches(F: PolyMap) -> bool:
        try:
            Section2Shape(F)
        except ShapeError:
            return False
        return True


@dataclass(frozen=True)
class GeneralizedShape:
    """(H1, H2, h3(x1,x2,H1), ..., hn(x1,x2,H1)) with the h_i carried explicitly."""

    H1: Poly
    H2: Poly
    h: Tuple[Poly, ...]

    def __post_init__(self):
        object.__setattr__(self, "h", tuple(self.h))
        n = self.H1.n
        if n < 3:
            raise ShapeError("generalized shape needs n >= 3")
        if self.H2.n != n or any(p.n != n for p in self.h):
            raise ContextMismatch("generalized shape components live in different contexts")
        if len(self.h) != n - 2:
            raise ShapeError(f"expected {n - 2} tail polynomials, got {len(self.h)}")
        if self.H1.involves(T):
            raise ShapeError("H1 involves t")
        if not self.H2.lies_in({1, 2}):
            raise ShapeError(f"H2 = {self.H2} is not in K[x1, x2]")
        for i, p in enumerate(self.h, start=3):
            if not p.lies_in({1, 2, 3}):
                raise ShapeError(f"h{i} = {p} is not in K[x1, x2, x3]")

    @property
    def n(self) -> int:
        return self.H1.n

    def realize(self) -> PolyMap:
        sub = {3: self.H1}
        return PolyMap((self.H1, self.H2) + tuple(p.substitute(sub) for p in self.h))


def _as_section2(H) -> Section2Shape:
    return H if isinstance(H, Section2Shape) else Section2Shape(H)


# -- residuals -------------------------------------------------------------


def eq_residuals_section2(H) -> Triple:
    """Left-hand sides of the trace, second and third minor-sum identities."""
    H = _as_section2(H)
    n = H.n
    H1, H2 = H[1], H[2]
    H1x1, H1x2 = H1.partial(1), H1.partial(2)
    H2x1, H2x2 = H2.partial(1), H2.partial(2)
    r1 = H1x1 + H2x2
    r2 = H2x2 * H2x2 + H1x2 * H2x1
    r3 = Poly.zero(n)
    for i in range(3, n + 1):
        Hi = H[i]
        H1xi = H1.partial(i)
        if not H1xi:
            continue
        Hix1, Hix2 = Hi.partial(1), Hi.partial(2)
        r2 = r2 + H1xi * Hix1
        r3 = r3 + H1xi * (H2x1 * Hix2 - H2x2 * Hix1)
    return r1, r2, r3


def divisibility_check(H) -> Optional[bool]:
    """Whether (H2)_{x1} divides ((H2)_{x2})^3; None when (H2)_{x1} = 0.

    A vanishing (H2)_{x1} would make (H2)_{x2} an eigenvalue of JH, so the
    test is not applicable there rather than failed.
    """
    H = _as_section2(H)
    H2 = H[2]
    d1 = H2.partial(1)
    if d1.is_zero():
        return None
    return divides(d1, H2.partial(2) ** 3) is not None


def _residuals_generalized(G: GeneralizedShape, arg: Poly) -> Triple:
    n = G.n
    H1, H2 = G.H1, G.H2
    H2x1, H2x2 = H2.partial(1), H2.partial(2)
    sub = {3: arg}
    r1 = H1.partial(1) + H2x2
    r2 = H2x2 * H2x2 + H1.partial(2) * H2x1
    r3 = Poly.zero(n)
    for i, hi in enumerate(G.h, start=3):
        H1xi = H1.partial(i)
        if not H1xi:
            continue
        hx1 = hi.partial(1).substitute(sub)
        hx2 = hi.partial(2).substitute(sub)
        hx3 = hi.partial(3).substitute(sub)
        r1 = r1 + hx3 * H1xi
        r2 = r2 + H1xi * hx1
        r3 = r3 + H1xi * (H2x1 * hx2 - H2x2 * hx1)
    return r1, r2, r3


def eq_residuals_primed(G: GeneralizedShape) -> Triple:
    """Residuals with the h_i-derivatives evaluated at (x1, x2, H1)."""
    return _residuals_generalized(G, G.H1)


def eq_residuals_tlifted(G: GeneralizedShape) -> Triple:
    """Residuals with the third argument of the h_i kept as the new variable t."""
    return _residuals_generalized(G, Poly.var(G.n, T))


# -- linear algebra on components -----------------------------------------------


def linear_independence(ps: Sequence[Poly], include_one: bool = False) -> Optional[Tuple[Fraction, ...]]:
    """None if ``ps`` (and 1, if requested) are independent over Q.

    Otherwise returns a kernel vector, scaled so its first nonzero entry is 1.
    With ``include_one`` the last entry is the coefficient of the constant 1.
    """
    ps = list(ps)
    if include_one:
        if not ps:
            return None
        ps.append(Poly.one(ps[0].n))
    if not ps:
        return None
    basis = nullspace(coefficient_rows(ps), len(ps))
    if not basis:
        return None
    v = basis[0]
    lead = next(c for c in v if c != 0)
    return tuple(c / lead for c in v)


def leading_homog_part(H1: Poly) -> Tuple[Poly, int]:
    """Top homogeneous slice of H1 with respect to x3..xn, and its degree.

    For H1 in K[x1, x2] the slice is H1 itself with degree 0.
    """
    tail = list(range(3, H1.n + 1))
    if H1.is_zero():
        return H1, 0
    d = H1.degree_wrt(tail) if tail else 0
    return homog_part_wrt(H1, tail, d), d


def independent_subset(ps: Sequence[Poly]) -> List[int]:
    """Greedy ascending-index choice of a maximal Q-independent subfamily."""
    chosen: List[int] = []
    for i, p in enumerate(ps):
        if p.is_zero():
            continue
        if linear_independence([ps[j] for j in chosen] + [p]) is None:
            chosen.append(i)
    return chosen


def express_in(p: Poly, basis: Sequence[Poly]) -> Optional[List[Fraction]]:
    """Coefficients c with p = sum c_j basis_j over Q, or None."""
    if not basis:
        return [] if p.is_zero() else None
    rows = coefficient_rows(list(basis) + [p])
    # solve basis . c = p via a kernel vector with last entry -1
    kern = nullspace(rows, len(basis) + 1)
    for v in kern:
        if v[-1] != 0:
            return [-c / v[-1] for c in v[:-1]]
    return None if not p.is_zero() else [Fraction(0)] * len(basis)


def supports(ps: Iterable[Poly]) -> set:
    out = set()
    for p in ps:
        out |= p.variables()
    return out
