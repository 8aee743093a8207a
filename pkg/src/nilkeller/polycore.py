"""Exact sparse multivariate polynomials over Q in x1..xn and t.

Every polynomial carries its context ``n`` (the number of x-variables).
Exponent vectors have n + 1 slots; the last slot belongs to ``t``, which is
always present so that K[x] and K[x, t] values mix freely.

Variables are addressed by their public index: ``1..n`` for ``x1..xn`` and
the string ``"t"`` (also exported as ``T``) for t.

Text syntax::

    3/2*x1^2*x2 - x3 + t

Terms are printed in descending lexicographic order of their exponent
vectors (x1 first, then x2, ...), so the first printed term has the highest
x1-degree, ties broken by the highest x2-degree.
"""

from __future__ import annotations

import heapq
import re
from fractions import Fraction
from typing import Dict, Iterable, Iterator, Mapping, Optional, Sequence, Tuple, Union

from . import univariate as up
from .errors import ContextMismatch, ParseError

Monomial = Tuple[int, ...]
Index = Union[int, str]
Scalar = Union[int, Fraction]

T = "t"


def _grlex(m: Monomial) -> Tuple[int, Monomial]:
    return (sum(m), m)


class Poly:
    """Immutable sparse polynomial with rational coefficients."""

    __slots__ = ("n", "_terms", "_hash")

    def __init__(self, n: int, terms: Optional[Mapping[Monomial, Scalar]] = None):
        if n < 1:
            raise ValueError("context needs at least one x-variable")
        clean: Dict[Monomial, Fraction] = {}
        if terms:
            for m, c in terms.items():
                m = tuple(m)
                if len(m) != n + 1 or any(e < 0 for e in m):
                    raise ValueError(f"bad exponent vector {m} for n={n}")
                c = Fraction(c)
                if c:
                    clean[m] = clean.get(m, Fraction(0)) + c
            clean = {m: c for m, c in clean.items() if c}
        self.n = n
        self._terms = clean
        self._hash: Optional[int] = None

    @classmethod
    def _raw(cls, n: int, terms: Dict[Monomial, Fraction]) -> "Poly":
        p = object.__new__(cls)
        p.n = n
        p._terms = terms
        p._hash = None
        return p

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls, n: int) -> "Poly":
        return cls._raw(n, {})

    @classmethod
    def const(cls, n: int, c: Scalar) -> "Poly":
        c = Fraction(c)
        return cls._raw(n, {(0,) * (n + 1): c} if c else {})

    @classmethod
    def one(cls, n: int) -> "Poly":
        return cls.const(n, 1)

    @classmethod
    def var(cls, n: int, i: Index) -> "Poly":
        m = [0] * (n + 1)
        m[slot(n, i)] = 1
        return cls._raw(n, {tuple(m): Fraction(1)})

    @classmethod
    def monomial(cls, n: int, m: Sequence[int], c: Scalar = 1) -> "Poly":
        return cls(n, {tuple(m): c})

    # -- inspection ---------------------------------------------------

    @property
    def terms(self) -> Dict[Monomial, Fraction]:
        """Read-only view; callers must not mutate the returned dict."""
        return self._terms

    def items(self) -> Iterator[Tuple[Monomial, Fraction]]:
        return iter(sorted(self._terms.items(), reverse=True))

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return all(not any(m) for m in self._terms)

    def constant_term(self) -> Fraction:
        return self._terms.get((0,) * (self.n + 1), Fraction(0))

    def coeff(self, m: Sequence[int]) -> Fraction:
        return self._terms.get(tuple(m), Fraction(0))

    def degree(self) -> int:
        """Total degree over all variables including t; -1 for zero."""
        return max((sum(m) for m in self._terms), default=-1)

    def degree_in(self, i: Index) -> int:
        s = slot(self.n, i)
        return max((m[s] for m in self._terms), default=-1)

    def degree_wrt(self, indices: Iterable[Index]) -> int:
        slots = [slot(self.n, i) for i in indices]
        return max((sum(m[s] for s in slots) for m in self._terms), default=-1)

    def variables(self) -> set:
        """Public indices of the variables that actually occur."""
        used = set()
        for m in self._terms:
            for s, e in enumerate(m):
                if e:
                    used.add(T if s == self.n else s + 1)
        return used

    def involves(self, i: Index) -> bool:
        s = slot(self.n, i)
        return any(m[s] for m in self._terms)

    def lies_in(self, indices: Iterable[Index]) -> bool:
        """True iff every occurring variable is among ``indices``."""
        return self.variables() <= set(indices)

    # -- arithmetic ---------------------------------------------------

    def _check(self, other: "Poly") -> None:
        if other.n != self.n:
            raise ContextMismatch(f"context n={self.n} vs n={other.n}")

    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction)):
            return Poly.const(self.n, other)
        return NotImplemented

    def __add__(self, other) -> "Poly":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not other._terms:
            return self
        out = dict(self._terms)
        for m, c in other._terms.items():
            v = out.get(m)
            if v is None:
                out[m] = c
            else:
                v += c
                if v:
                    out[m] = v
                else:
                    del out[m]
        return Poly._raw(self.n, out)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly._raw(self.n, {m: -c for m, c in self._terms.items()})

    def __sub__(self, other) -> "Poly":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other) -> "Poly":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other - self

    def scale(self, c: Scalar) -> "Poly":
        c = Fraction(c)
        if not c:
            return Poly.zero(self.n)
        return Poly._raw(self.n, {m: v * c for m, v in self._terms.items()})

    def __mul__(self, other) -> "Poly":
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, Poly):
            return NotImplemented
        self._check(other)
        a, b = self._terms, other._terms
        if not a or not b:
            return Poly.zero(self.n)
        if len(a) < len(b):
            a, b = b, a
        out: Dict[Monomial, Fraction] = {}
        get = out.get
        for mb, cb in b.items():
            for ma, ca in a.items():
                m = tuple([x + y for x, y in zip(ma, mb)])
                out[m] = get(m, 0) + ca * cb
        return Poly._raw(self.n, {m: c for m, c in out.items() if c})

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "Poly":
        if not isinstance(k, int) or k < 0:
            raise ValueError("exponent must be a non-negative integer")
        result = Poly.one(self.n)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, Poly):
            return self.n == other.n and self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self._terms == Poly.const(self.n, other)._terms
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.n, frozenset(self._terms.items())))
        return self._hash

    # -- calculus and substitution --------------------------------------

    def partial(self, i: Index) -> "Poly":
        s = slot(self.n, i)
        out: Dict[Monomial, Fraction] = {}
        for m, c in self._terms.items():
            e = m[s]
            if e:
                mm = list(m)
                mm[s] = e - 1
                out[tuple(mm)] = c * e
        return Poly._raw(self.n, out)

    def substitute(self, bindings: Mapping[Index, "Poly"]) -> "Poly":
        """Simultaneous substitution of variables by polynomials."""
        if not bindings:
            return self
        slots = {}
        for i, q in bindings.items():
            self._check(q)
            slots[slot(self.n, i)] = q
        powers: Dict[Tuple[int, int], Poly] = {}

        def power(s: int, e: int) -> Poly:
            key = (s, e)
            if key not in powers:
                powers[key] = slots[s] if e == 1 else power(s, e - 1) * slots[s]
            return powers[key]

        # group by the bound part of the exponent so each product is built once
        groups: Dict[Monomial, Dict[Monomial, Fraction]] = {}
        for m, c in self._terms.items():
            bound = tuple(m[s] if s in slots else 0 for s in range(self.n + 1))
            free = tuple(0 if s in slots else m[s] for s in range(self.n + 1))
            groups.setdefault(bound, {})[free] = c
        result = Poly.zero(self.n)
        for bound, rest in groups.items():
            prod = Poly._raw(self.n, rest)
            for s, e in enumerate(bound):
                if e:
                    prod = prod * power(s, e)
            result = result + prod
        return result

    def __call__(self, *args: "Poly") -> "Poly":
        """Evaluate at polynomials for x1..xk (k = len(args)); t is untouched."""
        return self.substitute({i + 1: a for i, a in enumerate(args)})

    # -- printing -----------------------------------------------------

    def __str__(self) -> str:
        return to_str(self)

    def __repr__(self) -> str:
        return f"Poly({self.n}, {to_str(self)!r})"


def slot(n: int, i: Index) -> int:
    if i == T:
        return n
    if isinstance(i, int) and not isinstance(i, bool) and 1 <= i <= n:
        return i - 1
    raise IndexError(f"invalid variable index {i!r} for n={n}")


def variables(n: int) -> Tuple[Poly, ...]:
    """(x1, ..., xn) as polynomials in context n."""
    return tuple(Poly.var(n, i) for i in range(1, n + 1))


# -- module-level operations -------------------------------------------


def add(p: Poly, q: Poly) -> Poly:
    p._check(q)
    return p + q


def mul(p: Poly, q: Poly) -> Poly:
    p._check(q)
    return p * q


def partial(p: Poly, i: Index) -> Poly:
    return p.partial(i)


def substitute(p: Poly, bindings: Mapping[Index, Poly]) -> Poly:
    return p.substitute(bindings)


def divides(f: Poly, g: Poly) -> Optional[Poly]:
    """Exact quotient ``g / f`` if ``f`` divides ``g``, else ``None``.

    Single-divisor division in grlex order (x1 > ... > xn > t). A single
    polynomial is a Groebner basis of its ideal, so a nonzero remainder
    term settles non-divisibility immediately.
    """
    f._check(g)
    if f.is_zero():
        raise ZeroDivisionError("divides: divisor is zero")
    if g.is_zero():
        return Poly.zero(f.n)
    lm = max(f._terms, key=_grlex)
    lc = f._terms[lm]
    tail = [(m, c) for m, c in f._terms.items() if m != lm]
    rem: Dict[Monomial, Fraction] = dict(g._terms)
    heap = [(tuple(-x for x in (sum(m),) + m), m) for m in rem]
    heapq.heapify(heap)
    quo: Dict[Monomial, Fraction] = {}
    while heap:
        _, m = heapq.heappop(heap)
        c = rem.pop(m, None)
        if c is None:
            continue
        if any(a < b for a, b in zip(m, lm)):
            return None
        qm = tuple(a - b for a, b in zip(m, lm))
        qc = c / lc
        quo[qm] = quo.get(qm, 0) + qc
        for fm, fc in tail:
            mm = tuple(a + b for a, b in zip(qm, fm))
            v = rem.get(mm)
            nv = (v or 0) - qc * fc
            if nv:
                if v is None:
                    heapq.heappush(heap, (tuple(-x for x in (sum(mm),) + mm), mm))
                rem[mm] = nv
            elif v is not None:
                del rem[mm]
    return Poly(f.n, quo)


def multiplicity(f: Poly, p: Poly) -> int:
    """Largest m with p^m | f."""
    if f.is_zero():
        raise ValueError("multiplicity of the zero polynomial is undefined")
    if p.is_constant():
        raise ValueError("multiplicity needs a non-constant factor")
    m = 0
    while True:
        q = divides(p, f)
        if q is None:
            return m
        f = q
        m += 1


def to_univariate(p: Poly, i: Index) -> up.UPoly:
    """Coefficient list of p as a univariate polynomial in variable i."""
    s = slot(p.n, i)
    out: Dict[int, Fraction] = {}
    for m, c in p._terms.items():
        if any(e for k, e in enumerate(m) if k != s):
            raise ValueError(f"{p} is not univariate in {i}")
        out[m[s]] = c
    if not out:
        return []
    return up.strip([out.get(e, Fraction(0)) for e in range(max(out) + 1)])


def from_univariate(coeffs: Sequence[Scalar], n: int, i: Index) -> Poly:
    s = slot(n, i)
    terms = {}
    for e, c in enumerate(coeffs):
        m = [0] * (n + 1)
        m[s] = e
        terms[tuple(m)] = c
    return Poly(n, terms)


def coefficients_in(p: Poly, i: Index) -> Dict[int, Poly]:
    """Split p = sum_e c_e * x_i^e; returns {e: c_e} with c_e free of x_i."""
    s = slot(p.n, i)
    out: Dict[int, Dict[Monomial, Fraction]] = {}
    for m, c in p._terms.items():
        mm = list(m)
        e = mm[s]
        mm[s] = 0
        out.setdefault(e, {})[tuple(mm)] = c
    return {e: Poly._raw(p.n, t) for e, t in out.items()}


def content_wrt_tail(f: Poly) -> Poly:
    """Monic gcd in K[x2] of the x1-coefficients of ``f`` in K[x1, x2].

    The result is 1 exactly when f has no factor in K[x2] minus K.
    """
    if f.is_zero():
        raise ValueError("content of the zero polynomial")
    if not f.lies_in({1, 2}):
        raise ValueError(f"{f} involves variables beyond x1, x2")
    g: up.UPoly = []
    for c in coefficients_in(f, 1).values():
        g = up.gcd(g, to_univariate(c, 2))
    return from_univariate(g, f.n, 2)


def leading_term_lex(f: Poly) -> Tuple[Monomial, Fraction]:
    """Lexicographic leading term with x1 > x2: highest x2-degree among the terms of highest x1-degree."""
    if f.is_zero():
        raise ValueError("leading term of the zero polynomial")
    if not f.lies_in({1, 2}):
        raise ValueError(f"{f} is not in K[x1, x2]")
    m = max(f._terms, key=lambda m: (m[0], m[1]))
    return m, f._terms[m]


def homog_part_wrt(f: Poly, indices: Iterable[Index], d: int) -> Poly:
    """Sum of the terms of f whose total degree in ``indices`` equals d."""
    slots = [slot(f.n, i) for i in indices]
    return Poly._raw(f.n, {m: c for m, c in f._terms.items() if sum(m[s] for s in slots) == d})


def restrict_terms(f: Poly, keep) -> Poly:
    """Terms whose exponent vector satisfies the predicate ``keep``."""
    return Poly._raw(f.n, {m: c for m, c in f._terms.items() if keep(m)})


# -- text syntax ---------------------------------------------------------


def _fmt_coeff(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _fmt_mono(n: int, m: Monomial) -> str:
    parts = []
    for s, e in enumerate(m):
        if e:
            name = "t" if s == n else f"x{s + 1}"
            parts.append(name if e == 1 else f"{name}^{e}")
    return "*".join(parts)


def to_str(p: Poly) -> str:
    if p.is_zero():
        return "0"
    out = []
    for k, (m, c) in enumerate(p.items()):
        neg = c < 0
        a = -c if neg else c
        mono = _fmt_mono(p.n, m)
        if not mono:
            body = _fmt_coeff(a)
        elif a == 1:
            body = mono
        else:
            body = f"{_fmt_coeff(a)}*{mono}"
        if k == 0:
            out.append(f"-{body}" if neg else body)
        else:
            out.append(f" - {body}" if neg else f" + {body}")
    return "".join(out)


_TOKEN = re.compile(r"\s*(?:(\d+)|(x\d+|t)|(\S))")


class _Parser:
    def __init__(self, text: str, n: Optional[int], line: int):
        self.text = text
        self.line = line
        self.toks = []
        pos = 0
        while pos < len(text):
            mt = _TOKEN.match(text, pos)
            if mt is None:
                break
            col = mt.start(mt.lastindex) + 1
            if mt.group(1):
                self.toks.append(("int", int(mt.group(1)), col))
            elif mt.group(2):
                self.toks.append(("var", mt.group(2), col))
            else:
                ch = mt.group(3)
                if ch not in "+-*/^()":
                    raise ParseError(f"unexpected character {ch!r}", line, col)
                self.toks.append((ch, ch, col))
            pos = mt.end()
        self.pos = 0
        if n is None:
            idx = [int(v[1:]) for kind, v, _ in self.toks if kind == "var" and v != "t"]
            n = max(idx, default=1)
        self.n = n

    def peek(self):
        return self.toks[self.pos] if self.pos < len(self.toks) else ("end", None, len(self.text) + 1)

    def take(self, kind=None):
        tok = self.peek()
        if kind is not None and tok[0] != kind:
            what = "end of input" if tok[0] == "end" else repr(tok[1])
            raise ParseError(f"expected {kind}, found {what}", self.line, tok[2])
        self.pos += 1
        return tok

    def parse(self) -> Poly:
        if not self.toks:
            raise ParseError("empty polynomial", self.line, 1)
        p = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            raise ParseError(f"unexpected {tok[1]!r}", self.line, tok[2])
        return p

    def expr(self) -> Poly:
        sign = 1
        if self.peek()[0] in "+-":
            sign = -1 if self.take()[0] == "-" else 1
        acc = self.term().scale(sign)
        while self.peek()[0] in ("+", "-"):
            op = self.take()[0]
            t = self.term()
            acc = acc + t if op == "+" else acc - t
        return acc

    def term(self) -> Poly:
        acc = self.factor()
        while self.peek()[0] == "*":
            self.take()
            acc = acc * self.factor()
        return acc

    def factor(self) -> Poly:
        base = self.primary()
        if self.peek()[0] == "^":
            self.take()
            base = base ** self.take("int")[1]
        return base

    def primary(self) -> Poly:
        kind, val, col = self.peek()
        if kind == "int":
            self.take()
            c = Fraction(val)
            if self.peek()[0] == "/":
                self.take()
                den = self.take("int")[1]
                if den == 0:
                    raise ParseError("zero denominator", self.line, col)
                c = Fraction(val, den)
            return Poly.const(self.n, c)
        if kind == "var":
            self.take()
            if val == "t":
                return Poly.var(self.n, T)
            i = int(val[1:])
            if not 1 <= i <= self.n:
                raise ParseError(f"variable {val} outside x1..x{self.n}", self.line, col)
            return Poly.var(self.n, i)
        if kind == "(":
            self.take()
            p = self.expr()
            self.take(")")
            return p
        what = "end of input" if kind == "end" else repr(val)
        raise ParseError(f"unexpected {what}", self.line, col)


def parse_poly(text: str, n: Optional[int] = None, line: int = 1) -> Poly:
    """Parse the text syntax; ``n`` defaults to the largest xi index seen."""
    return _Parser(text, n, line).parse()
