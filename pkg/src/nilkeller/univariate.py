"""Dense univariate polynomials over Q as ascending coefficient lists.

Only what the Euclidean steps need: the K[x2] gcd behind the content test
and the quotient-remainder used by Hermite reduction.
"""

from __future__ import annotations

from fractions import Fraction
from typing import List, Sequence, Tuple

UPoly = List[Fraction]


def strip(p: Sequence[Fraction]) -> UPoly:
    out = list(p)
    while out and out[-1] == 0:
        out.pop()
    return out


def degree(p: Sequence[Fraction]) -> int:
    """Degree, with -1 for the zero polynomial."""
    return len(p) - 1


def add(p: Sequence[Fraction], q: Sequence[Fraction]) -> UPoly:
    n = max(len(p), len(q))
    return strip([(p[i] if i < len(p) else 0) + (q[i] if i < len(q) else 0) for i in range(n)])


def sub(p: Sequence[Fraction], q: Sequence[Fraction]) -> UPoly:
    return add(p, [-c for c in q])


def mul(p: Sequence[Fraction], q: Sequence[Fraction]) -> UPoly:
    if not p or not q:
        return []
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a == 0:
            continue
        for j, b in enumerate(q):
            out[i + j] += a * b
    return strip(out)


def divmod_(p: Sequence[Fraction], q: Sequence[Fraction]) -> Tuple[UPoly, UPoly]:
    q = strip(q)
    if not q:
        raise ZeroDivisionError("division by the zero polynomial")
    r = strip(p)
    if len(r) < len(q):
        return [], r
    quo = [Fraction(0)] * (len(r) - len(q) + 1)
    lc = q[-1]
    while len(r) >= len(q) and r:
        shift = len(r) - len(q)
        c = r[-1] / lc
        quo[shift] = c
        for i, b in enumerate(q):
            r[i + shift] -= c * b
        r = strip(r)
    return strip(quo), r


def monic(p: Sequence[Fraction]) -> UPoly:
    p = strip(p)
    if not p:
        return []
    lc = p[-1]
    return [c / lc for c in p]


def gcd(p: Sequence[Fraction], q: Sequence[Fraction]) -> UPoly:
    """Monic gcd; gcd(0, 0) = 0."""
    a, b = strip(p), strip(q)
    while b:
        _, r = divmod_(a, b)
        a, b = b, r
    return monic(a)


def derivative(p: Sequence[Fraction]) -> UPoly:
    return strip([i * c for i, c in enumerate(p)][1:])


def antiderivative(p: Sequence[Fraction]) -> UPoly:
    """Antiderivative with zero constant term."""
    return strip([Fraction(0)] + [Fraction(c) / (i + 1) for i, c in enumerate(p)])
