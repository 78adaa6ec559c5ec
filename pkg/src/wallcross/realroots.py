"""Exact real root isolation for univariate rational polynomials.

Roots are isolated by Sturm sequences and bisection over Fractions.  An
isolated root remembers its squarefree defining polynomial and an open
interval containing exactly one of its roots; a bisection point that hits
the root turns it into an exact rational.
"""
from __future__ import annotations

from fractions import Fraction

import flint


def poly(coeffs) -> flint.fmpq_poly:
    """Polynomial from ascending coefficients."""
    return flint.fmpq_poly([flint.fmpq(Fraction(c).numerator, Fraction(c).denominator) for c in coeffs])


def evaluate(p: flint.fmpq_poly, x: Fraction) -> Fraction:
    v = p(flint.fmpq(x.numerator, x.denominator))
    return Fraction(int(v.p), int(v.q))


def _sign(x) -> int:
    return (x > 0) - (x < 0)


def squarefree_part(p: flint.fmpq_poly) -> flint.fmpq_poly:
    if p.degree() < 1:
        return p
    g = p.gcd(p.derivative())
    return p // g if g.degree() > 0 else p


def sturm_sequence(p: flint.fmpq_poly) -> list:
    seq = [p, p.derivative()]
    while not seq[-1].is_zero():
        r = -(seq[-2] % seq[-1])
        if r.is_zero():
            break
        seq.append(r)
    return [s for s in seq if not s.is_zero()]


def _variations(seq, x: Fraction) -> int:
    signs = [s for s in (_sign(evaluate(q, x)) for q in seq) if s]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def count_roots(p: flint.fmpq_poly, lo: Fraction, hi: Fraction, seq=None) -> int:
    """Number of distinct real roots in the open interval (lo, hi)."""
    if p.degree() < 1:
        return 0
    seq = seq or sturm_sequence(p)
    n = _variations(seq, lo) - _variations(seq, hi)
    if evaluate(p, hi) == 0:
        n -= 1
    return n


class RealRoot:
    """A real algebraic number given by a squarefree polynomial and an isolating interval."""

    __slots__ = ("poly", "lo", "hi", "exact")

    def __init__(self, p, lo, hi, exact=None):
        self.poly = p
        self.lo, self.hi = Fraction(lo), Fraction(hi)
        self.exact = None if exact is None else Fraction(exact)

    @classmethod
    def rational(cls, x) -> "RealRoot":
        x = Fraction(x)
        return cls(poly([-x, 1]), x, x, x)

    def refine(self):
        if self.exact is not None:
            return
        mid = (self.lo + self.hi) / 2
        v = evaluate(self.poly, mid)
        if v == 0:
            self.exact = self.lo = self.hi = mid
        elif _sign(v) == _sign(evaluate(self.poly, self.lo)):
            self.lo = mid
        else:
            self.hi = mid

    def sign_at(self, g: flint.fmpq_poly) -> int:
        """Sign of g at this root."""
        if g.is_zero():
            return 0
        if self.exact is not None:
            return _sign(evaluate(g, self.exact))
        common = g.gcd(self.poly)
        if common.degree() > 0 and _sign(evaluate(common, self.lo)) != _sign(evaluate(common, self.hi)):
            return 0
        # g does not vanish here, shrink until g has no root in the closed interval
        seq = sturm_sequence(g) if g.degree() > 0 else None
        while True:
            if self.exact is not None:
                return _sign(evaluate(g, self.exact))
            v = evaluate(g, self.lo)
            if v != 0 and (seq is None or count_roots(g, self.lo, self.hi, seq) == 0):
                return _sign(v)
            self.refine()

    def _contains_rational(self, x: Fraction) -> bool:
        return self.lo < x < self.hi and evaluate(self.poly, x) == 0

    def compare(self, other: "RealRoot") -> int:
        """-1, 0 or 1 as self <, =, > other."""
        if self.exact is not None and other.exact is not None:
            return _sign(self.exact - other.exact)
        if self.exact is not None:
            return -other._compare_rational(self.exact)
        if other.exact is not None:
            return self._compare_rational(other.exact)
        common = self.poly.gcd(other.poly)
        if common.degree() > 0 and self.sign_at(common) == 0 and other.sign_at(common) == 0:
            if self.exact is not None or other.exact is not None:
                return self.compare(other)
            lo, hi = max(self.lo, other.lo), min(self.hi, other.hi)
            # each interval holds exactly one root of the common factor
            if lo < hi and (count_roots(common, lo, hi) > 0):
                return 0
            if lo == hi and evaluate(common, lo) == 0:
                return 0
        while True:
            if self.exact is not None or other.exact is not None:
                return self.compare(other)
            if self.hi <= other.lo:
                return -1
            if other.hi <= self.lo:
                return 1
            self.refine()
            other.refine()

    def _compare_rational(self, x: Fraction) -> int:
        if self._contains_rational(x):
            return 0
        while self.exact is None and self.lo < x < self.hi:
            self.refine()
        if self.exact is not None:
            return _sign(self.exact - x)
        return 1 if self.lo >= x else -1

    def __repr__(self):
        if self.exact is not None:
            return f"RealRoot({self.exact})"
        return f"RealRoot({self.poly}, ({self.lo}, {self.hi}))"


def isolate_roots(p: flint.fmpq_poly, lo, hi) -> list:
    """Distinct real roots of p in the open interval (lo, hi), in increasing order."""
    lo, hi = Fraction(lo), Fraction(hi)
    if p.is_zero():
        raise ValueError("the zero polynomial has no isolated roots")
    sq = squarefree_part(p)
    if sq.degree() < 1:
        return []
    seq = sturm_sequence(sq)
    out = []
    stack = [(lo, hi)]
    while stack:
        a, b = stack.pop()
        n = count_roots(sq, a, b, seq)
        if n == 0:
            continue
        if n == 1 and evaluate(sq, a) != 0 and evaluate(sq, b) != 0:
            out.append(RealRoot(sq, a, b))
            continue
        m = (a + b) / 2
        if evaluate(sq, m) == 0:
            out.append(RealRoot(sq, m, m, m))
        stack.append((m, b))
        stack.append((a, m))
    out.sort(key=lambda r: (r.exact if r.exact is not None else r.lo))
    return out


def has_root_in_closed(p: flint.fmpq_poly, lo, hi) -> bool:
    lo, hi = Fraction(lo), Fraction(hi)
    return evaluate(p, lo) == 0 or evaluate(p, hi) == 0 or count_roots(p, lo, hi) > 0
