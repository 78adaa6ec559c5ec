"""Cohomological Hall algebra of the quiver with one vertex and d loops.

H_n is the ring of symmetric polynomials in n variables, stored in the
monomial symmetric basis m_lambda.  The product of f1 in H_n and f2 in H_m is

    sum over splittings {1..n+m} = I + J, |I| = n, of
        f1(x_I) f2(x_J) prod_{i in I, j in J} (x_j - x_i)^(d-1).

For d = 0 the kernel is a reciprocal; the sum is taken over the Vandermonde
denominator and divided out exactly.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, permutations

import flint

from .errors import NotDivisible, NotHomogeneous
from .lattice import _frac
from .qtorus import QRational


def _partition(exps) -> tuple:
    return tuple(sorted((int(e) for e in exps if e), reverse=True))


class SymPoly:
    """Symmetric polynomial in ``nvars`` variables, keyed by partitions."""

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms=None):
        if nvars < 0:
            raise ValueError("nvars must be >= 0")
        clean = {}
        for lam, c in dict(terms or {}).items():
            lam = _partition(lam)
            if any(x < 0 for x in lam):
                raise ValueError("partitions have nonnegative parts")
            if len(lam) > nvars:
                raise ValueError(f"partition {lam} has more than {nvars} parts")
            c = Fraction(c)
            if c:
                clean[lam] = clean.get(lam, Fraction(0)) + c
        self.nvars = nvars
        self.terms = {k: v for k, v in clean.items() if v}

    @classmethod
    def one(cls, nvars: int) -> "SymPoly":
        return cls(nvars, {(): 1})

    @classmethod
    def elementary(cls, nvars: int, k: int) -> "SymPoly":
        return cls(nvars, {(1,) * k: 1})

    def __eq__(self, other):
        if not isinstance(other, SymPoly):
            return NotImplemented
        return self.nvars == other.nvars and self.terms == other.terms

    __hash__ = None

    def __repr__(self):
        body = " + ".join(f"{c}*m{list(k)}" for k, c in self.items()) or "0"
        return f"SymPoly[{self.nvars}]({body})"

    def items(self):
        return sorted(self.terms.items(), key=lambda kv: (sum(kv[0]), kv[0]))

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other):
        if self.nvars != other.nvars:
            raise ValueError("different numbers of variables")
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, Fraction(0)) + c
        return SymPoly(self.nvars, out)

    def scale(self, s) -> "SymPoly":
        return SymPoly(self.nvars, {k: c * Fraction(s) for k, c in self.terms.items()})

    def degrees(self) -> set:
        return {sum(k) for k in self.terms}

    def to_monomials(self, positions=None, nvars=None) -> dict:
        """Expanded monomials, with variable r of f placed at ``positions[r]`` among ``nvars``."""
        positions = list(range(self.nvars)) if positions is None else list(positions)
        nvars = self.nvars if nvars is None else nvars
        out = {}
        for lam, c in self.terms.items():
            padded = lam + (0,) * (self.nvars - len(lam))
            for perm in set(permutations(padded)):
                e = [0] * nvars
                for r, p in enumerate(positions):
                    e[p] = perm[r]
                out[tuple(e)] = out.get(tuple(e), Fraction(0)) + c
        return out

    @classmethod
    def from_monomials(cls, nvars: int, mono: dict, check: bool = True) -> "SymPoly":
        """Collect a symmetric polynomial given by expanded monomials."""
        terms = {}
        for e, c in mono.items():
            if c and list(e) == sorted(e, reverse=True):
                terms[_partition(e)] = Fraction(c)
        f = cls(nvars, terms)
        if check:
            back = {e: c for e, c in f.to_monomials().items() if c}
            if back != {tuple(e): Fraction(c) for e, c in mono.items() if c}:
                raise ValueError("polynomial is not symmetric")
        return f

    def evaluate(self, point) -> Fraction:
        total = Fraction(0)
        for e, c in self.to_monomials().items():
            term = c
            for x, k in zip(point, e):
                term *= Fraction(x) ** k
            total += term
        return total


def _ctx(n: int):
    return flint.fmpq_mpoly_ctx.get(("x", max(n, 1)), "lex")


def _mpoly(ctx, mono: dict):
    return ctx.from_dict({e: flint.fmpq(c.numerator, c.denominator) for e, c in mono.items()})


def _to_dict(p) -> dict:
    return {tuple(int(x) for x in e): _frac(c) for e, c in p.to_dict().items()}


def shuffle_mul(f1: SymPoly, f2: SymPoly, d: int) -> SymPoly:
    """CoHA product of f1 in H_n and f2 in H_m for the d-loop quiver."""
    if d < 0:
        raise ValueError("d must be >= 0")
    n, m = f1.nvars, f2.nvars
    N = n + m
    if N == 0:
        return SymPoly(0, {(): f1.terms.get((), 0) * f2.terms.get((), 0)})
    ctx = _ctx(N)
    gens = ctx.gens()[:N]
    total = ctx.from_dict({})
    vandermonde = None
    if d == 0 and n and m:
        vandermonde = ctx.from_dict({(0,) * ctx.nvars(): 1})
        for a, b in combinations(range(N), 2):
            vandermonde *= gens[b] - gens[a]
    pad = ctx.nvars() - N
    for I in combinations(range(N), n):
        J = [j for j in range(N) if j not in I]
        g1 = _mpoly(ctx, _pad(f1.to_monomials(I, N), pad))
        g2 = _mpoly(ctx, _pad(f2.to_monomials(J, N), pad))
        term = g1 * g2
        if vandermonde is None:
            if d != 1:
                for i in I:
                    for j in J:
                        term *= (gens[j] - gens[i]) ** (d - 1)
        else:
            # Vandermonde / kernel: the pairs inside I and inside J, with a sign per inverted cross pair
            sign = 1
            for i in I:
                for j in J:
                    if i > j:
                        sign = -sign
            for block in (I, J):
                for a, b in combinations(block, 2):
                    term *= gens[b] - gens[a]
            if sign < 0:
                term = -term
        total += term
    if vandermonde is not None:
        q, r = divmod(total, vandermonde)
        if r != 0:
            raise NotDivisible("d = 0 shuffle numerator is not divisible by the Vandermonde product")
        total = q
    mono = {e[:N]: c for e, c in _to_dict(total).items()}
    return SymPoly.from_monomials(N, mono)


def _pad(mono: dict, pad: int) -> dict:
    if not pad:
        return mono
    return {e + (0,) * pad: c for e, c in mono.items()}


@dataclass(frozen=True)
class Bigrading:
    n: int
    m: int

    def __add__(self, other):
        return Bigrading(self.n + other.n, self.m + other.m)


def bigrade(f: SymPoly, d: int) -> Bigrading:
    """(n, 2K + (1-d) n^2) for f homogeneous of degree K."""
    degs = f.degrees()
    if len(degs) != 1:
        raise NotHomogeneous("zero polynomial has no degree" if not degs else f"degrees {sorted(degs)} are mixed")
    K = degs.pop()
    n = f.nvars
    return Bigrading(n, 2 * K + (1 - d) * n * n)


# --------------------------------------------------------------------------
# Hilbert-Poincare series


@lru_cache(maxsize=None)
def partitions_at_most(k: int, parts: int) -> int:
    """Number of partitions of k into at most ``parts`` parts."""
    if k == 0:
        return 1
    if parts == 0 or k < 0:
        return 0
    # either fewer parts, or subtract 1 from each of exactly ``parts`` parts
    return partitions_at_most(k, parts - 1) + partitions_at_most(k - parts, parts)


def _series_coefficients(n: int, max_degree: int) -> list:
    """Coefficients of 1 / prod_{i=1..n} (1 - q^i) up to q^max_degree."""
    c = [1] + [0] * max_degree
    for i in range(1, n + 1):
        # multiply by 1/(1 - q^i) = running sum with stride i
        for k in range(i, max_degree + 1):
            c[k] += c[k - i]
    return c


def coha_hilbert(d: int, n_max: int, max_degree: int = 8, m_window=None) -> list:
    """Rows {n, K, m, dim, series}: dim H_{n,m} by partition counting next to the generating-series coefficient."""
    if n_max > 6:
        raise ValueError("n_max is limited to 6")
    rows = []
    for n in range(n_max + 1):
        ser = _series_coefficients(n, max_degree)
        for K in range(max_degree + 1):
            m = 2 * K + (1 - d) * n * n
            if m_window is not None and not (m_window[0] <= m <= m_window[1]):
                continue
            if n == 0 and K > 0:
                dim = 0
            else:
                dim = partitions_at_most(K, n)
            rows.append({"n": n, "K": K, "m": m, "dim": dim, "series": ser[K]})
    return rows


def hilbert_coefficient(d: int, n: int) -> QRational:
    """z^n coefficient q^((1-d) n^2 / 2) / prod_{i<=n} (1 - q^i) of P_d, in t = q^(1/2)."""
    out = QRational.t_power((1 - d) * n * n)
    for i in range(1, n + 1):
        out = out / QRational([1] + [0] * (2 * i - 1) + [-1])
    return out


def dilog_bridge(n_max: int) -> list:
    """Compare P_0(z, q^-1) with the quantum dilogarithm coefficient by coefficient."""
    from .qtorus import dilog_coefficient

    return [(n, hilbert_coefficient(0, n).invert_variable() == dilog_coefficient(n)) for n in range(n_max + 1)]
