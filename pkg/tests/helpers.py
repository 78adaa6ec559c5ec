"""Random generators and independent oracles shared by the tests."""
from __future__ import annotations

import random
from fractions import Fraction
from math import comb

import flint

from wallcross.lattice import (
    ConeSeries,
    GroupElement,
    LieSeries,
    bracket,
    double_lattice,
    make_lattice,
    standard_cone,
)


def cone2(k: int, D: int):
    return standard_cone(make_lattice(2, [[0, k], [-k, 0]]), D)


def cone4(D: int):
    """Standard cone on the double of a rank-2 lattice with form 1."""
    return standard_cone(double_lattice(make_lattice(2, [[0, 1], [-1, 0]])), D)


def cone3_degenerate(D: int):
    return standard_cone(make_lattice(3, [[0, 1, -2], [-1, 0, 3], [2, -3, 0]]), D)


def rand_frac(rng: random.Random, span: int = 5) -> Fraction:
    return Fraction(rng.randint(-span, span), rng.randint(1, 4))


def random_series(rng: random.Random, cone, nterms: int = 6, constant: bool = True, min_height: int = 1):
    pts = cone.lattice_points(min_height)
    terms = {p: rand_frac(rng) for p in rng.sample(pts, min(nterms, len(pts)))}
    if constant:
        terms[cone.lattice.zero()] = rand_frac(rng)
    return ConeSeries(cone, terms)


def random_lie(rng: random.Random, cone, nterms: int = 6, min_height: int = 1) -> LieSeries:
    pts = cone.lattice_points(min_height)
    return LieSeries(cone, {p: rand_frac(rng) for p in rng.sample(pts, min(nterms, len(pts)))})


def random_group(rng: random.Random, cone, nterms: int = 5) -> GroupElement:
    return GroupElement(cone, log=random_lie(rng, cone, nterms))


def ad_exp(h: LieSeries, f: ConeSeries) -> ConeSeries:
    """sum_k ad_h^k f / k!, summed until it vanishes under the truncation."""
    total = f
    term = f
    k = 1
    while True:
        term = bracket(h, term).scale(Fraction(1, k))
        if not term.terms:
            return total
        total = total + term
        k += 1


def coordinate_t_action(a: int, b: int, k: int, cone):
    """Images of x = e_(1,0), y = e_(0,1) under the closed coordinate formula for T^{(k)}_{a,b}.

    x -> x (1 - s x^a y^b)^(-kb),  y -> y (1 - s x^a y^b)^(ka),  s = (-1)^(kab),
    expanded binomially, with monomials x^p y^q rewritten as (-1)^(kpq) e_(p,q).
    """
    s = (-1) ** (k * a * b)
    D = cone.max_height

    def expand(base, expo):
        terms = {}
        n = 0
        while base[0] + base[1] + n * (a + b) <= D:
            coeff = Fraction(_gen_binom(expo, n)) * (-s) ** n
            p, q = base[0] + n * a, base[1] + n * b
            terms[(p, q)] = terms.get((p, q), 0) + coeff * (-1) ** (k * p * q)
            n += 1
            if a + b == 0:
                break
        return ConeSeries(cone, terms)

    return expand((1, 0), -k * b), expand((0, 1), k * a)


def _gen_binom(e: int, n: int) -> int:
    """Generalized binomial coefficient C(e, n) for any integer e."""
    if e >= 0:
        return comb(e, n)
    return (-1) ** n * comb(-e + n - 1, n)


def random_small_loop(rng: random.Random, n: int):
    """Short polygonal loop in configuration space around a center with a collinear triple.

    The center has distinct points on a small grid, with a random triple (or all
    points, half the time) forced onto a common line.  The loop is a polygon in a
    random 2-plane of perturbations, small enough that the disc it bounds contains
    no collision, so the loop is contractible among distinct configurations.
    Returns waypoints, or None if a waypoint happens to be non-generic.
    """
    while True:
        base = [(Fraction(rng.randint(-6, 6)), Fraction(rng.randint(-6, 6))) for _ in range(n)]
        if rng.random() < 0.5:
            xs = rng.sample(range(-6, 7), n)
            base = [(Fraction(x), Fraction(0)) for x in xs]
        else:
            i, j, k = rng.sample(range(n), 3)
            t = Fraction(rng.randint(1, 3), 4)
            base[j] = (base[i][0] + t * (base[k][0] - base[i][0]), base[i][1] + t * (base[k][1] - base[i][1]))
        if len(set(base)) == n:
            break
    sep = min(max(abs(p[0] - q[0]), abs(p[1] - q[1])) for a, p in enumerate(base) for q in base[a + 1:])
    # each point moves by at most 2 * eps in each coordinate, so eps < sep/4 keeps them apart
    eps = sep / 5
    u = [(Fraction(rng.randint(-2, 2)), Fraction(rng.randint(-2, 2))) for _ in range(n)]
    v = [(Fraction(rng.randint(-2, 2)), Fraction(rng.randint(-2, 2))) for _ in range(n)]
    scale = eps / 2
    sides = rng.choice([3, 4, 5, 6])
    corners = [(Fraction(1), Fraction(0)), (Fraction(1, 3), Fraction(1)), (Fraction(-1), Fraction(1, 2)),
               (Fraction(-2, 3), Fraction(-1)), (Fraction(1, 2), Fraction(-1)), (Fraction(1), Fraction(-1, 3))]
    chosen = sorted(rng.sample(range(6), sides))
    wps = []
    for c in chosen:
        a, b = corners[c]
        wps.append(tuple((p[0] + scale * (a * du[0] + b * dv[0]), p[1] + scale * (a * du[1] + b * dv[1]))
                         for p, du, dv in zip(base, u, v)))
    wps.append(wps[0])
    return wps


def random_skew(rng: random.Random, n: int):
    a = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            a[i][j] = Fraction(rng.randint(-3, 3))
            a[j][i] = -a[i][j]
    return a


def triangular_oracle(alpha: dict, top: int) -> dict:
    """Solve alpha_m = -sum_{d | m} Omega_{m/d} / d^2 as a dense lower-triangular system."""
    A = flint.fmpq_mat(top, top)
    b = flint.fmpq_mat(top, 1)
    for m in range(1, top + 1):
        for j in range(1, m + 1):
            if m % j == 0:
                d = m // j
                A[m - 1, j - 1] = flint.fmpq(-1, d * d)
        a = Fraction(alpha.get(m, 0))
        b[m - 1, 0] = flint.fmpq(a.numerator, a.denominator)
    x = A.solve(b)
    return {m: Fraction(int(x[m - 1, 0].p), int(x[m - 1, 0].q)) for m in range(1, top + 1)}


def laurent_coefficients(f, lo: int, hi: int) -> dict:
    """Coefficients of t^lo .. t^hi in the Laurent expansion at t = 0 of a QRational."""
    num, den = f.coefficients()
    v = next(i for i, c in enumerate(den) if c)
    den = den[v:]
    # f = t^-v num / den with den(0) != 0; expand num / den by long division
    n = hi + v + 1
    out = []
    for k in range(max(n, 0)):
        c = (num[k] if k < len(num) else Fraction(0)) - sum(den[j] * out[k - j] for j in range(1, min(k, len(den) - 1) + 1))
        out.append(c / den[0])
    return {e: (out[e + v] if 0 <= e + v < len(out) else Fraction(0)) for e in range(lo, hi + 1)}
