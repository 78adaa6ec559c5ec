import random
from fractions import Fraction
from math import isqrt

import pytest
from hypothesis import given, settings, strategies as st

from wallcross.realroots import RealRoot, count_roots, has_root_in_closed, isolate_roots, poly, squarefree_part

X = poly([0, 1])


def sqrt_bracket(b: int, scale: int = 10 ** 6):
    """lo < sqrt(b) < hi with hi - lo = 1/scale, for non-square b."""
    r = isqrt(b * scale * scale)
    return Fraction(r, scale), Fraction(r + 1, scale)


def test_count_and_isolate_simple():
    p = poly([-2, 0, 1])  # t^2 - 2
    assert count_roots(p, Fraction(-2), Fraction(2)) == 2
    assert count_roots(p, Fraction(0), Fraction(2)) == 1
    roots = isolate_roots(p, -2, 2)
    assert len(roots) == 2
    assert roots[0].compare(roots[1]) == -1
    assert roots[1]._compare_rational(Fraction(141, 100)) == 1
    assert roots[1]._compare_rational(Fraction(142, 100)) == -1


def test_open_interval_excludes_endpoints():
    p = poly([-1, 0, 1])
    assert isolate_roots(p, -1, 1) == []
    assert count_roots(p, Fraction(-1), Fraction(1)) == 0
    assert has_root_in_closed(p, 1, 3) and not has_root_in_closed(p, 2, 3)


def test_rational_root_found_exactly():
    roots = isolate_roots(poly([-1, 2]), -3, 5)  # 2t - 1, bisection of (-3, 5) hits 1 then 1/2
    assert len(roots) == 1
    assert roots[0].compare(RealRoot.rational(Fraction(1, 2))) == 0


def test_squarefree_part():
    p = poly([-1, 1]) ** 3 * poly([2, 1])
    sq = squarefree_part(p)
    assert sq.degree() == 2
    assert len(isolate_roots(p, -5, 5)) == 2


def test_sign_at():
    r = isolate_roots(poly([-2, 0, 1]), 0, 2)[0]  # sqrt 2
    assert r.sign_at(poly([-3, 0, 1])) == -1
    assert r.sign_at(poly([-1, 1])) == 1
    assert r.sign_at(poly([-2, 0, 1]) * poly([5, 1])) == 0
    assert r.sign_at(poly([0])) == 0


def test_compare_same_number_different_polynomials():
    a = isolate_roots(poly([-2, 0, 1]), 0, 3)[0]
    b = [r for r in isolate_roots(poly([-2, 0, 1]) * poly([-7, 1]) * poly([-3, 0, 1]), 0, 10)][0]
    c = isolate_roots(poly([-3, 0, 1]), 0, 3)[0]
    assert a.compare(b) == 0 == b.compare(a)
    assert a.compare(c) == -1 and c.compare(a) == 1


def test_zero_polynomial_rejected():
    with pytest.raises(ValueError):
        isolate_roots(poly([0]), 0, 1)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_isolation_against_known_roots(seed):
    rng = random.Random(seed)
    known = []  # (lo, hi) brackets, exact when lo == hi
    p = poly([rng.choice([-3, -1, 1, 2])])
    for _ in range(rng.randint(1, 3)):
        r = Fraction(rng.randint(-30, 30), rng.randint(1, 7))
        p = p * poly([-r, 1]) ** rng.randint(1, 2)
        known.append((r, r))
    for _ in range(rng.randint(0, 2)):
        a = Fraction(rng.randint(-6, 6), rng.randint(1, 3))
        b = rng.choice([2, 3, 5, 6, 7, 11])
        # (t - a)^2 - b has roots a +- sqrt b
        p = p * poly([a * a - b, -2 * a, 1])
        lo, hi = sqrt_bracket(b)
        known += [(a - hi, a - lo), (a + lo, a + hi)]
    lo, hi = Fraction(-10), Fraction(10)
    expected = sorted({k for k in known if lo < k[0] and k[1] < hi})
    roots = isolate_roots(p, lo, hi)
    assert len(roots) == len(expected)
    for r, (a, b) in zip(roots, expected):
        if a == b:
            assert r._compare_rational(a) == 0
        else:
            assert r._compare_rational(a) == 1 and r._compare_rational(b) == -1
    for r, s in zip(roots, roots[1:]):
        assert r.compare(s) == -1
