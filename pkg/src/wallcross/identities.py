"""Named identity suites shared by the command line and the test suite.

Each suite returns an :class:`IdentityReport` listing how many coefficients
were compared and the first one that disagreed, if any.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import PoleAtMinusOne
from .lattice import ConeSeries, apply, compose, make_lattice, standard_cone
from .qtorus import (
    CONJUGATION_ORIENTATION,
    QTorusSeries,
    conjugate,
    normalized_bracket_limit,
    q_power,
    qc_limit,
    quantum_dilog,
)
from .wcf import factorize, standard_charge, t_factor, t_gamma


@dataclass
class IdentityReport:
    suite: str
    max_height: int
    checked: int = 0
    mismatches: int = 0
    first_counterexample: dict | None = None
    notes: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.mismatches == 0

    def compare(self, label, key, lhs, rhs):
        self.checked += 1
        if lhs != rhs:
            self.mismatches += 1
            if self.first_counterexample is None:
                self.first_counterexample = {"where": label, "gamma": list(key), "lhs": str(lhs), "rhs": str(rhs)}

    def compare_series(self, label, f, g):
        h = f.cone.height_of
        for k in sorted(set(f.terms) | set(g.terms), key=lambda v: (h(v), v)):
            self.compare(label, k, f[k], g[k])


def _rank2(k: int, D: int):
    return standard_cone(make_lattice(2, [[0, k], [-k, 0]]), D)


def pentagon_k1(D: int = 10) -> IdentityReport:
    """T_{1,0} T_{0,1} = T_{0,1} T_{1,1} T_{1,0}, compared on the log."""
    cone = _rank2(1, D)
    T = lambda a, b: t_factor(a, b, 1, cone)  # noqa: E731
    lhs = compose(T(1, 0), T(0, 1))
    rhs = compose(T(0, 1), T(1, 1), T(1, 0))
    rep = IdentityReport("pentagon-k1", D)
    rep.compare_series("log", lhs.log, rhs.log)
    return rep


def sw_expected(D: int) -> dict:
    """Omega(n, n+1) = Omega(n+1, n) = 1 and Omega(1, 1) = -2 within height D."""
    out = {(1, 1): Fraction(-2)} if D >= 2 else {}
    n = 0
    while 2 * n + 1 <= D:
        out[(n, n + 1)] = Fraction(1)
        out[(n + 1, n)] = Fraction(1)
        n += 1
    return out


def sw_k2(D: int = 12) -> IdentityReport:
    """Factorization of T^{(2)}_{1,0} T^{(2)}_{0,1} against the expected spectrum."""
    cone = _rank2(2, D)
    F = compose(t_factor(1, 0, 2, cone), t_factor(0, 1, 2, cone))
    got = factorize(F, standard_charge(), cone).omega_table()
    want = sw_expected(D)
    rep = IdentityReport("sw-k2", D)
    for k in cone.lattice_points():
        rep.compare("omega", k, got.get(k, Fraction(0)), want.get(k, Fraction(0)))
    return rep


def qpentagon(D: int = 8) -> IdentityReport:
    cone = _rank2(1, D)
    E = lambda g: quantum_dilog(g, cone)  # noqa: E731
    lhs = E((1, 0)) * E((0, 1))
    rhs = E((0, 1)) * E((1, 1)) * E((1, 0))
    rep = IdentityReport("qpentagon", D)
    h = cone.height_of
    for k in sorted(set(lhs.terms) | set(rhs.terms), key=lambda v: (h(v), v)):
        rep.compare("coefficient", k, lhs[k], rhs[k])
    return rep


def qc_limit_suite(D: int = 8, bracket_range: int = 6) -> IdentityReport:
    """Quasi-classical limits of Ad(E(ê_g)) against T_g, pole of E itself, bracket limits."""
    cone = _rank2(1, D)
    rep = IdentityReport("qc-limit", D)
    for g in ((1, 0), (0, 1), (1, 1)):
        E = q_power(quantum_dilog(g, cone), CONJUGATION_ORIENTATION)
        T = t_gamma(cone, g)
        for mu in ((1, 0), (0, 1)):
            lim = qc_limit(conjugate(E, QTorusSeries.monomial(cone, mu)))
            rep.compare_series(f"Ad(E{list(g)}) e{list(mu)}", lim, apply(T, ConeSeries.monomial(cone, mu)))
        try:
            qc_limit(quantum_dilog(g, cone))
        except PoleAtMinusOne:
            rep.compare("pole of E", g, True, True)
        else:
            rep.compare("pole of E", g, "no pole", "pole")
    for p in range(-bracket_range, bracket_range + 1):
        rep.compare("bracket limit", (p,), normalized_bracket_limit(p), (-1) ** (p % 2) * p)
    return rep


def random_t_product(rng: random.Random, D: int = 8):
    """Product of at most four integer-exponent T factors on a random k-lattice."""
    k = rng.choice([1, 2, 3])
    cone = _rank2(k, D)
    factors = []
    for _ in range(rng.randint(1, 4)):
        g = rng.choice([(1, 0), (0, 1), (1, 1), (1, 2), (2, 1)])
        factors.append((g, rng.choice([-2, -1, 1, 2])))
    F = compose(*(t_gamma(cone, g, e) for g, e in factors))
    return k, factors, F


def integrality(seed: int = 0, samples: int = 20, D: int = 8) -> IdentityReport:
    rng = random.Random(seed)
    rep = IdentityReport("integrality", D)
    for _ in range(samples):
        k, factors, F = random_t_product(rng, D)
        for g, w in sorted(factorize(F, standard_charge(), F.cone).omega_table().items()):
            rep.compare(f"k={k} factors={factors}", g, w.denominator, 1)
    return rep


SUITES = {
    "pentagon-k1": pentagon_k1,
    "sw-k2": sw_k2,
    "qpentagon": qpentagon,
    "qc-limit": qc_limit_suite,
}
