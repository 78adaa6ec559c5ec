"""Acceptance criteria 1-11, each printing one PASS/FAIL line.

Run with pytest, or directly with ``python tests/test_acceptance.py``.
"""
import random
import sys
import time
from fractions import Fraction
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from helpers import (  # noqa: E402
    ad_exp,
    cone2,
    laurent_coefficients,
    random_group,
    random_lie,
    random_series,
    random_skew,
    random_small_loop,
    triangular_oracle,
)
from wallcross import identities  # noqa: E402
from wallcross.coha import SymPoly, coha_hilbert, hilbert_coefficient, shuffle_mul  # noqa: E402
from wallcross.errors import NonGenericPath, PoleAtMinusOne  # noqa: E402
from wallcross.lattice import (  # noqa: E402
    GroupElement,
    apply,
    bracket,
    compose,
    exp_group,
    log_group,
    primitive_part,
)
from wallcross.qtorus import quantum_dilog, qc_limit  # noqa: E402
from wallcross.stability import GlnPath, Sector, StabilityData, assemble_sector, gln_events, gln_monodromy_check  # noqa: E402
from wallcross.wcf import CentralCharge, a_from_omega, cross, factorize, omega_from_a, standard_charge, t_factor  # noqa: E402

RESULTS = {}


def report(n: int, title: str, ok: bool, detail: str, capsys=None):
    line = f"criterion {n:2d} {'PASS' if ok else 'FAIL'}  {title}: {detail}"
    RESULTS[n] = ok
    if capsys is not None:
        with capsys.disabled():
            print("\n" + line)
    else:
        print(line)
    assert ok, line


class Timer:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.seconds = time.perf_counter() - self.start


# -- 1


def criterion_1(capsys=None):
    with Timer() as tm:
        rep = identities.pentagon_k1(10)
    ok = rep.passed and rep.checked > 0 and tm.seconds < 10
    report(1, "pentagon k=1 at D=10", ok, f"{rep.checked} coefficients, {rep.mismatches} mismatches, {tm.seconds:.2f}s", capsys)


# -- 2


def criterion_2(capsys=None):
    with Timer() as tm:
        rep = identities.sw_k2(12)
    ok = rep.passed and tm.seconds < 60
    report(2, "Seiberg-Witten k=2 at D=12", ok,
           f"{rep.checked} Omega values, {rep.mismatches} mismatches, {tm.seconds:.2f}s", capsys)


# -- 3


def criterion_3(capsys=None):
    values = []
    C1, C2 = cone2(1, 10), cone2(2, 12)
    for F, C in ((compose(t_factor(1, 0, 1, C1), t_factor(0, 1, 1, C1)), C1),
                 (compose(t_factor(1, 0, 2, C2), t_factor(0, 1, 2, C2)), C2)):
        values += list(factorize(F, standard_charge(), C).omega_table().values())
    rep = identities.integrality(seed=2024, samples=20, D=8)
    bad = [w for w in values if w.denominator != 1]
    ok = not bad and rep.passed and rep.checked > 0
    report(3, "integrality", ok, f"{len(values) + rep.checked} Omega values, {len(bad) + rep.mismatches} non-integers", capsys)


# -- 4


def criterion_4(capsys=None):
    rng = random.Random(4)
    C = cone2(1, 12)
    pts = C.lattice_points()
    checked = failures = 0
    for _ in range(100):
        omega = {}
        for _ in range(rng.randint(1, 10)):
            omega[rng.choice(pts)] = Fraction(rng.randint(-20, 20), rng.randint(1, 9))
        omega = {g: w for g, w in omega.items() if w}
        h = a_from_omega(omega, C)
        ok = omega_from_a(h) == omega
        rays = {}
        for g, c in h.terms.items():
            m, g0 = primitive_part(g)
            rays.setdefault(g0, {})[m] = c
        for g0, alpha in rays.items():
            for m, w in triangular_oracle(alpha, 12 // sum(g0)).items():
                ok = ok and omega.get(tuple(m * x for x in g0), 0) == w
        checked += 1
        failures += not ok
    report(4, "Moebius roundtrip", failures == 0, f"{checked} tables, {failures} failures", capsys)


# -- 5


def criterion_5(capsys=None):
    with Timer() as tm:
        rep = identities.qpentagon(8)
    ok = rep.passed and tm.seconds < 60
    report(5, "quantum pentagon at D=8", ok, f"{rep.checked} coefficients, {rep.mismatches} mismatches, {tm.seconds:.2f}s", capsys)


# -- 6


def criterion_6(capsys=None):
    rep = identities.qc_limit_suite(8, 6)
    poles = 0
    for g in ((1, 0), (0, 1), (1, 1)):
        try:
            qc_limit(quantum_dilog(g, cone2(1, 8)))
        except PoleAtMinusOne:
            poles += 1
    ok = rep.passed and poles == 3
    report(6, "quasi-classical limit", ok, f"{rep.checked} checks, {rep.mismatches} mismatches, dilog poles {poles}/3", capsys)


# -- 7


def criterion_7(capsys=None):
    checked = bad = 0
    for d in range(4):
        rows = coha_hilbert(d, 4, max_degree=8)
        for n in range(5):
            lo = (1 - d) * n * n
            series = laurent_coefficients(hilbert_coefficient(d, n), lo, lo + 16)
            for r in (r for r in rows if r["n"] == n):
                checked += 1
                bad += not (r["dim"] == r["series"] == series[r["m"]])
    report(7, "CoHA Hilbert series", bad == 0 and checked == 4 * 5 * 9, f"{checked} dimensions, {bad} mismatches", capsys)


# -- 8


def _random_sympoly(rng, nvars):
    terms = {}
    for _ in range(rng.randint(1, 3)):
        K = rng.randint(0, 3)
        parts = []
        rest = K
        while rest and len(parts) < nvars:
            p = rng.randint(1, rest)
            parts.append(p)
            rest -= p
        if rest:
            continue
        terms[tuple(parts)] = Fraction(rng.randint(-5, 5) or 1, rng.randint(1, 3))
    return SymPoly(nvars, terms or {(): 1})


def criterion_8(capsys=None):
    rng = random.Random(8)
    failures = 0
    with Timer() as tm:
        for i in range(50):
            d = i % 4
            f, g, h = (_random_sympoly(rng, rng.randint(1, 2)) for _ in range(3))
            if shuffle_mul(shuffle_mul(f, g, d), h, d) != shuffle_mul(f, shuffle_mul(g, h, d), d):
                failures += 1
    report(8, "CoHA associativity", failures == 0, f"50 triples, {failures} failures, {tm.seconds:.2f}s", capsys)


# -- 9


def criterion_9(capsys=None):
    A3 = ((0, 1, 0), (-1, 0, 1), (0, -1, 0))
    h = Fraction(3, 2)
    documented = GlnPath((((0, 0), (1, 1), (2, 0)), ((0, 0), (1, -1), (2, 0)), ((0, 0), (h, -1), (2, 0)),
                          ((0, 0), (h, 1), (2, 0)), ((0, 0), (1, 1), (2, 0))), A3)
    # n = 4: a short loop around 0, 1, 2, 3 on the real line crosses all four triple walls
    corners = [(1, Fraction(1, 3)), (Fraction(-1, 2), 1), (-1, Fraction(-1, 3)), (Fraction(1, 2), -1), (1, Fraction(1, 3))]
    a4 = ((0, 1, 2, -1), (-1, 0, 3, 1), (-2, -3, 0, 2), (1, -1, -2, 0))
    documented4 = GlnPath(tuple(((0, 0), (3, 0), (1, y3), (2, y4)) for y3, y4 in corners), a4)
    doc_events = len(gln_events(documented))
    doc4_events = len(gln_events(documented4))
    ok = doc_events >= 2 and gln_monodromy_check(documented) and doc4_events == 8 and gln_monodromy_check(documented4)
    rng = random.Random(9)
    loops = events = 0
    counts = {3: 0, 4: 0, 5: 0}
    while loops < 25:
        n = (3, 4, 5)[loops % 3]
        try:
            loop = GlnPath(tuple(random_small_loop(rng, n)), random_skew(rng, n))
            e = len(gln_events(loop))
            trivial = gln_monodromy_check(loop)
        except NonGenericPath:
            continue
        loops += 1
        counts[n] += 1
        events += e
        ok = ok and trivial
    ok = ok and events > 0
    report(9, "gl(n) monodromy", ok,
           f"documented loops n=3 ({doc_events} crossings) and n=4 ({doc4_events}); 25 random loops (n=3,4,5: {counts[3]},{counts[4]},{counts[5]}) "
           f"with {events} crossings", capsys)


# -- 10


def criterion_10(capsys=None):
    rng = random.Random(10)
    failures = 0
    for _ in range(20):
        k = rng.randint(1, 3)
        C = cone2(k, 8)
        omega = {}
        for _ in range(rng.randint(2, 8)):
            omega[rng.choice(C.lattice_points())] = rng.choice([-2, -1, 1, 2, Fraction(1, 2)])
        # a generic charge mapping the positive quadrant into the upper half plane
        charge = CentralCharge(((rng.randint(1, 9), Fraction(rng.randint(1, 9), rng.randint(1, 4))),
                                (-rng.randint(1, 9), Fraction(rng.randint(1, 9), rng.randint(1, 4)))))
        sd = StabilityData(C.lattice, charge, omega)
        V = Sector(charge((0, 1)), charge((1, 0)))
        whole = assemble_sector(sd, V, C)
        for j in range(5):
            if j % 2 and sd.support:
                z = charge(rng.choice(sd.support))
                cut = z if cross(V.start, z) < 0 and cross(z, V.end) < 0 else None
            else:
                cut = None
            if cut is None:
                lam, mu = Fraction(rng.randint(1, 9)), Fraction(rng.randint(1, 9))
                cut = (lam * V.start[0] + mu * V.end[0], lam * V.start[1] + mu * V.end[1])
            V1, V2 = V.split(cut)
            if whole != compose(assemble_sector(sd, V1, C), assemble_sector(sd, V2, C)):
                failures += 1
    report(10, "factorization property", failures == 0, f"20 tables x 5 dissections at D=8, {failures} failures", capsys)


# -- 11


def criterion_11(capsys=None):
    rng = random.Random(11)
    counts = dict.fromkeys(("jacobi", "leibniz", "exp/log", "automorphism"), 0)
    fails = dict.fromkeys(counts, 0)
    with Timer() as tm:
        for _ in range(100):
            C = cone2(rng.randint(1, 3), 6)
            a, b, c = (random_lie(rng, C, 4) for _ in range(3))
            jac = bracket(a, bracket(b, c)) + bracket(b, bracket(c, a)) + bracket(c, bracket(a, b))
            counts["jacobi"] += 1
            fails["jacobi"] += bool(jac.terms)

            f, g = random_series(rng, C, 4), random_series(rng, C, 4)
            counts["leibniz"] += 1
            fails["leibniz"] += bracket(a, f * g) != bracket(a, f) * g + f * bracket(a, g)

            D = rng.randint(2, 8)
            C2 = cone2(rng.randint(1, 3), D)
            h = random_lie(rng, C2, rng.randint(1, 8))
            F = exp_group(h)
            s = random_series(rng, C2, 3)
            counts["exp/log"] += 1
            fails["exp/log"] += log_group(GroupElement.from_units(C2, F.units)) != h or apply(F, s) != ad_exp(h, s)

            G = random_group(rng, C)
            counts["automorphism"] += 1
            fails["automorphism"] += (apply(G, f * g) != apply(G, f) * apply(G, g)
                                      or apply(G, bracket(f, g)) != bracket(apply(G, f), apply(G, g)))
    ok = not any(fails.values()) and all(v == 100 for v in counts.values()) and tm.seconds < 120
    detail = ", ".join(f"{k} {counts[k]}/{counts[k] - fails[k]}" for k in counts)
    report(11, "core algebra properties", ok, f"cases/passed: {detail}; {tm.seconds:.1f}s", capsys)


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6,
            criterion_7, criterion_8, criterion_9, criterion_10, criterion_11]


@pytest.mark.parametrize("criterion", CRITERIA, ids=[f"criterion_{i}" for i in range(1, 12)])
def test_acceptance(criterion, capsys):
    criterion(capsys)


if __name__ == "__main__":
    failed = 0
    for crit in CRITERIA:
        try:
            crit()
        except AssertionError:
            failed += 1
    sys.exit(1 if failed else 0)
