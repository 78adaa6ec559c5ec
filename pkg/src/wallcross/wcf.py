"""Ray factors, slope-ordered factorization and BPS invariants.

A ray factor on the primitive ray ``g0`` with invariants ``omega[n] = Omega(n g0)``
is ``exp(-sum_n Omega(n g0) Li2(e_{n g0}))``.  An ordered factorization is a
clockwise product of such factors, clockwise meaning strictly decreasing
argument of the central charge.  Arguments are compared exactly through the
sign of ``Im(conj(z1) z2)``.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cmp_to_key

from .errors import (
    BadLattice,
    DegenerateCharge,
    DegenerateForm,
    NotPrimitive,
    OrderingViolated,
    SectorTooWide,
    SupportOutsideCone,
    ZeroCharge,
    ZeroVector,
)
from .lattice import (
    ConeSeries,
    GroupElement,
    LieSeries,
    TruncationCone,
    compose,
    is_primitive,
    leading_log,
    primitive_part,
)

# --------------------------------------------------------------------------
# Gaussian rationals


def cross(z1, z2) -> Fraction:
    """Im(conj(z1) * z2); positive when z2 is counterclockwise of z1 (within pi)."""
    return z1[0] * z2[1] - z1[1] * z2[0]


def dot(z1, z2) -> Fraction:
    return z1[0] * z2[0] + z1[1] * z2[1]


def same_direction(z1, z2) -> bool:
    return cross(z1, z2) == 0 and dot(z1, z2) > 0


def direction_key(z):
    """Canonical representative of the ray R_{>0} z."""
    m = max(abs(z[0]), abs(z[1]))
    return (z[0] / m, z[1] / m)


def gaussian(x) -> tuple:
    """Coerce ``x`` (pair, complex with integral parts, or number) to a pair of Fractions."""
    if isinstance(x, complex):
        return (Fraction(x.real), Fraction(x.imag))
    if isinstance(x, (tuple, list)):
        return (Fraction(x[0]), Fraction(x[1]))
    return (Fraction(x), Fraction(0))


@dataclass(frozen=True)
class CentralCharge:
    """Additive map Z from the lattice to Q(i), given on the basis."""

    values: tuple

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(gaussian(v) for v in self.values))

    def __call__(self, v) -> tuple:
        re = sum(c * z[0] for c, z in zip(v, self.values))
        im = sum(c * z[1] for c, z in zip(v, self.values))
        return (Fraction(re), Fraction(im))

    def clockwise_cmp(self, a, b) -> int:
        """-1 if ray a comes strictly before ray b in clockwise order."""
        c = cross(self(a), self(b))
        return -1 if c < 0 else (1 if c > 0 else 0)


def standard_charge(rank: int = 2) -> CentralCharge:
    """Z(1,0) = 1, Z(0,1) = i: clockwise order runs from (0,1) down to (1,0)."""
    if rank != 2:
        raise ValueError("a default central charge is only defined in rank 2")
    return CentralCharge(((1, 0), (0, 1)))


def check_strict_sector(zs, what="central charges"):
    """Raise unless all nonzero ``zs`` lie in a sector of width < pi."""
    zs = list(zs)
    for z in zs:
        if z[0] == 0 and z[1] == 0:
            raise ZeroCharge(f"{what} contain zero")
    if not zs:
        return
    first = zs[0]
    for z in zs:
        if cross(first, z) > 0:
            first = z
    last = zs[0]
    for z in zs:
        if cross(last, z) < 0:
            last = z
    if same_direction(first, last):
        ok = all(same_direction(first, z) for z in zs)
    else:
        ok = cross(first, last) < 0 and all(cross(first, z) <= 0 and cross(z, last) <= 0 for z in zs)
    if not ok:
        raise SectorTooWide(f"{what} do not fit in a strict sector")


# --------------------------------------------------------------------------
# factors


@dataclass
class RayFactor:
    gamma0: tuple
    omega: dict = field(default_factory=dict)

    def __post_init__(self):
        self.gamma0 = tuple(int(x) for x in self.gamma0)
        if not any(self.gamma0):
            raise ZeroVector("ray direction is zero")
        if not is_primitive(self.gamma0):
            raise NotPrimitive(f"{list(self.gamma0)} is not primitive", location=list(self.gamma0))
        self.omega = {int(n): Fraction(w) for n, w in self.omega.items() if Fraction(w) != 0}


@dataclass
class OrderedFactorization:
    charge: CentralCharge
    cone: TruncationCone
    factors: list

    def omega_table(self) -> dict:
        """Map ``gamma -> Omega(gamma)`` over all nonzero entries."""
        out = {}
        for f in self.factors:
            for n, w in f.omega.items():
                out[tuple(n * x for x in f.gamma0)] = w
        return out

    def omega(self, gamma) -> Fraction:
        return self.omega_table().get(tuple(gamma), Fraction(0))

    @classmethod
    def from_omega(cls, charge: CentralCharge, cone: TruncationCone, omega: dict) -> "OrderedFactorization":
        """Group an ``{gamma: Omega}`` table by ray and sort the rays clockwise."""
        rays: dict = {}
        for g, w in omega.items():
            g = tuple(g)
            if Fraction(w) == 0:
                continue
            if not any(g):
                raise ZeroVector("Omega given at the zero vector")
            if not cone.contains(g):
                raise SupportOutsideCone(f"{list(g)} is outside the cone", location=list(g))
            n, g0 = primitive_part(g)
            rays.setdefault(g0, {})[n] = Fraction(w)
        ordered = sort_clockwise(charge, list(rays))
        return cls(charge, cone, [RayFactor(g0, rays[g0]) for g0 in ordered])


def sort_clockwise(charge: CentralCharge, rays: list) -> list:
    zs = [charge(r) for r in rays]
    check_strict_sector(zs)
    seen = {}
    for r, z in zip(rays, zs):
        key = direction_key(z)
        if key in seen and seen[key] != r:
            raise DegenerateCharge(f"rays {list(seen[key])} and {list(r)} have the same central charge argument",
                                   location=[list(seen[key]), list(r)])
        seen[key] = r
    return sorted(rays, key=cmp_to_key(charge.clockwise_cmp))


def t_factor(a: int, b: int, k: int, cone: TruncationCone) -> GroupElement:
    """T^{(k)}_{a,b} = exp(-sum_n e_{n(a,b)} / n^2) on the rank-2 lattice with <g1,g2> = k."""
    gram = cone.lattice.gram
    if k == 0 or gram != ((0, k), (-k, 0)):
        raise BadLattice(f"t_factor needs the form [[0,{k}],[{-k},0]], got {[list(r) for r in gram]}")
    if a < 0 or b < 0:
        raise SupportOutsideCone("t_factor needs a, b >= 0")
    if a == 0 and b == 0:
        raise ZeroVector("t_factor needs a + b >= 1")
    return t_gamma(cone, (a, b))


def t_gamma(cone: TruncationCone, gamma, exponent=1) -> GroupElement:
    """T_gamma ** exponent = exp(-exponent * sum_n e_{n gamma} / n^2) for any nonzero gamma in the cone."""
    gamma = tuple(gamma)
    if not any(gamma):
        raise ZeroVector("T_gamma needs gamma != 0")
    h = cone.height_of(gamma)
    terms = {}
    n = 1
    while n * h <= cone.max_height:
        terms[tuple(n * x for x in gamma)] = Fraction(-exponent) / (n * n)
        n += 1
    return GroupElement(cone, log=LieSeries(cone, terms))


def ray_exp(r: RayFactor, cone: TruncationCone) -> GroupElement:
    g0 = r.gamma0
    if not is_primitive(g0):
        raise NotPrimitive(f"{list(g0)} is not primitive", location=list(g0))
    omega = {tuple(n * x for x in g0): w for n, w in r.omega.items()}
    return GroupElement(cone, log=a_from_omega(omega, cone))


# --------------------------------------------------------------------------
# Moebius inversion


def mobius(n: int) -> int:
    if n < 1:
        raise ValueError("mobius is defined for n >= 1")
    result = 1
    p = 2
    while p * p <= n:
        if n % p == 0:
            n //= p
            if n % p == 0:
                return 0
            result = -result
        p += 1
    if n > 1:
        result = -result
    return result


def a_from_omega(omega: dict, cone: TruncationCone) -> LieSeries:
    """a(gamma) = -sum_{n | gamma} Omega(gamma / n) / n^2, truncated at the cone height."""
    D = cone.max_height
    terms: dict = {}
    for g, w in omega.items():
        g = tuple(g)
        w = Fraction(w)
        if not w:
            continue
        if not any(g):
            raise ZeroVector("Omega given at the zero vector")
        if not cone.contains(g):
            raise SupportOutsideCone(f"{list(g)} is outside the cone", location=list(g))
        h = cone.height_of(g)
        n = 1
        while n * h <= D:
            key = tuple(n * x for x in g)
            terms[key] = terms.get(key, 0) - w / (n * n)
            n += 1
    return LieSeries(cone, terms)


def omega_from_a(h: ConeSeries) -> dict:
    """Invert :func:`a_from_omega` ray by ray: Omega(m g0) = -sum_{d | m} mu(d)/d^2 alpha_{m/d}."""
    cone = h.cone
    for k in h.terms:
        if not cone.contains(k) or not any(k):
            raise SupportOutsideCone(f"{list(k)} is not a nonzero cone vector", location=list(k))
    rays: dict = {}
    for k, c in h.terms.items():
        m, g0 = primitive_part(k)
        rays.setdefault(g0, {})[m] = c
    out = {}
    for g0, alpha in rays.items():
        # Omega(m g0) can be nonzero where alpha vanishes, so run to the truncation
        top = max(alpha)
        while cone.height_of(tuple((top + 1) * x for x in g0)) <= cone.max_height:
            top += 1
        for m in range(1, top + 1):
            w = Fraction(0)
            for d in range(1, m + 1):
                if m % d == 0 and (m // d) in alpha:
                    mu = mobius(d)
                    if mu:
                        w -= Fraction(mu, d * d) * alpha[m // d]
            if w:
                out[tuple(m * x for x in g0)] = w
    return out


# --------------------------------------------------------------------------
# factorization


def assemble(fact: OrderedFactorization) -> GroupElement:
    cone = fact.cone
    zs = [fact.charge(f.gamma0) for f in fact.factors]
    check_strict_sector(zs)
    for (f1, z1), (f2, z2) in zip(zip(fact.factors, zs), zip(fact.factors[1:], zs[1:])):
        if cross(z1, z2) >= 0:
            raise OrderingViolated(f"ray {list(f2.gamma0)} is not strictly clockwise of {list(f1.gamma0)}",
                                   location=[list(f1.gamma0), list(f2.gamma0)])
    if not fact.factors:
        return GroupElement.identity(cone)
    return compose(*(ray_exp(f, cone) for f in fact.factors))


def _assemble_rays(cone, charge, rays: dict) -> GroupElement:
    ordered = sorted(rays, key=cmp_to_key(charge.clockwise_cmp))
    elements = [GroupElement(cone, log=LieSeries._raw(cone, dict(rays[g0]))) for g0 in ordered]
    if not elements:
        return GroupElement.identity(cone)
    return compose(*elements)


def factorize(F: GroupElement, charge: CentralCharge, cone: TruncationCone | None = None,
              rng: random.Random | None = None) -> OrderedFactorization:
    """Unique clockwise factorization of F into ray factors.

    Height by height, the assembled product of the rays found so far is compared
    with F; the height-d log of the discrepancy is homogeneous and central modulo
    higher heights, so each of its terms is added to the ray of its primitive part.
    ``rng`` only permutes the order in which those terms are distributed.
    """
    cone = F.cone if cone is None else cone
    if cone != F.cone:
        F = GroupElement(cone, log=F.log)
    lat = cone.lattice
    if not lat.nondegenerate:
        raise DegenerateForm("factorization needs a nondegenerate skew form; double the lattice first")
    check_strict_sector([charge(g) for g in cone.generators], "cone generator charges")
    target = F.units
    rays: dict = {}
    directions: dict = {}
    for d in range(1, cone.max_height + 1):
        sub = cone.with_max_height(d)
        trunc = {g0: {k: c for k, c in terms.items() if sub.height_of(k) <= d} for g0, terms in rays.items()}
        current = _assemble_rays(sub, charge, trunc).units
        new = list(leading_log(cone, target, current, d).items())
        if rng is not None:
            rng.shuffle(new)
        for k, c in new:
            g0 = primitive_part(k)[1]
            key = direction_key(charge(g0))
            other = directions.setdefault(key, g0)
            if other != g0:
                raise DegenerateCharge(f"rays {list(other)} and {list(g0)} have the same central charge argument",
                                       location=[list(other), list(g0)])
            rays.setdefault(g0, {})[k] = c
    omega = {}
    for g0, terms in rays.items():
        omega.update(omega_from_a(LieSeries._raw(cone, terms)))
    return OrderedFactorization.from_omega(charge, cone, omega)


def refactorize(fact: OrderedFactorization, new_charge: CentralCharge) -> OrderedFactorization:
    """Omega table after moving the central charge to ``new_charge`` (the wall-crossing formula)."""
    return factorize(assemble(fact), new_charge, fact.cone)
