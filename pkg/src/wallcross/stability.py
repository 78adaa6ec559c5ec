"""Stability data, strict sectors and the gl(n) wall-crossing model.

In the gl(n) model the central charge is a configuration of n distinct points
z_1..z_n in C (up to a common shift), and the stability data is a skew matrix
a.  When z_j crosses the open segment (z_i, z_k) the entry a_ik changes by
+-a_ij a_jk.  The sign is fixed by the product of elementary matrices
exp(a_ij E_ij) taken clockwise in Z(g_ij) = z_i - z_j, which must be constant
along a path: with F = Im(conj(z_j - z_i) (z_k - z_i)),

    F goes from - to +  :  a_ik -> a_ik + a_ij a_jk.

This rule does not depend on which outer point is called i.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

import flint

from .errors import NonGenericPath, SectorNotStrict, ZeroCharge
from .lattice import ChargeLattice, GroupElement, TruncationCone, _frac
from .realroots import RealRoot, isolate_roots, poly
from .wcf import CentralCharge, OrderedFactorization, assemble, cross, dot, gaussian


# --------------------------------------------------------------------------
# stability data and the support property


@dataclass(frozen=True)
class StabilityData:
    lattice: ChargeLattice
    charge: CentralCharge
    omega: dict
    qform: tuple | None = None

    def __post_init__(self):
        object.__setattr__(self, "omega", {tuple(int(x) for x in g): Fraction(w)
                                           for g, w in dict(self.omega).items() if Fraction(w) != 0})
        if self.qform is not None:
            q = tuple(tuple(Fraction(x) for x in row) for row in self.qform)
            n = self.lattice.rank
            if len(q) != n or any(len(r) != n for r in q):
                raise ValueError("qform must be a rank x rank matrix")
            if any(q[i][j] != q[j][i] for i in range(n) for j in range(n)):
                raise ValueError("qform must be symmetric")
            object.__setattr__(self, "qform", q)

    @property
    def support(self) -> list:
        return sorted(self.omega, key=lambda g: (sum(abs(x) for x in g), g))

    def q(self, v) -> Fraction:
        n = len(v)
        return sum(self.qform[i][j] * v[i] * v[j] for i in range(n) for j in range(n))


@dataclass
class SupportReport:
    passed: bool
    C: Fraction
    verdicts: list = field(default_factory=list)  # (gamma, |gamma|^2, C^2 |Z|^2, ok)


def _abs2(z) -> Fraction:
    return z[0] * z[0] + z[1] * z[1]


def support_check(sd: StabilityData, C) -> SupportReport:
    """Exact test of |gamma|^2 <= C^2 |Z(gamma)|^2 on the support."""
    C = Fraction(C)
    if C <= 0:
        raise ValueError("C must be positive")
    verdicts = []
    for g in sd.support:
        z = sd.charge(g)
        if z == (0, 0):
            raise ZeroCharge(f"Z vanishes on support vector {list(g)}", location=list(g))
        n2 = Fraction(sum(x * x for x in g))
        bound = C * C * _abs2(z)
        verdicts.append((g, n2, bound, n2 <= bound))
    return SupportReport(all(v[3] for v in verdicts), C, verdicts)


def _kernel_basis(rows, ncols) -> list:
    """Rational basis of {v : rows . v = 0}."""
    if not rows:
        return [tuple(Fraction(int(i == j)) for j in range(ncols)) for i in range(ncols)]
    m = flint.fmpq_mat(len(rows), ncols, [flint.fmpq(x.numerator, x.denominator) for r in rows for x in r])
    r, rank = m.rref()
    pivots = []
    for i in range(rank):
        for j in range(ncols):
            if r[i, j] != 0:
                pivots.append(j)
                break
    free = [j for j in range(ncols) if j not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for i, p in enumerate(pivots):
            v[p] = -_frac(r[i, f])
        basis.append(tuple(v))
    return basis


def _negative_definite(m) -> bool:
    n = len(m)
    for k in range(1, n + 1):
        sub = flint.fmpq_mat(k, k, [flint.fmpq(m[i][j].numerator, m[i][j].denominator)
                                    for i in range(k) for j in range(k)])
        d = _frac(sub.det())
        if d == 0 or (d > 0) != (k % 2 == 0):
            return False
    return True


def qform_check(sd: StabilityData) -> dict:
    """Q negative definite on Ker Z and nonnegative on the support."""
    if sd.qform is None:
        raise ValueError("stability data has no quadratic form")
    n = sd.lattice.rank
    rows = [tuple(z[0] for z in sd.charge.values), tuple(z[1] for z in sd.charge.values)]
    ker = _kernel_basis([r for r in rows if any(r)], n)
    restricted = [[sum(a[i] * sd.qform[i][j] * b[j] for i in range(n) for j in range(n)) for b in ker] for a in ker]
    neg = _negative_definite(restricted)
    bad = [list(g) for g in sd.support if sd.q(g) < 0]
    return {"negative_on_kernel": neg, "kernel_dimension": len(ker), "negative_support": bad,
            "passed": neg and not bad}


# --------------------------------------------------------------------------
# sectors


@dataclass(frozen=True)
class Sector:
    """Closed-or-open angular sector traversed clockwise from ``start`` to ``end``."""

    start: tuple
    end: tuple
    include_start: bool = True
    include_end: bool = True

    def __post_init__(self):
        s, e = gaussian(self.start), gaussian(self.end)
        object.__setattr__(self, "start", s)
        object.__setattr__(self, "end", e)
        if s == (0, 0) or e == (0, 0):
            raise SectorNotStrict("sector boundary direction is zero")
        c = cross(s, e)
        if c > 0 or (c == 0 and dot(s, e) < 0):
            raise SectorNotStrict("sector width is not less than pi")

    @property
    def is_ray(self) -> bool:
        return cross(self.start, self.end) == 0

    def contains(self, z) -> bool:
        z = gaussian(z)
        if z == (0, 0):
            return False
        if self.is_ray:
            return cross(self.start, z) == 0 and dot(self.start, z) > 0 and (self.include_start or self.include_end)
        a, b = cross(self.start, z), cross(z, self.end)
        if a < 0 and b < 0:
            return True
        if a == 0 and dot(self.start, z) > 0:
            return self.include_start
        if b == 0 and dot(self.end, z) > 0:
            return self.include_end
        return False

    def split(self, direction) -> tuple["Sector", "Sector"]:
        """Cut along an interior ray; the ray goes to the first (clockwise-earlier) part."""
        d = gaussian(direction)
        if self.is_ray or not (cross(self.start, d) < 0 and cross(d, self.end) < 0):
            raise SectorNotStrict("split direction must lie strictly inside the sector")
        return (Sector(self.start, d, self.include_start, True), Sector(d, self.end, False, self.include_end))


def sector_cone(sd: StabilityData, V: Sector) -> list:
    """Support vectors with Z(gamma) in V (and Q(gamma) >= 0 when Q is given)."""
    out = []
    for g in sd.support:
        if not V.contains(sd.charge(g)):
            continue
        if sd.qform is not None and sd.q(g) < 0:
            continue
        out.append(g)
    return out


def sector_factorization(sd: StabilityData, V: Sector, cone: TruncationCone) -> OrderedFactorization:
    omega = {g: sd.omega[g] for g in sector_cone(sd, V) if cone.height_of(g) <= cone.max_height}
    return OrderedFactorization.from_omega(sd.charge, cone, omega)


def assemble_sector(sd: StabilityData, V: Sector, cone: TruncationCone) -> GroupElement:
    """Clockwise product of ray factors over the rays of ``sd`` inside ``V``."""
    return assemble(sector_factorization(sd, V, cone))


# --------------------------------------------------------------------------
# gl(n)


def _skew(a) -> tuple:
    a = tuple(tuple(Fraction(x) for x in row) for row in a)
    n = len(a)
    if any(len(r) != n for r in a):
        raise ValueError("a must be square")
    for i in range(n):
        for j in range(n):
            if a[i][j] != -a[j][i]:
                raise ValueError(f"a is not skew-symmetric at ({i}, {j})")
    return a


@dataclass(frozen=True)
class GlnConfig:
    """n distinct points (normalized so z_1 = 0) with a skew matrix; indices are 0-based."""

    z: tuple
    a: tuple

    def __post_init__(self):
        z = [gaussian(p) for p in self.z]
        if len(z) < 2:
            raise ValueError("gl(n) needs n >= 2")
        z0 = z[0]
        z = tuple((p[0] - z0[0], p[1] - z0[1]) for p in z)
        a = _skew(self.a)
        if len(a) != len(z):
            raise ValueError("a and z have different sizes")
        if len(set(z)) != len(z):
            raise NonGenericPath("two points coincide", location=[list(map(str, p)) for p in z])
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "a", a)

    @property
    def n(self) -> int:
        return len(self.z)

    def collinear_triples(self) -> list:
        return [t for t in combinations(range(self.n), 3) if _collinear(*(self.z[i] for i in t))]

    @property
    def generic(self) -> bool:
        """No three points on a real line."""
        return not self.collinear_triples()

    def with_a(self, a) -> "GlnConfig":
        return GlnConfig(self.z, a)


def _collinear(p, q, r) -> bool:
    return cross((q[0] - p[0], q[1] - p[1]), (r[0] - p[0], r[1] - p[1])) == 0


def gln_apply_crossing(cfg: GlnConfig, i: int, j: int, k: int, direction: int) -> GlnConfig:
    """a_ik -> a_ik + direction * a_ij a_jk, keeping a skew."""
    n = cfg.n
    for x in (i, j, k):
        if not 0 <= x < n:
            raise IndexError(f"index {x} out of range for n = {n}")
    if len({i, j, k}) != 3:
        raise IndexError("crossing indices must be distinct")
    if direction not in (1, -1):
        raise ValueError("direction must be +1 or -1")
    a = [list(r) for r in cfg.a]
    a[i][k] += direction * a[i][j] * a[j][k]
    a[k][i] = -a[i][k]
    return GlnConfig(cfg.z, a)


@dataclass(frozen=True)
class GlnPath:
    """Piecewise-linear path through ``waypoints`` (each a list of n points), starting with matrix ``a``."""

    waypoints: tuple
    a: tuple

    def __post_init__(self):
        wps = tuple(tuple(gaussian(p) for p in w) for w in self.waypoints)
        if not wps:
            raise ValueError("a path needs at least one waypoint")
        n = len(wps[0])
        if any(len(w) != n for w in wps):
            raise ValueError("waypoints have different numbers of points")
        object.__setattr__(self, "waypoints", wps)
        object.__setattr__(self, "a", _skew(self.a))
        for idx, w in enumerate(wps):
            cfg = GlnConfig(w, self.a)
            if not cfg.generic:
                raise NonGenericPath(f"waypoint {idx} has three collinear points",
                                     location={"waypoint": idx, "triples": [list(t) for t in cfg.collinear_triples()]})

    @property
    def segments(self) -> list:
        return list(zip(self.waypoints, self.waypoints[1:]))

    @property
    def start(self) -> GlnConfig:
        return GlnConfig(self.waypoints[0], self.a)

    @property
    def is_closed(self) -> bool:
        return _normalized(self.waypoints[0]) == _normalized(self.waypoints[-1])

    def reverse(self, a=None) -> "GlnPath":
        return GlnPath(tuple(reversed(self.waypoints)), self.a if a is None else a)

    def concat(self, other: "GlnPath") -> "GlnPath":
        if _normalized(self.waypoints[-1]) != _normalized(other.waypoints[0]):
            raise ValueError("paths do not meet")
        return GlnPath(self.waypoints + other.waypoints[1:], self.a)


def _normalized(w):
    z0 = w[0]
    return tuple((p[0] - z0[0], p[1] - z0[1]) for p in w)


@dataclass
class CrossingEvent:
    segment: int
    time: RealRoot
    i: int
    j: int
    k: int
    direction: int


def _lin(p, q):
    """Coordinates of p + s (q - p) as (re, im) polynomials in s."""
    return (poly([p[0], q[0] - p[0]]), poly([p[1], q[1] - p[1]]))


def _sub(u, v):
    return (u[0] - v[0], u[1] - v[1])


def _pcross(u, v):
    return u[0] * v[1] - u[1] * v[0]


def _pdot(u, v):
    return u[0] * v[0] + u[1] * v[1]


def segment_events(p: tuple, q: tuple, seg: int = 0) -> list:
    """Crossing events on the straight segment from configuration p to q, in time order."""
    n = len(p)
    zs = [_lin(p[m], q[m]) for m in range(n)]
    for i, j in combinations(range(n), 2):
        # the difference is linear in s; a collision is a common root in [0, 1]
        dx, dy = _sub(zs[i], zs[j])
        g = dx.gcd(dy)
        if g.degree() == 1 and 0 <= -_frac(g[0]) / _frac(g[1]) <= 1:
            raise NonGenericPath(f"points {i} and {j} collide on segment {seg}", location={"segment": seg, "points": [i, j]})
    events = []
    for i, j, k in combinations(range(n), 3):
        F = _pcross(_sub(zs[j], zs[i]), _sub(zs[k], zs[i]))
        if F.is_zero():
            raise NonGenericPath(f"points {i}, {j}, {k} stay collinear on segment {seg}",
                                 location={"segment": seg, "triple": [i, j, k]})
        dF = F.derivative()
        for r in isolate_roots(F, 0, 1):
            if r.sign_at(dF) == 0:
                raise NonGenericPath(f"points {i}, {j}, {k} touch a line without crossing on segment {seg}",
                                     location={"segment": seg, "triple": [i, j, k]})
            mid = None
            for m, (x, y) in ((i, (j, k)), (j, (i, k)), (k, (i, j))):
                s = r.sign_at(_pdot(_sub(zs[x], zs[m]), _sub(zs[y], zs[m])))
                if s == 0:
                    raise NonGenericPath(f"collision among {i}, {j}, {k} on segment {seg}",
                                         location={"segment": seg, "triple": [i, j, k]})
                if s < 0:
                    mid = (m, x, y)
            if mid is None:
                continue  # collinear with no point between the other two is impossible; defensive
            m, x, y = mid
            Fm = _pcross(_sub(zs[m], zs[x]), _sub(zs[y], zs[x]))
            events.append(CrossingEvent(seg, r, x, m, y, r.sign_at(Fm.derivative())))
    ordered = []
    for e in events:
        pos = len(ordered)
        for idx, o in enumerate(ordered):
            c = e.time.compare(o.time)
            if c == 0:
                raise NonGenericPath(f"simultaneous crossings on segment {seg}",
                                     location={"segment": seg, "triples": [[o.i, o.j, o.k], [e.i, e.j, e.k]]})
            if c < 0:
                pos = idx
                break
        ordered.insert(pos, e)
    return ordered


def gln_events(path: GlnPath) -> list:
    out = []
    for s, (p, q) in enumerate(path.segments):
        out.extend(segment_events(p, q, s))
    return out


def gln_transport(path: GlnPath) -> GlnConfig:
    """Lift the path starting from its initial matrix; returns the configuration at the end."""
    cfg = path.start
    for e in gln_events(path):
        cfg = gln_apply_crossing(cfg, e.i, e.j, e.k, e.direction)
    return GlnConfig(path.waypoints[-1], cfg.a)


def gln_monodromy_check(loop: GlnPath) -> bool:
    if not loop.is_closed:
        raise ValueError("path is not closed")
    return gln_transport(loop).a == loop.a
