"""Charge lattices, the twisted Poisson torus and its pronilpotent group.

Lattice vectors are plain integer tuples.  A :class:`ConeSeries` is a finite
map ``vector -> Fraction`` supported in a strict cone and truncated at a
maximal height; multiplication is the twisted commutative product

    e_a * e_b = (-1)**<a,b> e_{a+b}

and the Lie bracket is

    [e_a, e_b] = (-1)**<a,b> <a,b> e_{a+b}.

Group elements are stored by their logarithm.  Their action on the torus is
encoded by *unit multipliers*: for every basis vector ``b_i`` the automorphism
sends ``e_{b_i}`` to ``e_{b_i} * u_i`` with ``u_i`` a cone series with constant
term 1.  Because the action is an algebra automorphism this determines the
image of every ``e_v``, namely ``e_v * prod(u_i ** v_i)``, and it does not
require the basis vectors themselves to lie inside the cone.

Composition convention: ``compose(F, G)`` acts on functions as
``f -> F(G(f))``, so the left factor acts last.  With this order the
pentagon identity ``T_{1,0} T_{0,1} = T_{0,1} T_{1,1} T_{1,0}`` holds as
written; the opposite order would mirror it.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, reduce
from math import gcd

import flint

from .errors import (
    BadCone,
    ConeMismatch,
    DegenerateForm,
    InconsistentAction,
    NonUnitConstantTerm,
    NonzeroConstantTerm,
    NotSkewSymmetric,
    SupportOutsideCone,
)

Vector = tuple


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, flint.fmpq):
        return Fraction(int(x.p), int(x.q))
    return Fraction(x)


def _det(rows) -> Fraction:
    if not rows:
        return Fraction(1)
    return _frac(flint.fmpq_mat([[int(x) if isinstance(x, int) else flint.fmpq(x.numerator, x.denominator)
                                  for x in r] for r in rows]).det())


def _rank(rows) -> int:
    if not rows:
        return 0
    return flint.fmpq_mat([[flint.fmpq(Fraction(x).numerator, Fraction(x).denominator) for x in r]
                           for r in rows]).rank()


# --------------------------------------------------------------------------
# lattice


@dataclass(frozen=True)
class ChargeLattice:
    """Free abelian group Z^rank with an integer skew form given by ``gram``."""

    gram: tuple

    def __post_init__(self):
        g = tuple(tuple(int(x) for x in row) for row in self.gram)
        object.__setattr__(self, "gram", g)
        n = len(g)
        if n == 0 or any(len(row) != n for row in g):
            raise NotSkewSymmetric("gram must be a non-empty square matrix")
        for i in range(n):
            for j in range(n):
                if g[i][j] != -g[j][i]:
                    raise NotSkewSymmetric(f"gram[{i}][{j}] = {g[i][j]} but gram[{j}][{i}] = {g[j][i]}",
                                           location=[i, j])

    @property
    def rank(self) -> int:
        return len(self.gram)

    @cached_property
    def nondegenerate(self) -> bool:
        return _det(self.gram) != 0

    def dual(self, v) -> tuple:
        """The vector ``G v``, so that ``<a, v> = a . (G v)``."""
        return tuple(sum(r * x for r, x in zip(row, v)) for row in self.gram)

    def pair(self, a, b) -> int:
        return sum(x * y for x, y in zip(a, self.dual(b)))

    def basis(self, i) -> tuple:
        return tuple(int(j == i) for j in range(self.rank))

    def zero(self) -> tuple:
        return (0,) * self.rank


def make_lattice(rank: int, gram) -> ChargeLattice:
    if rank < 1 or len(gram) != rank or any(len(row) != rank for row in gram):
        raise NotSkewSymmetric(f"gram must be {rank}x{rank}")
    return ChargeLattice(tuple(tuple(row) for row in gram))


def double_lattice(lattice: ChargeLattice) -> ChargeLattice:
    """Embed the lattice in ``L + L^dual`` with the canonical symplectic pairing."""
    n = lattice.rank
    rows = []
    for i in range(n):
        rows.append(lattice.gram[i] + tuple(int(i == j) for j in range(n)))
    for i in range(n):
        rows.append(tuple(-int(i == j) for j in range(n)) + (0,) * n)
    return ChargeLattice(tuple(rows))


def primitive_part(v) -> tuple[int, tuple]:
    """Return ``(n, v0)`` with ``v = n * v0`` and ``v0`` primitive."""
    g = reduce(gcd, v, 0)
    if g == 0:
        return 0, tuple(v)
    return g, tuple(x // g for x in v)


def is_primitive(v) -> bool:
    return reduce(gcd, v, 0) == 1


# --------------------------------------------------------------------------
# truncation cone


@dataclass(frozen=True)
class TruncationCone:
    """Strict rational cone with a positive integral height functional.

    Strictness is implied by ``height(g) >= 1`` on every generator: a vanishing
    nonnegative combination of generators would have height zero.
    """

    lattice: ChargeLattice
    generators: tuple
    height: tuple
    max_height: int

    def __post_init__(self):
        gens = tuple(tuple(int(x) for x in g) for g in self.generators)
        hv = tuple(int(x) for x in self.height)
        object.__setattr__(self, "generators", gens)
        object.__setattr__(self, "height", hv)
        n = self.lattice.rank
        if not gens:
            raise BadCone("cone needs at least one generator")
        if len(hv) != n or any(len(g) != n for g in gens):
            raise BadCone("generator/height length does not match lattice rank")
        for g in gens:
            if self.height_of(g) < 1:
                raise BadCone(f"height of generator {list(g)} is not positive", location=list(g))
        if int(self.max_height) < 0:
            raise BadCone("max_height must be nonnegative")
        object.__setattr__(self, "max_height", int(self.max_height))

    def height_of(self, v) -> int:
        return sum(a * b for a, b in zip(self.height, v))

    def with_max_height(self, d: int) -> "TruncationCone":
        if d == self.max_height:
            return self
        return TruncationCone(self.lattice, self.generators, self.height, d)

    @cached_property
    def _geometry(self):
        # (independent generators, pivot columns, inverse of the pivot block, facet normals)
        basis = []
        for g in self.generators:
            if _rank(basis + [g]) > len(basis):
                basis.append(g)
        r = len(basis)
        pivots = None
        for cols in itertools.combinations(range(self.lattice.rank), r):
            if _det([[b[c] for c in cols] for b in basis]) != 0:
                pivots = cols
                break
        block = flint.fmpq_mat([[b[c] for c in pivots] for b in basis]).inv()
        inv = [[_frac(block[i, j]) for j in range(r)] for i in range(r)]
        coords = [self._coords_with(g, basis, pivots, inv) for g in self.generators]
        facets = []
        if r == 1:
            facets.append((Fraction(1),))
        else:
            for sub in itertools.combinations(coords, r - 1):
                if _rank(list(sub)) < r - 1:
                    continue
                normal = []
                for k in range(r):
                    minor = [[row[c] for c in range(r) if c != k] for row in sub]
                    normal.append((-1) ** k * _det(minor))
                vals = [sum(a * b for a, b in zip(normal, c)) for c in coords]
                if all(v >= 0 for v in vals):
                    pass
                elif all(v <= 0 for v in vals):
                    normal = [-a for a in normal]
                else:
                    continue
                normal = tuple(normal)
                if normal not in facets:
                    facets.append(normal)
        return basis, pivots, inv, facets

    @staticmethod
    def _coords_with(v, basis, pivots, inv):
        vp = [v[c] for c in pivots]
        r = len(basis)
        c = [sum(vp[k] * inv[k][j] for k in range(r)) for j in range(r)]
        recon = [sum(c[j] * basis[j][m] for j in range(r)) for m in range(len(v))]
        if any(a != b for a, b in zip(recon, v)):
            return None
        return c

    @cached_property
    def _membership(self) -> dict:
        return {}

    def contains(self, v) -> bool:
        """Exact test for ``v`` in the closed cone (the origin included)."""
        v = tuple(v)
        cache = self._membership
        hit = cache.get(v)
        if hit is not None:
            return hit
        if not any(v):
            ok = True
        else:
            basis, pivots, inv, facets = self._geometry
            c = self._coords_with(v, basis, pivots, inv)
            ok = c is not None and all(sum(a * b for a, b in zip(nrm, c)) >= 0 for nrm in facets)
        cache[v] = ok
        return ok

    def lattice_points(self, min_height: int = 1, max_height: int | None = None) -> list:
        """All cone points with height in ``[min_height, max_height]``, sorted by height then lexicographically."""
        D = self.max_height if max_height is None else max_height
        n = self.lattice.rank
        lo = [min(0, min(Fraction(g[i], self.height_of(g)) for g in self.generators)) * D for i in range(n)]
        hi = [max(0, max(Fraction(g[i], self.height_of(g)) for g in self.generators)) * D for i in range(n)]
        ranges = [range(int(lo[i]) - 1, int(hi[i]) + 2) for i in range(n)]
        pts = []
        for v in itertools.product(*ranges):
            h = self.height_of(v)
            if min_height <= h <= D and self.contains(v):
                pts.append(v)
        pts.sort(key=lambda v: (self.height_of(v), v))
        return pts


def standard_cone(lattice: ChargeLattice, max_height: int) -> TruncationCone:
    """Positive orthant with height equal to the coordinate sum."""
    n = lattice.rank
    return TruncationCone(lattice, tuple(lattice.basis(i) for i in range(n)), (1,) * n, max_height)


def _check_same(a: TruncationCone, b: TruncationCone):
    if a is not b and a != b:
        raise ConeMismatch("operands have different cones or truncation heights")


# --------------------------------------------------------------------------
# series


class ConeSeries:
    """Height-truncated series over a cone with exact rational coefficients."""

    __slots__ = ("cone", "terms")

    def __init__(self, cone: TruncationCone, terms=None):
        clean = {}
        D = cone.max_height
        n = cone.lattice.rank
        for key, c in dict(terms or {}).items():
            key = tuple(int(x) for x in key)
            if len(key) != n:
                raise SupportOutsideCone(f"key {list(key)} has wrong length", location=list(key))
            c = _frac(c)
            if c == 0:
                continue
            if not cone.contains(key):
                raise SupportOutsideCone(f"key {list(key)} is outside the cone", location=list(key))
            if cone.height_of(key) > D:
                continue
            clean[key] = clean.get(key, 0) + c
        self._validate(clean)
        self.cone = cone
        self.terms = {k: v for k, v in clean.items() if v != 0}

    def _validate(self, terms):
        pass

    @classmethod
    def _raw(cls, cone, terms):
        obj = cls.__new__(cls)
        obj.cone = cone
        obj.terms = terms
        return obj

    @classmethod
    def monomial(cls, cone, gamma, coeff=1):
        return cls(cone, {tuple(gamma): coeff})

    @classmethod
    def one(cls, cone):
        return ConeSeries._raw(cone, {cone.lattice.zero(): Fraction(1)})

    @classmethod
    def zero(cls, cone):
        return cls._raw(cone, {})

    # -- basic protocol

    def __eq__(self, other):
        if not isinstance(other, ConeSeries):
            return NotImplemented
        return self.cone == other.cone and self.terms == other.terms

    __hash__ = None

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def __getitem__(self, key):
        return self.terms.get(tuple(key), Fraction(0))

    def items(self):
        """Terms sorted by height, then lexicographically."""
        h = self.cone.height_of
        return sorted(self.terms.items(), key=lambda kv: (h(kv[0]), kv[0]))

    def __repr__(self):
        body = " + ".join(f"({c})e{list(k)}" for k, c in self.items()) or "0"
        return f"{type(self).__name__}({body}; D={self.cone.max_height})"

    @property
    def constant_term(self) -> Fraction:
        return self.terms.get(self.cone.lattice.zero(), Fraction(0))

    def min_height(self):
        if not self.terms:
            return None
        return min(self.cone.height_of(k) for k in self.terms)

    def homogeneous(self, d: int):
        h = self.cone.height_of
        return type(self)._raw(self.cone, {k: c for k, c in self.terms.items() if h(k) == d})

    def truncate(self, d: int):
        """Re-home the series on the same cone truncated at height ``d``."""
        cone = self.cone.with_max_height(d)
        h = cone.height_of
        return type(self)._raw(cone, {k: c for k, c in self.terms.items() if h(k) <= d})

    # -- linear structure

    def _coerce(self, other):
        if isinstance(other, ConeSeries):
            _check_same(self.cone, other.cone)
            return other.terms
        return None

    def __add__(self, other):
        t = self._coerce(other)
        if t is None:
            return NotImplemented
        out = dict(self.terms)
        for k, c in t.items():
            v = out.get(k, 0) + c
            if v:
                out[k] = v
            else:
                out.pop(k, None)
        return _result_type(self, other)._raw(self.cone, out)

    def __neg__(self):
        return type(self)._raw(self.cone, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, ConeSeries):
            return NotImplemented
        return self + (-other)

    def scale(self, s):
        s = _frac(s)
        if s == 0:
            return type(self)._raw(self.cone, {})
        return type(self)._raw(self.cone, {k: c * s for k, c in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, ConeSeries):
            return twisted_mul(self, other)
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(Fraction(1) / other)
        return NotImplemented

    def bracket(self, other):
        return bracket(self, other)

    def __pow__(self, n: int):
        if n < 0:
            return invert_unit(self) ** (-n)
        result = ConeSeries.one(self.cone)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result


class LieSeries(ConeSeries):
    """Cone series without constant term: an element of the torus Lie algebra."""

    __slots__ = ()

    def _validate(self, terms):
        zero = (0,) * len(next(iter(terms))) if terms else None
        if zero is not None and terms.get(zero, 0) != 0:
            raise NonzeroConstantTerm("Lie series must have zero constant term", location=list(zero))


def _result_type(a, b):
    return LieSeries if isinstance(a, LieSeries) and isinstance(b, LieSeries) else ConeSeries


def _convolve(cone, f_terms, g_terms, lie: bool) -> dict:
    lat = cone.lattice
    D = cone.max_height
    hv = cone.height
    gl = sorted(((sum(a * b for a, b in zip(hv, k)), k, c, lat.dual(k)) for k, c in g_terms.items()),
                key=lambda t: t[0])
    out: dict = {}
    for k1, c1 in f_terms.items():
        room = D - sum(a * b for a, b in zip(hv, k1))
        for h2, k2, c2, gk2 in gl:
            if h2 > room:
                break
            p = sum(a * b for a, b in zip(k1, gk2))
            if lie:
                if p == 0:
                    continue
                coef = c1 * c2 * p
            else:
                coef = c1 * c2
            if p & 1:
                coef = -coef
            key = tuple(a + b for a, b in zip(k1, k2))
            out[key] = out.get(key, 0) + coef
    return {k: v for k, v in out.items() if v}


def twisted_mul(f: ConeSeries, g: ConeSeries) -> ConeSeries:
    _check_same(f.cone, g.cone)
    return ConeSeries._raw(f.cone, _convolve(f.cone, f.terms, g.terms, lie=False))


def bracket(h1: ConeSeries, h2: ConeSeries):
    _check_same(h1.cone, h2.cone)
    return _result_type(h1, h2)._raw(h1.cone, _convolve(h1.cone, h1.terms, h2.terms, lie=True))


def invert_unit(f: ConeSeries) -> ConeSeries:
    """Inverse of a series with nonzero constant term."""
    c0 = f.constant_term
    if c0 == 0:
        raise NonUnitConstantTerm("constant term is zero")
    one = ConeSeries.one(f.cone)
    r = (f - one.scale(c0)).scale(-1 / c0)  # f = c0 (1 - r)
    out = one
    power = one
    while True:
        power = power * r
        if not power:
            break
        out = out + power
    return out.scale(1 / c0)


def shift_mul(cone: TruncationCone, v, f_terms: dict) -> dict:
    """Coefficients of ``e_v * f`` (``v`` may lie outside the cone); height measured on ``f``."""
    gv = cone.lattice.dual(v)
    out = {}
    for k, c in f_terms.items():
        p = sum(a * b for a, b in zip(k, gv))
        out[tuple(a + b for a, b in zip(v, k))] = -c if p & 1 else c
    return out


# --------------------------------------------------------------------------
# group


def _univariate_exp(p: list, n: int) -> list:
    """exp of a power series ``sum p[m] x^m`` (p[0] == 0) truncated at degree n."""
    e = [Fraction(0)] * (n + 1)
    e[0] = Fraction(1)
    for m in range(1, n + 1):
        s = sum((k * p[k] * e[m - k] for k in range(1, m + 1) if k < len(p) and p[k]), Fraction(0))
        e[m] = s / m
    return e


class GroupElement:
    """Element of the pronilpotent group, canonically identified by its logarithm.

    Either the logarithm or the unit multipliers of the action may be supplied;
    the other is derived on demand and cached.
    """

    __slots__ = ("cone", "_log", "_units", "_ray_cache")

    def __init__(self, cone: TruncationCone, log: ConeSeries | None = None, units=None):
        if log is None and units is None:
            log = LieSeries._raw(cone, {})
        if log is not None:
            _check_same(cone, log.cone)
            if log.constant_term != 0:
                raise NonzeroConstantTerm("group logarithm has a constant term")
            if not isinstance(log, LieSeries):
                log = LieSeries._raw(log.cone, dict(log.terms))
        if units is not None:
            units = tuple(units)
            if len(units) != cone.lattice.rank:
                raise InconsistentAction("need one multiplier per basis vector")
            for u in units:
                _check_same(cone, u.cone)
                if u.constant_term != 1:
                    raise InconsistentAction("unit multiplier must have constant term 1")
        self.cone = cone
        self._log = log
        self._units = units
        self._ray_cache = ...

    @classmethod
    def identity(cls, cone):
        return cls(cone)

    @classmethod
    def from_units(cls, cone, units):
        return cls(cone, units=units)

    @property
    def log(self) -> LieSeries:
        if self._log is None:
            self._log = _log_from_units(self.cone, self._units)
        return self._log

    @property
    def units(self) -> tuple:
        if self._units is None:
            self._units = _units_from_log(self.log)
        return self._units

    @property
    def ray(self):
        """Primitive vector carrying the whole logarithm, or None.

        Elements known only through their action report None rather than
        computing the logarithm; the ray is a shortcut, not a requirement.
        """
        if self._log is None:
            return None
        if self._ray_cache is ...:
            keys = list(self.log.terms)
            rays = {primitive_part(k)[1] for k in keys}
            self._ray_cache = rays.pop() if len(rays) == 1 else None
        return self._ray_cache

    def is_identity(self) -> bool:
        if self._log is not None:
            return not self._log.terms
        return all(len(u.terms) == 1 for u in self._units)

    def image(self, v) -> dict:
        """Image of ``e_v`` as a coefficient dict (``v`` need not lie in the cone)."""
        return shift_mul(self.cone, tuple(v), _power_product(self, v).terms)

    def __eq__(self, other):
        if not isinstance(other, GroupElement):
            return NotImplemented
        return self.cone == other.cone and self.log == other.log

    __hash__ = None

    def __mul__(self, other):
        if isinstance(other, GroupElement):
            return compose(self, other)
        return NotImplemented

    def inverse(self) -> "GroupElement":
        return GroupElement(self.cone, log=-self.log)

    def __repr__(self):
        return f"GroupElement(log={self.log!r})"


def _ray_multiplier(F: GroupElement, s: int, cache: dict) -> dict:
    """exp(s * P) on the ray of F, with P = sum m c_m x^m, as a coefficient dict."""
    hit = cache.get(s)
    if hit is None:
        g0 = F.ray
        cone = F.cone
        n = cone.max_height // cone.height_of(g0)
        p = [Fraction(0)] * (n + 1)
        for k, c in F.log.terms.items():
            m = primitive_part(k)[0]
            if m <= n:
                p[m] = s * m * c
        e = _univariate_exp(p, n)
        hit = {tuple(m * x for x in g0): c for m, c in enumerate(e) if c}
        cache[s] = hit
    return hit


def _units_from_log(h: LieSeries) -> tuple:
    cone = h.cone
    lat = cone.lattice
    n = lat.rank
    if not h.terms:
        return tuple(ConeSeries.one(cone) for _ in range(n))
    g0 = {primitive_part(k)[1] for k in h.terms}
    if len(g0) == 1:
        (g0,) = g0
        proxy = GroupElement(cone, log=h)
        cache = {}
        return tuple(ConeSeries._raw(cone, dict(_ray_multiplier(proxy, lat.pair(g0, lat.basis(i)), cache)))
                     for i in range(n))
    units = []
    one = ConeSeries.one(cone)
    for i in range(n):
        b = lat.basis(i)
        deriv = ConeSeries._raw(cone, {k: c * lat.pair(k, b) for k, c in h.terms.items() if lat.pair(k, b)})
        total = one
        term = one
        for k in range(1, cone.max_height + 1):
            term = (deriv * term + bracket(h, term)).scale(Fraction(1, k))
            if not term:
                break
            total = total + term
        units.append(total)
    return tuple(units)


def leading_log(cone: TruncationCone, target, current, d: int) -> dict:
    """Height-``d`` log of ``current^-1 * target`` for two actions that agree below height ``d``.

    For ``R = 1 + O(d)`` the multipliers satisfy ``u^R_i = 1 + sum c_g <g, b_i> e_g + O(d+1)``,
    so each coefficient ``c_g`` is read off from any basis index with ``<g, b_i> != 0``.
    """
    lat = cone.lattice
    n = lat.rank
    sub = cone.with_max_height(d)
    disc = []
    for i in range(n):
        diff = target[i].truncate(d) - current[i].truncate(d)
        for k in diff.terms:
            if sub.height_of(k) < d:
                raise InconsistentAction(f"actions disagree below height {d} at {list(k)}", location=list(k))
        disc.append(diff.terms)
    found = {}
    for k in sorted(set().union(*disc)):
        pairs = [lat.pair(k, lat.basis(i)) for i in range(n)]
        coef = None
        for i in range(n):
            if pairs[i]:
                coef = disc[i].get(k, Fraction(0)) / pairs[i]
                break
        if coef is None:
            raise InconsistentAction(f"term at {list(k)} pairs trivially with the basis", location=list(k))
        for i in range(n):
            if coef * pairs[i] != disc[i].get(k, 0):
                raise InconsistentAction(f"basis images disagree at {list(k)}", location=list(k))
        if coef:
            found[k] = coef
    return found


def _log_from_units(cone: TruncationCone, units) -> LieSeries:
    lat = cone.lattice
    if not lat.nondegenerate:
        raise DegenerateForm("logarithm needs a nondegenerate skew form; double the lattice first")
    found: dict = {}
    for d in range(1, cone.max_height + 1):
        current = _units_from_log(LieSeries._raw(cone.with_max_height(d), dict(found)))
        found.update(leading_log(cone, units, current, d))
    return LieSeries._raw(cone, found)


def _power_product(F: GroupElement, v, cache=None) -> ConeSeries:
    """prod(u_i ** v_i) for the unit multipliers of F; ``cache`` memoizes powers across calls."""
    cone = F.cone
    cache = {} if cache is None else cache
    if F.is_identity():
        return ConeSeries.one(cone)
    if F.ray is not None:
        s = cone.lattice.pair(F.ray, tuple(v))
        return ConeSeries._raw(cone, dict(_ray_multiplier(F, s, cache)))
    out = ConeSeries.one(cone)
    for i, e in enumerate(v):
        if e:
            p = cache.get((i, e))
            if p is None:
                p = cache[(i, e)] = F.units[i] ** e
            out = out * p
    return out


def exp_group(h: ConeSeries) -> GroupElement:
    if h.constant_term != 0:
        raise NonzeroConstantTerm("exp needs a series without constant term")
    return GroupElement(h.cone, log=h if isinstance(h, LieSeries) else LieSeries._raw(h.cone, dict(h.terms)))


def log_group(F: GroupElement) -> LieSeries:
    return F.log


def apply(F: GroupElement, f: ConeSeries) -> ConeSeries:
    """Image of a cone series under the automorphism induced by F."""
    _check_same(F.cone, f.cone)
    if F.is_identity():
        return f
    cone = f.cone
    D = cone.max_height
    hv = cone.height
    out: dict = {}
    cache: dict = {}
    for v, c in f.terms.items():
        hv_v = sum(a * b for a, b in zip(hv, v))
        if F.ray is not None:
            mult = _ray_multiplier(F, cone.lattice.pair(F.ray, v), cache)
        else:
            mult = _power_product(F, v, cache).terms
        mult = {k: m for k, m in mult.items() if sum(a * b for a, b in zip(hv, k)) + hv_v <= D}
        for k, m in shift_mul(cone, v, mult).items():
            out[k] = out.get(k, 0) + c * m
    return type(f)._raw(cone, {k: x for k, x in out.items() if x})


def compose(*elements: GroupElement) -> GroupElement:
    """Group product; ``compose(F, G)`` acts on functions by ``f -> F(G(f))``."""
    if not elements:
        raise ValueError("compose needs at least one element")
    cone = elements[0].cone
    for F in elements[1:]:
        _check_same(cone, F.cone)
    if not cone.lattice.nondegenerate:
        raise DegenerateForm("composition needs a nondegenerate skew form; double the lattice first")
    nontrivial = [F for F in elements if not F.is_identity()]
    if not nontrivial:
        return GroupElement.identity(cone)
    if len(nontrivial) == 1:
        return nontrivial[0]
    units = list(nontrivial[-1].units)
    for F in reversed(nontrivial[:-1]):
        units = [_units_after(F, i, u) for i, u in enumerate(units)]
    return GroupElement(cone, units=units)


def _units_after(F: GroupElement, i: int, u: ConeSeries) -> ConeSeries:
    # (F.G)(e_b) = F(e_b u^G) = e_b u^F F(u^G)
    if F.ray is not None:
        cone = F.cone
        s = cone.lattice.pair(F.ray, cone.lattice.basis(i))
        return ConeSeries._raw(cone, dict(_ray_multiplier(F, s, {}))) * apply(F, u)
    return F.units[i] * apply(F, u)
