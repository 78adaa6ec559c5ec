"""Exact wall-crossing computations on charge lattices.

Submodules: ``lattice`` (Poisson torus and its group), ``wcf`` (ray
factorizations and BPS invariants), ``qtorus`` (quantum torus over Q(t)),
``coha`` (d-loop cohomological Hall algebra), ``stability`` (stability data
and the gl(n) model) and ``cli``.
"""
from .errors import WallcrossError
from .lattice import (
    ChargeLattice,
    ConeSeries,
    GroupElement,
    LieSeries,
    TruncationCone,
    apply,
    bracket,
    compose,
    double_lattice,
    exp_group,
    log_group,
    make_lattice,
    standard_cone,
    twisted_mul,
)
from .wcf import (
    CentralCharge,
    OrderedFactorization,
    RayFactor,
    a_from_omega,
    assemble,
    factorize,
    omega_from_a,
    ray_exp,
    refactorize,
    t_factor,
)

__version__ = "0.1.0"
