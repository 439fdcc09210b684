"""Hecke algebra lattice, the winding annihilator and mod-l conditions.

Throughout, ``e'`` is the cuspidal winding element: the class of
``X^(k-1) Y^(k-1)⊗{0, oo}`` when that class is cuspidal (always for k >= 2),
and otherwise its Hecke-equivariant projection to the cuspidal space,
scaled to a primitive integer vector.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil

import numpy as np
import sympy
from sympy import factorint, isprime, nextprime

from . import linalg
from .geometry import winding_vector
from .hecke import (
    _cache_get,
    _cache_put,
    cuspidal_coords,
    hecke_apply,
    hecke_matrix,
    hecke_prime_full,
)
from .manin import SymbolSpace, _int_matmul

__all__ = [
    "BoundTooSmallError",
    "BadModulusError",
    "sturm_bound",
    "CuspidalWinding",
    "cuspidal_winding",
    "winding_orbit",
    "WindingIdealData",
    "winding_orbit_rank",
    "AlgebraLattice",
    "algebra_lattice",
    "annihilator_ideal",
    "mod_l_winding_forms",
    "EquivalenceReport",
    "equivalence_report",
]


class BoundTooSmallError(ValueError):
    """The requested bound is below the generation bound of the Hecke algebra."""


class BadModulusError(ValueError):
    """The prime l divides the level, or is not prime."""


def sturm_bound(level: int, k: int) -> int:
    """``ceil((2k/12) N prod_{q | N}(1 + 1/q)) + 1``."""
    index = Fraction(level)
    for q in factorint(level):
        index *= Fraction(q + 1, q)
    return ceil(Fraction(2 * k, 12) * index) + 1


@dataclass(frozen=True)
class CuspidalWinding:
    cuspidal: list[int]  # coordinates in the cuspidal basis
    full: list[int]  # the same element in full coordinates
    exponent: int
    projected: bool  # True when the raw class had nonzero boundary
    scale: Fraction  # cuspidal = scale * (projection of the raw class)
    star_sign: int
    raw_boundary: list[int]
    auxiliary_prime: int | None = None


def _boundary_action(space: SymbolSpace, q: int) -> list[list[Fraction]]:
    # matrix of T_q on the image of the boundary map
    D = space.boundary
    ech = linalg.echelon_rank(D, ncols=space.dim_full)
    cols = ech.pivots
    tq = hecke_prime_full(space, q)
    base = [[row[j] for row in D] for j in cols]  # boundary images, as rows
    images = []
    for j in cols:
        col = [int(x) for x in tq[:, j]]
        images.append(space.boundary_of(col))
    sol = linalg.solve(linalg.transpose(base, len(D)), linalg.transpose(images, len(D)))
    return sol


def _poly_apply(mat: np.ndarray, coeffs: list[Fraction], v: np.ndarray) -> np.ndarray:
    # Horner evaluation of sum_i coeffs[i] mat^i applied to v (highest degree first)
    acc = np.zeros_like(v, dtype=object)
    for c in coeffs:
        acc = _int_matmul(mat, acc.reshape(-1, 1)).reshape(-1) if acc.any() else acc
        acc = acc + c * v
    return acc


def cuspidal_winding(space: SymbolSpace, m: int | None = None) -> CuspidalWinding:
    """The cuspidal winding element ``e'`` for the monomial ``X^m Y^(n-m)``."""
    m = space.k - 1 if m is None else m
    key = ("winding", m)
    hit = _cache_get(space, key)
    if hit is not None:
        return hit
    if space.dim_cuspidal == 0:
        raise ValueError("the cuspidal space is zero")
    raw = winding_vector(space, m)
    if raw.is_cuspidal:
        x = [int(t) for t in cuspidal_coords(space, raw.coords)]
        full = [int(t) for t in raw.coords]
        projected, scale, aux = False, Fraction(1), None
    else:
        q = 2
        while True:
            while space.level % q == 0:
                q = nextprime(q)
            b = _boundary_action(space, q)
            xs = sympy.symbols("x")
            poly = sympy.Matrix(b).charpoly(xs)
            coeffs = [Fraction(int(c.p), int(c.q)) for c in poly.all_coeffs()]
            # kill the Eisenstein part with the characteristic polynomial of T_q there
            den = 1
            for c in coeffs:
                den = den * c.denominator // np.gcd(den, c.denominator)
            icoeffs = [int(c * den) for c in coeffs]
            tq = hecke_prime_full(space, q)
            av = _poly_apply(tq, icoeffs, np.asarray(raw.coords, dtype=object))
            tc = hecke_matrix(space, q).matrix
            d = space.dim_cuspidal
            acusp = np.zeros((d, d), dtype=object)
            for j in range(d):
                e = np.zeros(d, dtype=object)
                e[j] = 1
                acusp[:, j] = _poly_apply(tc, icoeffs, e)
            if linalg.det(acusp.tolist()) != 0:
                break
            q = nextprime(q)
        rhs = cuspidal_coords(space, av)
        sol = linalg.solve(acusp.tolist(), [[int(t)] for t in rhs])
        proj = [s[0] for s in sol]
        x = linalg.primitive(proj)
        lead = next(i for i, t in enumerate(x) if t)
        scale = Fraction(x[lead]) / proj[lead]
        full = [int(t) for t in space.cuspidal_to_full(x)]
        projected, aux = True, q
    sx = linalg.mat_vec(space.star_cuspidal, x)
    if sx == x:
        sign = 1
    elif sx == [-t for t in x]:
        sign = -1
    else:
        raise AssertionError("winding element is not star-eigen")
    out = CuspidalWinding(x, full, m, projected, scale, sign, list(raw.boundary), aux)
    return _cache_put(space, key, out)


def winding_orbit(space: SymbolSpace, upto: int, m: int | None = None) -> list[list[int]]:
    """Cuspidal coordinates of ``T_n e'`` for ``n = 1..upto``."""
    e = cuspidal_winding(space, m)
    key = ("orbit", e.exponent)
    cached = _cache_get(space, key) or []
    if len(cached) >= upto:
        return cached[:upto]
    full = np.asarray(e.full, dtype=object)
    rows = list(cached)
    for n in range(len(rows) + 1, upto + 1):
        rows.append([int(t) for t in cuspidal_coords(space, hecke_apply(space, n, full))])
    with space._lock:
        if len(space._cache.get(key, [])) < len(rows):
            space._cache[key] = rows
    return rows


@dataclass
class WindingIdealData:
    level: int
    weight: int
    bound: int
    orbit: list[list[int]]
    rank: int
    ranks_mod: dict[int, int] = field(default_factory=dict)


def _check_l(space: SymbolSpace, l: int) -> None:
    if not isprime(l):
        raise BadModulusError(f"l = {l} is not prime")
    if space.level % l == 0:
        raise BadModulusError(f"l = {l} divides the level {space.level}")


def winding_orbit_rank(
    space: SymbolSpace,
    bound: int | None = None,
    modulus: int | None = None,
    allow_small_bound: bool = False,
) -> WindingIdealData:
    """Rank of ``{T_n e' : n <= B}`` over Q, and over F_l when ``modulus`` is set.

    The F_l rank reduces the orbit rows in cuspidal lattice coordinates.
    """
    need = sturm_bound(space.level, space.k)
    bound = need if bound is None else bound
    if bound < need and not allow_small_bound:
        raise BoundTooSmallError(
            f"B = {bound} is below the generation bound {need}; the rank would only be a lower bound"
        )
    if modulus is not None:
        _check_l(space, modulus)
    orbit = winding_orbit(space, bound)
    d = space.dim_cuspidal
    data = WindingIdealData(space.level, space.weight, bound, orbit, linalg.echelon_rank(orbit, ncols=d).rank)
    if modulus is not None:
        data.ranks_mod[modulus] = linalg.echelon_rank(orbit, modulus, ncols=d).rank
    return data


@dataclass
class AlgebraLattice:
    bound: int
    dim: int  # size of the matrices
    basis: list[list[list[int]]]  # integer matrices on the cuspidal lattice

    @property
    def rank(self) -> int:
        return len(self.basis)

    def coordinates(self, mat) -> list[int]:
        """Integer coordinates of a Hecke matrix in the lattice basis."""
        flat = [int(x) for row in mat for x in row]
        basis = [[x for row in b for x in row] for b in self.basis]
        sol = linalg.solve(linalg.transpose(basis, len(flat)), [[x] for x in flat])
        if sol is None or any(s[0].denominator != 1 for s in sol):
            raise ValueError("matrix outside the Hecke lattice")
        return [int(s[0]) for s in sol]


def algebra_lattice(space: SymbolSpace, bound: int | None = None) -> AlgebraLattice:
    """Z-span of ``T_1..T_B`` acting on the cuspidal lattice (Hermite basis)."""
    bound = sturm_bound(space.level, space.k) if bound is None else bound
    key = ("algebra", bound)
    hit = _cache_get(space, key)
    if hit is not None:
        return hit
    d = space.dim_cuspidal
    flats = []
    for n in range(1, bound + 1):
        mat = hecke_matrix(space, n).matrix
        flats.append([int(x) for row in mat for x in row])
    h = linalg.hnf(flats, ncols=d * d)
    basis = [[row[i * d : (i + 1) * d] for i in range(d)] for row in h]
    return _cache_put(space, key, AlgebraLattice(bound, d, basis))


@dataclass
class _IdealData:
    lattice: AlgebraLattice
    images: list[list[int]]  # t_j e' in cuspidal coordinates
    ideal: list[list[int]]  # Z-basis of I_e in lattice coordinates
    hecke_coords: list[list[int]]  # coordinates of T_1..T_B
    module_basis: list[list[int]]  # Z-basis of T e' (cuspidal coordinates)


def annihilator_ideal(space: SymbolSpace) -> _IdealData:
    """``I_e = {t in T : t e' = 0}`` as a sublattice of the Hecke lattice."""
    hit = _cache_get(space, ("ideal",))
    if hit is not None:
        return hit
    lat = algebra_lattice(space)
    e = cuspidal_winding(space).cuspidal
    images = [linalg.mat_vec(b, e) for b in lat.basis]
    ideal = linalg.integer_kernel(linalg.transpose(images, space.dim_cuspidal), ncols=lat.rank)
    coords = [lat.coordinates(hecke_matrix(space, n).matrix) for n in range(1, lat.bound + 1)]
    module = linalg.hnf(images, ncols=space.dim_cuspidal)
    data = _IdealData(lat, images, ideal, coords, module)
    return _cache_put(space, ("ideal",), data)


def _hecke_coords(space: SymbolSpace, data: _IdealData, upto: int) -> list[list[int]]:
    # T_n lies in the lattice for every n, also beyond the generation bound
    with space._lock:
        have = len(data.hecke_coords)
    extra = [data.lattice.coordinates(hecke_matrix(space, n).matrix) for n in range(have + 1, upto + 1)]
    with space._lock:
        if len(data.hecke_coords) == have:
            data.hecke_coords.extend(extra)
    return data.hecke_coords[:upto]


def mod_l_winding_forms(space: SymbolSpace, l: int, D: int) -> list[list[int]]:
    """Coefficient vectors ``(a_1, ..., a_D)`` of mod-l forms killed by I_e.

    A mod-l form in the duality picture is a functional on T/(l, I_e); its
    n-th coefficient is its value on T_n.  The returned list is a reduced
    echelon basis of the span of these coefficient vectors.
    """
    _check_l(space, l)
    data = annihilator_ideal(space)
    r = data.lattice.rank
    ideal_mod = [[x % l for x in row] for row in data.ideal]
    functionals = linalg.nullspace_mod(ideal_mod, l, ncols=r) if ideal_mod else [
        [int(i == j) for j in range(r)] for i in range(r)
    ]
    coords = _hecke_coords(space, data, D)
    vectors = [[sum(f * c for f, c in zip(psi, coords[n])) % l for n in range(D)] for psi in functionals]
    if not vectors:
        return []
    return linalg.echelon_rank(vectors, l, ncols=D).reduced


@dataclass
class EquivalenceReport:
    level: int
    weight: int
    l: int
    D: int
    cond1: bool
    cond2: bool
    cond3: bool
    cond3_ambient: bool  # (3) read in the ambient cuspidal lattice mod l

    @property
    def agree(self) -> bool:
        return self.cond1 == self.cond2 == self.cond3

    def to_json(self) -> dict:
        return {
            "level": self.level,
            "weight": self.weight,
            "l": self.l,
            "D": self.D,
            "cond1": self.cond1,
            "cond2": self.cond2,
            "cond3": self.cond3,
            "cond3_ambient": self.cond3_ambient,
            "agree": self.agree,
        }


def equivalence_report(space: SymbolSpace, l: int, D: int) -> EquivalenceReport:
    """Evaluate the three mod-l conditions for ``T_1, ..., T_D`` and ``e'``.

    (1) D independent coefficient vectors of mod-l forms killed by I_e;
    (2) T_1..T_D independent in T/(l, I_e);
    (3) T_1 e', ..., T_D e' independent in (T e') ⊗ F_l.
    """
    _check_l(space, l)
    data = annihilator_ideal(space)
    r = data.lattice.rank
    cond1 = len(mod_l_winding_forms(space, l, D)) == D

    ideal_mod = [[x % l for x in row] for row in data.ideal]
    base = linalg.echelon_rank(ideal_mod, l, ncols=r).rank if ideal_mod else 0
    stacked = ideal_mod + [[x % l for x in c] for c in _hecke_coords(space, data, D)]
    cond2 = linalg.echelon_rank(stacked, l, ncols=r).rank - base == D

    orbit = winding_orbit(space, D)
    module = data.module_basis
    sol = linalg.solve(linalg.transpose(module, space.dim_cuspidal), linalg.transpose(orbit, space.dim_cuspidal))
    in_module = [[int(sol[j][i]) for j in range(len(module))] for i in range(D)]
    cond3 = linalg.echelon_rank(in_module, l, ncols=len(module)).rank == D
    cond3_ambient = linalg.echelon_rank(orbit, l, ncols=space.dim_cuspidal).rank == D
    return EquivalenceReport(space.level, space.weight, l, D, cond1, cond2, cond3, cond3_ambient)
