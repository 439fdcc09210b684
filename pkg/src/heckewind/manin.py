"""Manin-symbol presentation of weight-2k modular symbols on Gamma_0(N).

A generator is a pair ``(i, x)`` standing for the Manin symbol
``[X^i Y^(n-i), g_x]`` where ``n = 2k - 2`` and ``g_x`` is a fixed lift to
SL2(Z) of the point ``x`` of P^1(Z/N).  Generators are indexed
``point_index * (n + 1) + i``.

Coordinates in the quotient ("full coordinates") are integer coordinates
with respect to a Z-basis of the torsion-free quotient lattice spanned by
the images of all generators.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb, gcd, lcm

import numpy as np
from sympy import factorint, totient

from . import linalg

__all__ = [
    "ResourceLimitError",
    "P1List",
    "p1_list",
    "p1_normalize",
    "lift_to_sl2z",
    "substitute",
    "act",
    "cusp_equivalent",
    "SymbolSpace",
    "build_space",
    "dimension_cusp_forms",
    "genus_x0",
    "number_of_cusps",
    "DEFAULT_MAX_GENERATORS",
]

DEFAULT_MAX_GENERATORS = 50_000


class ResourceLimitError(RuntimeError):
    """A presentation or operator would exceed the configured size cap."""


class P1List:
    """The points of P^1(Z/N) with a lookup table for normalization.

    The canonical representative of a class is its lexicographically
    smallest member ``(c, d)`` with ``0 <= c, d < N``.
    """

    def __init__(self, level: int):
        if level < 1:
            raise ValueError("level must be positive")
        n = level
        units = [u for u in range(n) if gcd(u, n) == 1]
        table = np.full(n * n, -1, dtype=np.int64)
        points: list[tuple[int, int]] = []
        for c in range(n):
            for d in range(n):
                if table[c * n + d] >= 0 or gcd(gcd(c, d), n) != 1:
                    continue
                idx = len(points)
                points.append((c, d))
                for u in units:
                    table[(u * c % n) * n + u * d % n] = idx
        self.level = n
        self.points = points
        self.table = table

    def __len__(self) -> int:
        return len(self.points)

    def index(self, c: int, d: int) -> int:
        """Index of the class of ``(c:d)``, or -1 when it is not a point."""
        n = self.level
        return int(self.table[(c % n) * n + d % n])

    def index_array(self, c: np.ndarray, d: np.ndarray) -> np.ndarray:
        n = self.level
        return self.table[(np.mod(c, n)) * n + np.mod(d, n)]

    def normalize(self, c: int, d: int) -> tuple[int, int] | None:
        i = self.index(c, d)
        return None if i < 0 else self.points[i]


@lru_cache(maxsize=64)
def p1_list(level: int) -> P1List:
    return P1List(level)


def p1_normalize(level: int, c: int, d: int) -> tuple[int, int] | None:
    """Canonical representative of ``(c:d)`` in P^1(Z/N), or ``None``."""
    return p1_list(level).normalize(c, d)


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def lift_to_sl2z(c: int, d: int, level: int) -> tuple[int, int, int, int]:
    """A matrix ``(a, b, c', d')`` in SL2(Z) whose bottom row is ``(c, d)`` mod N.

    Points ``(0:1)`` and ``(1:d)`` get the lifts ``I`` and ``(0 -1; 1 d)``.
    """
    if level == 1:
        return (1, 0, 0, 1)
    c %= level
    d %= level
    if (c, d) == (0, 1):
        return (1, 0, 0, 1)
    if c == 1:
        return (0, -1, 1, d)
    if c == 0:
        c = level
    while gcd(c, d) != 1:
        d += level
    g, x, y = _xgcd(d, c)
    return (x, -y, c, d)


# polynomials are coefficient lists indexed by the exponent of X


def _linear_power(a: int, b: int, e: int) -> list[int]:
    # (aX + bY)^e
    return [comb(e, s) * a**s * b ** (e - s) for s in range(e + 1)]


def substitute(coeffs, a: int, b: int, c: int, d: int) -> list[int]:
    """Coefficients of ``P(aX + bY, cX + dY)``."""
    n = len(coeffs) - 1
    out = [0] * (n + 1)
    for i, p in enumerate(coeffs):
        if not p:
            continue
        u = _linear_power(a, b, i)
        v = _linear_power(c, d, n - i)
        for s, us in enumerate(u):
            if not us:
                continue
            for t, vt in enumerate(v):
                out[s + t] += p * us * vt
    return out


def act(g, coeffs) -> list[int]:
    """Left action ``(gP)(X, Y) = P(dX - bY, -cX + aY)``."""
    a, b, c, d = g
    return substitute(coeffs, d, -b, -c, a)


@lru_cache(maxsize=32)
def _substitution_table(n: int, a: int, b: int, c: int, d: int) -> tuple[tuple[int, ...], ...]:
    rows = []
    for i in range(n + 1):
        mono = [0] * (n + 1)
        mono[i] = 1
        rows.append(tuple(substitute(mono, a, b, c, d)))
    return tuple(rows)


# cusps


def _reduce_cusp(num: int, den: int) -> tuple[int, int]:
    g = gcd(num, den)
    if g == 0:
        raise ValueError("0/0 is not a cusp")
    num, den = num // g, den // g
    if den < 0 or (den == 0 and num < 0):
        num, den = -num, -den
    return num, den


def cusp_equivalent(c1: tuple[int, int], c2: tuple[int, int], level: int) -> bool:
    """Gamma_0(N)-equivalence of cusps given as reduced ``(num, den)`` pairs."""
    u1, v1 = c1
    u2, v2 = c2
    s1 = 1 if v1 in (0, 1, -1) else pow(u1, -1, abs(v1))
    s2 = 1 if v2 in (0, 1, -1) else pow(u2, -1, abs(v2))
    m = gcd(v1 * v2, level)
    return (s1 * v2 - s2 * v1) % m == 0


def number_of_cusps(level: int) -> int:
    total = 0
    for d in range(1, level + 1):
        if level % d == 0:
            total += int(totient(gcd(d, level // d)))
    return total


def _index_data(level: int) -> tuple[Fraction, int, int]:
    fac = factorint(level)
    mu = Fraction(level)
    for q in fac:
        mu *= Fraction(q + 1, q)
    if level % 4 == 0:
        mu2 = 0
    else:
        mu2 = 1
        for q in fac:
            mu2 *= 1 if q == 2 else 1 + (-1 if q % 4 == 3 else 1)
    if level % 9 == 0:
        mu3 = 0
    else:
        mu3 = 1
        for q in fac:
            mu3 *= 1 if q == 3 else 1 + (-1 if q % 3 == 2 else 1)
    return mu, mu2, mu3


def genus_x0(level: int) -> int:
    mu, mu2, mu3 = _index_data(level)
    g = 1 + mu / 12 - Fraction(mu2, 4) - Fraction(mu3, 3) - Fraction(number_of_cusps(level), 2)
    assert g.denominator == 1
    return int(g)


def dimension_cusp_forms(level: int, weight: int) -> int:
    """dim S_weight(Gamma_0(N)) for even weight, from the genus formula."""
    if weight % 2 or weight < 2:
        raise ValueError("weight must be even and >= 2")
    g = genus_x0(level)
    if weight == 2:
        return g
    _, mu2, mu3 = _index_data(level)
    c = number_of_cusps(level)
    return (weight - 1) * (g - 1) + (weight // 2 - 1) * c + mu2 * (weight // 4) + mu3 * (weight // 3)


@dataclass(eq=False)
class SymbolSpace:
    """Finite presentation of weight-2k modular symbols on Gamma_0(N).

    ``gen_coords`` (generators x full dimension) sends each Manin generator
    to its integer coordinates.  ``free`` lists generators whose images form
    a Q-basis; ``lattice`` (rows, in free-generator coordinates) is the
    Z-basis used for full coordinates, or ``None`` when it is the standard
    basis.  ``cuspidal`` holds the cuspidal Z-basis as columns in full
    coordinates; ``plus`` the star-fixed sublattice in cuspidal coordinates.
    """

    level: int
    k: int
    p1: P1List
    free: list[int]
    gen_coords: np.ndarray
    lattice: list[list[Fraction]] | None
    lattice_inverse: list[list[Fraction]] | None
    cusps: list[tuple[int, int]]
    boundary: list[list[int]]
    cuspidal: list[list[int]]
    star: list[list[int]]
    star_cuspidal: list[list[int]]
    plus: list[list[int]]
    _cache: dict = field(default_factory=dict, repr=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    @property
    def weight(self) -> int:
        return 2 * self.k

    @property
    def degree(self) -> int:
        return 2 * self.k - 2

    @property
    def ngens(self) -> int:
        return len(self.p1) * (self.degree + 1)

    @property
    def dim_full(self) -> int:
        return len(self.free)

    @property
    def dim_cuspidal(self) -> int:
        return len(self.cuspidal[0]) if self.cuspidal else 0

    @property
    def dim_plus(self) -> int:
        return len(self.plus[0]) if self.plus else 0

    def generator(self, idx: int) -> tuple[int, tuple[int, int]]:
        """``(i, (c, d))`` for a generator index."""
        pt, i = divmod(idx, self.degree + 1)
        return i, self.p1.points[pt]

    def generator_index(self, i: int, c: int, d: int) -> int:
        pt = self.p1.index(c, d)
        if pt < 0:
            raise ValueError(f"({c}:{d}) is not in P^1(Z/{self.level})")
        return pt * (self.degree + 1) + i

    def coords_of(self, combo: dict[int, int]) -> np.ndarray:
        """Full coordinates of a formal combination of generators."""
        out = np.zeros(self.dim_full, dtype=object)
        for g, c in combo.items():
            if c:
                out = out + c * self.gen_coords[g]
        return out

    def free_expansion(self, v) -> list[Fraction]:
        """Coefficients of ``v`` on the free generators."""
        if self.lattice is None:
            return [Fraction(int(x)) for x in v]
        n = self.dim_full
        out = [Fraction(0)] * n
        for x, row in zip(v, self.lattice):
            if x:
                for j in range(n):
                    out[j] += int(x) * row[j]
        return out

    def from_free(self, u) -> list:
        """Full coordinates of a combination of free generators."""
        if self.lattice_inverse is None:
            return list(u)
        n = self.dim_full
        out = [Fraction(0)] * n
        for x, row in zip(u, self.lattice_inverse):
            if x:
                for j in range(n):
                    out[j] += x * row[j]
        return [int(x) if x.denominator == 1 else x for x in out]

    def boundary_of(self, v) -> list[int]:
        return [sum(int(a) * int(b) for a, b in zip(row, v)) for row in self.boundary]

    def cuspidal_coords(self, v) -> list[Fraction] | None:
        """Coordinates of a full-space vector in the cuspidal basis."""
        sol = linalg.solve(self.cuspidal, [[x] for x in v])
        if sol is None:
            return None
        return [x[0] for x in sol]

    def cuspidal_to_full(self, x) -> list:
        return [sum(row[j] * x[j] for j in range(len(x))) for row in self.cuspidal]

    def relations(self) -> list[dict[int, int]]:
        """All two- and three-term relations as sparse generator rows."""
        return _relations(self.level, self.k, self.p1)[0]

    def summary(self) -> dict:
        return {
            "level": self.level,
            "weight": self.weight,
            "dim_full": self.dim_full,
            "dim_cuspidal": self.dim_cuspidal,
            "dim_plus": self.dim_plus,
            "n_cusps": len(self.cusps),
        }


def _sigma_tau_images(p1: P1List, pt: int) -> tuple[int, int, int]:
    c, d = p1.points[pt]
    return p1.index(d, -c), p1.index(d, -c - d), p1.index(-c - d, c)


def _relations(level: int, k: int, p1: P1List):
    n = 2 * k - 2
    w = n + 1
    rows: list[dict[int, int]] = []
    sigma_rows: list[dict[int, int]] = []
    tau1 = _substitution_table(n, 0, -1, 1, -1)  # P(-Y, X - Y)
    tau2 = _substitution_table(n, -1, 1, -1, 0)  # P(Y - X, -X)
    seen = set()
    for pt in range(len(p1)):
        s_pt, t1, t2 = _sigma_tau_images(p1, pt)
        for i in range(w):
            row: dict[int, int] = {}
            g, h = pt * w + i, s_pt * w + (n - i)
            row[g] = row.get(g, 0) + 1
            row[h] = row.get(h, 0) + (-1) ** i
            sigma_rows.append({a: b for a, b in row.items() if b})
        if pt in seen:
            continue
        seen.update((pt, t1, t2))
        for i in range(w):
            row = {pt * w + i: 1}
            for table, q in ((tau1, t1), (tau2, t2)):
                for j, cf in enumerate(table[i]):
                    if cf:
                        key = q * w + j
                        row[key] = row.get(key, 0) + cf
            rows.append({a: b for a, b in row.items() if b})
    return sigma_rows + rows, sigma_rows, rows


def build_space(level: int, k: int, max_generators: int = DEFAULT_MAX_GENERATORS) -> SymbolSpace:
    """Presentation of weight-2k modular symbols for Gamma_0(level)."""
    if level < 1 or k < 1:
        raise ValueError("need level >= 1 and k >= 1")
    n = 2 * k - 2
    w = n + 1
    p1 = p1_list(level)
    ngens = len(p1) * w
    if ngens > max_generators:
        raise ResourceLimitError(f"{ngens} generators exceeds the cap of {max_generators}")

    # two-term relations: pair each generator with its sigma partner
    rep = list(range(ngens))
    sign = [1] * ngens
    zero = [False] * ngens
    for pt in range(len(p1)):
        s_pt = _sigma_tau_images(p1, pt)[0]
        for i in range(w):
            g, h = pt * w + i, s_pt * w + (n - i)
            s = (-1) ** i  # x_g = -s x_h
            if g == h:
                if s == 1:
                    zero[g] = True
            elif g < h:
                # larger index represents the pair
                rep[g], sign[g] = h, -s
    _, _, tau_rows = _relations(level, k, p1)

    # columns are reversed so that pivots land on large indices
    def col(g: int) -> int:
        return ngens - 1 - g

    rows = []
    for r in tau_rows:
        out: dict[int, int] = {}
        for g, cf in r.items():
            if zero[g] or zero[rep[g]]:
                continue
            key = col(rep[g])
            out[key] = out.get(key, 0) + sign[g] * cf
        out = {a: b for a, b in out.items() if b}
        if out:
            rows.append(out)
    rref = linalg.sparse_rref(rows)
    pivot_gens = {ngens - 1 - c for c in rref}
    free = [g for g in range(ngens) if rep[g] == g and not zero[g] and g not in pivot_gens]
    free_pos = {g: j for j, g in enumerate(free)}
    dim = len(free)

    def rep_projection(g: int) -> dict[int, Fraction]:
        if g in free_pos:
            return {free_pos[g]: Fraction(1)}
        row = rref[col(g)]
        return {free_pos[ngens - 1 - c]: -v for c, v in row.items() if c != col(g)}

    proj: list[dict[int, Fraction]] = []
    for g in range(ngens):
        if zero[g] or zero[rep[g]]:
            proj.append({})
            continue
        base = rep_projection(rep[g])
        proj.append({j: sign[g] * v for j, v in base.items()})

    # saturate: Z-span of all generator images
    lattice = lattice_inverse = None
    if any(v.denominator != 1 for p in proj for v in p.values()):
        vecs = [[Fraction(1) if j == i else Fraction(0) for j in range(dim)] for i in range(dim)]
        for p in proj:
            if any(v.denominator != 1 for v in p.values()):
                dense = [Fraction(0)] * dim
                for j, v in p.items():
                    dense[j] = v
                vecs.append(dense)
        lattice = linalg.lattice_basis(vecs, dim)
        ident = [[int(i == j) for j in range(dim)] for i in range(dim)]
        # x * lattice = u  =>  x = u * lattice^-1
        lattice_inverse = [r for r in _inverse(lattice, ident)]
    gen_coords = _lattice_coordinates(proj, lattice_inverse, ngens, dim)

    space = SymbolSpace(
        level=level,
        k=k,
        p1=p1,
        free=free,
        gen_coords=gen_coords,
        lattice=lattice,
        lattice_inverse=lattice_inverse,
        cusps=[],
        boundary=[],
        cuspidal=[],
        star=[],
        star_cuspidal=[],
        plus=[],
    )
    _attach_boundary(space)
    _attach_star(space)
    return space


def _as_int_matrix(rows: list[list[Fraction]]) -> tuple[np.ndarray, int]:
    den = 1
    for row in rows:
        for x in row:
            den = lcm(den, Fraction(x).denominator)
    return np.array([[int(x * den) for x in row] for row in rows], dtype=object), den


def _lattice_coordinates(proj, lattice_inverse, ngens: int, dim: int) -> np.ndarray:
    # generator projections (free-generator coordinates) times lattice^-1
    den_p = 1
    for p in proj:
        for v in p.values():
            den_p = lcm(den_p, v.denominator)
    dense = np.zeros((ngens, dim), dtype=object)
    for g, p in enumerate(proj):
        for j, v in p.items():
            dense[g, j] = int(v * den_p)
    if lattice_inverse is None:
        out, den = dense, den_p
    else:
        inv, den_i = _as_int_matrix(lattice_inverse)
        out, den = _int_matmul(dense, inv), den_p * den_i
    if den != 1:
        if any(int(x) % den for x in out.flat):
            raise AssertionError("generator image outside the quotient lattice")
        out = np.array([[int(x) // den for x in row] for row in out], dtype=object)
    out = out.reshape(ngens, dim)
    if out.size == 0 or max(abs(int(x)) for x in out.flat) < 2**40:
        out = out.astype(np.int64)
    return out


def _int_matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Exact product of integer object arrays, in int64 when it cannot overflow."""
    if a.size == 0 or b.size == 0:
        return np.zeros((a.shape[0], b.shape[1]), dtype=object)
    ma = max(abs(int(x)) for x in a.flat)
    mb = max(abs(int(x)) for x in b.flat)
    if ma * mb * max(a.shape[1], 1) < 2**62:
        return (a.astype(np.int64) @ b.astype(np.int64)).astype(object)
    return a @ b


def _inverse(m: list[list[Fraction]], ident) -> list[list[Fraction]]:
    # rows of m^-1 for an invertible matrix m, via x m = I
    sol = linalg.solve(linalg.transpose(m), linalg.transpose(ident))
    return linalg.transpose(sol)


def _basis_generators(space: SymbolSpace) -> list[dict[int, Fraction]]:
    # each full-space basis vector as a combination of free generators
    out = []
    for j in range(space.dim_full):
        if space.lattice is None:
            out.append({space.free[j]: Fraction(1)})
        else:
            out.append({space.free[t]: v for t, v in enumerate(space.lattice[j]) if v})
    return out


def _attach_boundary(space: SymbolSpace) -> None:
    level, n = space.level, space.degree
    cusps: list[tuple[int, int]] = []

    def cusp_index(num: int, den: int) -> int:
        cu = _reduce_cusp(num, den)
        for t, other in enumerate(cusps):
            if cusp_equivalent(cu, other, level):
                return t
        cusps.append(cu)
        return len(cusps) - 1

    def gen_boundary(g: int) -> dict[int, int]:
        i, (c, d) = space.generator(g)
        a, b, cc, dd = lift_to_sl2z(c, d, level)
        out: dict[int, int] = {}
        if i == n:
            t = cusp_index(a, cc)
            out[t] = out.get(t, 0) + 1
        if i == 0:
            t = cusp_index(b, dd)
            out[t] = out.get(t, 0) - 1
        return out

    # register every cusp reachable from a generator so indices are stable
    for g in range(space.ngens):
        gen_boundary(g)
    cols = []
    for combo in _basis_generators(space):
        acc: dict[int, Fraction] = {}
        for g, cf in combo.items():
            for t, v in gen_boundary(g).items():
                acc[t] = acc.get(t, 0) + cf * v
        col = [acc.get(t, 0) for t in range(len(cusps))]
        assert all(Fraction(x).denominator == 1 for x in col)
        cols.append([int(x) for x in col])
    space.cusps = cusps
    space.boundary = linalg.transpose(cols, len(cusps)) if cols else [[] for _ in cusps]
    kernel = linalg.integer_kernel(space.boundary, ncols=space.dim_full) if cusps else [
        [int(i == j) for j in range(space.dim_full)] for i in range(space.dim_full)
    ]
    space.cuspidal = linalg.transpose(kernel, space.dim_full) if kernel else []


def _attach_star(space: SymbolSpace) -> None:
    cols = []
    for combo in _basis_generators(space):
        image: dict[int, Fraction] = {}
        for g, cf in combo.items():
            i, (c, d) = space.generator(g)
            h = space.generator_index(i, -c, d)
            image[h] = image.get(h, 0) + cf * (-1) ** i
        vec = [Fraction(0)] * space.dim_full
        for h, cf in image.items():
            for j in range(space.dim_full):
                x = space.gen_coords[h, j]
                if x:
                    vec[j] += cf * int(x)
        cols.append([int(x) for x in vec])
    space.star = linalg.transpose(cols, space.dim_full)
    d = space.dim_cuspidal
    if d == 0:
        return
    images = [linalg.mat_vec(space.star, [row[j] for row in space.cuspidal]) for j in range(d)]
    sol = linalg.solve(space.cuspidal, linalg.transpose(images, space.dim_full))
    space.star_cuspidal = [[int(x) for x in row] for row in sol]
    fix = [[space.star_cuspidal[i][j] - int(i == j) for j in range(d)] for i in range(d)]
    kernel = linalg.integer_kernel(fix, ncols=d)
    space.plus = linalg.transpose(kernel, d) if kernel else []
