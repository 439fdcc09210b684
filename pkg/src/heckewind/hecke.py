"""Hecke operators on modular symbols.

Two independent routes:

* Heilbronn matrices acting on Manin generators,
  ``T_n [P, (u:v)] = sum_M [P(aX + bY, cX + dY), (u:v) M]`` over a family of
  determinant-n matrices; terms whose point leaves P^1(Z/N) are dropped.
* The coset route ``T_q(P⊗{a, b}) = sum_{g in R_q} g(P⊗{a, b})`` with
  ``R_q = {(1 r; 0 q)} ∪ {(q 0; 0 1)}``; the last coset is omitted when
  ``q | N``, which gives U_q.

Composite indices are built from prime indices with the usual recursions.
Matrices act on column vectors of full (or cuspidal) coordinates.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import lcm

import numpy as np
from sympy import factorint, isprime

from .geometry import PathSymbol, path_to_coords, transform_path
from .manin import ResourceLimitError, SymbolSpace, _int_matmul

__all__ = [
    "HeilbronnFamily",
    "heilbronn_family",
    "heilbronn_merel",
    "heilbronn_cremona",
    "HeckeMatrix",
    "hecke_matrix",
    "hecke_full",
    "hecke_prime_full",
    "hecke_apply",
    "hecke_apply_cosets",
    "coset_representatives",
    "restrict_to_cuspidal",
    "restrict_to_plus",
    "hecke_matrix_json",
    "MAX_FAMILY_SIZE",
]

MAX_FAMILY_SIZE = 2_000_000
MEREL_LIMIT = 60  # primes above this use the Cremona family


@dataclass(frozen=True)
class HeilbronnFamily:
    n: int
    matrices: tuple[tuple[int, int, int, int], ...]
    construction: str

    def __len__(self) -> int:
        return len(self.matrices)

    def as_array(self) -> np.ndarray:
        return np.array(self.matrices, dtype=np.int64).reshape(-1, 4)


@lru_cache(maxsize=256)
def heilbronn_merel(n: int) -> HeilbronnFamily:
    """All ``(a b; c d)`` with ``ad - bc = n``, ``a > b >= 0``, ``d > c >= 0``."""
    if n < 1:
        raise ValueError("n must be positive")
    out = []
    for a in range(1, n + 1):
        for b in range(a):
            if b == 0:
                if n % a == 0:
                    d = n // a
                    out.extend((a, 0, c, d) for c in range(d))
                continue
            # a d = n + b c with c < d  =>  c (a - b) < n
            cmax = -(-n // (a - b))
            for c in range(cmax):
                t = n + b * c
                if t % a == 0:
                    d = t // a
                    if d > c:
                        out.append((a, b, c, d))
    return HeilbronnFamily(n, tuple(out), "merel")


@lru_cache(maxsize=512)
def heilbronn_cremona(p: int) -> HeilbronnFamily:
    """Cremona's determinant-p family for a prime ``p``; size O(p log p)."""
    if not isprime(p):
        raise ValueError("Cremona family needs a prime")
    if p == 2:
        return HeilbronnFamily(2, ((1, 0, 0, 2), (2, 0, 0, 1), (2, 1, 0, 1), (1, 0, 1, 2)), "cremona")
    out = [(1, 0, 0, p)]
    half = p // 2
    for r in range(-half, half + 1):
        x1, x2, y1, y2, a, b = p, -r, 0, 1, -p, r
        out.append((x1, x2, y1, y2))
        while b != 0:
            q = _round_div(a, b)
            c = a - b * q
            a, b = -b, c
            x1, x2 = x2, q * x2 - x1
            y1, y2 = y2, q * y2 - y1
            out.append((x1, x2, y1, y2))
    return HeilbronnFamily(p, tuple(out), "cremona")


def _round_div(a: int, b: int) -> int:
    # nearest integer to a/b, exact halves rounded down
    if b < 0:
        a, b = -a, -b
    return -((b - 2 * a) // (2 * b))


def heilbronn_family(n: int) -> HeilbronnFamily:
    """Heilbronn family of determinant ``n`` (Merel's family; Cremona's for large primes)."""
    if n > MEREL_LIMIT and isprime(n):
        return heilbronn_cremona(n)
    return heilbronn_merel(n)


# action on the full space


def _linear_powers(x: np.ndarray, y: np.ndarray, n: int) -> list[np.ndarray]:
    # coefficient arrays (indexed by X exponent) of (xX + yY)^e, e = 0..n
    out = [np.ones((len(x), 1), dtype=object)]
    xo, yo = x.astype(object), y.astype(object)
    for e in range(1, n + 1):
        prev = out[-1]
        cur = np.zeros((len(x), e + 1), dtype=object)
        cur[:, :e] += prev * yo[:, None]
        cur[:, 1:] += prev * xo[:, None]
        out.append(cur)
    return out


def _family_images(space: SymbolSpace, fam: np.ndarray, gens: list[int]) -> np.ndarray:
    """Rows: full coordinates of ``T [gen]`` for each generator index in ``gens``."""
    n = space.degree
    w = n + 1
    G = space.ngens
    a, b, c, d = (fam[:, t] for t in range(4))
    m = len(fam)
    bound = m * int(np.abs(fam).max() * 2 + 1) ** n
    small = bound < 2**62
    p1 = [_linear_powers(a, b, n), _linear_powers(c, d, n)]
    polys = []
    for i in range(w):
        u, v = p1[0][i], p1[1][n - i]
        poly = np.zeros((m, w), dtype=object)
        for s in range(i + 1):
            poly[:, s : s + n - i + 1] += u[:, s : s + 1] * v
        polys.append(poly.astype(np.int64) if small else poly)
    agg = np.zeros((len(gens), G), dtype=np.int64 if small else object)
    by_i: dict[int, list[int]] = {}
    for row, g in enumerate(gens):
        by_i.setdefault(g % w, []).append(row)
    for i, rows in by_i.items():
        pts = np.array([space.p1.points[gens[r] // w] for r in rows], dtype=np.int64)
        uu, vv = pts[:, :1], pts[:, 1:]
        idx = space.p1.index_array(uu * a[None, :] + vv * c[None, :], uu * b[None, :] + vv * d[None, :])
        poly = polys[i]
        for j in range(w):
            col = poly[:, j]
            nz = col != 0
            if not nz.any():
                continue
            sub = idx[:, nz]
            weights = np.broadcast_to(col[nz], sub.shape)
            ok = sub >= 0
            rr = np.broadcast_to(np.array(rows)[:, None], sub.shape)
            np.add.at(agg, (rr[ok], sub[ok] * w + j), weights[ok])
    return _int_matmul(agg.astype(object), space.gen_coords.astype(object))


def _apply_family_to_basis(space: SymbolSpace, fam: HeilbronnFamily) -> np.ndarray:
    if len(fam) * space.dim_full > MAX_FAMILY_SIZE * 50:
        raise ResourceLimitError(f"Heilbronn family of size {len(fam)} too large")
    images = _family_images(space, fam.as_array(), space.free)
    if space.lattice is None:
        cols = images
    else:
        lat = space.lattice
        den = 1
        for row in lat:
            for x in row:
                den = lcm(den, x.denominator)
        lat_int = np.array([[int(x * den) for x in row] for row in lat], dtype=object)
        cols = _int_matmul(lat_int, images)
        if any(int(x) % den for x in cols.flat):
            raise AssertionError("Hecke image outside the lattice")
        cols = np.array([[int(x) // den for x in row] for row in cols], dtype=object).reshape(cols.shape)
    return np.ascontiguousarray(cols.T)


def _cache_get(space: SymbolSpace, key):
    with space._lock:
        return space._cache.get(key)


def _cache_put(space: SymbolSpace, key, value):
    with space._lock:
        return space._cache.setdefault(key, value)


def hecke_prime_full(space: SymbolSpace, q: int, family: str = "auto") -> np.ndarray:
    """Matrix of T_q (U_q when q | N) on the full space, from Heilbronn matrices."""
    if not isprime(q):
        raise ValueError(f"{q} is not prime")
    key = ("full", q, family)
    hit = _cache_get(space, key)
    if hit is not None:
        return hit
    if family == "merel":
        fam = heilbronn_merel(q)
    elif family == "cremona":
        fam = heilbronn_cremona(q)
    else:
        fam = heilbronn_family(q)
    return _cache_put(space, key, _apply_family_to_basis(space, fam))


def _weight_factor(space: SymbolSpace, q: int) -> int:
    return q ** (2 * space.k - 1)


def hecke_full(space: SymbolSpace, n: int, method: str = "recursion") -> np.ndarray:
    """Matrix of T_n on the full space.

    ``method="recursion"`` builds composite indices from prime ones;
    ``method="heilbronn"`` applies Merel's determinant-n family directly.
    """
    if n < 1:
        raise ValueError("n must be positive")
    key = ("full-n", n, method)
    hit = _cache_get(space, key)
    if hit is not None:
        return hit
    dim = space.dim_full
    if n == 1:
        mat = np.identity(dim, dtype=np.int64).astype(object)
    elif method == "heilbronn":
        mat = _apply_family_to_basis(space, heilbronn_merel(n))
    else:
        fac = factorint(n)
        if len(fac) > 1:
            q, r = next(iter(sorted(fac.items())))
            mat = _int_matmul(hecke_full(space, q**r), hecke_full(space, n // q**r))
        else:
            ((q, r),) = fac.items()
            tq = hecke_prime_full(space, q)
            if r == 1:
                mat = tq
            elif space.level % q == 0:
                mat = _int_matmul(tq, hecke_full(space, q ** (r - 1)))
            else:
                mat = _int_matmul(tq, hecke_full(space, q ** (r - 1))) - _weight_factor(space, q) * hecke_full(
                    space, q ** (r - 2)
                )
    return _cache_put(space, key, mat)


def hecke_apply(space: SymbolSpace, n: int, v, _memo: dict | None = None) -> np.ndarray:
    """``T_n v`` for a full-coordinate vector, using only prime-index matrices."""
    v = np.asarray(v, dtype=object)
    if n == 1:
        return v
    fac = sorted(factorint(n).items())
    out = v
    for q, r in fac:
        tq = hecke_prime_full(space, q)
        prev, cur = out, _int_matmul(tq, out.reshape(-1, 1)).reshape(-1)
        for _ in range(r - 1):
            nxt = _int_matmul(tq, cur.reshape(-1, 1)).reshape(-1)
            if space.level % q:
                nxt = nxt - _weight_factor(space, q) * prev
            prev, cur = cur, nxt
        out = cur
    return out


# restriction to sublattices


def _left_inverse(basis: list[list[int]]):
    """Row subset and rational inverse solving ``basis x = y`` for y in the span."""
    from . import linalg

    ech = linalg.echelon_rank(linalg.transpose(basis))
    rows = ech.pivots  # independent rows of the basis matrix
    sub = [basis[r] for r in rows]
    ident = [[int(i == j) for j in range(len(rows))] for i in range(len(rows))]
    inv = linalg.solve(sub, ident)
    den = 1
    for row in inv:
        for x in row:
            den = lcm(den, x.denominator)
    inv_int = np.array([[int(x * den) for x in row] for row in inv], dtype=object)
    return rows, inv_int, den


def _coords_in(space: SymbolSpace, key: str, basis: list[list[int]], vectors: np.ndarray) -> np.ndarray:
    """Coordinates (columns) of the given column vectors in a lattice basis."""
    hit = _cache_get(space, ("leftinv", key))
    if hit is None:
        hit = _cache_put(space, ("leftinv", key), _left_inverse(basis))
    rows, inv, den = hit
    sub = vectors[rows, :]
    x = _int_matmul(inv, sub.astype(object))
    if any(int(t) % den for t in x.flat):
        raise ValueError("vector not in the lattice")
    x = np.array([[int(t) // den for t in row] for row in x], dtype=object).reshape(x.shape)
    basis_arr = np.array(basis, dtype=object)
    if not np.array_equal(_int_matmul(basis_arr, x), vectors.astype(object)):
        raise ValueError("vector not in the lattice span")
    return x


def cuspidal_coords(space: SymbolSpace, v) -> np.ndarray:
    """Cuspidal coordinates of a cuspidal full-space vector."""
    col = np.asarray(v, dtype=object).reshape(-1, 1)
    return _coords_in(space, "cuspidal", space.cuspidal, col).reshape(-1)


def plus_coords(space: SymbolSpace, x) -> np.ndarray:
    """Plus-lattice coordinates of a star-fixed cuspidal-coordinate vector."""
    col = np.asarray(x, dtype=object).reshape(-1, 1)
    return _coords_in(space, "plus", space.plus, col).reshape(-1)


def restrict_to_cuspidal(space: SymbolSpace, full: np.ndarray) -> np.ndarray:
    c = np.array(space.cuspidal, dtype=object)
    return _coords_in(space, "cuspidal", space.cuspidal, _int_matmul(full, c))


def restrict_to_plus(space: SymbolSpace, cusp: np.ndarray) -> np.ndarray:
    p = np.array(space.plus, dtype=object)
    return _coords_in(space, "plus", space.plus, _int_matmul(cusp, p))


@dataclass(frozen=True)
class HeckeMatrix:
    n: int
    matrix: np.ndarray  # on the cuspidal basis
    full: np.ndarray

    def tolist(self) -> list[list[int]]:
        return [[int(x) for x in row] for row in self.matrix]


def hecke_matrix(space: SymbolSpace, n: int, method: str = "recursion") -> HeckeMatrix:
    """Exact matrix of T_n on the cuspidal lattice (and on the full space)."""
    key = ("cusp-n", n, method)
    hit = _cache_get(space, key)
    if hit is not None:
        return hit
    full = hecke_full(space, n, method)
    cusp = restrict_to_cuspidal(space, full) if space.dim_cuspidal else np.zeros((0, 0), dtype=object)
    return _cache_put(space, key, HeckeMatrix(n, cusp, full))


def hecke_matrix_json(space: SymbolSpace, n: int, basis: str = "cuspidal") -> str:
    h = hecke_matrix(space, n)
    mat = h.matrix if basis == "cuspidal" else h.full
    return json.dumps(
        {
            "level": space.level,
            "weight": space.weight,
            "n": n,
            "basis": basis,
            "matrix": [[int(x) for x in row] for row in mat],
        }
    )


# coset route


def coset_representatives(q: int, level: int) -> list[tuple[int, int, int, int]]:
    reps = [(1, r, 0, q) for r in range(q)]
    if level % q:
        reps.append((q, 0, 0, 1))
    return reps


def hecke_apply_cosets(space: SymbolSpace, q: int, s: PathSymbol) -> np.ndarray:
    """``T_q`` applied to a path symbol through the coset representatives."""
    if not isprime(q):
        raise ValueError(f"{q} is not prime")
    out = np.zeros(space.dim_full, dtype=object)
    for g in coset_representatives(q, space.level):
        out = out + path_to_coords(space, transform_path(g, s))
    return out
