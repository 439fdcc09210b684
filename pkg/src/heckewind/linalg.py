"""Exact linear algebra over Z, Q and prime fields.

Matrices are plain lists of rows.  Entries are Python ``int`` or
``fractions.Fraction`` over Q, and residues in ``[0, l)`` over F_l.
Every routine is a pure function and never mutates its arguments.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm
from typing import NamedTuple, Sequence

from sympy import isprime

__all__ = [
    "InvalidModulusError",
    "Echelon",
    "check_matrix",
    "echelon_rank",
    "rank",
    "hnf",
    "integer_kernel",
    "left_integer_kernel",
    "nullspace_mod",
    "det",
    "solve",
    "sparse_rref",
    "lattice_basis",
    "mat_mul",
    "mat_vec",
    "transpose",
    "primitive",
]

Number = int | Fraction


class InvalidModulusError(ValueError):
    """Raised when a prime-field routine is handed a non-prime modulus."""


class Echelon(NamedTuple):
    rank: int
    pivots: list[int]
    reduced: list[list]


def _ncols(m: Sequence[Sequence], ncols: int | None) -> int:
    if ncols is not None:
        return ncols
    return len(m[0]) if m else 0


def check_matrix(m: Sequence[Sequence], modulus: int | None = None) -> tuple[int, int]:
    """Validate shape and entry types; return ``(rows, cols)``."""
    rows = len(m)
    cols = len(m[0]) if rows else 0
    for row in m:
        if len(row) != cols:
            raise ValueError("ragged matrix")
        for x in row:
            if isinstance(x, Fraction):
                if modulus is not None:
                    raise ValueError("fraction entry in a prime-field matrix")
            elif not isinstance(x, int):
                raise TypeError(f"non-exact entry {x!r}")
            elif modulus is not None and not 0 <= x < modulus:
                raise ValueError(f"residue {x} not reduced mod {modulus}")
    return rows, cols


def _check_modulus(modulus: int) -> None:
    if modulus < 2 or not isprime(modulus):
        raise InvalidModulusError(f"modulus {modulus} is not prime")


def transpose(m: Sequence[Sequence], ncols: int | None = None) -> list[list]:
    n = _ncols(m, ncols)
    return [[row[j] for row in m] for j in range(n)]


def mat_mul(a: Sequence[Sequence], b: Sequence[Sequence]) -> list[list]:
    bt = transpose(b)
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


def mat_vec(a: Sequence[Sequence], v: Sequence) -> list:
    return [sum(x * y for x, y in zip(row, v)) for row in a]


def primitive(v: Sequence[Number]) -> list[int]:
    """Scale a rational vector to a primitive integer vector.

    The first nonzero entry is made positive so that the result is canonical.
    """
    den = 1
    for x in v:
        if isinstance(x, Fraction):
            den = lcm(den, x.denominator)
    ints = [int(x * den) for x in v]
    g = 0
    for x in ints:
        g = gcd(g, x)
    if g == 0:
        return ints
    lead = next(x for x in ints if x)
    if lead < 0:
        g = -g
    return [x // g for x in ints]


def _integer_rows(m: Sequence[Sequence[Number]]) -> list[list[int]]:
    out = []
    for row in m:
        den = 1
        for x in row:
            if isinstance(x, Fraction):
                den = lcm(den, x.denominator)
        out.append([int(x * den) for x in row])
    return out


def _rref_rational(m: Sequence[Sequence[Number]], n: int) -> Echelon:
    # Gauss-Jordan on integer rows; each row is kept primitive, so entries
    # stay bounded by the size of the minors involved.
    rows = _integer_rows(m)
    pivots: list[int] = []
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        prow = rows[r]
        pv = prow[c]
        for i in range(len(rows)):
            if i == r or not rows[i][c]:
                continue
            f = rows[i][c]
            row = [pv * x - f * y for x, y in zip(rows[i], prow)]
            g = 0
            for x in row:
                g = gcd(g, x)
            rows[i] = [x // g for x in row] if g > 1 else row
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    reduced = []
    for i, c in enumerate(pivots):
        pv = rows[i][c]
        reduced.append([Fraction(x, pv) if x % pv else x // pv for x in rows[i]])
    return Echelon(len(pivots), pivots, reduced)


def _rref_mod(m: Sequence[Sequence[int]], n: int, l: int) -> Echelon:
    rows = [[x % l for x in row] for row in m]
    pivots: list[int] = []
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = pow(rows[r][c], -1, l)
        rows[r] = [(x * inv) % l for x in rows[r]]
        prow = rows[r]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [(x - f * y) % l for x, y in zip(rows[i], prow)]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return Echelon(len(pivots), pivots, rows[: len(pivots)])


def echelon_rank(
    m: Sequence[Sequence[Number]], modulus: int | None = None, ncols: int | None = None
) -> Echelon:
    """Reduced row echelon form over Q (``modulus=None``) or F_l.

    Pivots are chosen as the first nonzero entry in column order, so the
    output is deterministic.  Integer input is reduced mod ``l`` first.
    """
    n = _ncols(m, ncols)
    if modulus is None:
        return _rref_rational(m, n)
    _check_modulus(modulus)
    for row in m:
        if any(isinstance(x, Fraction) and x.denominator % modulus == 0 for x in row):
            raise ValueError(f"denominator divisible by {modulus}")
    ints = [
        [(x.numerator * pow(x.denominator, -1, modulus)) if isinstance(x, Fraction) else x for x in row]
        for row in m
    ]
    return _rref_mod(ints, n, modulus)


def rank(m: Sequence[Sequence[Number]], modulus: int | None = None) -> int:
    return echelon_rank(m, modulus).rank


def nullspace_mod(m: Sequence[Sequence[int]], l: int, ncols: int | None = None) -> list[list[int]]:
    """Basis of the right kernel of ``m`` over F_l."""
    n = _ncols(m, ncols)
    ech = echelon_rank(m, l, ncols=n)
    free = [j for j in range(n) if j not in set(ech.pivots)]
    basis = []
    for f in free:
        v = [0] * n
        v[f] = 1
        for row, p in zip(ech.reduced, ech.pivots):
            v[p] = (-row[f]) % l
        basis.append(v)
    return basis


def hnf(m: Sequence[Sequence[int]], ncols: int | None = None, transform: bool = False):
    """Row Hermite normal form ``H = U m`` with ``U`` unimodular.

    ``H`` is upper echelon with positive pivots and entries above each pivot
    reduced into ``[0, pivot)``.  Zero rows are kept at the bottom.  Returns
    ``(H, U)`` when ``transform`` is set, else ``H`` without its zero rows.
    """
    n = _ncols(m, ncols)
    rows = [list(r) for r in m]
    nrows = len(rows)
    u = [[int(i == j) for j in range(nrows)] for i in range(nrows)] if transform else None
    r = 0
    for c in range(n):
        if r == nrows:
            break
        # Euclid on the column, always pivoting on the smallest entry; this
        # keeps the transform entries small compared with pairwise xgcd steps
        while True:
            nz = [i for i in range(r, nrows) if rows[i][c]]
            if not nz:
                break
            i = min(nz, key=lambda t: (abs(rows[t][c]), t))
            if i != r:
                rows[r], rows[i] = rows[i], rows[r]
                if u is not None:
                    u[r], u[i] = u[i], u[r]
            a = rows[r][c]
            done = True
            for i in nz:
                if i == r:
                    continue
                b = rows[i][c]
                if not b:
                    continue
                q = b // a
                rows[i] = [y - q * x for x, y in zip(rows[r], rows[i])]
                if u is not None:
                    u[i] = [y - q * x for x, y in zip(u[r], u[i])]
                if rows[i][c]:
                    done = False
            if done:
                break
        if not rows[r][c]:
            continue
        if rows[r][c] < 0:
            rows[r] = [-x for x in rows[r]]
            if u is not None:
                u[r] = [-x for x in u[r]]
        pv = rows[r][c]
        for i in range(r):
            q = rows[i][c] // pv
            if q:
                rows[i] = [s - q * t for s, t in zip(rows[i], rows[r])]
                if u is not None:
                    u[i] = [s - q * t for s, t in zip(u[i], u[r])]
        r += 1
    if transform:
        return rows, u
    return [row for row in rows if any(row)]


def left_integer_kernel(m: Sequence[Sequence[int]], ncols: int | None = None) -> list[list[int]]:
    """Z-basis (in Hermite form) of ``{x in Z^rows : x m = 0}``."""
    n = _ncols(m, ncols)
    if not m:
        return []
    h, u = hnf(m, ncols=n, transform=True)
    kernel = [u[i] for i, row in enumerate(h) if not any(row)]
    if not kernel:
        return []
    return hnf(kernel, ncols=len(m))


def integer_kernel(m: Sequence[Sequence[int]], ncols: int | None = None) -> list[list[int]]:
    """Z-basis of ``ker(m) ∩ Z^cols``, computed from the HNF of the transpose.

    Basis vectors of a saturated lattice are primitive; the basis is returned
    in Hermite form so it is reproducible.
    """
    n = _ncols(m, ncols)
    if n == 0:
        return []
    if not m:
        return [[int(i == j) for j in range(n)] for i in range(n)]
    for row in m:
        if any(isinstance(x, Fraction) for x in row):
            raise TypeError("integer_kernel needs integer entries")
    return left_integer_kernel(transpose(m, n), ncols=len(m))


def det(m: Sequence[Sequence[Number]], modulus: int | None = None) -> Number:
    """Determinant by Bareiss elimination (or plain elimination mod ``l``)."""
    n = len(m)
    if n == 0:
        return 1
    if modulus is not None:
        _check_modulus(modulus)
        a = [[x % modulus for x in row] for row in m]
        d = 1
        for c in range(n):
            piv = next((i for i in range(c, n) if a[i][c]), None)
            if piv is None:
                return 0
            if piv != c:
                a[c], a[piv] = a[piv], a[c]
                d = -d
            d = d * a[c][c] % modulus
            inv = pow(a[c][c], -1, modulus)
            for i in range(c + 1, n):
                f = a[i][c] * inv % modulus
                if f:
                    a[i] = [(x - f * y) % modulus for x, y in zip(a[i], a[c])]
        return d % modulus
    den = 1
    for row in m:
        for x in row:
            if isinstance(x, Fraction):
                den = lcm(den, x.denominator)
    a = [[int(x * den) for x in row] for row in m]
    sign, prev = 1, 1
    for c in range(n - 1):
        piv = next((i for i in range(c, n) if a[i][c]), None)
        if piv is None:
            return 0
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            sign = -sign
        for i in range(c + 1, n):
            for j in range(c + 1, n):
                a[i][j] = (a[i][j] * a[c][c] - a[i][c] * a[c][j]) // prev
        prev = a[c][c]
    value = Fraction(sign * a[n - 1][n - 1], den**n)
    return value.numerator if value.denominator == 1 else value


def solve(a: Sequence[Sequence[Number]], b: Sequence[Sequence[Number]]) -> list[list[Fraction]] | None:
    """Solve ``a x = b`` exactly for ``x`` (columns of ``b`` are right-hand sides).

    Returns one solution, or ``None`` when the system is inconsistent.
    """
    n = len(a[0]) if a else 0
    k = len(b[0]) if b else 0
    aug = [list(ra) + list(rb) for ra, rb in zip(a, b)]
    ech = echelon_rank(aug, ncols=n + k)
    if any(p >= n for p in ech.pivots):
        return None
    x = [[Fraction(0)] * k for _ in range(n)]
    for row, p in zip(ech.reduced, ech.pivots):
        x[p] = [Fraction(v) for v in row[n:]]
    return x


def sparse_rref(rows: list[dict[int, int]]) -> dict[int, dict[int, Fraction]]:
    """Reduced echelon form of a sparse integer matrix.

    Rows are dicts ``{column: value}``.  Elimination is fraction-free with
    content removal; the pivot of each row is its smallest column.  Returns
    ``{pivot_column: row}`` with the pivot entry normalized to 1.
    """
    piv: dict[int, dict[int, int]] = {}
    for raw in rows:
        r = {c: v for c, v in raw.items() if v}
        while r:
            hit = [c for c in r if c in piv]
            if not hit:
                break
            c = min(hit)
            p = piv[c]
            a, b = p[c], r[c]
            g = gcd(a, b)
            a, b = a // g, b // g
            new = {col: a * v for col, v in r.items()}
            for col, v in p.items():
                nv = new.get(col, 0) - b * v
                if nv:
                    new[col] = nv
                else:
                    new.pop(col, None)
            r = new
        if not r:
            continue
        g = 0
        for v in r.values():
            g = gcd(g, v)
        c0 = min(r)
        if r[c0] < 0:
            g = -g
        piv[c0] = {c: v // g for c, v in r.items()}
    # back substitution, largest pivot first
    order = sorted(piv, reverse=True)
    done: dict[int, dict[int, Fraction]] = {}
    for c in order:
        row = piv[c]
        pv = row[c]
        out = {col: Fraction(v, pv) for col, v in row.items()}
        for col in [x for x in out if x != c and x in done]:
            f = out.pop(col)
            for cc, vv in done[col].items():
                if cc == col:
                    continue
                nv = out.get(cc, 0) - f * vv
                if nv:
                    out[cc] = nv
                else:
                    out.pop(cc, None)
        done[c] = out
    return done


def lattice_basis(vectors: Sequence[Sequence[Number]], n: int) -> list[list[Fraction]]:
    """Z-basis (rows, Hermite form after clearing denominators) of the span."""
    den = 1
    for v in vectors:
        for x in v:
            if isinstance(x, Fraction):
                den = lcm(den, x.denominator)
    ints = [[int(x * den) for x in v] for v in vectors]
    h = hnf(ints, ncols=n)
    return [[Fraction(x, den) for x in row] for row in h]
