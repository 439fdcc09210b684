"""Path symbols P⊗{alpha, beta} and their quotient coordinates.

A path is cut into unimodular steps with continued-fraction convergents,
``{0, a/b} = sum_j g_j {0, oo}``, and each step ``P⊗{g0, g∞}`` is the Manin
symbol ``[g^-1 P, g]``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import NamedTuple

import numpy as np

from .manin import SymbolSpace, act, substitute

__all__ = [
    "Cusp",
    "INFINITY",
    "PathSymbol",
    "manin_steps",
    "manin_symbol_coords",
    "path_to_coords",
    "transform_path",
    "monomial",
    "WindingVector",
    "winding_vector",
]


@dataclass(frozen=True, order=True)
class Cusp:
    """A point of P^1(Q) as a reduced pair; infinity is ``1/0``."""

    num: int
    den: int

    def __post_init__(self):
        g = gcd(self.num, self.den)
        if g == 0:
            raise ValueError("0/0 is not a cusp")
        num, den = self.num // g, self.den // g
        if den < 0 or (den == 0 and num < 0):
            num, den = -num, -den
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    @classmethod
    def parse(cls, value) -> "Cusp":
        if isinstance(value, Cusp):
            return value
        if isinstance(value, tuple):
            return cls(*value)
        if isinstance(value, (int, Fraction)):
            f = Fraction(value)
            return cls(f.numerator, f.denominator)
        text = str(value).strip()
        if text in ("oo", "Infinity", "inf", "∞"):
            return INFINITY
        f = Fraction(text)
        return cls(f.numerator, f.denominator)

    @property
    def is_infinity(self) -> bool:
        return self.den == 0

    def __str__(self) -> str:
        if self.den == 0:
            return "oo"
        if self.den == 1:
            return str(self.num)
        return f"{self.num}/{self.den}"

    def moved(self, g) -> "Cusp":
        a, b, c, d = g
        return Cusp(a * self.num + b * self.den, c * self.num + d * self.den)


INFINITY = Cusp(1, 0)


@dataclass(frozen=True)
class PathSymbol:
    """``P⊗{alpha, beta}`` with ``coeffs[i]`` the coefficient of X^i Y^(n-i)."""

    coeffs: tuple[int, ...]
    alpha: Cusp
    beta: Cusp

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(int(x) for x in self.coeffs))
        object.__setattr__(self, "alpha", Cusp.parse(self.alpha))
        object.__setattr__(self, "beta", Cusp.parse(self.beta))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1


def monomial(n: int, i: int) -> tuple[int, ...]:
    return tuple(int(j == i) for j in range(n + 1))


def manin_steps(cusp: Cusp) -> list[tuple[int, int, int, int]]:
    """Matrices ``g_j`` in SL2(Z) with ``{0, cusp} = sum_j g_j {0, oo}``.

    Uses floor-based convergents with ``p_-2/q_-2 = 0/1`` and
    ``p_-1/q_-1 = 1/0``; step ``j`` joins consecutive convergents.
    """
    steps = [(1, 0, 0, 1)]
    if cusp.is_infinity:
        return steps
    x = Fraction(cusp.num, cusp.den)
    p2, q2, p1, q1 = 0, 1, 1, 0
    j = 0
    while True:
        a = x.numerator // x.denominator
        p, q = a * p1 + p2, a * q1 + q2
        s = -1 if j % 2 == 0 else 1  # (-1)^(j-1)
        steps.append((s * p, p1, s * q, q1))
        if x == a:
            break
        x = 1 / (x - a)
        p2, q2, p1, q1 = p1, q1, p, q
        j += 1
    return steps


def manin_symbol_coords(space: SymbolSpace, coeffs, g) -> np.ndarray:
    """Coordinates of ``[P, g] = g(P⊗{0, oo})`` for ``g`` in SL2(Z)."""
    c, d = g[2], g[3]
    pt = space.p1.index(c, d)
    w = space.degree + 1
    out = np.zeros(space.dim_full, dtype=object)
    for i, cf in enumerate(coeffs):
        if cf:
            out = out + int(cf) * space.gen_coords[pt * w + i].astype(object)
    return out


def _zero_to(space: SymbolSpace, coeffs, cusp: Cusp) -> np.ndarray:
    out = np.zeros(space.dim_full, dtype=object)
    for g in manin_steps(cusp):
        a, b, c, d = g
        # P⊗{g0, g∞} = [g^-1 P, g] with (g^-1 P)(X, Y) = P(aX + bY, cX + dY)
        out = out + manin_symbol_coords(space, substitute(list(coeffs), a, b, c, d), g)
    return out


def path_to_coords(space: SymbolSpace, s: PathSymbol) -> np.ndarray:
    """Full-space coordinates of a path symbol."""
    if s.degree != space.degree:
        raise ValueError(f"polynomial degree {s.degree} != {space.degree}")
    return _zero_to(space, s.coeffs, s.beta) - _zero_to(space, s.coeffs, s.alpha)


def transform_path(g, s: PathSymbol) -> PathSymbol:
    """``g(P⊗{alpha, beta}) = (gP)⊗{g alpha, g beta}``."""
    return PathSymbol(tuple(act(g, list(s.coeffs))), s.alpha.moved(g), s.beta.moved(g))


class WindingVector(NamedTuple):
    coords: np.ndarray
    boundary: list[int]

    @property
    def is_cuspidal(self) -> bool:
        return not any(self.boundary)


def winding_vector(space: SymbolSpace, m: int) -> WindingVector:
    """The class of ``X^m Y^(2k-2-m)⊗{0, oo}`` together with its boundary."""
    n = space.degree
    if not 0 <= m <= n:
        raise ValueError(f"exponent {m} outside 0..{n}")
    v = path_to_coords(space, PathSymbol(monomial(n, m), Cusp(0, 1), INFINITY))
    return WindingVector(v, space.boundary_of(v))
