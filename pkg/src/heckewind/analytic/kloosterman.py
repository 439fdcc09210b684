"""Kloosterman sums ``S(r, s; c) = sum_{(a,c)=1} e((a r + a' s)/c)``, a a' = 1 mod c.

The sum is real but generally irrational (S(1, 1; 5) = (3 - √5)/2),
so the exact form is kept as a cyclotomic integer: a count of the terms
landing on each exponent of ζ_c.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import sympy

__all__ = [
    "kloosterman",
    "KloostermanValue",
    "kloosterman_exact",
    "kloosterman_many",
    "weil_bound",
    "divisor_count",
    "euler_phi",
    "mobius",
]

_TABLE_LIMIT = 1000  # full (r, s) tables for prime powers up to this size


def divisor_count(n: int) -> int:
    return int(sympy.divisor_count(n))


def euler_phi(n: int) -> int:
    return int(sympy.totient(n))


def mobius(n: int) -> int:
    return int(sympy.mobius(n))


@lru_cache(maxsize=4096)
def _units(c: int) -> tuple[np.ndarray, np.ndarray]:
    a = np.array([x for x in range(c) if math.gcd(x, c) == 1] or [0], dtype=np.int64)
    inv = np.array([pow(int(x), -1, c) if c > 1 else 0 for x in a], dtype=np.int64)
    return a, inv


def kloosterman(r: int, s: int, c: int) -> float:
    """Direct evaluation with a fixed summation order (``math.fsum``)."""
    if c < 1:
        raise ValueError("c must be positive")
    a, inv = _units(c)
    phase = (a * (r % c) + inv * (s % c)) % c
    return math.fsum(np.cos(2 * math.pi * phase / c).tolist())


@dataclass(frozen=True)
class KloostermanValue:
    modulus: int
    counts: tuple[int, ...]  # counts[j] = number of terms equal to ζ_c^j

    @property
    def value(self) -> float:
        c = self.modulus
        return math.fsum(n * math.cos(2 * math.pi * j / c) for j, n in enumerate(self.counts) if n)

    @property
    def integer(self) -> int | None:
        """The sum as an integer when it is rational, else None."""
        c = self.modulus
        if c == 1:
            return sum(self.counts)
        x = sympy.Symbol("x")
        poly = sympy.Poly(list(reversed(self.counts)), x)
        rem = poly.rem(sympy.Poly(sympy.cyclotomic_poly(c, x), x))
        if rem.degree() <= 0:
            return int(rem.as_expr())
        return None

    def __eq__(self, other):
        if not isinstance(other, KloostermanValue) or other.modulus != self.modulus:
            return NotImplemented
        diff = [a - b for a, b in zip(self.counts, other.counts)]
        x = sympy.Symbol("x")
        rem = sympy.Poly(list(reversed(diff)), x).rem(sympy.Poly(sympy.cyclotomic_poly(self.modulus, x), x))
        return rem.is_zero

    __hash__ = None


def kloosterman_exact(r: int, s: int, c: int) -> KloostermanValue:
    if c < 1:
        raise ValueError("c must be positive")
    a, inv = _units(c)
    phase = (a * (r % c) + inv * (s % c)) % c
    counts = np.bincount(phase, minlength=c)
    return KloostermanValue(c, tuple(int(n) for n in counts))


def weil_bound(r: int, s: int, c: int) -> float:
    return math.sqrt(math.gcd(math.gcd(r, s), c)) * divisor_count(c) * math.sqrt(c)


@lru_cache(maxsize=256)
def _prime_table(q: int) -> np.ndarray:
    # S(1, n; q) for n mod q via one FFT: sum over b of e(b'/q) e(b n/q)
    x = np.zeros(q, dtype=complex)
    a, inv = _units(q)
    x[a] = np.exp(2j * math.pi * inv / q)
    return (np.fft.ifft(x) * q).real


@lru_cache(maxsize=256)
def _full_table(Q: int) -> np.ndarray:
    a, inv = _units(Q)
    res = np.arange(Q)
    e1 = np.exp(2j * math.pi * np.outer(res, a) / Q)
    e2 = np.exp(2j * math.pi * np.outer(res, inv) / Q)
    return (e1 @ e2.T).real


def _prime_power_values(r: np.ndarray, s: np.ndarray, q: int, e: int) -> np.ndarray:
    Q = q**e
    if e == 1 and Q > _TABLE_LIMIT:
        both = (r % q == 0) & (s % q == 0)
        return np.where(both, float(q - 1), _prime_table(q)[(r * s) % q])
    if Q <= _TABLE_LIMIT:
        return _full_table(Q)[r, s]
    a, inv = _units(Q)
    pairs, where = np.unique(np.stack([r, s], axis=1), axis=0, return_inverse=True)
    vals = np.array([np.cos(2 * math.pi * ((a * x + inv * y) % Q) / Q).sum() for x, y in pairs])
    return vals[where.reshape(-1)]


def kloosterman_many(r, s, c: int) -> np.ndarray:
    """``S(r_i, s_i; c)`` for integer arrays r, s by twisted multiplicativity.

    ``S(r, s; c1 c2) = S(r c2', s c2'; c1) S(r c1', s c1'; c2)`` with
    ``c2 c2' = 1 mod c1`` and ``c1 c1' = 1 mod c2``.
    """
    r = np.asarray(r, dtype=np.int64)
    s = np.asarray(s, dtype=np.int64)
    out = np.ones(r.shape, dtype=float)
    if c == 1:
        return out
    for q, e in sorted(sympy.factorint(c).items()):
        Q = q**e
        t = pow(c // Q, -1, Q)
        out *= _prime_power_values((r * t) % Q, (s * t) % Q, q, e)
    return out
