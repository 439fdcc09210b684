"""J-Bessel functions and the weight function G_k.

``G_k(x) = (1/2πi) ∫_(σ) Γ(k+t)² (2π)^(-2t) x^(-t) dt/t`` is evaluated by the
trapezoid rule on a vertical line.  The rule converges geometrically for
integrands analytic in a strip around the line, so the step is halved until
two successive sums agree.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np
from scipy.special import loggamma

__all__ = [
    "NumericalError",
    "bessel_j",
    "g_k_eval",
    "g_k_values",
    "default_abscissa",
    "residue_constant",
    "sum_gk",
    "SlopeFit",
    "sum_gk_slope",
    "DecayFit",
    "fit_gk_decay",
]


class NumericalError(ArithmeticError):
    """A floating-point evaluation could not reach its stated accuracy."""


# J-Bessel


def _bessel_series(nu: int, x: np.ndarray) -> np.ndarray:
    # sum_l (-1)^l (x/2)^(2l+nu) / (l! (l+nu)!), terms shrink geometrically once l > x/2
    half = x / 2.0
    term = np.exp(nu * np.log(np.where(half > 0, half, 1.0)) - math.lgamma(nu + 1))
    term = np.where(half > 0, term, 0.0 if nu else 1.0)
    total = term.copy()
    q = -(half * half)
    l = 0
    while True:
        l += 1
        term = term * q / (l * (l + nu))
        total += term
        if np.all(np.abs(term) <= 1e-17 * np.maximum(np.abs(total), 1e-300)) and l > np.max(half, initial=0):
            return total


def _bessel_miller(nu: int, x: np.ndarray) -> np.ndarray:
    # downward recurrence J_{n-1} = (2n/x) J_n - J_{n+1}, normalised by J_0 + 2 sum J_2m = 1
    xmax = float(np.max(x))
    start = int(max(nu, xmax) + 30 + 8 * max(nu, xmax) ** (1 / 3))
    start += start % 2
    j_next = np.zeros_like(x)
    j_cur = np.full_like(x, 1e-300)
    norm = np.zeros_like(x)
    want = np.zeros_like(x)
    for n in range(start, 0, -1):
        j_prev = (2.0 * n / x) * j_cur - j_next
        j_next, j_cur = j_cur, j_prev
        m = n - 1
        if m == nu:
            want = j_cur.copy()
        if m % 2 == 0 and m > 0:
            norm += 2.0 * j_cur
        big = np.abs(j_cur) > 1e250
        if big.any():
            scale = np.where(big, 1e-250, 1.0)
            j_cur, j_next, norm, want = j_cur * scale, j_next * scale, norm * scale, want * scale
    norm += j_cur
    return want / norm


def _bessel_hankel(nu: int, x: np.ndarray) -> np.ndarray:
    mu = 4.0 * nu * nu
    omega = x - nu * math.pi / 2 - math.pi / 4
    p = np.ones_like(x)
    q = np.zeros_like(x)
    term = np.ones_like(x)
    last = np.full_like(x, np.inf)
    active = np.ones_like(x, dtype=bool)
    k = 0
    while active.any() and k < 200:
        k += 1
        term = term * (mu - (2 * k - 1) ** 2) / (k * 8.0 * x)
        mag = np.abs(term)
        # asymptotic series: stop at the smallest term
        active &= mag < last
        active &= mag > 1e-18
        contrib = np.where(active, term, 0.0)
        sign = (-1) ** (k // 2)
        if k % 2:
            q += sign * contrib
        else:
            p += sign * contrib
        last = np.where(active, mag, last)
    return np.sqrt(2.0 / (math.pi * x)) * (p * np.cos(omega) - q * np.sin(omega))


def bessel_j(order: int, x):
    """``J_order(x)`` for integer order >= 0 and real x >= 0 (scalar or array).

    Power series for ``x <= 2 sqrt(order + 1)``, Miller's backward recurrence
    in the middle range and Hankel's expansion for ``x >= max(40, order^2)``.
    """
    if order < 0 or int(order) != order:
        raise ValueError("order must be a nonnegative integer")
    nu = int(order)
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0) or not np.all(np.isfinite(arr)):
        raise ValueError("x must be finite and nonnegative")
    flat = arr.reshape(-1)
    out = np.empty_like(flat)
    lo = flat <= 2.0 * math.sqrt(nu + 1)
    hi = flat >= max(40.0, nu * nu)
    mid = ~(lo | hi)
    if lo.any():
        out[lo] = _bessel_series(nu, flat[lo])
    if mid.any():
        out[mid] = _bessel_miller(nu, flat[mid])
    if hi.any():
        out[hi] = _bessel_hankel(nu, flat[hi])
    if arr.ndim == 0:
        return float(out[0])
    return out.reshape(arr.shape)


# G_k


def residue_constant(k: int) -> float:
    """``Γ(k)²``, the residue at t = 0 and the limit of G_k at 0."""
    return math.exp(2 * math.lgamma(k))


def default_abscissa(k: int, x: float) -> float:
    """Line used by :func:`g_k_eval`: left of 0 for small x, near the saddle point otherwise."""
    if x < 0.1:
        return -min(0.5, k / 2)
    return max(0.75, math.floor(2 * (2 * math.pi * math.sqrt(x) - k)) / 2)


def _integrand(k: int, sigma: float, u: np.ndarray, logy: np.ndarray) -> np.ndarray:
    # Re of Γ(k+t)² y^(-t) / t on t = σ + iu, rows indexed by y = 4π² x
    t = sigma + 1j * u
    lg = 2.0 * loggamma(k + t)
    expo = lg[None, :] - np.outer(logy, t)
    if np.max(expo.real) > 700:
        raise NumericalError(f"integrand overflows at k={k}")
    return (np.exp(expo) / t[None, :]).real


@lru_cache(maxsize=4096)
def _cutoff(k: int, sigma: float) -> float:
    # |Γ(k+σ+iu)|² / |t| has dropped by 1e-18 relative to its peak
    u = np.arange(0.0, 4000.0, 0.5)
    mag = 2.0 * loggamma(k + sigma + 1j * u).real - np.log(np.abs(sigma + 1j * u))
    peak = mag.max()
    below = np.nonzero(mag < peak - 41.5)[0]
    below = below[below > np.argmax(mag)]
    if len(below) == 0:
        raise NumericalError("integrand does not decay on the search window")
    return float(u[below[0]])


def _line_integral(k: int, xs: np.ndarray, sigma: float) -> np.ndarray:
    if sigma == 0 or sigma <= -k:
        raise ValueError(f"abscissa {sigma} meets a pole")
    dist = sigma if sigma > 0 else min(-sigma, k + sigma)
    U = _cutoff(k, sigma)
    logy = np.log(4 * math.pi**2 * xs)
    h = min(0.5, dist / 2)
    u = np.arange(0.0, U + h, h)
    vals = _integrand(k, sigma, u, logy)
    total = (vals[:, 0] / 2 + vals[:, 1:].sum(axis=1)) * h
    for _ in range(12):
        mid = np.arange(h / 2, U + h, h)
        add = _integrand(k, sigma, mid, logy).sum(axis=1)
        new = total / 2 + add * (h / 2)
        h /= 2
        diff = np.abs(new - total)
        envelope = np.exp(2 * loggamma(k + sigma).real - sigma * logy)
        if sigma < 0:
            envelope = envelope + math.pi * residue_constant(k)
        done = np.all((diff <= 1e-14 * np.abs(new)) | (diff <= 1e-16 * envelope))
        total = new
        if done:
            break
    else:
        raise NumericalError("trapezoid rule did not converge")
    out = total / math.pi
    if sigma < 0:
        out = out + residue_constant(k)
    return out


def g_k_eval(k: int, x: float, abscissa: float | None = None) -> float:
    """``G_k(x)`` by quadrature on ``Re t = abscissa`` (residue added when it is negative)."""
    if k < 1:
        raise ValueError("k must be at least 1")
    if not x > 0:
        raise ValueError("x must be positive")
    sigma = default_abscissa(k, x) if abscissa is None else float(abscissa)
    return float(_line_integral(k, np.array([float(x)]), sigma)[0])


@lru_cache(maxsize=None)
def _g_cached(k: int, x: float) -> float:
    return g_k_eval(k, x)


def g_k_values(k: int, xs) -> np.ndarray:
    """Vector of ``G_k`` values; points sharing a default abscissa are batched."""
    arr = np.asarray(xs, dtype=float).reshape(-1)
    out = np.empty_like(arr)
    groups: dict[float, list[int]] = {}
    for i, x in enumerate(arr):
        if not x > 0:
            raise ValueError("x must be positive")
        groups.setdefault(default_abscissa(k, x), []).append(i)
    for sigma, idx in sorted(groups.items()):
        out[idx] = _line_integral(k, arr[idx], sigma)
    return out


def _g_tail_point(k: int, rel: float = 1e-17) -> float:
    # first x (on a coarse grid) beyond which G_k < rel * Γ(k)²
    x = 1.0
    target = rel * residue_constant(k)
    while g_k_eval(k, x) > target:
        x *= 1.25
    return x


def sum_gk(k: int, X: float) -> tuple[float, int]:
    """``sum_A G_k(A²/X)/A`` and the number of terms kept."""
    xmax = _g_tail_point(k)
    amax = int(math.sqrt(xmax * X)) + 1
    A = np.arange(1, amax + 1, dtype=float)
    vals = g_k_values(k, A * A / X) / A
    return math.fsum(vals.tolist()), amax


class SlopeFit(tuple):
    __slots__ = ()
    _fields = ("slope", "intercept", "predicted_slope", "predicted_intercept", "values")

    def __new__(cls, slope, intercept, predicted_slope, predicted_intercept, values):
        return tuple.__new__(cls, (slope, intercept, predicted_slope, predicted_intercept, values))

    slope = property(lambda self: self[0])
    intercept = property(lambda self: self[1])
    predicted_slope = property(lambda self: self[2])
    predicted_intercept = property(lambda self: self[3])
    values = property(lambda self: self[4])

    def relative_error(self) -> float:
        return abs(self.slope - self.predicted_slope) / self.predicted_slope


def sum_gk_slope(k: int, grid) -> SlopeFit:
    """Least-squares line of ``sum_A G_k(A²/X)/A`` against ``log X``.

    The predicted slope is ``Γ(k)²/2``; the predicted intercept,
    ``Γ(k)² (ψ(k) + γ - log 2π)``, comes from the double pole at t = 0.
    """
    from scipy.special import digamma

    X = np.asarray(sorted(grid), dtype=float)
    if X.size < 2 or X[0] < 10:
        raise ValueError("need at least two grid points, all >= 10")
    vals = np.array([sum_gk(k, x)[0] for x in X])
    slope, intercept = np.polyfit(np.log(X), vals, 1)
    g2 = residue_constant(k)
    c0 = g2 * (digamma(k) + np.euler_gamma - math.log(2 * math.pi))
    return SlopeFit(float(slope), float(intercept), g2 / 2, float(c0), vals.tolist())


class DecayFit(tuple):
    __slots__ = ()

    def __new__(cls, c, log_C, xs, values):
        return tuple.__new__(cls, (c, log_C, xs, values))

    c = property(lambda self: self[0])
    log_C = property(lambda self: self[1])
    xs = property(lambda self: self[2])
    values = property(lambda self: self[3])


def fit_gk_decay(k: int, lo: float = 1.0, hi: float = 400.0, points: int = 40) -> DecayFit:
    """Fit ``log G_k(x) <= log C - c sqrt(x)`` on [lo, hi].

    ``c`` is the least-squares slope; ``log C`` is then raised until the line
    lies above every sample.
    """
    xs = np.linspace(math.sqrt(lo), math.sqrt(hi), points) ** 2
    g = g_k_values(k, xs)
    if np.any(g <= 0):
        raise NumericalError("nonpositive G_k sample")
    logs = np.log(g)
    slope, _ = np.polyfit(np.sqrt(xs), logs, 1)
    c = -float(slope)
    log_C = float(np.max(logs + c * np.sqrt(xs)))
    return DecayFit(c, log_C, xs.tolist(), g.tolist())
