"""Hecke eigen-systems, central values, the Petersson fit and the Gram matrix.

Normalisation: ``a_f(n) = λ_f(n) n^((2k-1)/2)``, so ``|λ_f(q)| <= 2`` at primes
q not dividing the level.  ``L(f, s) = sum a_f(n) n^-s`` with completed form
``Λ(s) = (√p/2π)^s Γ(s) L(f, s) = η Λ(2k - s)``; ``η = (-1)^k ε_f``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.special import gamma, gammaincc
from sympy import factorint, primerange

from ..hecke import _cache_get, _cache_put, hecke_matrix, restrict_to_plus
from ..manin import SymbolSpace
from .kloosterman import kloosterman_many
from .special import NumericalError, bessel_j, g_k_eval, g_k_values, residue_constant

__all__ = [
    "InsufficientBoundError",
    "EigenSystem",
    "eigen_systems",
    "CentralValue",
    "default_cutoff",
    "central_value_sq",
    "AfeResult",
    "afe_central_value",
    "PeterssonFit",
    "petersson_rhs",
    "petersson_fit",
    "GramMatrix",
    "gram_matrix",
    "GramReport",
    "gram_rank",
    "BridgeReport",
    "nonvanishing_bridge",
]


class InsufficientBoundError(ValueError):
    """More Hecke eigenvalues are needed than the eigen-system carries."""

    def __init__(self, needed: int, have: int):
        super().__init__(f"coefficient bound {have} is too small; need B >= {needed}")
        self.needed = needed


@dataclass
class EigenSystem:
    level: int
    weight: int
    index: int
    lambdas: np.ndarray  # lambdas[n] = λ_f(n), n = 1..bound; lambdas[0] unused
    eigenvector: list[float]  # in the plus-lattice basis
    residuals: dict = field(default_factory=dict)
    epsilon: int | None = None
    omega: float | None = None

    @property
    def k(self) -> int:
        return self.weight // 2

    @property
    def bound(self) -> int:
        return len(self.lambdas) - 1

    def lam(self, n: int) -> float:
        if n > self.bound:
            raise InsufficientBoundError(n, self.bound)
        return float(self.lambdas[n])

    def a(self, n: int) -> float:
        return self.lam(n) * n ** ((self.weight - 1) / 2)

    def to_json(self, upto: int = 20) -> dict:
        return {
            "level": self.level,
            "weight": self.weight,
            "index": self.index,
            "bound": self.bound,
            "a": [self.a(n) for n in range(1, min(upto, self.bound) + 1)],
            "lambda": [self.lam(n) for n in range(1, min(upto, self.bound) + 1)],
            "epsilon": self.epsilon,
            "omega": self.omega,
            "residuals": self.residuals,
        }


def _plus_matrix(space: SymbolSpace, n: int, method: str = "recursion") -> np.ndarray:
    key = ("plus-float", n, method)
    hit = _cache_get(space, key)
    if hit is not None:
        return hit
    exact = restrict_to_plus(space, hecke_matrix(space, n, method).matrix)
    return _cache_put(space, key, np.array(exact, dtype=float))


def _fill_multiplicative(lam: np.ndarray, level: int) -> None:
    # lam[:, q] given at primes; extend to prime powers, then to all n
    bound = lam.shape[1] - 1
    for q in primerange(2, bound + 1):
        prev, cur, qe = np.ones(lam.shape[0]), lam[:, q].copy(), q
        while qe * q <= bound:
            nxt = lam[:, q] * cur - (prev if level % q else 0.0)
            qe *= q
            lam[:, qe] = nxt
            prev, cur = cur, nxt
    for n in range(2, bound + 1):
        fac = factorint(n)
        if len(fac) > 1:
            q, e = min(fac.items())
            lam[:, n] = lam[:, q**e] * lam[:, n // q**e]


def eigen_systems(space: SymbolSpace, bound: int, seed: int = 0, attempts: int = 6) -> list[EigenSystem]:
    """Hecke eigen-systems on the plus lattice, eigenvalues for n <= bound.

    A seeded random integer combination of T_q (q not dividing the level) is
    diagonalised; each T_q is then read off as ``(V^-1 T_q V)_ff``.
    """
    if space.dim_cuspidal == 0:
        raise ValueError("the cuspidal space is zero")
    if bound < 2:
        raise ValueError("bound must be at least 2")
    p, k = space.level, space.k
    dplus = space.dim_plus
    small = [q for q in primerange(2, 200) if p % q][:4]
    for attempt in range(attempts):
        rng = np.random.default_rng(seed + attempt)
        coeffs = rng.integers(1, 10, len(small)) * rng.choice([-1, 1], len(small))
        comb = sum(float(c) * _plus_matrix(space, q) for c, q in zip(coeffs, small))
        vals, vecs = np.linalg.eig(comb)
        scale = max(1.0, float(np.abs(vals).max()))
        if np.abs(vals.imag).max() > 1e-7 * scale:
            continue
        gaps = np.diff(np.sort(vals.real))
        if dplus > 1 and gaps.min() < 1e-6 * scale:
            continue
        break
    else:
        raise NumericalError(f"no separating Hecke combination after {attempts} attempts")
    V = vecs.real
    V = V / np.linalg.norm(V, axis=0)
    W = np.linalg.inv(V)
    lam = np.zeros((dplus, bound + 1))
    lam[:, 1] = 1.0
    off_diag = 0.0
    for q in primerange(2, bound + 1):
        m = W @ _plus_matrix(space, q) @ V
        d = np.diag(m).copy()
        off_diag = max(off_diag, float(np.abs(m - np.diag(d)).max()) / max(1.0, float(np.abs(d).max())))
        lam[:, q] = d / q ** ((2 * k - 1) / 2)
    _fill_multiplicative(lam, p)
    q0 = small[0]
    checks = {}
    if q0 * q0 <= bound:
        direct = np.diag(W @ _plus_matrix(space, q0 * q0, "heilbronn") @ V) / q0 ** (2 * k - 1)
        checks["recursion_residual"] = float(np.abs(direct - (lam[:, q0] ** 2 - 1)).max())
    deligne = max((float(np.abs(lam[:, q]).max()) for q in primerange(2, bound + 1) if p % q), default=0.0)
    order = np.lexsort(tuple(np.round(lam[:, q], 9) for q in reversed(small)))
    systems = []
    for idx, f in enumerate(order):
        res = {"off_diagonal": off_diag, "max_abs_lambda": deligne, "seed": seed + attempt}
        res.update(checks)
        systems.append(EigenSystem(p, space.weight, idx, lam[f].copy(), V[:, f].tolist(), res))
    if deligne > 2 + 1e-6:
        raise NumericalError(f"Ramanujan bound violated: max |λ(q)| = {deligne}")
    return systems


# central values


@dataclass(frozen=True)
class CentralValue:
    value: float
    cutoff: int
    tail_estimate: float


def _divisor_conv(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    # (a * b)(n) = sum_{lm = n} a(l) b(m), index 0 unused
    n = len(a) - 1
    out = np.zeros(n + 1)
    for l in range(1, n + 1):
        if a[l] == 0:
            continue
        m = np.arange(1, n // l + 1)
        out[l * m] += a[l] * b[m]
    return out


def default_cutoff(level: int, k: int, target: float = 1e-12) -> int:
    """Smallest ``N`` (on a 5% grid) with ``G_k(N/p) N log(N)^3 <= target``."""
    x = 1.0
    while True:
        n = math.ceil(x * level)
        if g_k_eval(k, x) * n * (math.log(n) + 1) ** 3 <= target * residue_constant(k):
            return n
        x *= 1.05


def central_value_sq(system: EigenSystem, cutoff: int | None = None) -> CentralValue:
    """``|L(f,k)|² = (2/Γ(k)²) sum_{l,m} G_k(lm/p) λ(l) λ(m)/√(lm)`` truncated at ``lm <= cutoff``."""
    p, k = system.level, system.k
    cutoff = default_cutoff(p, k) if cutoff is None else cutoff
    if cutoff > system.bound:
        raise InsufficientBoundError(cutoff, system.bound)
    lam = np.asarray(system.lambdas[: cutoff + 1], dtype=float)
    conv = _divisor_conv(lam, lam)
    n = np.arange(1, cutoff + 1)
    g = g_k_values(k, n / p)
    terms = g * conv[1:] / np.sqrt(n)
    value = 2.0 / residue_constant(k) * math.fsum(terms.tolist())
    # tail: |sum_{lm=n} λλ| <= d_4(n)
    hi = 4 * cutoff
    tau = np.zeros(hi + 1)
    tau[1:] = 1.0
    d4 = _divisor_conv(_divisor_conv(tau, tau), _divisor_conv(tau, tau))
    nt = np.arange(cutoff + 1, hi + 1)
    tail = 2.0 / residue_constant(k) * float(np.sum(g_k_values(k, nt / p) * d4[cutoff + 1 :] / np.sqrt(nt)))
    return CentralValue(float(value), cutoff, tail)


@dataclass(frozen=True)
class AfeResult:
    value: float  # L(f, k)
    eta: int
    epsilon: int
    discrepancy: float  # split-point mismatch for the chosen sign
    rejected_discrepancy: float
    eta_from_ap: int
    terms: int


def _afe_lambda(system: EigenSystem, s: float, y0: float, eta: int, terms: int) -> float:
    p, w = system.level, system.weight
    n = np.arange(1, terms + 1, dtype=float)
    a = system.lambdas[1 : terms + 1] * n ** ((w - 1) / 2)
    base = math.sqrt(p) / (2 * math.pi)
    x1 = 2 * math.pi * n * y0 / math.sqrt(p)
    x2 = 2 * math.pi * n / (y0 * math.sqrt(p))
    s2 = w - s
    first = a * (base / n) ** s * gamma(s) * gammaincc(s, x1)
    second = a * (base / n) ** s2 * gamma(s2) * gammaincc(s2, x2)
    return math.fsum(first.tolist()) + eta * math.fsum(second.tolist())


def afe_central_value(system: EigenSystem) -> AfeResult:
    """``L(f, k)`` from the smoothed functional equation, with the sign found numerically.

    Both signs are tried on ``Λ(k + 1/4)`` with split points 1 and 5/4; the
    true sign makes the two evaluations agree.
    """
    p, k = system.level, system.k
    terms = math.ceil(60 * 1.25 * math.sqrt(p) / (2 * math.pi)) + 1
    if terms > system.bound:
        raise InsufficientBoundError(terms, system.bound)
    s = k + 0.25
    disc = {}
    for eta in (1, -1):
        u = _afe_lambda(system, s, 1.0, eta, terms)
        v = _afe_lambda(system, s, 1.25, eta, terms)
        disc[eta] = abs(u - v) / max(abs(u), abs(v), 1e-300)
    eta = 1 if disc[1] < disc[-1] else -1
    if disc[eta] > 1e-8 or disc[-eta] < 1e-4:
        raise NumericalError(f"root number undetermined (discrepancies {disc[1]:.3g}, {disc[-1]:.3g})")
    n = np.arange(1, terms + 1, dtype=float)
    series = system.lambdas[1 : terms + 1] / np.sqrt(n) * gammaincc(k, 2 * math.pi * n / math.sqrt(p))
    value = (1 + eta) * math.fsum(series.tolist())
    # a_p = -w_p p^(k-1) and η = (-1)^k w_p
    w_p = -round(system.lam(p) * math.sqrt(p))
    return AfeResult(value, eta, (-1) ** k * eta, disc[eta], disc[-eta], (-1) ** k * w_p, terms)


# Petersson formula


@dataclass
class PeterssonFit:
    omega: list[float]
    residuals: list[float]
    pairs: list[tuple[int, int]]
    c_max: int
    max_residual: float
    consistent: bool
    warnings: list[str]

    def to_json(self) -> dict:
        return asdict(self)


def petersson_rhs(level: int, k: int, pairs, c_max: int) -> np.ndarray:
    """``δ_rs + 2π i^(2k) sum_{p | c <= c_max} S(r,s;c)/c J_(2k-1)(4π√(rs)/c)``."""
    r = np.array([a for a, _ in pairs], dtype=np.int64)
    s = np.array([b for _, b in pairs], dtype=np.int64)
    root = np.sqrt(r * s.astype(float))
    rows = []
    for c in range(level, c_max + 1, level):
        rows.append(kloosterman_many(r, s, c) / c * bessel_j(2 * k - 1, 4 * math.pi * root / c))
    acc = np.array([math.fsum(col) for col in np.array(rows).T]) if rows else np.zeros(len(pairs))
    return (r == s).astype(float) + 2 * math.pi * (-1) ** k * acc


def petersson_fit(systems: list[EigenSystem], pairs=None, c_max: int | None = None) -> PeterssonFit:
    """Least-squares harmonic weights from the truncated Petersson formula."""
    if not systems:
        raise ValueError("no eigen-systems")
    p, k = systems[0].level, systems[0].k
    if pairs is None:
        pairs = [(r, s) for r in range(1, 9) for s in range(1, 9)]
    pairs = [tuple(x) for x in pairs]
    if len(pairs) < len(systems):
        raise ValueError("need at least as many pairs as eigen-systems")
    c_max = 50 * p if c_max is None else c_max
    if c_max < p:
        raise ValueError("c_max must be at least the level")
    A = np.array([[f.lam(r) * f.lam(s) for f in systems] for r, s in pairs])
    b = petersson_rhs(p, k, pairs, c_max)
    omega, *_ = np.linalg.lstsq(A, b, rcond=None)
    res = A @ omega - b
    warnings = []
    consistent = bool(np.all(omega > 0))
    if not consistent:
        warnings.append("negative fitted weight")
    return PeterssonFit(
        omega.tolist(), res.tolist(), pairs, c_max, float(np.abs(res).max()), consistent, warnings
    )


# Gram matrix and the nonvanishing bridge


@dataclass
class GramMatrix:
    matrix: list[list[float]]
    rank: int
    singular_values: list[float]
    tol: float
    asymmetry: float
    min_eigenvalue: float


def gram_matrix(systems, omegas, central_values, D: int, tol: float = 1e-8) -> GramMatrix:
    """``a_ij = sum_f ω_f λ_f(i) λ_f(j) |L(f,k)|²`` for ``1 <= i, j <= D``."""
    lam = np.array([[f.lam(i) for i in range(1, D + 1)] for f in systems])
    wts = np.asarray(omegas, dtype=float) * np.asarray(central_values, dtype=float)
    a = (lam.T * wts) @ lam
    sv = np.linalg.svd(a, compute_uv=False)
    rank = int(np.sum(sv > tol * sv[0])) if sv[0] > 0 else 0
    return GramMatrix(
        a.tolist(),
        rank,
        sv.tolist(),
        tol,
        float(np.abs(a - a.T).max()),
        float(np.linalg.eigvalsh((a + a.T) / 2).min()),
    )


def _analytic_data(space: SymbolSpace, c_max: int | None, seed: int, pairs=None):
    p, k = space.level, space.k
    cutoff = default_cutoff(p, k)
    systems = eigen_systems(space, max(cutoff, 64), seed=seed)
    values = [central_value_sq(f, cutoff) for f in systems]
    if pairs is None:
        R = max(8, math.ceil(math.sqrt(2 * len(systems))))
        pairs = [(r, s) for r in range(1, R + 1) for s in range(1, R + 1)]
    fit = petersson_fit(systems, pairs, c_max)
    for f, w in zip(systems, fit.omega):
        f.omega = w
    return systems, values, fit


@dataclass
class GramReport:
    level: int
    weight: int
    D: int
    gram: GramMatrix
    exact_rank: int
    central_values: list[float]
    omega: list[float]

    @property
    def agree(self) -> bool:
        return self.gram.rank == self.exact_rank

    def to_json(self) -> dict:
        out = asdict(self)
        out["agree"] = self.agree
        return out


def gram_rank(
    space: SymbolSpace, D: int, tol: float = 1e-8, c_max: int | None = None, seed: int = 0
) -> GramReport:
    """Numeric rank of the Gram matrix next to the exact rank of ``T_1 e', ..., T_D e'``."""
    from ..experiments import independence_certificate

    systems, values, fit = _analytic_data(space, c_max, seed)
    g = gram_matrix(systems, fit.omega, [v.value for v in values], D, tol)
    exact = independence_certificate(space, D).rank
    return GramReport(space.level, space.weight, D, g, exact, [v.value for v in values], fit.omega)


@dataclass
class BridgeReport:
    level: int
    weight: int
    exact_rank: int
    nonvanishing: int
    central_values: list[float]
    afe_values: list[float]
    threshold: float

    @property
    def agree(self) -> bool:
        return self.exact_rank == self.nonvanishing

    def to_json(self) -> dict:
        out = asdict(self)
        out["agree"] = self.agree
        return out


def nonvanishing_bridge(space: SymbolSpace, threshold: float = 1e-8, seed: int = 0) -> BridgeReport:
    """Exact winding-orbit rank against the number of f with ``|L(f,k)|² > threshold``."""
    from ..algebra import winding_orbit_rank

    p, k = space.level, space.k
    cutoff = default_cutoff(p, k)
    systems = eigen_systems(space, max(cutoff, 64), seed=seed)
    values = [central_value_sq(f, cutoff).value for f in systems]
    afe = [afe_central_value(f).value for f in systems]
    exact = winding_orbit_rank(space).rank
    count = sum(1 for v in values if v > threshold)
    return BridgeReport(p, space.weight, exact, count, values, afe, threshold)
