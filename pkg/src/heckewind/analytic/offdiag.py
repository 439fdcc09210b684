"""Diagonal and Kloosterman parts of the quadratic form in ``alpha``.

With ``i = I d1``, ``j = J d2`` and ``l = L d1``, ``m = M d2``,

    Q(alpha) = sum alpha_i alpha_j (d1 d2)^(-1/2) sum_{L,M} G_k(L M d1 d2/p)/√(LM)
               * sum_f ω_f λ_f(IL) λ_f(JM),

and the Petersson formula splits the inner sum into ``δ(IL = JM)`` (giving
S_main) and the Kloosterman series (giving S_off).  Both are returned as
D x D matrices so any ``alpha`` is a single contraction.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from functools import lru_cache

import numpy as np
from sympy import factorint, isprime

from .kloosterman import _TABLE_LIMIT, divisor_count, euler_phi, kloosterman_many, mobius
from .special import bessel_j, g_k_eval, g_k_values, residue_constant

__all__ = ["SmainSoff", "smain_soff_eval", "smain_mobius_form", "weil_tail_factor"]


def weil_tail_factor(level: int, nu: int, M: int) -> float:
    """Upper bound for ``sum_{c = p m, m > M} τ(c) c^(-1/2-nu)``.

    Uses ``τ(pm) <= 2 τ(m)`` and partial summation against the explicit
    divisor-sum estimate ``|D(x) - x log x - (2γ-1) x| <= 0.961 √x`` (x >= 1).
    """
    s = nu + 0.5
    M = max(M, 1)
    c0 = 2 * np.euler_gamma - 1
    upper = s * M ** (1 - s) * (math.log(M) / (s - 1) + 1 / (s - 1) ** 2 + c0 / (s - 1))
    upper += s * 0.961 * M ** (0.5 - s) / (s - 0.5)
    lower = max(0.0, M * math.log(M) + c0 * M - 0.961 * math.sqrt(M)) * M ** (-s)
    return 2 * level ** (-s) * (upper - lower)


def _g_cut(k: int, rel: float = 1e-16) -> float:
    target = rel * residue_constant(k)
    x = 1.0
    while g_k_eval(k, x) > target:
        x *= 1.1
    return x


@dataclass
class SmainSoff:
    level: int
    k: int
    D: int
    alpha: list[float]
    s_main: float
    s_off: float
    tail_bound: float
    c_max: int
    x_cut: float
    main_matrix: list[list[float]]
    off_matrix: list[list[float]]
    s_main_mobius: float
    phi_y_norm: float
    warnings: list[str] = field(default_factory=list)

    @property
    def dominant(self) -> bool:
        return self.s_main > abs(self.s_off) + self.tail_bound

    def to_json(self) -> dict:
        out = asdict(self)
        out["dominant"] = self.dominant
        return out


def _entries(level: int, D: int, x_cut: float):
    # (i, j, d1 d2, L, M-array, I, J) for every L, M with L M d1 d2 <= level * x_cut
    rows = []
    for i in range(1, D + 1):
        for d1 in (d for d in range(1, i + 1) if i % d == 0):
            I = i // d1
            for j in range(1, D + 1):
                for d2 in (d for d in range(1, j + 1) if j % d == 0):
                    J = j // d2
                    n_max = int(level * x_cut / (d1 * d2))
                    for L in range(1, n_max + 1):
                        M = np.arange(1, n_max // L + 1)
                        rows.append((i, j, d1 * d2, L, M, I, J))
    return rows


def smain_mobius_form(level: int, k: int, alpha, x_cut: float | None = None) -> tuple[float, float]:
    """``S_main`` after the change of variables ``x_c = alpha_c/√c``, and ``sum φ(L) y_L²``.

    ``S_main = sum_L L sum_{U,V} τ(U) τ(V) x_UL x_VL sum_{T | L} μ(T)/T
    sum_A G_k(A² T² U V/p)/A`` with ``UL, VL <= D`` and
    ``y_L = sum_U τ(U) x_UL``.
    """
    alpha = [float(a) for a in alpha]
    D = len(alpha)
    x = [0.0] + [alpha[c - 1] / math.sqrt(c) for c in range(1, D + 1)]
    x_cut = _g_cut(k) if x_cut is None else x_cut
    total = []
    for L in range(1, D + 1):
        us = [U for U in range(1, D // L + 1)]
        inner = []
        for U in us:
            for V in us:
                coef = divisor_count(U) * divisor_count(V) * x[U * L] * x[V * L]
                if coef == 0:
                    continue
                tsum = []
                for T in (t for t in range(1, L + 1) if L % t == 0):
                    mu = mobius(T)
                    if mu == 0:
                        continue
                    amax = int(math.sqrt(x_cut * level / (T * T * U * V))) + 1
                    A = np.arange(1, amax + 1, dtype=float)
                    g = g_k_values(k, A * A * T * T * U * V / level)
                    tsum.append(mu / T * math.fsum((g / A).tolist()))
                inner.append(coef * math.fsum(tsum))
        total.append(L * math.fsum(inner))
    y = [math.fsum(divisor_count(U) * x[U * L] for U in range(1, D // L + 1)) for L in range(1, D + 1)]
    phi_y = math.fsum(euler_phi(L) * y[L - 1] ** 2 for L in range(1, D + 1))
    return math.fsum(total), phi_y


@dataclass(frozen=True)
class _Forms:
    main: np.ndarray
    off: np.ndarray
    tail: np.ndarray  # contracted with |alpha|
    g_tail: float  # multiplied by (sum |alpha|)^2
    x_cut: float
    skipped: int  # moduli bounded instead of evaluated


def _evaluable(c: int) -> bool:
    # exact evaluation is cheap unless c has a large prime-power factor q^e, e >= 2
    return all(e == 1 or q**e <= _TABLE_LIMIT for q, e in factorint(c).items())


@lru_cache(maxsize=32)
def _forms(level: int, k: int, D: int, c_max: int) -> _Forms:
    nu = 2 * k - 1
    x_cut = _g_cut(k)
    n_top = int(level * x_cut)
    g_all = np.concatenate([[0.0], g_k_values(k, np.arange(1, n_top + 1) / level)])
    ii, jj, ww, rr, ss, diag = [], [], [], [], [], []
    for i, j, dd, L, M, I, J in _entries(level, D, x_cut):
        w = g_all[L * M * dd] / math.sqrt(dd) / np.sqrt(L * M)
        ii.append(np.full(len(M), i - 1))
        jj.append(np.full(len(M), j - 1))
        ww.append(w)
        rr.append(np.full(len(M), I * L, dtype=np.int64))
        ss.append(J * M)
        diag.append(I * L == J * M)
    ii, jj, ww = np.concatenate(ii), np.concatenate(jj), np.concatenate(ww)
    rr, ss, diag = np.concatenate(rr), np.concatenate(ss).astype(np.int64), np.concatenate(diag)
    cell = ii * D + jj
    main = np.bincount(cell[diag], weights=ww[diag], minlength=D * D).reshape(D, D)

    keys, where = np.unique(np.stack([rr, ss], axis=1), axis=0, return_inverse=True)
    where = where.reshape(-1)
    ur, us = keys[:, 0], keys[:, 1]
    root = np.sqrt(ur.astype(float) * us.astype(float))
    # per-pair constant of the bound sqrt(gcd) τ(c) √c (2π√(rs)/c)^nu / nu!
    weil = np.sqrt(np.gcd(ur, us).astype(float)) * (2 * math.pi * root) ** nu / math.factorial(nu)
    kl = np.zeros(len(keys))
    skipped_mass = 0.0
    skipped = 0
    for c in range(level, c_max + 1, level):
        if _evaluable(c):
            kl += kloosterman_many(ur, us, c) / c * bessel_j(nu, 4 * math.pi * root / c)
        else:
            skipped += 1
            skipped_mass += divisor_count(c) * c ** (-0.5 - nu)
    sign = 2 * math.pi * (-1) ** k
    off = np.bincount(cell, weights=ww * kl[where] * sign, minlength=D * D).reshape(D, D)
    factor = weil_tail_factor(level, nu, c_max // level) + skipped_mass
    kb = 2 * math.pi * weil * factor
    tail = np.bincount(cell, weights=ww * kb[where], minlength=D * D).reshape(D, D)

    # dropped G_k terms: |sum_f ω λ λ| <= 1 + the Weil series from c = p
    n = np.arange(n_top + 1, 4 * n_top + 1)
    gt = g_k_values(k, n / level)
    taus = np.array([divisor_count(int(t)) for t in n], dtype=float)
    full_weil = 2 * math.pi * D * (2 * math.pi * D * np.sqrt(n)) ** nu / math.factorial(nu)
    full_weil *= weil_tail_factor(level, nu, 0) + 2 * level ** (-nu - 0.5)
    g_tail = float(np.sum(gt * taus * (1 + full_weil) / np.sqrt(n)))
    return _Forms(main, off, tail, g_tail, x_cut, skipped)


def smain_soff_eval(
    level: int,
    k: int,
    D: int,
    alpha,
    c_max: int | None = None,
) -> SmainSoff:
    """Evaluate ``S_main`` and ``S_off`` truncated at ``c <= c_max``, with a tail bound.

    The tail covers ``c > c_max`` (and any modulus with a prime-power factor
    above the table limit) through the Weil bound and
    ``|J_nu(x)| <= (x/2)^nu/nu!``, plus the terms dropped where
    ``G_k(LM d1 d2/p)`` is below 1e-16 of its maximum.
    """
    alpha = np.asarray([float(a) for a in alpha])
    if len(alpha) != D:
        raise ValueError("alpha must have length D")
    if level < 2 or not isprime(level):
        raise ValueError("level must be a prime")
    c_max = level * (level - 1) if c_max is None else int(c_max)
    if c_max < level:
        raise ValueError("c_max must be at least the level")
    forms = _forms(level, k, D, c_max)
    a_abs = np.abs(alpha)
    s_main = float(alpha @ forms.main @ alpha)
    s_off = float(alpha @ forms.off @ alpha)
    tail = float(a_abs @ forms.tail @ a_abs) + forms.g_tail * float(a_abs.sum()) ** 2
    if alpha.any():
        vk, phi_y = smain_mobius_form(level, k, alpha, forms.x_cut)
    else:
        vk, phi_y = 0.0, 0.0
    warnings = []
    if alpha.any() and tail >= abs(s_main):
        warnings.append(f"tail bound {tail:.3g} is not below S_main; raise c_max")
    if forms.skipped:
        warnings.append(f"{forms.skipped} moduli bounded by the Weil estimate instead of evaluated")
    return SmainSoff(
        level,
        k,
        D,
        alpha.tolist(),
        s_main,
        s_off,
        tail,
        c_max,
        forms.x_cut,
        forms.main.tolist(),
        forms.off.tolist(),
        vk,
        phi_y,
        warnings,
    )
