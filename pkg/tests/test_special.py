import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, special

from heckewind.analytic.special import (
    bessel_j,
    default_abscissa,
    fit_gk_decay,
    g_k_eval,
    g_k_values,
    residue_constant,
    sum_gk,
)


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 15), st.floats(0, 400, allow_nan=False))
def test_bessel_matches_scipy(nu, x):
    ours, ref = bessel_j(nu, x), special.jv(nu, x)
    assert abs(ours - ref) <= 1e-12 * max(abs(ref), 1e-3) + 2e-15


def test_bessel_vector_and_edges():
    xs = np.array([0.0, 1e-8, 3.0, 55.0, 1e4])
    assert np.allclose(bessel_j(1, xs), special.jv(1, xs), rtol=1e-12, atol=1e-15)
    assert bessel_j(0, 0.0) == 1.0 and bessel_j(3, 0.0) == 0.0
    with pytest.raises(ValueError):
        bessel_j(-1, 1.0)
    with pytest.raises(ValueError):
        bessel_j(1, -2.0)


def g_oracle(k, x):
    # G_k(x) = 4 ∫_{2π√x}^∞ v^(2k-1) K_0(2v) dv
    lo = 2 * math.pi * math.sqrt(x)
    pts = np.linspace(lo, lo + 40, 9)
    total = sum(integrate.quad(lambda v: v ** (2 * k - 1) * special.k0(2 * v), a, b, epsabs=0, epsrel=1e-13)[0]
                for a, b in zip(pts[:-1], pts[1:]))
    total += integrate.quad(lambda v: v ** (2 * k - 1) * special.k0(2 * v), pts[-1], np.inf)[0]
    return 4 * total


@pytest.mark.parametrize("k", [1, 2, 3])
@pytest.mark.parametrize("x", [1e-4, 0.05, 0.3, 1.0, 4.0, 25.0, 100.0])
def test_g_matches_integral_representation(k, x):
    ref = g_oracle(k, x)
    assert abs(g_k_eval(k, x) - ref) <= 1e-8 * ref


@pytest.mark.parametrize("k", [1, 2, 3])
def test_g_limits(k):
    assert abs(g_k_eval(k, 1e-9) - residue_constant(k)) < 1e-3 * residue_constant(k)
    xs = np.linspace(0.1, 50, 30)
    g = g_k_values(k, xs)
    assert np.all(np.diff(g) < 0)
    assert np.allclose(g, [g_k_eval(k, x) for x in xs], rtol=1e-13, atol=0)


@pytest.mark.parametrize("k", [1, 2, 3])
@pytest.mark.parametrize("x", [0.05, 1.0, 5.0, 30.0, 200.0])
def test_abscissa_independence(k, x):
    ref = g_k_eval(k, x)
    # any admissible line: absolute agreement on the scale of G_k(0) = Γ(k)²
    for sigma in (-0.25, 0.5, 1.0, 2.5):
        assert abs(g_k_eval(k, x, abscissa=sigma) - ref) <= 1e-10 * residue_constant(k)
    # lines near the default one: relative agreement
    base = default_abscissa(k, x)
    for sigma in (base - 0.5, base + 0.5, base + 1.0):
        if sigma == 0 or sigma <= -k:
            continue
        assert abs(g_k_eval(k, x, abscissa=sigma) - ref) <= 1e-10 * ref


def test_abscissa_rules():
    assert default_abscissa(1, 0.01) == -0.5
    assert default_abscissa(2, 10.0) > 0
    with pytest.raises(ValueError):
        g_k_eval(1, 1.0, abscissa=0.0)
    with pytest.raises(ValueError):
        g_k_eval(1, -1.0)


def test_sum_gk_asymptotic():
    # constant term Γ(k)²(ψ(k) + γ - log 2π) plus Γ(k)²/2 log X
    k, X = 2, 1e4
    val, _ = sum_gk(k, X)
    g2 = residue_constant(k)
    pred = g2 / 2 * math.log(X) + g2 * (special.digamma(k) + np.euler_gamma - math.log(2 * math.pi))
    assert abs(val - pred) < 10 * math.log(X) / X


def test_decay_fit_is_an_upper_bound():
    fit = fit_gk_decay(2, points=20)
    assert fit.c > 0
    xs = np.array(fit.xs)
    assert np.all(np.log(fit.values) <= fit.log_C - fit.c * np.sqrt(xs) + 1e-12)
