import math

import numpy as np
import pytest

from heckewind.analytic import (
    InsufficientBoundError,
    afe_central_value,
    central_value_sq,
    eigen_systems,
    gram_matrix,
    gram_rank,
    nonvanishing_bridge,
    petersson_fit,
    petersson_rhs,
)

L_11A = 0.25384186085591068434  # L(E, 1) for the curve 11a


@pytest.fixture(scope="module")
def sys11(space_cache):
    return eigen_systems(space_cache(11, 1), 400)


def test_level_11_coefficients(sys11):
    (f,) = sys11
    assert abs(f.a(2) + 2) < 1e-10 and abs(f.a(3) + 1) < 1e-10 and abs(f.a(5) - 1) < 1e-10
    assert abs(f.a(11) - 1) < 1e-10  # a_p = -w_p with w_11 = -1
    assert abs(f.lam(6) - f.lam(2) * f.lam(3)) < 1e-12
    assert abs(f.lam(4) - (f.lam(2) ** 2 - 1)) < 1e-12
    assert f.residuals["recursion_residual"] < 1e-9


def test_level_23_golden_ratio(space_cache):
    fs = eigen_systems(space_cache(23, 1), 64)
    a2 = sorted(f.a(2) for f in fs)
    assert np.allclose(a2, [(-1 - math.sqrt(5)) / 2, (-1 + math.sqrt(5)) / 2], atol=1e-10)


def test_weight_four_ramanujan(space_cache):
    for f in eigen_systems(space_cache(23, 2), 100):
        assert all(abs(f.lam(q)) <= 2 for q in (2, 3, 5, 7, 97))


def test_central_value_of_11a(sys11):
    (f,) = sys11
    cv = central_value_sq(f)
    afe = afe_central_value(f)
    assert abs(afe.value - L_11A) < 1e-12
    assert abs(cv.value - L_11A**2) < 1e-12
    assert cv.tail_estimate < 1e-10
    assert afe.eta == afe.eta_from_ap


def test_rank_one_form_vanishes(space_cache):
    fs = eigen_systems(space_cache(37, 1), 600)
    vals = sorted(afe_central_value(f).value for f in fs)
    assert abs(vals[0]) < 1e-12 and vals[1] > 0.5
    sq = sorted(central_value_sq(f).value for f in fs)
    assert sq[0] < 1e-8


def test_insufficient_bound(space_cache):
    (f,) = eigen_systems(space_cache(11, 1), 20)
    with pytest.raises(InsufficientBoundError):
        f.lam(21)
    with pytest.raises(InsufficientBoundError):
        central_value_sq(f, 100)


def test_petersson_converges_in_weight_four(space_cache):
    fs = eigen_systems(space_cache(11, 2), 64)
    coarse = petersson_fit(fs, c_max=50 * 11)
    fine = petersson_fit(fs, c_max=400 * 11)
    assert fine.max_residual < coarse.max_residual < 1e-3
    assert fine.consistent and all(w > 0 for w in fine.omega)


def test_petersson_rhs_matches_direct_sum():
    from scipy.special import jv

    from heckewind.analytic import kloosterman

    pairs = [(1, 1), (1, 2), (3, 5)]
    rhs = petersson_rhs(11, 2, pairs, 11 * 30)
    for (r, s), got in zip(pairs, rhs):
        acc = sum(kloosterman(r, s, c) / c * jv(3, 4 * math.pi * math.sqrt(r * s) / c) for c in range(11, 331, 11))
        assert abs(got - ((r == s) + 2 * math.pi * acc)) < 1e-12


def test_gram_matrix_is_psd(space_cache):
    fs = eigen_systems(space_cache(23, 1), 64)
    g = gram_matrix(fs, [1.0, 2.0], [0.3, 0.2], 4)
    assert g.rank == 2 and g.asymmetry < 1e-15 and g.min_eigenvalue > -1e-12


@pytest.mark.parametrize("level,k,D,rank", [(11, 1, 2, 1), (23, 1, 4, 2)])
def test_gram_rank_matches_exact(space_cache, level, k, D, rank):
    rep = gram_rank(space_cache(level, k), D)
    assert rep.agree and rep.exact_rank == rank


def test_bridge_level_37(space_cache):
    rep = nonvanishing_bridge(space_cache(37, 1))
    assert rep.agree and rep.exact_rank == 1
