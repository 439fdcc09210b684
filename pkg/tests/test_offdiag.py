import math

import numpy as np
import pytest
from sympy import divisor_count

from heckewind.analytic import gram_rank, smain_soff_eval, smain_mobius_form, weil_tail_factor


@pytest.mark.parametrize("level,nu", [(11, 1), (11, 3), (23, 1)])
@pytest.mark.parametrize("M", [1, 7, 60])
def test_tail_factor_bounds_direct_sum(level, nu, M):
    direct = math.fsum(
        int(divisor_count(level * m)) * (level * m) ** (-0.5 - nu) for m in range(M + 1, 60000)
    )
    assert direct <= weil_tail_factor(level, nu, M)


def test_quadratic_form_scaling():
    a = smain_soff_eval(11, 1, 2, (1.0, -0.5))
    b = smain_soff_eval(11, 1, 2, (2.0, -1.0))
    assert abs(b.s_main - 4 * a.s_main) < 1e-12 * abs(a.s_main)
    assert abs(b.s_off - 4 * a.s_off) < 1e-12 * max(abs(a.s_off), 1e-12)
    assert abs(b.tail_bound - 4 * a.tail_bound) < 1e-9 * a.tail_bound
    z = smain_soff_eval(11, 1, 2, (0.0, 0.0))
    assert z.s_main == 0 and z.s_off == 0 and z.tail_bound == 0


@pytest.mark.parametrize("alpha", [(1, 0, 0), (0.3, -1, 2), (1, 1, 1)])
def test_mobius_form_matches_diagonal(alpha):
    r = smain_soff_eval(23, 1, 3, alpha)
    assert abs(r.s_main - r.s_main_mobius) < 1e-12 * abs(r.s_main)
    assert r.phi_y_norm > 0


def test_smain_positive_definite():
    r = smain_soff_eval(23, 2, 3, (1, 0, 0))
    assert np.all(np.linalg.eigvalsh(np.array(r.main_matrix)) > 0)


def test_total_matches_spectral_side(space_cache):
    # S_main + S_off = (Γ(k)²/2) α^T A α with A the Gram matrix of the harmonic weights
    r = smain_soff_eval(11, 1, 2, (1, 0), c_max=11 * 400)
    g = gram_rank(space_cache(11, 1), 2)
    spectral = g.gram.matrix[0][0] / 2
    total = r.s_main + r.s_off
    assert abs(total - spectral) <= r.tail_bound
    assert abs(total - spectral) < 1e-2 * spectral


def test_input_checks():
    with pytest.raises(ValueError):
        smain_soff_eval(12, 1, 2, (1, 0))
    with pytest.raises(ValueError):
        smain_soff_eval(11, 1, 2, (1, 0, 0))
    with pytest.raises(ValueError):
        smain_soff_eval(11, 1, 2, (1, 0), c_max=5)
    assert smain_mobius_form(11, 1, (0, 0))[0] == 0
