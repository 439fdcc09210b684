from math import gcd

import pytest

from heckewind.algebra import (
    BadModulusError,
    BoundTooSmallError,
    algebra_lattice,
    cuspidal_winding,
    equivalence_report,
    mod_l_winding_forms,
    sturm_bound,
    winding_orbit,
    winding_orbit_rank,
)
from heckewind.hecke import hecke_matrix
from heckewind.linalg import mat_vec


def _mat(space, n):
    return hecke_matrix(space, n).matrix


@pytest.mark.parametrize("level,k", [(11, 1), (23, 1), (11, 2), (13, 3)])
def test_commutativity_and_multiplicativity(space_cache, level, k):
    s = space_cache(level, k)
    for m in range(1, 9):
        for n in range(1, 9):
            a, b = _mat(s, m), _mat(s, n)
            assert (a.dot(b) == b.dot(a)).all()
            if gcd(m, n) == 1:
                assert (_mat(s, m * n) == a.dot(b)).all()


@pytest.mark.parametrize("level,k", [(11, 1), (13, 2)])
def test_prime_power_recursion(space_cache, level, k):
    s = space_cache(level, k)
    for q in (2, 3):
        tq = _mat(s, q)
        for r in (2, 3):
            expect = tq.dot(_mat(s, q ** (r - 1))) - q ** (2 * k - 1) * _mat(s, q ** (r - 2))
            assert (_mat(s, q**r) == expect).all()
    # U_p at the level multiplies plainly
    up = _mat(s, level)
    assert (_mat(s, level**2) == up.dot(up)).all()


def test_sturm_bound():
    assert sturm_bound(11, 1) == 3
    assert sturm_bound(23, 2) == 9


@pytest.mark.parametrize("level,expected", [(11, 1), (23, 2), (37, 1), (43, 2), (53, 3)])
def test_winding_rank_counts_rank_zero_curves(space_cache, level, expected):
    # count of forms with L(f, 1) != 0: 37a, 43a, 53a have analytic rank one, the rest rank zero
    assert winding_orbit_rank(space_cache(level, 1)).rank == expected


def test_winding_is_star_eigen_and_in_cuspidal(space_cache):
    for level, k in [(11, 1), (23, 2), (13, 3)]:
        e = cuspidal_winding(space_cache(level, k))
        assert e.star_sign in (1, -1)
        assert e.projected == (k == 1)


def test_orbit_rows_are_hecke_images(space_cache):
    s = space_cache(23, 1)
    e = cuspidal_winding(s).cuspidal
    rows = winding_orbit(s, 6)
    for n, row in enumerate(rows, 1):
        assert row == [int(x) for x in mat_vec(_mat(s, n).tolist(), e)]


def test_algebra_lattice_contains_hecke(space_cache):
    s = space_cache(23, 1)
    lat = algebra_lattice(s)
    assert lat.rank == 2
    lat.coordinates(_mat(s, 29).tolist())


def test_guards(space_cache):
    s = space_cache(11, 1)
    with pytest.raises(BoundTooSmallError):
        winding_orbit_rank(s, bound=1)
    with pytest.raises(BadModulusError):
        mod_l_winding_forms(s, 11, 2)
    with pytest.raises(BadModulusError):
        equivalence_report(s, 4, 2)


@pytest.mark.parametrize("level,k", [(11, 1), (23, 1), (11, 2)])
@pytest.mark.parametrize("l", [3, 5, 7])
def test_equivalence_small(space_cache, level, k, l):
    for D in (1, 2, 3):
        assert equivalence_report(space_cache(level, k), l, D).agree
