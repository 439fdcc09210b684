import random

import numpy as np
import pytest
import sympy

from heckewind.geometry import Cusp, PathSymbol, path_to_coords
from heckewind.hecke import (
    heilbronn_cremona,
    heilbronn_merel,
    hecke_apply,
    hecke_apply_cosets,
    hecke_full,
    hecke_matrix,
    hecke_matrix_json,
    hecke_prime_full,
)

# newform coefficients a_2, a_3, a_5 from standard tables
NEWFORMS = {
    (2, 4): [(2, -8), (3, 12), (5, -210)],
    (3, 3): [(2, -6), (3, 9), (5, 6)],
    (5, 2): [(2, -4), (3, 2), (5, -5)],
    (11, 1): [(2, -2), (3, -1), (5, 1)],
}


def _charpoly(space, n):
    x = sympy.Symbol("x")
    return sympy.Poly(sympy.Matrix(hecke_matrix(space, n).matrix.tolist()).charpoly(x).as_expr(), x)


@pytest.mark.parametrize("key", sorted(NEWFORMS))
def test_eigenvalues_match_tables(space_cache, key):
    s = space_cache(*key)
    x = sympy.Symbol("x")
    for q, a in NEWFORMS[key]:
        assert _charpoly(s, q) == sympy.Poly((x - a) ** 2, x)


def test_level_37_two_rational_forms(space_cache):
    s = space_cache(37, 1)
    x = sympy.Symbol("x")
    assert _charpoly(s, 2) == sympy.Poly(x**2 * (x + 2) ** 2, x)
    assert _charpoly(s, 3) == sympy.Poly((x - 1) ** 2 * (x + 3) ** 2, x)


@pytest.mark.parametrize("n", [1, 2, 3, 4, 6, 7, 9, 12])
def test_merel_family_sizes(n):
    fam = heilbronn_merel(n)
    brute = [
        (a, b, c, d)
        for a in range(1, n + 1)
        for b in range(a)
        for d in range(1, n + 1)
        for c in range(d)
        if a * d - b * c == n
    ]
    assert sorted(fam.matrices) == sorted(brute)


@pytest.mark.parametrize("q", [2, 3, 5, 7, 11, 13])
def test_cremona_family_determinants(q):
    assert all(a * d - b * c == q for a, b, c, d in heilbronn_cremona(q).matrices)


@pytest.mark.parametrize("level,k", [(11, 1), (23, 1), (13, 2), (7, 3)])
@pytest.mark.parametrize("q", [2, 3, 5, 7])
def test_merel_and_cremona_agree(space_cache, level, k, q):
    s = space_cache(level, k)
    a = hecke_prime_full(s, q, "merel")
    b = hecke_prime_full(s, q, "cremona")
    assert (a == b).all()


@pytest.mark.parametrize("level,k", [(11, 1), (13, 2)])
def test_composite_heilbronn_matches_recursion(space_cache, level, k):
    s = space_cache(level, k)
    for n in (4, 6, 8, 9, 11, 12, 13):
        assert (hecke_full(s, n, "heilbronn") == hecke_full(s, n, "recursion")).all()


@pytest.mark.parametrize("level,k", [(11, 1), (17, 2)])
def test_cosets_match_heilbronn_small(space_cache, level, k):
    s = space_cache(level, k)
    rng = random.Random(7)
    for q in (2, 3, 5, level):
        tq = hecke_prime_full(s, q)
        for _ in range(5):
            P = tuple(rng.randint(-3, 3) for _ in range(s.degree + 1))
            x = PathSymbol(P, Cusp(rng.randint(-20, 20), rng.randint(1, 20)), Cusp(1, 0))
            v = path_to_coords(s, x)
            assert list(hecke_apply_cosets(s, q, x)) == list(tq.dot(v))


def test_hecke_apply_matches_matrix(space_cache):
    s = space_cache(23, 2)
    v = np.arange(s.dim_full, dtype=object) - 3
    for n in (1, 2, 4, 6, 23, 46):
        assert list(hecke_apply(s, n, v)) == list(hecke_full(s, n).dot(v))


def test_json_round_trip(space_cache):
    import json

    s = space_cache(11, 1)
    data = json.loads(hecke_matrix_json(s, 2))
    assert data["matrix"] == [[-2, 0], [0, -2]]
