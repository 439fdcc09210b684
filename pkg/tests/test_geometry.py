import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from heckewind.geometry import Cusp, PathSymbol, path_to_coords, transform_path, winding_vector
from heckewind.manin import build_space


def cusps():
    return st.one_of(
        st.just(Cusp(1, 0)),
        st.builds(lambda a, b: Cusp(a, b), st.integers(-40, 40), st.integers(1, 40)),
    )


def polys(n):
    return st.lists(st.integers(-3, 3), min_size=n + 1, max_size=n + 1).map(tuple)


def test_cusp_parse_and_print():
    assert str(Cusp.parse("oo")) == "oo"
    assert Cusp.parse("-2/4") == Cusp(-1, 2)
    assert str(Cusp(6, -4)) == "-3/2"
    with pytest.raises(ValueError):
        Cusp(0, 0)


@pytest.mark.parametrize("level,k", [(11, 1), (13, 2), (7, 3)])
@settings(max_examples=25, deadline=None)
@given(data=st.data())
def test_path_relations(space_cache, level, k, data):
    s = space_cache(level, k)
    P = data.draw(polys(s.degree))
    a, b, c = data.draw(cusps()), data.draw(cusps()), data.draw(cusps())
    ab = path_to_coords(s, PathSymbol(P, a, b))
    bc = path_to_coords(s, PathSymbol(P, b, c))
    ac = path_to_coords(s, PathSymbol(P, a, c))
    assert list(ab + bc) == list(ac)
    assert list(path_to_coords(s, PathSymbol(P, b, a))) == [-x for x in ab]


@pytest.mark.parametrize("level,k", [(11, 1), (23, 1), (13, 2)])
def test_gamma0_invariance(space_cache, level, k):
    s = space_cache(level, k)
    rng = random.Random(level * 10 + k)
    for _ in range(15):
        c = level * rng.randint(-5, 5)
        d = rng.choice([x for x in range(-30, 31) if np.gcd(x, c) == 1])
        # complete (., .; c, d) to a determinant-one matrix
        _, a, b = _xgcd(d, c)
        g = (a, -b, c, d)
        assert a * d + b * c == 1
        P = tuple(rng.randint(-2, 2) for _ in range(s.degree + 1))
        x = PathSymbol(P, Cusp(rng.randint(-9, 9), rng.randint(1, 9)), Cusp(1, 0))
        assert list(path_to_coords(s, transform_path(g, x))) == list(path_to_coords(s, x))


def _xgcd(a, b):
    if b == 0:
        return (abs(a), 1 if a >= 0 else -1, 0)
    g, x, y = _xgcd(b, a % b)
    return g, y, x - (a // b) * y


def test_winding_boundary():
    # {0, oo} joins inequivalent cusps in weight 2 but the middle monomial is cuspidal in higher weight
    assert not winding_vector(build_space(11, 1), 0).is_cuspidal
    assert winding_vector(build_space(11, 2), 1).is_cuspidal
    with pytest.raises(ValueError):
        winding_vector(build_space(11, 1), 1)
