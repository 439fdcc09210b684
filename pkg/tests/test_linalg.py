from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st
from sympy.matrices.normalforms import invariant_factors
from sympy.polys.matrices import DomainMatrix

from heckewind import linalg

small = st.integers(-6, 6)


def matrices(max_rows=5, max_cols=5):
    return st.integers(1, max_rows).flatmap(
        lambda r: st.integers(1, max_cols).flatmap(
            lambda c: st.lists(st.lists(small, min_size=c, max_size=c), min_size=r, max_size=r)
        )
    )


@settings(max_examples=80, deadline=None)
@given(matrices())
def test_rank_over_q_matches_sympy(m):
    assert linalg.rank(m) == sympy.Matrix(m).rank()


@settings(max_examples=80, deadline=None)
@given(matrices(), st.sampled_from([2, 3, 5, 7, 11]))
def test_rank_mod_l_matches_sympy(m, l):
    oracle = DomainMatrix([[sympy.GF(l)(x) for x in row] for row in m], (len(m), len(m[0])), sympy.GF(l)).rank()
    assert linalg.rank(m, l) == oracle


@settings(max_examples=60, deadline=None)
@given(matrices(), st.sampled_from([3, 5, 7]))
def test_nullspace_mod_is_kernel(m, l):
    basis = linalg.nullspace_mod(m, l, ncols=len(m[0]))
    assert len(basis) == len(m[0]) - linalg.rank(m, l)
    for v in basis:
        assert all(sum(a * b for a, b in zip(row, v)) % l == 0 for row in m)


@settings(max_examples=60, deadline=None)
@given(matrices())
def test_hnf_is_unimodular_and_echelon(m):
    h, u = linalg.hnf(m, ncols=len(m[0]), transform=True)
    assert abs(sympy.Matrix(u).det()) == 1
    assert sympy.Matrix(u) * sympy.Matrix(m) == sympy.Matrix(h)
    last = -1
    for row in (r for r in h if any(r)):
        p = next(j for j, x in enumerate(row) if x)
        assert p > last and row[p] > 0
        last = p


@settings(max_examples=60, deadline=None)
@given(matrices())
def test_left_kernel_is_saturated(m):
    ker = linalg.left_integer_kernel(m, ncols=len(m[0]))
    assert len(ker) == len(m) - sympy.Matrix(m).rank()
    for v in ker:
        assert all(sum(v[i] * m[i][j] for i in range(len(m))) == 0 for j in range(len(m[0])))
    if ker:
        # saturated: the Smith invariants of the kernel basis are all 1
        assert all(d == 1 for d in invariant_factors(sympy.Matrix(ker)))


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 5).flatmap(lambda n: st.lists(st.lists(small, min_size=n, max_size=n), min_size=n, max_size=n)))
def test_det_matches_sympy(m):
    assert linalg.det(m) == sympy.Matrix(m).det()
    assert linalg.det(m, 7) % 7 == sympy.Matrix(m).det() % 7


def test_solve_and_inconsistent():
    a = [[1, 2], [3, 4]]
    x = linalg.solve(a, [[5], [6]])
    assert [[Fraction(-4)], [Fraction(9, 2)]] == x
    assert linalg.solve([[1, 1], [1, 1]], [[0], [1]]) is None


def test_sparse_rref_matches_dense():
    rows = [{0: 2, 2: 4}, {1: 3, 2: -3}, {0: 1, 1: 1}]
    piv = linalg.sparse_rref(rows)
    dense = sympy.Matrix([[r.get(j, 0) for j in range(3)] for r in rows]).rref()[0]
    for i, c in enumerate(sorted(piv)):
        assert [piv[c].get(j, 0) for j in range(3)] == list(dense.row(i))


def test_invalid_modulus():
    with pytest.raises(linalg.InvalidModulusError):
        linalg.rank([[1, 2]], 4)
