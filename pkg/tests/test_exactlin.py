from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st

from cartanred.exactlin import (
    DimensionError,
    ExactMatrix,
    Quotient,
    Subspace,
    infeasibility_certificate,
    intersect,
    kernel_of_rows,
    nullspace,
    rank,
    rref,
    solve,
    span,
)

small = st.integers(min_value=-3, max_value=3)
matrices = st.integers(1, 5).flatmap(lambda r: st.integers(1, 5).flatmap(lambda c: st.lists(st.lists(small, min_size=c, max_size=c), min_size=r, max_size=r)))


def test_rank_and_nullspace_of_known_matrix():
    m = ExactMatrix.from_dense([[1, 2, 3], [2, 4, 6], [1, 0, 1]])
    assert rank(m) == 2
    ns = nullspace(m)
    assert ns.dim == 1
    v = ns.basis[0]
    assert not m.apply(v) or all(c == 0 for c in m.apply(v).values())


def test_solve_and_certificate():
    m = ExactMatrix.from_dense([[1, 1], [2, 2]])
    assert solve(m, [1, 2]) is not None
    assert solve(m, [1, 3]) is None
    y = infeasibility_certificate(m, {0: Fraction(1), 1: Fraction(3)})
    assert y is not None
    combo = {}
    for i, c in y.items():
        for j, x in m.row(i).items():
            combo[j] = combo.get(j, 0) + c * x
    assert not any(combo.values())


def test_exact_rationals_no_rounding():
    m = ExactMatrix.from_dense([[Fraction(1, 3), Fraction(1, 7)], [Fraction(2, 3), Fraction(2, 7)]])
    assert rank(m) == 1
    x = solve(m, [Fraction(1, 21), Fraction(2, 21)])
    assert x is not None
    assert Fraction(1, 3) * x.get(0, 0) + Fraction(1, 7) * x.get(1, 0) == Fraction(1, 21)


def test_dimension_errors():
    with pytest.raises(DimensionError):
        ExactMatrix(2, 2, {(2, 0): 1})
    with pytest.raises(DimensionError):
        solve(ExactMatrix.identity(2), [1, 2, 3])


def test_subspace_operations():
    a = span(3, [{0: 1}, {1: 1}])
    b = span(3, [{1: 1}, {2: 1}])
    assert intersect(a, b).dim == 1
    assert (a + b).dim == 3
    assert Subspace.zero(3) <= a <= Subspace.full(3)
    assert a.contains({0: 2, 1: -1})
    assert not a.contains({2: 1})
    q = Quotient(span(3, [{0: 1}]), a)
    assert q.dim == 1
    assert q.project({0: 5}) == [0]


def test_kernel_of_rows_matches_annihilator():
    a = span(4, [{0: 1, 1: 1}, {2: 1, 3: -1}])
    assert kernel_of_rows(a.annihilator(), 4) == a


@settings(max_examples=60, deadline=None)
@given(matrices)
def test_rank_matches_sympy(rows):
    m = ExactMatrix.from_dense(rows)
    assert rank(m) == sp.Matrix(rows).rank()


@settings(max_examples=60, deadline=None)
@given(matrices)
def test_rank_nullity(rows):
    m = ExactMatrix.from_dense(rows)
    ns = nullspace(m)
    assert rank(m) + ns.dim == m.cols
    for v in ns.basis:
        assert not any(m.apply(v).values())


@settings(max_examples=40, deadline=None)
@given(matrices)
def test_rref_idempotent(rows):
    m = ExactMatrix.from_dense(rows)
    r, piv = rref(m)
    r2, piv2 = rref(r)
    assert piv == piv2
    assert r == r2
