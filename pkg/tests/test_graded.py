import pytest
from hypothesis import given, strategies as st

from cartanred.exactlin import ExactMatrix
from cartanred.graded import (
    GradedElement,
    GradedMap,
    GradedSpace,
    commutator_sign,
    koszul_sign,
    merge_sign,
    perm_sign,
    reverse,
    shift,
    sort_word,
    tensor,
)


def test_perm_sign():
    assert perm_sign([0, 1, 2]) == 1
    assert perm_sign([1, 0, 2]) == -1
    assert perm_sign([2, 0, 1]) == 1


def test_koszul_sign_degree_rule():
    # swapping two odd items gives -1, an even and an odd +1
    assert koszul_sign([1, 0], [1, 1]) == -1
    assert koszul_sign([1, 0], [2, 1]) == 1
    assert koszul_sign([1, 0], [0, 0], exterior=True) == -1


def test_sort_word_and_repeats():
    assert sort_word([2, 0, 1]) == (1, (0, 1, 2))
    assert sort_word([1, 0]) == (-1, (0, 1))
    assert sort_word([1, 1])[0] == 0
    assert merge_sign([1], [0]) == (-1, (0, 1))


def test_commutator_sign():
    # two odd operators anticommute
    assert commutator_sign(1, 1) == -1
    assert commutator_sign(1, 2) == 1
    assert commutator_sign(0, 3) == 1


@given(st.permutations(list(range(5))))
def test_sort_word_sign_is_perm_sign(p):
    assert sort_word(p)[0] == perm_sign(p)


def test_shift_reverse_tensor_dims():
    v = GradedSpace.from_dims({0: 2, 1: 1})
    assert shift(v, 1).dims() == {-1: 2, 0: 1}
    assert reverse(v).dims() == {0: 2, -1: 1}
    w = tensor(v, v)
    assert w.dims() == {0: 4, 1: 4, 2: 1}


def test_graded_map_compose():
    v = GradedSpace.from_dims({0: 2})
    f = GradedMap(v, v, 0, {0: ExactMatrix.from_dense([[0, 1], [1, 0]])})
    g = f.compose(f)
    x = GradedElement(v, {(0, 0): 1})
    assert g.apply(x) == x
