import itertools

import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st

from cartanred import fixtures
from cartanred.cartan import CEForm, cartan_relations, contract, dce, form_wedge, lie_derivative, sample_forms, verify_cartan_identities
from cartanred.liering import LieRinehartInstance
from cartanred.multivec import Multivector, sample_multivectors, wedge
from cartanred.poly import Poly


def test_dce_on_so3():
    # d(e0*)(e1, e2) = -e0*([e1, e2]) = -1
    inst = fixtures.so3()
    d = dce(CEForm.basis(inst, (0,)))
    assert d.value((1, 2)) == inst.const(-1)


def test_d_squared_zero_on_basis():
    for inst in fixtures.cartan_suite_instances(0):
        for k in range(inst.rank):
            for w in itertools.combinations(range(inst.rank), k):
                assert not dce(dce(CEForm.basis(inst, w)))


# de Rham oracle written directly in sympy
X = sp.symbols("x y z")


def to_sympy(p: Poly):
    return sum(sp.Rational(c.numerator, c.denominator) * sp.Mul(*[v**e for v, e in zip(X, m)]) for m, c in p.terms.items())


def de_rham(form):
    out = {}
    for word, c in form.items():
        for j in range(3):
            if j in word:
                continue
            w = (j,) + word
            sign = (-1) ** sum(1 for a, b in itertools.combinations(w, 2) if a > b)
            key = tuple(sorted(w))
            out[key] = sp.expand(out.get(key, 0) + sign * sp.diff(c, X[j]))
    return {k: v for k, v in out.items() if v != 0}


@pytest.mark.parametrize("seed", range(5))
def test_dce_matches_de_rham_oracle(seed):
    inst = LieRinehartInstance.poly(["x", "y", "z"])
    for a in sample_forms(inst, 2, 3, 6, seed):
        ours = {w: sp.expand(to_sympy(p)) for w, p in dce(a).terms.items()}
        oracle = de_rham({w: to_sympy(p) for w, p in a.terms.items()})
        assert ours == oracle


def test_contraction_convention():
    # iota_{e0 ^ e1} (e0* ^ e1*) = iota_e0 iota_e1 (e0* ^ e1*)
    inst = fixtures.so3()
    a = CEForm.basis(inst, (0, 1))
    e0, e1 = Multivector.basis(inst, (0,)), Multivector.basis(inst, (1,))
    assert contract(wedge(e0, e1), a) == contract(e0, contract(e1, a))


def test_cartan_exhaustive_so3():
    rep = verify_cartan_identities(fixtures.so3(), 3, 3)
    assert rep.passed, rep.to_text()


def test_printed_3b_sign_fails():
    rep = verify_cartan_identities(fixtures.so3(), 2, 2, sign_3b="printed")
    assert not rep.passed
    assert [c.name for c in rep.failures()] == ["iota_[x,y] = s [iota_x, Lie_y]"]


def test_cartan_broken_jacobi_witness():
    rep = verify_cartan_identities(fixtures.broken_jacobi(), 2, 3)
    assert not rep.passed
    assert all(c.witness is not None for c in rep.failures())


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10_000))
def test_cartan_relations_poly_random(seed):
    inst = LieRinehartInstance.poly(["x", "y"])
    xs = sample_multivectors(inst, 2, 1, 2, seed)
    fs = sample_forms(inst, 2, 1, 2, seed + 1)
    for x in xs:
        for y in xs:
            for a in fs:
                for name, (lhs, rhs) in cartan_relations(x, y, a).items():
                    assert lhs == rhs, name


def test_lie_derivative_is_derivation_of_wedge():
    inst = LieRinehartInstance.poly(["x", "y", "z"])
    for a, b in zip(sample_forms(inst, 1, 2, 4, 1), sample_forms(inst, 1, 2, 4, 2)):
        X = Multivector(inst, {(0,): inst.var(1), (2,): inst.var(0) * inst.var(0)})
        lhs = lie_derivative(X, form_wedge(a, b))
        rhs = form_wedge(lie_derivative(X, a), b) + form_wedge(a, lie_derivative(X, b))
        assert lhs == rhs
