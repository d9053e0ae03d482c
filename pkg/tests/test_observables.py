import pytest

from cartanred import fixtures
from cartanred.cartan import CEForm, contract, dce
from cartanred.liering import LieRinehartInstance
from cartanred.multivec import Multivector
from cartanred.observables import (
    Brackets,
    Cocycle,
    NotClosed,
    NotHamiltonian,
    ObservablesComplex,
    check_covariant_momentum,
    check_leibniz_algebra,
    ham_pairs,
    l1,
    l2,
    lj,
    r3_fixture_check,
    verify_linfty,
)


def test_cocycle_rejects_non_closed():
    with pytest.raises(NotClosed):
        Cocycle(fixtures.r3_exact_form(flip=True))
    Cocycle(fixtures.r3_exact_form())


def test_pair_validation():
    c = fixtures.so3_volume()
    inst = c.inst
    with pytest.raises(NotHamiltonian):
        c.pair(CEForm.zero(inst, 1), Multivector.basis(inst, (0,)))


def test_so3_ham0_is_full_lie_algebra_plus_closed_forms():
    c = fixtures.so3_volume()
    pairs = ham_pairs(c)
    # every field is Hamiltonian; closed 1-forms on so(3) vanish
    assert len(pairs) == 3
    for p in pairs:
        assert c.is_pair(p.alpha, p.X)


def test_l1_on_forms_and_pairs():
    c = fixtures.volume_cocycle(4, 1)
    f = CEForm.function(c.inst, c.inst.var(0))
    a = CEForm.basis(c.inst, (1,), c.inst.var(0))
    assert l1(c, f) == dce(f)
    out = l1(c, a)
    assert out.alpha == dce(a) and not out.X
    assert not l1(c, c.zero_pair())


def test_skew_bracket_lands_in_pairs_and_displayed_does_not():
    c = fixtures.so3_volume()
    pairs = ham_pairs(c)
    p, q = pairs[0], pairs[1]
    r = l2(c, p, q)
    assert c.is_pair(r.alpha, r.X)
    r = l2(c, p, q, "displayed")
    assert not c.is_pair(r.alpha, r.X)


def test_linfty_so3_skew_passes_displayed_fails():
    c = fixtures.so3_volume()
    assert verify_linfty(c).passed
    rep = verify_linfty(c, convention="displayed")
    assert not rep.passed
    assert all(f.witness is not None for f in rep.failures())


def test_lj_vanishes_on_forms():
    c = fixtures.so3_volume()
    p = ham_pairs(c)[0]
    assert not lj(c, [p, p, CEForm.function(c.inst, c.inst.const(1))])


def test_brackets_cache_agrees_with_functions():
    c = fixtures.so3_volume()
    br = Brackets(c)
    pairs = ham_pairs(c)
    for p in pairs:
        for q in pairs:
            assert br.l2(p, q) == l2(c, p, q)
    assert br.lj(pairs) == lj(c, pairs)


def test_observables_complex_dims():
    oc = ObservablesComplex(fixtures.volume_cocycle(3, 1), 1)
    assert oc.degrees == [-1, 0]
    assert oc.dims()[-1] == 4


def test_leibniz_algebra_on_r3():
    c = fixtures.volume_cocycle(3, 1)
    pairs = ham_pairs(c, 1)
    rep = check_leibniz_algebra(c, pairs[:6], budget=300)
    assert rep.passed, rep.to_text()


def test_covariant_momentum_r5():
    # mu(xi) = (-y1 dt, d_x1) covers the translation d_x1
    sym, cocycle, mu = fixtures.r5_data(1)
    inst = sym.inst
    algebra = fixtures.abelian(1)
    pair = cocycle.pair(mu[0], sym.F[0])
    rep = check_covariant_momentum(cocycle, algebra, [pair], [sym.F[0]])
    assert rep.passed, rep.to_text()


def test_r3_fixture():
    rep = r3_fixture_check(count=20, coeff_degree=2)
    assert rep.passed, rep.to_text()
