import pytest

from cartanred import fixtures
from cartanred import reduction as red
from cartanred.cartan import CEForm
from cartanred.liering import LieRinehartInstance
from cartanred.multivec import Multivector
from cartanred.observables import Cocycle, ham_pairs
from cartanred.slices import function_slice

# reduced observables of the R^5 example, from tests/oracles/r5_reduced_dims.py
# (an independent sympy brute force): degree -> (numerator, denominator)
R5_ORACLE = {
    1: {-1: (5, 1), 0: (19, 7)},
    2: {-1: (16, 6), 0: (55, 27)},
    3: {-1: (41, 21), 0: (130, 77)},
}

T, X1, X2, Y1, Y2 = range(5)


@pytest.fixture(scope="module")
def r5():
    return fixtures.r5_data(2)


def field(inst, **coeffs):
    names = {"t": T, "x1": X1, "x2": X2, "y1": Y1, "y2": Y2}
    return Multivector(inst, {(names[k],): v for k, v in coeffs.items()})


def test_ideal_preservation_is_checked():
    with pytest.raises(red.IdealNotPreserved) as info:
        fixtures.bad_symmetry()
    assert info.value.variable == 1
    sym = fixtures.bad_symmetry(check=False)
    assert sym.ideal_violation() is not None


def test_closure_membership(r5):
    sym, _, _ = r5
    inst = sym.inst
    assert sym.in_F(field(inst, x1=inst.var(X2)))
    assert sym.in_F(field(inst, t=inst.var(Y1)))
    assert not sym.in_F(field(inst, t=inst.one()))
    # no symmetries: the closure is I.X
    bare = red.SymmetryData(inst, [Y1], [])
    assert bare.in_F(field(inst, t=inst.var(Y1)))
    assert not bare.in_F(field(inst, x1=inst.one()))


def test_closure_general_path_agrees_with_fast_path(r5):
    sym, _, _ = r5
    inst = sym.inst
    # same symmetry written as a non-constant generator forces the solver path
    slow = red.SymmetryData(inst, [Y1], [field(inst, x1=inst.one() + inst.var(Y1))])
    assert slow.fast is None
    for X in (field(inst, x1=inst.var(X2)), field(inst, t=inst.var(Y1)), field(inst, t=inst.one()), field(inst, x1=inst.var(T) * inst.var(T))):
        assert slow.in_F(X) == sym.in_F(X)
    assert slow.F_multipliers(field(inst, t=inst.one())) is None


def test_Aprime_r5(r5):
    sym, _, _ = r5
    inst = sym.inst
    assert not red.in_Aprime_W(sym, inst.var(X1))
    for v in (T, X2, Y1, Y2):
        assert red.in_Aprime_W(sym, inst.var(v))
    assert red.in_Aprime_W(sym, inst.var(X1) * inst.var(Y1))
    t, rep = red.build_Aprime(sym, 2)
    assert rep.passed


def test_Aprime_without_symmetries_is_everything():
    inst = LieRinehartInstance.poly(["x", "y"])
    sym = red.SymmetryData(inst, [1], [])
    t, _ = red.build_Aprime(sym, 2)
    assert t.W_at(0).dim == function_slice(inst, 2).dim


def test_Y_r5(r5):
    sym, _, _ = r5
    inst = sym.inst
    assert red.in_Y_W(sym, field(inst, t=inst.one()))
    assert not red.in_Y_W(sym, field(inst, t=inst.var(X1)))
    t, rep = red.build_Y(sym, 2)
    assert rep.passed, rep.to_text()
    assert isinstance(rep.details["bracket_strong"], bool)


def test_Fbar_contains_closure(r5):
    sym, _, _ = r5
    _, Fbar = red.compute_Fbar(sym, 2)
    _, F = sym.F_slice(2)
    assert F <= Fbar


def test_Bprime_r5(r5):
    sym, _, _ = r5
    inst = sym.inst
    assert red.in_Bprime_W(sym, CEForm.basis(inst, (T,)))
    assert not red.in_Bprime_W(sym, CEForm.basis(inst, (X1,)))
    t, parts, rep = red.build_Bprime(sym, 1, max_degree=2)
    assert rep.passed, rep.to_text()


def test_Bprime_without_anything_is_everything():
    inst = LieRinehartInstance.poly(["x", "y"])
    sym = red.SymmetryData(inst, [], [])
    t, parts, _ = red.build_Bprime(sym, 1)
    for p, (sl, W, Wg, N) in parts.items():
        assert W.dim == sl.dim and N.dim == 0


def test_cocycle_condition(r5):
    sym, cocycle, mu = r5
    assert red.check_cocycle_condition(sym, cocycle.omega, mu).passed
    zero = CEForm.zero(sym.inst, 3)
    assert red.check_cocycle_condition(sym, zero).passed


def test_cocycle_condition_sign_corruption():
    sym, cocycle, mu = fixtures.r5_data(1, flip=True)
    rep = red.check_cocycle_condition(sym, cocycle.omega, mu)
    assert not rep.passed
    (bad,) = rep.failures()
    assert bad.witness["symmetry"] == 0


def test_cocycle_condition_non_closed():
    inst = LieRinehartInstance.poly(["x", "y", "z"])
    sym = red.SymmetryData(inst, [2], [Multivector.basis(inst, (0,))])
    om = fixtures.r3_exact_form(flip=True)
    om = CEForm(inst, 2, {w: p for w, p in om.terms.items()})
    rep = red.check_cocycle_condition(sym, om)
    assert rep.failures()[0].name == "d omega = 0"


@pytest.mark.parametrize("D", [1, 2, 3])
def test_r5_reduced_dims_match_oracle(D):
    sym, cocycle, _ = fixtures.r5_data(D)
    ro = red.reduced_observables(sym, cocycle, D, budget=200)
    assert ro.report.passed, ro.report.to_text()
    for i, (n, d) in R5_ORACLE[D].items():
        assert (ro.numerator[i].dim, ro.denominator[i].dim) == (n, d)
        assert ro.quotients[i].dim == n - d


def test_r5_reduced_contains_momentum_companions(r5):
    sym, cocycle, mu = r5
    ro = red.reduced_observables(sym, cocycle, 2, budget=0)
    # (-y1 dt, d_x1) is in the denominator; (y2 dt, -d_x2) survives
    fs, vs = ro.slices[0]

    def vec(a, X):
        v = dict(fs.vector(a))
        v.update({fs.dim + i: c for i, c in vs.vector(X).items()})
        return v

    inst = sym.inst
    gen = vec(mu[0], sym.F[0])
    assert ro.denominator[0].contains(gen)
    other = vec(CEForm(inst, 1, {(T,): inst.var(Y2)}), field(inst, x2=-inst.one()))
    assert cocycle.is_pair(CEForm(inst, 1, {(T,): inst.var(Y2)}), field(inst, x2=-inst.one()))
    assert ro.numerator[0].contains(other) and not ro.denominator[0].contains(other)


def test_trivial_reduction_is_ham():
    c = fixtures.volume_cocycle(3, 1)
    sym = red.SymmetryData(c.inst, [], [])
    ro = red.reduced_observables(sym, c, 1, budget=50)
    assert ro.denominator[0].dim == 0
    assert ro.quotients[0].dim == len(ham_pairs(c, 1))


@pytest.mark.parametrize("maker", [lambda: fixtures.r5_data(2), lambda: fixtures.symplectic_data(3)])
def test_momentum_shortcut(maker):
    sym, cocycle, mu = maker()
    rep = red.momentum_shortcut_check(sym, cocycle, mu, sym.inst.degree_bound)
    assert rep.passed, rep.to_text()


def test_residue_defect():
    rep = red.residue_defect_check(3)
    failed = [c.name for c in rep.failures()]
    # the literal pair is not Hamiltonian for dt^dx2^dy2; everything else holds
    assert failed == ["literal witness pair (x2 t dy2, x2 d_t - t d_x2) is Hamiltonian downstairs"]
    assert set(rep.infeasible) == {0, 3}
    cert = rep.infeasible[3]
    assert cert["rows"] == [{"word": [1, 2, 3], "monomial": [0, 0, 0, 0, 0], "weight": "1"}]


def test_symplectic_denominator():
    rep = red.symplectic_denominator_check(3)
    assert rep.passed, rep.to_text()


@pytest.mark.parametrize("shape", [(1, 1, 1), (1, 0, 1), (1, 1, 0), (1, 1, 2)])
def test_constraint_manifold(shape):
    rep = red.constraint_manifold_check(2, *shape)
    assert rep.passed, rep.to_text()


def test_full_foliation_forms_are_constants():
    rep = red.constraint_manifold_check(3, 1, 1, 0)
    assert rep.dimensions["reduced"]["forms"] == {0: 1, 1: 0, 2: 0}


def test_lie_reduction_exact():
    rep = red.lie_reduction(fixtures.gl2_borel(), fixtures.gl2_cartan_form())
    assert rep.passed, rep.to_text()
    assert rep.dimensions["reduced"] == {-1: 1, 0: 3}


def test_lie_reduction_broken_ideal():
    rep = red.lie_reduction(fixtures.broken_ideal(), fixtures.gl2_cartan_form())
    assert not rep.passed
    assert all(c.witness is not None for c in rep.failures())
