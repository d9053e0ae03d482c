import random

import pytest
from hypothesis import given, settings, strategies as st

from cartanred import fixtures
from cartanred.cartan import CEForm
from cartanred.constraint import (
    ConstraintLR,
    ContainmentViolation,
    ConstraintTriple,
    check_constraint_algebra,
    cihom,
    constraint_ce,
    constraint_suite,
    cstrong_tensor,
    ctensor,
    make_triple,
    monoidality_witness,
    random_morphism,
    random_triple,
    reduce,
    truncated_polynomial_triple,
    unit_triple,
)
from cartanred.exactlin import Subspace, span
from cartanred.liering import LieRinehartInstance
from cartanred.slices import form_slice


def test_constructor_enforces_nesting():
    with pytest.raises(ContainmentViolation):
        make_triple(2, {0: span(2, [{0: 1}])}, {0: span(2, [{1: 1}])})
    t = make_triple(3, {0: span(3, [{0: 1}, {1: 1}])}, {0: span(3, [{0: 1}])})
    assert t.reduced_dims() == {0: 1}


def test_unit_is_neutral():
    rng = random.Random(3)
    a = random_triple(rng)
    assert ctensor(a, unit_triple()).reduced_dims() == a.reduced_dims()


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000))
def test_monoidality_random(seed):
    rng = random.Random(seed)
    a, b = random_triple(rng), random_triple(rng)
    w = monoidality_witness(a, b)
    assert w.isomorphism and w.well_defined, w.failure


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000))
def test_strong_tensor_contains_weak_parts(seed):
    rng = random.Random(seed)
    a, b = random_triple(rng), random_triple(rng)
    weak, strong = ctensor(a, b), cstrong_tensor(a, b)
    for d in weak.degrees():
        assert weak.N_at(d) <= strong.N_at(d)
        assert weak.W_at(d) <= strong.W_at(d)
        assert strong.N_at(d) <= strong.W_at(d)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10_000))
def test_random_morphisms_and_functoriality(seed):
    rng = random.Random(seed)
    a, b, c = random_triple(rng), random_triple(rng), random_triple(rng)
    f, g = random_morphism(rng, a, b), random_morphism(rng, b, c)
    assert f.is_morphism and g.is_morphism
    gf = g.compose(f)
    assert gf.is_morphism
    assert gf.reduced() == g.reduced().compose(f.reduced())


def test_internal_hom_wanted_part_is_morphisms():
    rng = random.Random(7)
    a, b = random_triple(rng, 3), random_triple(rng, 3)
    h = cihom(a, b)
    assert h.W_at(0).dim >= h.N_at(0).dim


def test_suite_passes():
    rep = constraint_suite(seed=0, count=50)
    assert rep.passed, rep.to_text()


def test_truncated_polynomials_strong_algebra():
    t, mult = truncated_polynomial_triple(3)
    w = check_constraint_algebra(t, mult)
    assert w.is_algebra and w.is_strong


def test_gl2_borel_constraint_ce():
    bv = constraint_ce(fixtures.gl2_borel())
    assert bv.report.passed, bv.report.to_text()
    assert bv.report.dimensions["CE"][1] == [4, 3, 1]


def test_broken_ideal_witnesses():
    bv = constraint_ce(fixtures.broken_ideal())
    failed = {c.name for c in bv.report.failures()}
    assert "L_W subalgebra and L_N ideal in L_W" in failed
    assert all(c.witness is not None for c in bv.report.failures())


def test_coordinate_ideal_constraint_ce():
    inst = LieRinehartInstance.poly(["x", "y"])
    bv = constraint_ce(ConstraintLR.coordinate_ideal(inst, [1]), bound=2)
    assert bv.report.passed, bv.report.to_text()


@pytest.mark.parametrize("k", [0, 1, 2])
def test_null_forms_are_pullback_vanishing(k):
    # for a coordinate ideal, alpha is null iff every coefficient of a word
    # avoiding the ideal variables lies in the ideal
    inst = LieRinehartInstance.poly(["x", "y", "z"])
    lr = ConstraintLR.coordinate_ideal(inst, [2])
    sl = form_slice(inst, k, 1)
    for e in sl.basis():
        (w, p), = e.terms.items()
        expected = 2 in w or p.in_coordinate_ideal([2])
        assert lr.form_in(e, "N") == expected, (w, p)
