"""Acceptance criteria 1-10, exact (rational arithmetic, zero tolerance).

Each test prints one line ``criterion N: PASS|FAIL ...`` straight to the
terminal and asserts both the property and the runtime budget.
"""

import time

import pytest

from cartanred import fixtures
from cartanred import reduction as red
from cartanred.cartan import CEForm, dce, verify_cartan_identities
from cartanred.constraint import constraint_ce, constraint_suite
from cartanred.liering import check_jacobi
from cartanred.multivec import check_gerstenhaber
from cartanred.observables import Cocycle, NotClosed, r3_fixture_check, verify_linfty


@pytest.fixture
def announce(capsys):
    def emit(n, title, passed, seconds, budget, detail=""):
        status = "PASS" if passed and seconds < budget else "FAIL"
        extra = f" [{detail}]" if detail else ""
        with capsys.disabled():
            print(f"\ncriterion {n}: {status} {title} ({seconds:.2f}s, budget {budget}s){extra}")

    return emit


def _failures(reports):
    return "; ".join(f"{r.suite}: {c.name}" for r in reports for c in r.failures())


def test_criterion_1_cartan(announce):
    start = time.perf_counter()
    reports = [verify_cartan_identities(inst, max_wedge=3, max_form=3) for inst in fixtures.cartan_suite_instances(0)]
    dt = time.perf_counter() - start
    ok = all(r.passed for r in reports)
    # exhaustive: every basis multivector of wedge degree <= 3 and every basis form of degree <= 3
    sizes = [(r.dimensions["multivectors"], r.dimensions["forms"]) for r in reports]
    ok = ok and sizes == [(8, 8), (15, 15), (15, 15)]
    announce(1, "six Cartan relations, so(3) and two seeded 4-dim algebras", ok, dt, 10, _failures(reports))
    assert ok, _failures(reports)
    assert dt < 10


def test_criterion_2_gerstenhaber(announce):
    start = time.perf_counter()
    reports = [check_gerstenhaber(inst, 3) for inst in fixtures.cartan_suite_instances(0)]
    dt = time.perf_counter() - start
    ok = all(r.passed for r in reports)
    announce(2, "graded Jacobi and derivation rule on all basis tuples", ok, dt, 10, _failures(reports))
    assert ok, _failures(reports)
    assert dt < 10


def test_criterion_3_linfty(announce):
    start = time.perf_counter()
    cocycle = fixtures.so3_volume()
    rep = verify_linfty(cocycle)
    dt = time.perf_counter() - start
    names = {c.name: c for c in rep.checks}
    ok = rep.passed and cocycle.k == 2 and "d l2 = l1 l3" in names and "d l3 = l1 l4" in names
    ok = ok and all(names[n].note == "all ordered tuples" for n in ("d l2 = l1 l3", "d l3 = l1 l4"))
    announce(3, "d l_j = l_1 l_(j+1), j = 2, 3, so(3) volume cocycle, exhaustive", ok, dt, 10, _failures([rep]))
    assert ok, rep.to_text()
    assert dt < 10


def test_criterion_4_r3(announce):
    start = time.perf_counter()
    rep = r3_fixture_check(count=20, coeff_degree=2, seed=0)
    dt = time.perf_counter() - start
    ok = rep.passed and rep.dimensions.get("fields", 0) >= 20
    announce(4, "three R^3 vector-calculus identities on 20 seeded fields", ok, dt, 30, _failures([rep]))
    assert ok, rep.to_text()
    assert dt < 30


def test_criterion_5_monoidality(announce):
    start = time.perf_counter()
    rep = constraint_suite(seed=0, count=50, max_dim=4)
    dt = time.perf_counter() - start
    mono = rep.check("red(V (x) V') = red(V) (x) red(V')")
    ok = rep.passed and mono.count >= 50
    announce(5, "red is monoidal on 50 seeded pairs, explicit isomorphism", ok, dt, 10, _failures([rep]))
    assert ok, rep.to_text()
    assert dt < 10


def test_criterion_6_constraint_bv(announce):
    start = time.perf_counter()
    bv = constraint_ce(fixtures.gl2_borel())
    dt = time.perf_counter() - start
    rep = bv.report
    names = [c.name for c in rep.checks]
    ok = rep.passed and all(n in names for n in ("d is a constraint morphism", "iota is a constraint morphism", "Lie is a constraint morphism"))
    announce(6, "d, iota, Lie are constraint morphisms over the gl(2) Borel pair", ok, dt, 10, _failures([rep]))
    assert ok, rep.to_text()
    assert dt < 10


def test_criterion_7_residue_defect(announce):
    start = time.perf_counter()
    rep = red.residue_defect_check(3)
    dt = time.perf_counter() - start
    cert = rep.infeasible or {}
    ok = rep.passed and 3 in cert
    detail = _failures([rep])
    if 3 in cert:
        detail += f"; certificate at degree 3: {cert[3]['rows']}"
    announce(7, "R^5 residue defect: witness pair, lift infeasibility, injective comparison", ok, dt, 60, detail)
    assert dt < 60
    assert 3 in cert
    assert ok, rep.to_text()


def test_criterion_8_symplectic(announce):
    start = time.perf_counter()
    rep = red.symplectic_denominator_check(3)
    dt = time.perf_counter() - start
    announce(8, "denominator = (I_mu + Q) window, Poisson closure", rep.passed, dt, 30, _failures([rep]))
    assert rep.passed, rep.to_text()
    assert dt < 30


def test_criterion_9_constraint_manifold(announce):
    start = time.perf_counter()
    rep = red.constraint_manifold_check(3, 1, 1, 1)
    dt = time.perf_counter() - start
    got, want = rep.dimensions["reduced"], rep.dimensions["direct count"]
    ok = rep.passed and got == want
    announce(9, "red(A), red(Y), red(B') match direct counts on the quotient", ok, dt, 30, _failures([rep]))
    assert ok, rep.to_text()
    assert dt < 30


def test_criterion_10_negative_controls(announce):
    start = time.perf_counter()
    found = {}

    # broken Jacobi
    broken = fixtures.broken_jacobi()
    found["jacobi check"] = check_jacobi(broken) is not None
    for name, rep in (("cartan", verify_cartan_identities(broken, 2, 3)), ("gerstenhaber", check_gerstenhaber(broken, 2))):
        found[f"{name} on broken Jacobi"] = not rep.passed and all(c.witness is not None for c in rep.failures())
    rep = verify_linfty(Cocycle(CEForm.basis(broken, (0, 1, 2))))
    found["linfty on broken Jacobi"] = not rep.passed and all(c.witness is not None for c in rep.failures())

    # broken ideal
    rep = constraint_ce(fixtures.broken_ideal()).report
    found["constraint on broken ideal"] = not rep.passed and all(c.witness is not None for c in rep.failures())
    rep = red.lie_reduction(fixtures.broken_ideal(), fixtures.gl2_cartan_form())
    found["reduction on broken ideal"] = not rep.passed and all(c.witness is not None for c in rep.failures())
    try:
        fixtures.bad_symmetry()
        found["symmetry leaving the ideal"] = False
    except red.IdealNotPreserved as exc:
        found["symmetry leaving the ideal"] = exc.image is not None

    # sign-flipped omega
    flipped = fixtures.r3_exact_form(flip=True)
    try:
        Cocycle(flipped)
        found["flipped omega rejected as cocycle"] = False
    except NotClosed:
        found["flipped omega rejected as cocycle"] = bool(dce(flipped))
    sym, cocycle, mu = fixtures.r5_data(1, flip=True)
    rep = red.check_cocycle_condition(sym, cocycle.omega, mu)
    found["reduction on flipped R^5 form"] = not rep.passed and all(c.witness is not None for c in rep.failures())

    dt = time.perf_counter() - start
    ok = all(found.values())
    missing = ", ".join(k for k, v in found.items() if not v)
    announce(10, f"negative controls with exact witnesses ({len(found)} cases)", ok, dt, 10, missing)
    assert ok, missing
    assert dt < 10
