from cartanred import fixtures
from cartanred.liering import LieRinehartInstance
from cartanred.multivec import Multivector, check_gerstenhaber, schouten, wedge, wedge_all


def test_wedge_antisymmetry():
    inst = fixtures.so3()
    a, b = (Multivector.basis(inst, (i,)) for i in range(2))
    assert wedge(a, b) == -wedge(b, a)
    assert not wedge(a, a)


def test_schouten_on_degree_one_is_lie_bracket():
    inst = fixtures.so3()
    e = [Multivector.basis(inst, (i,)) for i in range(3)]
    assert schouten(e[0], e[1]) == e[2]


def test_schouten_bivector_with_function():
    # [d_x ^ d_y, x] = -iota_dx (d_x ^ d_y) = -d_y
    inst = LieRinehartInstance.poly(["x", "y"])
    bi = wedge(Multivector.basis(inst, (0,)), Multivector.basis(inst, (1,)))
    f = Multivector.scalar(inst, inst.var(0))
    assert schouten(bi, f) == -Multivector.basis(inst, (1,))


def test_gerstenhaber_exhaustive_on_lie_backend():
    for inst in fixtures.cartan_suite_instances(0):
        rep = check_gerstenhaber(inst, 3)
        assert rep.passed, rep.to_text()


def test_gerstenhaber_poly_sampled():
    inst = LieRinehartInstance.poly(["x", "y"])
    assert check_gerstenhaber(inst, 2, samples=6).passed


def test_gerstenhaber_broken_jacobi_witness():
    rep = check_gerstenhaber(fixtures.broken_jacobi(), 2)
    assert not rep.passed
    assert any(c.witness is not None for c in rep.failures())


def test_wedge_all_top_degree():
    inst = fixtures.so3()
    top = wedge_all([Multivector.basis(inst, (i,)) for i in (2, 0, 1)], inst)
    assert top == Multivector.basis(inst, (0, 1, 2))
