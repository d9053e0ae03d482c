import pytest

from cartanred import fixtures
from cartanred.liering import (
    JacobiViolation,
    LieRinehartInstance,
    LRElement,
    MalformedInput,
    anchor_apply,
    bracket,
    check_jacobi,
    instance_to_json,
    load_instance,
    parse_poly,
    validate_leibniz,
)
from cartanred.poly import Poly


def test_so3_bracket_and_jacobi():
    inst = fixtures.so3()
    e = [inst.basis_element(i) for i in range(3)]
    assert bracket(e[0], e[1]) == e[2]
    assert bracket(e[1], e[0]) == -e[2]
    assert check_jacobi(inst) is None


def test_broken_jacobi_has_witness():
    bad = check_jacobi(fixtures.broken_jacobi())
    assert isinstance(bad, JacobiViolation)
    with pytest.raises(JacobiViolation):
        load_instance(instance_to_json(fixtures.broken_jacobi()))


def test_poly_anchor_and_leibniz():
    inst = LieRinehartInstance.poly(["x", "y"])
    x, y = inst.var(0), inst.var(1)
    dx = inst.basis_element(0)
    assert anchor_apply(dx, x * x * y) == (x * y).scale(2)
    # [d_x, x d_y] = d_y
    assert bracket(dx, LRElement.single(inst, 1, x)) == inst.basis_element(1)
    assert validate_leibniz(inst).passed


def test_instance_roundtrip():
    inst = fixtures.seeded_lie4("gl2", 0)
    again = load_instance(instance_to_json(inst))
    assert again.structure_constants() == inst.structure_constants()


def test_malformed_inputs():
    with pytest.raises(MalformedInput):
        load_instance({"type": "nope"})
    with pytest.raises(MalformedInput):
        load_instance({"type": "lie", "dim": 2, "structure_constants": {"0,5": {"1": "1"}}})
    with pytest.raises(MalformedInput):
        LieRinehartInstance.lie(2, {(0, 1): {0: 1}, (1, 0): {0: 1}})


def test_parse_poly():
    p = parse_poly([{"coeff": "1/2", "exponents": [1, 0]}, {"coeff": "-3", "exponents": [0, 2]}], 2)
    assert p == Poly(2, {(1, 0): "1/2", (0, 2): -3})
