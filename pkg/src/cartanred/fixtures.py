"""Named instances used by the tests, the acceptance suite and the CLI."""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Dict, List, Tuple

from .exactlin import ExactMatrix, rank, solve
from .liering import LieRinehartInstance

Constants = Dict[Tuple[int, int], Dict[int, Fraction]]

SO3: Constants = {(0, 1): {2: 1}, (1, 2): {0: 1}, (2, 0): {1: 1}}

# gl(2) in the basis E11, E12, E21, E22
GL2: Constants = {
    (0, 1): {1: 1},
    (0, 2): {2: -1},
    (1, 2): {0: 1, 3: -1},
    (1, 3): {1: 1},
    (2, 3): {2: -1},
}

# oscillator algebra: [h, a] = a, [h, b] = -b, [a, b] = z, z central
OSCILLATOR: Constants = {(0, 1): {1: 1}, (0, 2): {2: -1}, (1, 2): {3: 1}}

# Jacobi fails: [e0,[e1,e2]] + cyclic = -e1 + ... is nonzero
BROKEN_JACOBI: Constants = {(0, 1): {0: 1}, (0, 2): {0: 1}, (1, 2): {0: 1, 1: 1}}


def so3() -> LieRinehartInstance:
    return LieRinehartInstance.lie(3, SO3, label="so3")


def abelian(n: int) -> LieRinehartInstance:
    return LieRinehartInstance.lie(n, {}, label=f"abelian{n}")


def change_basis(constants: Constants, dim: int, P: List[List[int]]) -> Constants:
    """Structure constants in the basis ``f_a = sum_i P[i][a] e_i``."""
    m = ExactMatrix.from_dense(P)
    out: Constants = {}
    for a in range(dim):
        for b in range(a + 1, dim):
            # [f_a, f_b] in the e basis
            vec: Dict[int, Fraction] = {}
            for (i, j), ks in constants.items():
                for s, (u, v) in ((1, (i, j)), (-1, (j, i))):
                    coef = s * P[u][a] * P[v][b]
                    if coef:
                        for k, c in ks.items():
                            vec[k] = vec.get(k, 0) + coef * Fraction(c)
            x = solve(m, [vec.get(k, 0) for k in range(dim)])
            assert x is not None
            x = {k: c for k, c in x.items() if c}
            if x:
                out[(a, b)] = x
    return out


def random_invertible(dim: int, rng: random.Random) -> List[List[int]]:
    """Seeded invertible integer matrix with small entries."""
    while True:
        P = [[rng.randint(-2, 2) for _ in range(dim)] for _ in range(dim)]
        m = ExactMatrix.from_dense(P)
        if rank(m) == dim:
            return P


def seeded_lie4(which: str, seed: int = 0) -> LieRinehartInstance:
    """``gl2`` or ``oscillator`` in a seeded random rational basis."""
    base = {"gl2": GL2, "oscillator": OSCILLATOR}[which]
    rng = random.Random(f"{which}:{seed}")
    P = random_invertible(4, rng)
    return LieRinehartInstance.lie(4, change_basis(base, 4, P), label=f"{which}-seed{seed}")


def cartan_suite_instances(seed: int = 0) -> List[LieRinehartInstance]:
    return [so3(), seeded_lie4("gl2", seed), seeded_lie4("oscillator", seed)]


def broken_jacobi() -> LieRinehartInstance:
    return LieRinehartInstance.lie(3, BROKEN_JACOBI, label="broken-jacobi")


# ---------------------------------------------------------------- reduction data


def gl2() -> LieRinehartInstance:
    return LieRinehartInstance.lie(4, GL2, label="gl2")


def _gl2_matrix(i: int) -> List[List[int]]:
    m = [[0, 0], [0, 0]]
    m[i // 2][i % 2] = 1
    return m


def _matmul(a, b):
    return [[sum(a[r][t] * b[t][c] for t in range(2)) for c in range(2)] for r in range(2)]


def gl2_cartan_form(inst: LieRinehartInstance = None):
    """The 3-form ``tr(e_i [e_j, e_k])`` on gl(2)."""
    from .cartan import CEForm
    from itertools import combinations

    inst = inst or gl2()
    E = [_gl2_matrix(i) for i in range(4)]
    terms = {}
    for i, j, k in combinations(range(4), 3):
        ab = _matmul(E[j], E[k])
        ba = _matmul(E[k], E[j])
        br = [[ab[r][c] - ba[r][c] for c in range(2)] for r in range(2)]
        prod = _matmul(E[i], br)
        tr = prod[0][0] + prod[1][1]
        if tr:
            terms[(i, j, k)] = inst.const(tr)
    return CEForm(inst, 3, terms)


def gl2_borel(inst: LieRinehartInstance = None, null=(1,)):
    """Borel subalgebra span{E11, E12, E22} with the ideal spanned by ``null`` (E12 by default)."""
    from .constraint import ConstraintLR

    inst = inst or gl2()
    W = [{0: 1}, {1: 1}, {3: 1}]
    N = [{i: 1} for i in null]
    return ConstraintLR.lie(inst, W, N, label="gl2-borel")


def broken_ideal():
    """Same subalgebra with E11 as the would-be ideal; [E11, E12] = E12 escapes it."""
    return gl2_borel(null=(0,))


def r5_instance(bound: int = 3) -> LieRinehartInstance:
    return LieRinehartInstance.poly(["t", "x1", "x2", "y1", "y2"], degree_bound=bound, label="R5")


def r5_form(inst: LieRinehartInstance, flip: bool = False):
    """``dt^dx1^dy1 + dt^dx2^dy2``; ``flip`` negates the first term."""
    from .cartan import CEForm

    return CEForm(inst, 3, {(0, 1, 3): inst.const(-1 if flip else 1), (0, 2, 4): inst.one()})


def r5_data(bound: int = 3, flip: bool = False):
    """(symmetry data, cocycle, momentum) for F = {d_x1}, I = (y1), mu = -y1 dt."""
    from .cartan import CEForm
    from .multivec import Multivector
    from .observables import Cocycle
    from .reduction import SymmetryData

    inst = r5_instance(bound)
    sym = SymmetryData(inst, [3], [Multivector.basis(inst, (1,))], label="R5")
    mu = CEForm(inst, 1, {(0,): -inst.var(3)})
    return sym, Cocycle(r5_form(inst, flip)), [mu]


def r3_model(bound: int = 3):
    """Downstairs model: R^3 with coordinates t, x2, y2 and its volume form."""
    from .cartan import CEForm
    from .observables import Cocycle

    inst = LieRinehartInstance.poly(["t", "x2", "y2"], degree_bound=bound, label="R3-model")
    return inst, Cocycle(CEForm.basis(inst, (0, 1, 2)))


def symplectic_data(bound: int = 3, zero_momentum: bool = False):
    """Plane with dx^dy, I = (y), F = {d_x} and mu = -y; or no symmetries at all."""
    from .cartan import CEForm
    from .multivec import Multivector
    from .observables import Cocycle
    from .reduction import SymmetryData

    inst = LieRinehartInstance.poly(["x", "y"], degree_bound=bound, label="plane")
    omega = CEForm.basis(inst, (0, 1))
    if zero_momentum:
        return SymmetryData(inst, [1], [], label="plane"), Cocycle(omega), []
    sym = SymmetryData(inst, [1], [Multivector.basis(inst, (0,))], label="plane")
    return sym, Cocycle(omega), [CEForm.function(inst, -inst.var(1))]


def bad_symmetry(bound: int = 2, check: bool = True):
    """d_y does not preserve (y)."""
    from .multivec import Multivector
    from .reduction import SymmetryData

    inst = LieRinehartInstance.poly(["x", "y"], degree_bound=bound, label="plane")
    return SymmetryData(inst, [1], [Multivector.basis(inst, (1,))], check=check)


def constraint_manifold(a: int, b: int, c: int, bound: int = 3):
    """Normal coordinates n, leaf coordinates u, transverse coordinates z; I = (n), F = {d_u}."""
    from .multivec import Multivector
    from .reduction import SymmetryData

    names = [f"n{i}" for i in range(a)] + [f"u{i}" for i in range(b)] + [f"z{i}" for i in range(c)]
    inst = LieRinehartInstance.poly(names, degree_bound=bound, label=f"constraint-{a}-{b}-{c}")
    F = [Multivector.basis(inst, (a + i,)) for i in range(b)]
    return SymmetryData(inst, list(range(a)), F, label=inst.label)


def volume_cocycle(n: int, bound: int = 2):
    """R^n with its volume form, a cocycle of degree n - 1."""
    from .cartan import CEForm
    from .observables import Cocycle

    names = [f"x{i}" for i in range(n)]
    inst = LieRinehartInstance.poly(names, degree_bound=bound, label=f"R{n}")
    return Cocycle(CEForm.basis(inst, tuple(range(n))))


def so3_volume():
    """The volume form on so(3), a cocycle of degree 2."""
    from .cartan import CEForm
    from .observables import Cocycle

    inst = so3()
    return Cocycle(CEForm.basis(inst, (0, 1, 2)))


def r3_exact_form(flip: bool = False):
    """``d(x y dz) = y dx^dz + x dy^dz`` on R^3; ``flip`` negates the second term and breaks closedness."""
    from .cartan import CEForm

    inst = LieRinehartInstance.poly(["x", "y", "z"], degree_bound=2, label="R3")
    x, y = inst.var(0), inst.var(1)
    return CEForm(inst, 2, {(0, 2): y, (1, 2): -x if flip else x})
