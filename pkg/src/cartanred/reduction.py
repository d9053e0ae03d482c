"""Reduction of observables by an ideal and a family of symmetries.

Data: a polynomial algebra A, a coordinate ideal I (generated by a subset of
the variables), symmetries F preserving I, and a closed form omega. From this
we build, on bounded coefficient-degree windows,

* the closure  Fc = A.F + I.X  of the symmetries,
* A'  = (A, {f : F(f) in I}, I),
* Fbar = {X : X(A'_W) in I},
* Y   = (X(A), normalizer of Fc in X(A)_W, Fc),
* B'  = (CE, {a : iota_xi a, Lie_xi a in CE_N}, CE_N),

and the quotient of Hamiltonian observables with its brackets. A lie-backend
variant works with a subalgebra and an ideal of a finite Lie algebra and is
exact without any window.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import comb
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .cartan import CEForm, contract, dce, lie_derivative
from .constraint import ConstraintLR, ConstraintTriple, Reduction, constraint_ce
from .exactlin import (
    ExactMatrix,
    Quotient,
    Subspace,
    Vector,
    dot,
    infeasibility_certificate,
    intersect,
    kernel_of_rows,
    rank,
    solve,
    span,
)
from .graded import GradedSpace
from .liering import LieRinehartInstance
from .multivec import Multivector, as_multivector, schouten
from .observables import Brackets, Cocycle, HamPair, ham_pairs
from .poly import Poly, monomials
from .report import Report
from .slices import GrowingCoordinates, Slice, field_slice, form_slice, function_slice


class IdealNotPreserved(ValueError):
    def __init__(self, index: int, variable: int, image: Poly):
        super().__init__(f"symmetry {index} sends generator x{variable} to {image.format()}, outside the ideal")
        self.index = index
        self.variable = variable
        self.image = image


def apply_field(X: Multivector, f: Poly) -> Poly:
    """The derivation X applied to a function."""
    inst = X.inst
    out = inst.zero()
    for w, c in X.terms.items():
        if len(w) == 1:
            out = out + c * inst.anchor_basis(w[0], f)
    return out


def _images_rows(images: Sequence, bad: Callable) -> List[Vector]:
    """Rows forcing every coefficient with ``bad(word, monomial)`` to vanish."""
    rows: Dict[Tuple, Vector] = {}
    for col, x in enumerate(images):
        if x is None:
            continue
        for w, p in x.terms.items():
            for m, c in p.terms.items():
                if bad(w, m):
                    rows.setdefault((w, m), {})[col] = c
    return list(rows.values())


def _subspace_rows(images: Sequence, sl: Slice, target: Subspace) -> List[Vector]:
    """Rows forcing each image into ``target`` (a subspace of ``sl``)."""
    cols = [sl.vector(x) if x is not None else {} for x in images]
    rows = []
    for a in target.annihilator():
        r = {j: dot(a, c) for j, c in enumerate(cols) if c}
        r = {j: c for j, c in r.items() if c}
        if r:
            rows.append(r)
    return rows


class SymmetryData:
    """Polynomial algebra, coordinate ideal ``(x_s : s in ideal)`` and symmetries F."""

    def __init__(self, inst: LieRinehartInstance, ideal: Sequence[int], symmetries: Sequence, check: bool = True, label: str = ""):
        if not inst.nvars:
            raise ValueError("symmetry data lives on the poly backend; use LieReduction for the lie backend")
        self.inst = inst
        self.S = tuple(sorted(set(ideal)))
        self.F = [as_multivector(x) for x in symmetries]
        self.label = label
        self.lr = ConstraintLR.coordinate_ideal(inst, self.S)
        self.fast = self._coordinate_directions()
        if check:
            bad = self.ideal_violation()
            if bad is not None:
                raise bad

    def _coordinate_directions(self) -> Optional[frozenset]:
        """Index set J when every symmetry is a constant coordinate field."""
        J = set()
        for X in self.F:
            if len(X.terms) != 1:
                return None
            (w, c), = X.terms.items()
            if len(w) != 1 or not c.is_constant():
                return None
            J.add(w[0])
        return frozenset(J)

    def in_I(self, p: Poly, power: int = 1) -> bool:
        return p.in_coordinate_ideal(self.S, power)

    def mono_in_I(self, m) -> bool:
        return any(m[s] for s in self.S)

    def ideal_violation(self) -> Optional[IdealNotPreserved]:
        for i, X in enumerate(self.F):
            for s in self.S:
                img = apply_field(X, self.inst.var(s))
                if not self.in_I(img):
                    return IdealNotPreserved(i, s, img)
        return None

    # --- membership predicates (exact, no window)

    def field_in_W(self, X: Multivector) -> bool:
        return all(self.in_I(X.coeff((s,))) for s in self.S)

    def field_in_N(self, X: Multivector) -> bool:
        return all(self.in_I(c) for c in X.terms.values())

    def form_in_N(self, a: CEForm) -> bool:
        """Pullback to the zero set vanishes: coefficients of words avoiding the ideal variables lie in I."""
        S = set(self.S)
        return all(S.intersection(w) or self.in_I(p) for w, p in a.terms.items())

    def form_bad(self, w, m) -> bool:
        return not (set(w).intersection(self.S) or self.mono_in_I(m))

    def generators(self) -> List[Multivector]:
        """Module generators of the closure: F together with ``x_s d_j``."""
        inst = self.inst
        out = list(self.F)
        for s in self.S:
            for j in range(inst.rank):
                out.append(Multivector.basis(inst, (j,), inst.var(s)))
        return out

    def in_F(self, X, mult_bound: Optional[int] = None) -> bool:
        return self.F_multipliers(X, mult_bound) is not None

    def F_multipliers(self, X, mult_bound: Optional[int] = None):
        """Multipliers ``g_i`` with ``X - sum g_i F_i`` in ``I.X``, or None."""
        X = as_multivector(X)
        if self.fast is not None:
            ok = all(w[0] in self.fast or self.in_I(c) for w, c in X.terms.items())
            if not ok:
                return None
            return {w[0]: c.restrict_zero(self.S) for w, c in X.terms.items() if w[0] in self.fast}
        mb = X.max_coeff_degree() if mult_bound is None else mult_bound
        mb = max(mb, 0)
        monos = monomials(self.inst.nvars, mb)
        unknowns = [(i, m) for i in range(len(self.F)) for m in monos]
        images = [self.F[i].scale(Poly(self.inst.nvars, {m: 1})) for i, m in unknowns]
        coords = GrowingCoordinates()
        target = coords.vector(X)
        cols = [coords.vector(x) for x in images]
        keep = [k for k, (w, m) in enumerate(coords.keys) if not self.mono_in_I(m)]
        pos = {k: r for r, k in enumerate(keep)}
        rows: Dict[int, Vector] = {}
        for j, col in enumerate(cols):
            for k, c in col.items():
                if k in pos:
                    rows.setdefault(pos[k], {})[j] = c
        mat = ExactMatrix(len(keep), len(unknowns), {(r, j): c for r, row in rows.items() for j, c in row.items()})
        sol = solve(mat, {pos[k]: c for k, c in target.items() if k in pos})
        if sol is None:
            return None
        out: Dict[int, Poly] = {}
        for j, c in sol.items():
            i, m = unknowns[j]
            out[i] = out.get(i, self.inst.zero()) + Poly(self.inst.nvars, {m: c})
        return out

    def F_slice(self, bound: int) -> Tuple[Slice, Subspace]:
        """The closure intersected with the field window, from multipliers inside the window."""
        sl = field_slice(self.inst, bound)
        if self.fast is not None:
            J = self.fast
            return sl, sl.where(lambda w, m: w[0] in J or self.mono_in_I(m))
        vecs = []
        for X in self.F:
            for m in monomials(self.inst.nvars, bound):
                Y = X.scale(Poly(self.inst.nvars, {m: 1}))
                if sl.contains(Y):
                    vecs.append(sl.vector(Y))
        base = sl.where(lambda w, m: self.mono_in_I(m))
        return sl, span(sl.dim, vecs) + base

    def F_rows(self, images: Sequence, bound: int) -> List[Vector]:
        """Rows forcing each image (a field) into the closure."""
        if self.fast is not None:
            J = self.fast
            return _images_rows(images, lambda w, m: not (w[0] in J or self.mono_in_I(m)))
        sl, sub = self.F_slice(bound)
        return _subspace_rows(images, sl, sub)


def closure_F(sym: SymmetryData):
    """Membership test for ``A.F + I.X``."""
    return sym.in_F


# ---------------------------------------------------------------- triples


def build_Aprime(sym: SymmetryData, bound: int) -> Tuple[ConstraintTriple, Report]:
    inst = sym.inst
    sl = function_slice(inst, bound)
    basis = sl.basis()
    rows = []
    for X in sym.F:
        rows += _images_rows([CEForm.function(inst, apply_field(X, e.value(()))) for e in basis], lambda w, m: not sym.mono_in_I(m))
    W = kernel_of_rows(rows, sl.dim)
    N = sl.ideal_subspace(sym.S)
    t = ConstraintTriple(GradedSpace({0: [str(k) for k in sl.keys]}), {0: W}, {0: N}, bound)
    rep = Report("A'")
    rep.bounds["coefficient_degree"] = bound
    reps = [e.value(()) for e in sl.elements(W)]
    bad = None
    n = 0
    for f, g in combinations(reps, 2):
        n += 1
        if not in_Aprime_W(sym, f * g):
            bad = bad or (f.format(inst.names), g.format(inst.names))
    rep.add("A'_W closed under products", bad is None, n, bad)
    rep.dimensions["A'"] = list(t.dims()[0])
    return t, rep


def in_Aprime_W(sym: SymmetryData, f: Poly) -> bool:
    return all(sym.in_I(apply_field(X, f)) for X in sym.F)


def compute_Fbar(sym: SymmetryData, bound: int, test_bound: Optional[int] = None) -> Tuple[Slice, Subspace]:
    """Fields in the window sending the A'_W window (``test_bound``) into I."""
    inst = sym.inst
    test_bound = bound + 1 if test_bound is None else test_bound
    fs = function_slice(inst, test_bound)
    aw, _ = build_Aprime(sym, test_bound)
    funcs = [e.value(()) for e in fs.elements(aw.W_at(0))]
    sl = field_slice(inst, bound)
    rows = []
    for f in funcs:
        rows += _images_rows([CEForm.function(inst, apply_field(X, f)) for X in sl.basis()], lambda w, m: not sym.mono_in_I(m))
    return sl, kernel_of_rows(rows, sl.dim)


def _field_W_rows(sym: SymmetryData, images) -> List[Vector]:
    S = set(sym.S)
    return _images_rows(images, lambda w, m: w[0] in S and not sym.mono_in_I(m))


def _coeff_degree(X: Multivector) -> int:
    return max(0, X.max_coeff_degree())


def normalizer(sym: SymmetryData, bound: int) -> Tuple[Slice, Subspace]:
    """Fields in X(A)_W (window) whose brackets with every symmetry lie in the closure."""
    sl = field_slice(sym.inst, bound)
    basis = sl.basis()
    rows = _field_W_rows(sym, basis)
    wide = bound + max([_coeff_degree(x) for x in sym.F] + [0])
    for xi in sym.F:
        rows += sym.F_rows([schouten(xi, X) for X in basis], wide)
    return sl, kernel_of_rows(rows, sl.dim)


def in_Y_W(sym: SymmetryData, X: Multivector) -> bool:
    return sym.field_in_W(X) and all(sym.in_F(schouten(xi, X)) for xi in sym.F)


def build_Y(sym: SymmetryData, bound: int, rep_bound: Optional[int] = None) -> Tuple[ConstraintTriple, Report]:
    inst = sym.inst
    sl, W = normalizer(sym, bound)
    _, N = sym.F_slice(bound)
    t = ConstraintTriple(GradedSpace({1: [str(k) for k in sl.keys]}), {1: W}, {1: N}, bound)
    rep = Report("Y")
    rep.bounds["coefficient_degree"] = bound
    rep.dimensions["Y"] = list(t.dims()[1])
    rb = min(bound, 2) if rep_bound is None else rep_bound
    small, Ws = normalizer(sym, rb)
    _, Ns = sym.F_slice(rb)
    yw, yn = small.elements(Ws), small.elements(Ns)
    fs = function_slice(inst, rb)
    aw, _ = build_Aprime(sym, rb)
    fw = [e.value(()) for e in fs.elements(aw.W_at(0))]
    fn = [e.value(()) for e in fs.elements(fs.ideal_subspace(sym.S))]
    ft = [e.value(()) for e in fs.basis()]
    rep.bounds["representative_degree"] = rb

    checks = [
        ("A'_W . Y_W in Y_W", fw, yw, lambda X: in_Y_W(sym, X)),
        ("A'_N . Y_T in Y_N", fn, small.basis(), sym.in_F),
        ("A . Y_N in Y_N", ft, yn, sym.in_F),
    ]
    for name, fs_, xs, pred in checks:
        bad = None
        n = 0
        for f in fs_:
            for X in xs:
                n += 1
                if not pred(X.scale(f)):
                    bad = bad or (f.format(inst.names), X.format("d"))
        rep.add(name, bad is None, n, bad)
    bad = None
    n = 0
    for X, Y in combinations(yw, 2):
        n += 1
        if not in_Y_W(sym, schouten(X, Y)):
            bad = bad or (X.format("d"), Y.format("d"))
    rep.add("[Y_W, Y_W] in Y_W", bad is None, n, bad)
    bad = None
    n = 0
    for X in yn:
        for Y in yw:
            n += 1
            if not sym.in_F(schouten(X, Y)):
                bad = bad or (X.format("d"), Y.format("d"))
    rep.add("[Y_N, Y_W] in Y_N", bad is None, n, bad)
    strong = None
    for X in yn:
        for Y in small.basis():
            if not sym.in_F(schouten(X, Y)):
                strong = (X.format("d"), Y.format("d"))
                break
        if strong:
            break
    rep.details["bracket_strong"] = strong is None
    if strong:
        rep.details["bracket_strong_witness"] = strong
    return t, rep


def bprime_rows(sym: SymmetryData, basis: Sequence[CEForm], xis: Sequence[Multivector], lie: bool = True) -> List[Vector]:
    rows = []
    for xi in xis:
        rows += _images_rows([contract(xi, a) for a in basis], sym.form_bad)
        if lie:
            rows += _images_rows([lie_derivative(xi, a) for a in basis], sym.form_bad)
    return rows


def in_Bprime_W(sym: SymmetryData, a: CEForm, xis: Optional[Sequence[Multivector]] = None) -> bool:
    xis = sym.F if xis is None else xis
    return all(sym.form_in_N(contract(x, a)) and sym.form_in_N(lie_derivative(x, a)) for x in xis)


def build_Bprime(sym: SymmetryData, bound: int, max_degree: Optional[int] = None, rep_bound: Optional[int] = None):
    """Per form degree: (slice, W over F, W over the closure's generators, N)."""
    inst = sym.inst
    top = inst.rank if max_degree is None else min(max_degree, inst.rank)
    rep = Report("B'")
    rep.bounds["coefficient_degree"] = bound
    parts = {}
    gens = sym.generators()
    agree = True
    for p in range(top + 1):
        sl = form_slice(inst, p, bound)
        basis = sl.basis()
        W = kernel_of_rows(bprime_rows(sym, basis, sym.F), sl.dim)
        Wg = kernel_of_rows(bprime_rows(sym, basis, gens), sl.dim)
        N = sl.where(lambda w, m: not sym.form_bad(w, m))
        parts[p] = (sl, W, Wg, N)
        agree = agree and W == Wg
        rep.dimensions[f"B'^{p}"] = [sl.dim, W.dim, N.dim]
    rep.add("B'_W over F equals B'_W over the closure", agree, top + 1)
    t = ConstraintTriple(
        GradedSpace({p: [str(k) for k in parts[p][0].keys] for p in parts}),
        {p: v[1] for p, v in parts.items()},
        {p: v[3] for p, v in parts.items()},
        bound,
    )

    # obligations on representatives from a small window
    rb = min(bound, 2) if rep_bound is None else rep_bound
    small, Ws = normalizer(sym, rb)
    _, Ns = sym.F_slice(rb)
    yw, yn = small.elements(Ws), small.elements(Ns)
    fsl = function_slice(inst, rb)
    aw, _ = build_Aprime(sym, rb)
    fw = [e.value(()) for e in fsl.elements(aw.W_at(0))]
    fn = [e.value(()) for e in fsl.elements(fsl.ideal_subspace(sym.S))]
    rep.bounds["representative_degree"] = rb
    reps_w, reps_n = {}, {}
    for p, (sl, W, _, N) in parts.items():
        sm = form_slice(inst, p, rb)
        smW = kernel_of_rows(bprime_rows(sym, sm.basis(), sym.F), sm.dim)
        smN = sm.where(lambda w, m: not sym.form_bad(w, m))
        reps_w[p], reps_n[p] = sm.elements(smW), sm.elements(smN)
    inW = lambda a: in_Bprime_W(sym, a)
    inN = sym.form_in_N

    def run(name, pairs, op, pred):
        bad = None
        n = 0
        for x, a in pairs:
            n += 1
            out = op(x, a)
            if out and not pred(out):
                bad = bad or (name, x.format("d") if isinstance(x, Multivector) else str(x), a.format("d"))
        rep.add(name, bad is None, n, bad)

    allw = [a for p in reps_w for a in reps_w[p]]
    alln = [a for p in reps_n for a in reps_n[p]]
    run("d B'_W in B'_W", [(None, a) for a in allw], lambda _, a: dce(a), inW)
    run("d B'_N in B'_N", [(None, a) for a in alln], lambda _, a: dce(a), inN)
    run("iota Y_W B'_W in B'_W", [(x, a) for x in yw for a in allw], contract, inW)
    run("iota Y_N B'_W in B'_N", [(x, a) for x in yn for a in allw], contract, inN)
    run("iota Y_W B'_N in B'_N", [(x, a) for x in yw for a in alln], contract, inN)
    run("Lie Y_W B'_W in B'_W", [(x, a) for x in yw for a in allw], lie_derivative, inW)
    run("Lie Y_N B'_W in B'_N", [(x, a) for x in yn for a in allw], lie_derivative, inN)
    run("Lie Y_W B'_N in B'_N", [(x, a) for x in yw for a in alln], lie_derivative, inN)
    run("A'_W B'_W in B'_W", [(f, a) for f in fw for a in allw], lambda f, a: a.scale(f), inW)
    run("A'_N B'_W in B'_N", [(f, a) for f in fn for a in allw], lambda f, a: a.scale(f), inN)
    return t, parts, rep


def check_cocycle_condition(sym: SymmetryData, omega: CEForm, momentum: Optional[Sequence[CEForm]] = None) -> Report:
    """``d omega = 0`` and ``omega(F, X_W, ..., X_W)`` in I, on module generators."""
    inst = sym.inst
    rep = Report("cocycle-condition")
    d = dce(omega)
    rep.add("d omega = 0", not d, 1, None if not d else d.format("d"))
    k = omega.k
    lr = sym.lr
    gens = lr._wmv
    bad = None
    n = 0
    for i, xi in enumerate(sym.F):
        for t in combinations(range(len(gens)), k - 1):
            n += 1
            v = lr.evaluate(omega, [xi] + [gens[j] for j in t])
            if not sym.in_I(v):
                bad = bad or {"symmetry": i, "fields": [gens[j].format("d") for j in t], "value": v.format(inst.names)}
    rep.add("omega(F, X_W, ...) in I", bad is None, n, bad)

    # iota_X omega in CE_N is closed under brackets of closure generators
    cands = [X for X in sym.generators() if sym.form_in_N(contract(X, omega))]
    bad = None
    n = 0
    for X, Y in combinations(cands, 2):
        n += 1
        if not sym.form_in_N(contract(schouten(X, Y), omega)):
            bad = bad or (X.format("d"), Y.format("d"))
    rep.add("{X : iota_X omega in CE_N} closed under brackets", bad is None, n, bad)

    if momentum is not None:
        bad = None
        for i, (xi, mu) in enumerate(zip(sym.F, momentum)):
            r = contract(xi, omega) + dce(mu)
            if r or not sym.form_in_N(mu):
                bad = bad or {"symmetry": i, "iota_xi omega + d mu": r.format("d"), "mu_vanishes": sym.form_in_N(mu)}
        rep.add("iota_xi omega = -d mu(xi) with mu(xi) in CE_N", bad is None, len(sym.F), bad)
    return rep


# ---------------------------------------------------------------- reduced observables


@dataclass
class ReducedObservables:
    sym: SymmetryData
    cocycle: Cocycle
    bound: int
    slices: Dict[int, Tuple]
    numerator: Dict[int, Subspace]
    denominator: Dict[int, Subspace]
    quotients: Dict[int, Quotient]
    report: Report
    tables: Dict[str, List] = field(default_factory=dict)

    def element(self, i: int, v: Vector):
        """Observable of Ham-degree i from ambient coordinates."""
        sl = self.slices[i]
        if i < 0:
            return sl[0].element(v)
        fs, vs = sl
        na = fs.dim
        a = fs.element({j: c for j, c in v.items() if j < na})
        X = vs.element({j - na: c for j, c in v.items() if j >= na})
        return HamPair(CEForm._wrap(a.inst, dict(a.terms), self.cocycle.k - 1), X)

    def basis(self, i: int, which: str = "numerator"):
        sp = {"numerator": self.numerator, "denominator": self.denominator}[which][i]
        return [self.element(i, v) for v in sp.basis]

    def representatives(self, i: int):
        return [self.element(i, v) for v in self.quotients[i].representatives]

    def dims(self) -> Dict[int, Tuple[int, int, int]]:
        return {i: (self.numerator[i].dim, self.denominator[i].dim, self.quotients[i].dim) for i in sorted(self.quotients)}


def _pair_space(cocycle: Cocycle, bound: int):
    inst = cocycle.inst
    fs = form_slice(inst, cocycle.k - 1, bound)
    vs = field_slice(inst, bound)
    return fs, vs, fs.basis(), vs.basis()


def reduced_observables(
    sym: SymmetryData,
    cocycle: Cocycle,
    bound: int,
    drop_lie_condition: bool = False,
    budget: int = 4000,
) -> ReducedObservables:
    """Numerator and denominator of the reduced observables at a coefficient-degree window."""
    inst = sym.inst
    k = cocycle.k
    rep = Report("reduced-observables")
    rep.bounds["coefficient_degree"] = bound
    slices, num, den, quo = {}, {}, {}, {}

    for i in range(-(k - 1), 0):
        p = k - 1 + i
        sl = form_slice(inst, p, bound)
        basis = sl.basis()
        num[i] = kernel_of_rows(bprime_rows(sym, basis, sym.F), sl.dim)
        den[i] = sl.where(lambda w, m: not sym.form_bad(w, m))
        slices[i] = (sl,)

    fs, vs, fb, vb = _pair_space(cocycle, bound)
    na, nx = fs.dim, vs.dim
    total = na + nx
    alpha_only = lambda imgs: list(imgs) + [None] * nx
    field_only = lambda imgs: [None] * na + list(imgs)
    pair_images = [dce(a) for a in fb] + [contract(X, cocycle.omega) for X in vb]
    pair_rows = _images_rows(pair_images, lambda w, m: True)

    def alpha_rows(lie: bool):
        rows = []
        for xi in sym.F:
            rows += _images_rows(alpha_only(contract(xi, a) for a in fb), sym.form_bad)
            if lie:
                rows += _images_rows(alpha_only(lie_derivative(xi, a) for a in fb), sym.form_bad)
        return rows

    wide = bound + max([_coeff_degree(x) for x in sym.F] + [0])
    bracket_rows = []
    for xi in sym.F:
        bracket_rows += sym.F_rows(field_only(schouten(xi, X) for X in vb), wide)
    xw_rows = _field_W_rows(sym, field_only(vb))
    num[0] = kernel_of_rows(pair_rows + alpha_rows(not drop_lie_condition) + xw_rows + bracket_rows, total)
    den_rows = pair_rows + _images_rows(alpha_only(fb), sym.form_bad) + sym.F_rows(field_only(vb), bound)
    den[0] = kernel_of_rows(den_rows, total)
    slices[0] = (fs, vs)

    for i in num:
        ok = den[i] <= num[i]
        rep.add(f"denominator inside numerator (degree {i})", ok, den[i].dim)
        quo[i] = Quotient(den[i], num[i]) if ok else Quotient(intersect(den[i], num[i]), num[i])
    ro = ReducedObservables(sym, cocycle, bound, slices, num, den, quo, rep)
    rep.dimensions["numerator"] = {i: num[i].dim for i in sorted(num)}
    rep.dimensions["denominator"] = {i: den[i].dim for i in sorted(den)}
    rep.dimensions["reduced"] = {i: quo[i].dim for i in sorted(quo)}
    _check_brackets(ro, budget)
    return ro


def _num_form(sym, a: CEForm) -> bool:
    return in_Bprime_W(sym, a)


def _num_pair(sym, cocycle, x: HamPair) -> bool:
    return (
        cocycle.is_pair(x.alpha, x.X)
        and in_Bprime_W(sym, x.alpha)
        and sym.field_in_W(x.X)
        and all(sym.in_F(schouten(xi, x.X)) for xi in sym.F)
    )


def _den_pair(sym, cocycle, x: HamPair) -> bool:
    return cocycle.is_pair(x.alpha, x.X) and sym.form_in_N(x.alpha) and sym.in_F(x.X)


def _in_part(sym, cocycle, x, part: str) -> bool:
    if isinstance(x, HamPair):
        if not x:
            return True
        return _num_pair(sym, cocycle, x) if part == "W" else _den_pair(sym, cocycle, x)
    return _num_form(sym, x) if part == "W" else sym.form_in_N(x)


def _check_brackets(ro: ReducedObservables, budget: int) -> None:
    """l_j(W, ..., W) in W and l_j(N, W, ..., W) in N on basis representatives."""
    sym, cocycle, rep = ro.sym, ro.cocycle, ro.report
    br = Brackets(cocycle)
    k = cocycle.k
    W = {i: ro.basis(i) for i in ro.numerator}
    N = {i: ro.basis(i, "denominator") for i in ro.denominator}

    # l1
    bad = None
    n = 0
    for i in W:
        if i == 0:
            continue
        for part, elems in (("W", W[i]), ("N", N[i])):
            for x in elems:
                n += 1
                if not _in_part(sym, cocycle, br.bracket([x]), part):
                    bad = bad or ("l1", part, i, x.format("d"))
    rep.add("l1 preserves numerator and denominator", bad is None, n, bad)

    for j in range(2, k + 2):
        bad = None
        n = 0
        truncated = False
        for combo in combinations(range(len(W[0])), j):
            if n >= budget:
                truncated = True
                break
            n += 1
            out = br.bracket([W[0][t] for t in combo])
            if not _in_part(sym, cocycle, out, "W"):
                bad = bad or (f"l{j}(W..W)", combo)
        for a in N[0]:
            for combo in combinations(range(len(W[0])), j - 1):
                if n >= 2 * budget:
                    truncated = True
                    break
                n += 1
                out = br.bracket([a] + [W[0][t] for t in combo])
                if not _in_part(sym, cocycle, out, "N"):
                    bad = bad or (f"l{j}(N,W..W)", a.format(), combo)
        rep.add(f"l{j} is a constraint map", bad is None, n, bad, "budget reached" if truncated else "")

    # bracket table on quotient representatives for l2
    reps = ro.representatives(0)
    table = []
    fs, vs = ro.slices[0]
    for a, b in combinations(range(len(reps)), 2):
        out = br.l2(reps[a], reps[b])
        entry = {"i": a, "j": b}
        if fs.contains(out.alpha) and vs.contains(out.X):
            v = {t: c for t, c in fs.vector(out.alpha).items()}
            v.update({fs.dim + t: c for t, c in vs.vector(out.X).items()})
            if ro.numerator[0].contains(v):
                entry["class"] = {str(t): str(c) for t, c in enumerate(ro.quotients[0].project(v)) if c}
            else:
                entry["class"] = None
        else:
            entry["outside_window"] = True
            entry["in_denominator"] = _den_pair(sym, cocycle, out)
        table.append(entry)
    ro.tables["l2"] = table

    # perturbing representatives by denominator elements leaves the classes alone
    bad = None
    n = 0
    if N[0]:
        for a, b in combinations(range(len(reps)), 2):
            if n >= budget:
                break
            pa = reps[a] + N[0][a % len(N[0])]
            pb = reps[b] + N[0][(a + b) % len(N[0])].scale(2)
            n += 1
            diff = br.l2(pa, pb) - br.l2(reps[a], reps[b])
            if not _in_part(sym, cocycle, diff, "N"):
                bad = bad or (a, b)
    rep.add("l2 classes independent of representatives", bad is None, n, bad)


def momentum_shortcut_check(sym: SymmetryData, cocycle: Cocycle, momentum: Sequence[CEForm], bound: int) -> Report:
    """With a covariant momentum map the Lie-derivative condition can be dropped: compare numerators."""
    rep = Report("momentum-shortcut")
    rep.bounds["coefficient_degree"] = bound
    full = reduced_observables(sym, cocycle, bound, budget=0)
    short = reduced_observables(sym, cocycle, bound, drop_lie_condition=True, budget=0)
    mom = check_cocycle_condition(sym, cocycle.omega, momentum)
    rep.extend(mom)
    rep.add("numerators agree without the Lie condition", full.numerator[0] == short.numerator[0], full.numerator[0].dim)
    return rep


# ---------------------------------------------------------------- residue defect


def _restrict_forms(a: CEForm, target: LieRinehartInstance, keep: Dict[int, int], zero_vars: Sequence[int]) -> CEForm:
    """Pull back to the slice ``x_v = 0`` for ``v in zero_vars`` and rename the kept coordinates."""
    out = {}
    for w, p in a.terms.items():
        if not all(i in keep for i in w):
            continue
        q = p.restrict_zero(zero_vars)
        if not q:
            continue
        terms = {tuple(m[i] for i in sorted(keep)): c for m, c in q.terms.items()}
        out[tuple(keep[i] for i in w)] = Poly(target.nvars, terms)
    return CEForm(target, a.k, out)


def _restrict_field(X: Multivector, target, keep, zero_vars) -> Multivector:
    out = {}
    for w, p in X.terms.items():
        if w[0] not in keep:
            continue
        q = p.restrict_zero(zero_vars)
        if q:
            out[(keep[w[0]],)] = Poly(target.nvars, {tuple(m[i] for i in sorted(keep)): c for m, c in q.terms.items()})
    return Multivector(target, out)


def lift_system(sym: SymmetryData, omega: CEForm, V0: Multivector, bound: int):
    """Linear system for ``d iota_V omega = 0`` with ``V = V0 + f d_F + x_s R`` at a coefficient bound."""
    inst = sym.inst
    fs = function_slice(inst, bound)
    vs = field_slice(inst, bound)
    unknowns = []
    for xi in sym.F:
        for e in fs.basis():
            unknowns.append(xi.scale(e.value(())))
    for s in sym.S:
        for X in vs.basis():
            unknowns.append(X.scale(inst.var(s)))
    coords = GrowingCoordinates()
    rhs_form = dce(contract(V0, omega))
    cols = [coords.vector(dce(contract(U, omega))) for U in unknowns]
    rhs = {i: -c for i, c in coords.vector(rhs_form).items()}
    m = ExactMatrix.from_columns(cols, coords.dim)
    return m, rhs, coords, unknowns


def residue_defect_check(bound: int = 3, reduced_bound: Optional[int] = None, budget: int = 2000) -> Report:
    """Residue defect on the R^5 example: comparison map, downstairs pair, lift obstruction."""
    from . import fixtures

    rep = Report("residue-defect")
    rep.bounds["lift_coefficient_degree"] = bound
    sym, cocycle, momentum = fixtures.r5_data(bound)
    inst = sym.inst
    down, cdown = fixtures.r3_model(bound + 2)
    t, x2, y2 = (down.var(i) for i in range(3))

    # (b) the displayed downstairs pair, and the field's actual Hamiltonian form
    X = Multivector(down, {(0,): x2, (1,): -t})
    literal = CEForm(down, 1, {(2,): x2 * t})
    res = cdown.residual(literal, X)
    rep.add("literal witness pair (x2 t dy2, x2 d_t - t d_x2) is Hamiltonian downstairs", not res, 1, None if not res else res.format("d"))
    fixed = CEForm(down, 1, {(2,): (t * t + x2 * x2).scale(Fraction(-1, 2))})
    rep.add("field x2 d_t - t d_x2 is Hamiltonian downstairs with form -(t^2 + x2^2)/2 dy2", cdown.is_pair(fixed, X), 1)

    # (c) no lift V = x2 d_t - t d_x2 + f d_x1 + y1 R has closed iota_V omega
    T_, X1, X2, Y1, Y2 = range(5)
    V0 = Multivector(inst, {(T_,): inst.var(X2), (X2,): -inst.var(T_)})
    certs = {}
    for D in sorted({0, bound}):
        m, rhs, coords, _ = lift_system(sym, cocycle.omega, V0, D)
        y = infeasibility_certificate(m, rhs)
        ok = y is not None
        if ok:
            # verify the certificate exactly: y^T m = 0 and y . rhs != 0
            combo: Vector = {}
            for i, c in y.items():
                for j, x in m.row(i).items():
                    combo[j] = combo.get(j, 0) + c * x
            ok = not any(combo.values()) and dot(y, rhs) != 0
            certs[D] = {
                "rows": [{"word": list(coords.keys[i][0]), "monomial": list(coords.keys[i][1]), "weight": str(c)} for i, c in sorted(y.items())],
                "y.rhs": str(dot(y, rhs)),
                "unknowns": m.cols,
                "equations": m.rows,
            }
        rep.add(f"lift system infeasible at coefficient degree {D}", ok, m.cols, None if ok else "system is solvable")
    rep.infeasible = certs

    # (a) comparison map from the computed reduced slice into the downstairs observables
    rb = bound if reduced_bound is None else reduced_bound
    rep.bounds["reduced_coefficient_degree"] = rb
    ro = reduced_observables(sym, cocycle, rb, budget=budget)
    rep.extend(ro.report, "reduced: ")
    keep = {T_: 0, X2: 1, Y2: 2}
    zero = (X1, Y1)
    for i in sorted(ro.numerator):
        num = ro.basis(i)
        images = []
        bad = None
        for x in num:
            if isinstance(x, HamPair):
                a = _restrict_forms(x.alpha, down, keep, zero)
                Xr = _restrict_field(x.X, down, keep, zero)
                if not cdown.is_pair(a, Xr):
                    bad = bad or x.format()
                images.append((a, Xr))
            else:
                images.append((_restrict_forms(x, down, keep, zero), None))
        if i == 0:
            rep.add("comparison image is Hamiltonian downstairs", bad is None, len(num), bad)
        coordsc = GrowingCoordinates()
        cols = []
        for a, Xr in images:
            v = {("a",) + key: c for key, c in _keyed(a).items()}
            if Xr is not None:
                v.update({("X",) + key: c for key, c in _keyed(Xr).items()})
            cols.append(v)
        keys = sorted({k for c in cols for k in c})
        pos = {k: r for r, k in enumerate(keys)}
        mat = ExactMatrix.from_columns([{pos[k]: c for k, c in col.items()} for col in cols], len(keys))
        r = rank(mat)
        expected = ro.quotients[i].dim
        # kernel of the map on the numerator must be exactly the denominator
        ker_dim = len(num) - r
        den_ok = all(not any(_keyed(_restrict_forms(x.alpha if isinstance(x, HamPair) else x, down, keep, zero)).values()) for x in ro.basis(i, "denominator"))
        rep.add(
            f"comparison map injective on the reduced slice (degree {i})",
            r == expected and ker_dim == ro.denominator[i].dim and den_ok,
            len(num),
            None if r == expected else {"rank": r, "reduced_dim": expected},
        )
    rep.dimensions.update({f"reduced degree {i}": list(v) for i, v in ro.dims().items()})
    return rep


def _keyed(x) -> Dict[Tuple, Fraction]:
    return {(w, m): c for w, p in x.terms.items() for m, c in p.terms.items()}


# ---------------------------------------------------------------- symplectic denominator


def ideal_slice(inst, bound: int, generators: Sequence[Poly], base: Subspace) -> Subspace:
    """Window of the ideal generated by ``generators`` plus ``base`` (multipliers inside the window)."""
    sl = function_slice(inst, bound)
    vecs = []
    for g in generators:
        for m in monomials(inst.nvars, bound):
            h = g * Poly(inst.nvars, {m: 1})
            e = CEForm.function(inst, h)
            if sl.contains(e):
                vecs.append(sl.vector(e))
    return span(sl.dim, vecs) + base


def _alpha_projection(ro: ReducedObservables, space: Subspace) -> Subspace:
    fs, _ = ro.slices[0]
    return span(fs.dim, [{j: c for j, c in v.items() if j < fs.dim} for v in space.basis])


def symplectic_denominator_check(bound: int = 3) -> Report:
    """Denominator equals the window of ``I_mu + Q`` and is closed under Poisson brackets."""
    from . import fixtures

    rep = Report("symplectic-denominator")
    rep.bounds["coefficient_degree"] = bound
    for label, zero_momentum in (("", False), ("zero momentum: ", True)):
        sym, cocycle, momentum = fixtures.symplectic_data(bound, zero_momentum=zero_momentum)
        inst = sym.inst
        fsl = function_slice(inst, bound)
        Q = fsl.ideal_subspace(sym.S, 2)
        Imu = ideal_slice(inst, bound, [mu.value(()) for mu in momentum], Q)
        ro = reduced_observables(sym, cocycle, bound, budget=500)
        rep.extend(ro.report, label + "reduced: ")
        if momentum:
            rep.extend(check_cocycle_condition(sym, cocycle.omega, momentum), label)
        den = _alpha_projection(ro, ro.denominator[0])
        rep.add(label + "denominator inside I_mu + Q", den <= Imu, den.dim)
        rep.add(label + "I_mu + Q inside denominator", Imu <= den, Imu.dim)
        rep.dimensions[label + "denominator"] = den.dim
        rep.dimensions[label + "I_mu + Q"] = Imu.dim
        if zero_momentum:
            rep.add(label + "denominator equals the Q window", den == Q, Q.dim)
            continue
        # Poisson closure {A'_W, I_mu + Q} in I_mu + Q
        aw, _ = build_Aprime(sym, bound)
        wide = function_slice(inst, 2 * bound)
        Qw = wide.ideal_subspace(sym.S, 2)
        Imu_w = ideal_slice(inst, 2 * bound, [mu.value(()) for mu in momentum], Qw)
        bad = None
        n = 0
        fw = [e.value(()) for e in fsl.elements(aw.W_at(0))]
        gi = [e.value(()) for e in fsl.elements(Imu)]
        for f in fw:
            for g in gi:
                n += 1
                b = poisson(cocycle, f, g)
                if not Imu_w.contains(wide.vector(CEForm.function(inst, b))):
                    bad = bad or (f.format(inst.names), g.format(inst.names), b.format(inst.names))
        rep.add("Poisson bracket {A'_W, I_mu + Q} in I_mu + Q", bad is None, n, bad)
        num = _alpha_projection(ro, ro.numerator[0])
        rep.add("numerator functions equal A'_W", num == aw.W_at(0), num.dim)
    return rep


def hamiltonian_field(cocycle: Cocycle, f: Poly) -> Multivector:
    """The unique X with ``iota_X omega = -df`` for a nondegenerate 2-form with constant coefficients."""
    inst = cocycle.inst
    target = -dce(CEForm.function(inst, f))
    vs = field_slice(inst, max(f.degree(), 0))
    basis = vs.basis()
    coords = GrowingCoordinates()
    cols = [coords.vector(contract(X, cocycle.omega)) for X in basis]
    rhs = coords.vector(target)
    m = ExactMatrix.from_columns(cols, coords.dim)
    sol = solve(m, rhs)
    if sol is None:
        raise ValueError("no Hamiltonian field in the window")
    return vs.element(sol)


def poisson(cocycle: Cocycle, f: Poly, g: Poly) -> Poly:
    """``{f, g}`` as the form part of the skew bracket of the Hamiltonian pairs of f and g."""
    Xf, Xg = hamiltonian_field(cocycle, f), hamiltonian_field(cocycle, g)
    return -contract(Xf, contract(Xg, cocycle.omega)).value(())


# ---------------------------------------------------------------- constraint manifolds


def constraint_manifold_counts(c: int, bound: int, max_degree: int) -> Dict[str, object]:
    """Direct counts on the quotient model: polynomials, fields and forms in the transverse variables."""
    funcs = comb(c + bound, bound)
    return {"functions": funcs, "fields": c * funcs, "forms": {p: comb(c, p) * funcs for p in range(max_degree + 1)}}


def constraint_manifold_check(bound: int = 3, a: int = 1, b: int = 1, c: int = 1) -> Report:
    """Normal, leaf and transverse coordinates: reductions against counts on the quotient."""
    from . import fixtures

    rep = Report("constraint-manifold")
    rep.bounds["coefficient_degree"] = bound
    rep.details["shape"] = {"normal": a, "leaf": b, "transverse": c}
    sym = fixtures.constraint_manifold(a, b, c, bound)
    inst = sym.inst
    transverse = list(range(a + b, a + b + c))
    top = min(inst.rank, 2)
    expect = constraint_manifold_counts(c, bound, top)

    At, arep = build_Aprime(sym, bound)
    rep.extend(arep)
    Yt, yrep = build_Y(sym, bound)
    rep.extend(yrep)
    Bt, parts, brep = build_Bprime(sym, bound, max_degree=top)
    rep.extend(brep)
    Fbar_sl, Fbar = compute_Fbar(sym, bound)
    _, Fsl = sym.F_slice(bound)
    rep.add("closure window inside Fbar window", Fsl <= Fbar, Fsl.dim)
    rep.add("Fbar window equals closure window", Fbar == Fsl, Fbar.dim)

    got = {"functions": At.reduced_dims()[0], "fields": Yt.reduced_dims()[1], "forms": {p: Bt.reduced_dims().get(p, 0) for p in range(top + 1)}}
    rep.dimensions["reduced"] = got
    rep.dimensions["direct count"] = expect
    rep.add("red(A) matches functions on the quotient", got["functions"] == expect["functions"], 1, None if got["functions"] == expect["functions"] else got)
    rep.add("red(Y) matches fields on the quotient", got["fields"] == expect["fields"], 1, None if got["fields"] == expect["fields"] else got)
    rep.add("red(B') matches forms on the quotient", got["forms"] == expect["forms"], top + 1, None if got["forms"] == expect["forms"] else got)

    # explicit isomorphisms: restrict to the zero set and forget leaf directions
    keep = {v: i for i, v in enumerate(transverse)}
    zero = [v for v in range(inst.nvars) if v not in keep]
    model = LieRinehartInstance.poly([inst.names[v] for v in transverse] or ["_"], bound) if c else None

    def iso_rank(elems, restrict):
        keyed = [_keyed(restrict(e)) for e in elems]
        keys = sorted({k for d in keyed for k in d})
        pos = {k: r for r, k in enumerate(keys)}
        return rank(ExactMatrix.from_columns([{pos[k]: v for k, v in d.items()} for d in keyed], len(keys)))

    if c:
        ra = Reduction(At)
        fsl = function_slice(inst, bound)
        reps = [fsl.element(v) for v in ra.representatives(0)]
        r = iso_rank(reps, lambda e: _restrict_forms(e, model, keep, zero))
        rep.add("restriction is injective on red(A)", r == len(reps), len(reps))
        ry = Reduction(Yt)
        fld = field_slice(inst, bound)
        reps = [fld.element(v) for v in ry.representatives(1)]
        r = iso_rank(reps, lambda X: _restrict_field(X, model, keep, zero))
        rep.add("restriction is injective on red(Y)", r == len(reps), len(reps))
        rb = Reduction(Bt)
        ok = True
        for p in range(top + 1):
            sl = parts[p][0]
            reps = [sl.element(v) for v in rb.representatives(p)]
            if reps and iso_rank(reps, lambda e: _restrict_forms(e, model, keep, zero)) != len(reps):
                ok = False
        rep.add("restriction is injective on red(B')", ok, top + 1)
    return rep


# ---------------------------------------------------------------- lie backend


def lie_reduction(lr: ConstraintLR, omega: CEForm) -> Report:
    """Constraint observables of a finite Lie algebra with subalgebra and ideal; fully exact."""
    inst = lr.inst
    rep = Report("lie-reduction")
    bv = constraint_ce(lr)
    rep.extend(bv.report, "constraint CE: ")
    cocycle = Cocycle(omega)
    k = cocycle.k
    rep.add("omega in CE_W", lr.form_in(omega, "W"), 1, lr.form_defect(omega, "W"))
    pairs = ham_pairs(cocycle)
    sl_a, Wa, Na = bv.forms[k - 1]
    n = inst.rank

    def vec(x: HamPair) -> Vector:
        v = dict(sl_a.vector(x.alpha))
        for (i,), p in x.X.terms.items():
            v[sl_a.dim + i] = p.constant_term()
        return v

    total = sl_a.dim + n
    H = span(total, [vec(x) for x in pairs])
    gW = span(n, [{i: p.constant_term() for (i,), p in x.terms.items()} for x in lr._wmv])
    gN = span(n, [{i: p.constant_term() for (i,), p in x.terms.items()} for x in lr._nmv])

    def direct(A: Subspace, B: Subspace) -> Subspace:
        return span(total, list(A.basis) + [{sl_a.dim + i: c for i, c in v.items()} for v in B.basis])

    W0 = intersect(H, direct(Wa, gW))
    N0 = intersect(H, direct(Na, gN))
    ham = {0: (H, W0, N0)}
    for i in range(-(k - 1), 0):
        sl, W, N = bv.forms[k - 1 + i]
        ham[i] = (Subspace.full(sl.dim), W, N)
    rep.dimensions["Ham"] = {i: [h[0].dim, h[1].dim, h[2].dim] for i, h in sorted(ham.items())}
    rep.dimensions["reduced"] = {i: h[1].dim - h[2].dim for i, h in sorted(ham.items())}

    def pair_of(v: Vector) -> HamPair:
        a = sl_a.element({j: c for j, c in v.items() if j < sl_a.dim})
        X = Multivector(inst, {(j - sl_a.dim,): Poly.const(c, 0) for j, c in v.items() if j >= sl_a.dim})
        return HamPair(CEForm._wrap(inst, dict(a.terms), k - 1), X)

    def in_part(x, part) -> bool:
        if isinstance(x, HamPair):
            if not x:
                return True
            S = W0 if part == "W" else N0
            return S.contains(vec(x))
        return lr.form_in(x, part)

    br = Brackets(cocycle)
    Wp = [pair_of(v) for v in W0.basis]
    Np = [pair_of(v) for v in N0.basis]
    for j in range(1, k + 2):
        bad = None
        cnt = 0
        if j == 1:
            for i in range(-(k - 1), 0):
                sl = bv.forms[k - 1 + i][0]
                for part, S in (("W", ham[i][1]), ("N", ham[i][2])):
                    for v in S.basis:
                        cnt += 1
                        out = br.bracket([sl.element(v)])
                        if not in_part(out, part):
                            bad = bad or ("l1", part, i)
        else:
            for combo in combinations(range(len(Wp)), j):
                cnt += 1
                if not in_part(br.bracket([Wp[t] for t in combo]), "W"):
                    bad = bad or (f"l{j}(W..W)", combo)
            for a in range(len(Np)):
                for combo in combinations(range(len(Wp)), j - 1):
                    cnt += 1
                    if not in_part(br.bracket([Np[a]] + [Wp[t] for t in combo]), "N"):
                        bad = bad or (f"l{j}(N,W..W)", a, combo)
        rep.add(f"l{j} is a constraint map", bad is None, cnt, bad)

    q = Quotient(N0, W0)
    reps = [pair_of(v) for v in q.representatives]
    table = []
    for a, b in combinations(range(len(reps)), 2):
        out = br.l2(reps[a], reps[b])
        v = vec(out)
        table.append({"i": a, "j": b, "class": {str(t): str(c) for t, c in enumerate(q.project(v)) if c}})
    rep.details["l2_table"] = table
    rep.details["representatives"] = [x.format() for x in reps]
    return rep
