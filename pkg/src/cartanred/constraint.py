"""Constraint triples N <= W <= T: maps, tensor products, internal hom, reduction.

Everything here is embedded: W and N are genuine subspaces of the total space,
stored per degree as canonical ``Subspace`` objects. The second half of the
module builds the constraint exterior algebra and Chevalley-Eilenberg triples of
a constraint Lie-Rinehart algebra and checks the operations respect them.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .cartan import CEForm, contract, dce, lie_derivative
from .exactlin import (
    ExactMatrix,
    Quotient,
    Subspace,
    Vector,
    kernel_of_rows,
    rank,
    solve,
    span,
)
from .graded import GradedMap, GradedSpace, tensor, tensor_layout
from .liering import LieRinehartInstance, LRElement, anchor_apply, bracket
from .multivec import Multivector, schouten, wedge, wedge_all
from .poly import Poly, monomials
from .report import Report
from .slices import form_slice

Parts = Dict[int, Subspace]


class ContainmentViolation(ValueError):
    """N is not inside W, or W is not inside T."""

    def __init__(self, message: str, degree: int = 0, vector: Optional[Vector] = None):
        super().__init__(message)
        self.degree = degree
        self.vector = vector


class ConstraintTriple:
    """Graded constraint space: ambient ``T`` with per-degree subspaces ``N <= W``."""

    def __init__(self, ambient: GradedSpace, W: Parts, N: Parts, bound: Optional[int] = None, check: bool = True):
        self.ambient = ambient
        self.W = {d: s for d, s in W.items() if ambient.dim(d)}
        self.N = {d: s for d, s in N.items() if ambient.dim(d)}
        self.bound = bound
        if check:
            self._validate()

    def _validate(self):
        for d in set(self.W) | set(self.N):
            n = self.ambient.dim(d)
            for name, part in (("W", self.W), ("N", self.N)):
                s = part.get(d)
                if s is not None and s.ambient_dim != n:
                    raise ContainmentViolation(f"{name} in degree {d} lives in dimension {s.ambient_dim}, not {n}", d)
            for v in self.N_at(d).basis:
                if not self.W_at(d).contains(v):
                    raise ContainmentViolation(f"N is not contained in W in degree {d}", d, v)

    def degrees(self) -> List[int]:
        return self.ambient.degrees()

    def T_at(self, d: int) -> Subspace:
        return Subspace.full(self.ambient.dim(d))

    def W_at(self, d: int) -> Subspace:
        return self.W.get(d) or Subspace.zero(self.ambient.dim(d))

    def N_at(self, d: int) -> Subspace:
        return self.N.get(d) or Subspace.zero(self.ambient.dim(d))

    def dims(self) -> Dict[int, Tuple[int, int, int]]:
        return {d: (self.ambient.dim(d), self.W_at(d).dim, self.N_at(d).dim) for d in self.degrees()}

    def reduced_dims(self) -> Dict[int, int]:
        return {d: self.W_at(d).dim - self.N_at(d).dim for d in self.degrees()}

    def __eq__(self, other):
        return (
            isinstance(other, ConstraintTriple)
            and self.ambient.dims() == other.ambient.dims()
            and all(self.W_at(d) == other.W_at(d) and self.N_at(d) == other.N_at(d) for d in self.degrees())
        )

    def __repr__(self):
        return f"ConstraintTriple({self.dims()})"


def _as_parts(x, ambient: GradedSpace) -> Parts:
    if isinstance(x, Subspace):
        return {0: x}
    out = {}
    for d, s in x.items():
        out[d] = s if isinstance(s, Subspace) else span(ambient.dim(d), s)
    return out


def make_triple(T, W, N, bound: Optional[int] = None) -> ConstraintTriple:
    """Build and validate a triple.

    ``T`` is a GradedSpace or, for the ungraded case, a dimension. ``W`` and ``N``
    are Subspaces (ungraded) or ``{degree: Subspace or list of vectors}``.
    """
    if isinstance(T, int):
        T = GradedSpace.from_dims({0: T})
    return ConstraintTriple(T, _as_parts(W, T), _as_parts(N, T), bound)


def unit_triple() -> ConstraintTriple:
    """The monoidal unit (k, k, 0)."""
    return make_triple(1, Subspace.full(1), Subspace.zero(1))


class Reduction:
    """Degreewise ``W / N`` with canonical representatives."""

    def __init__(self, t: ConstraintTriple):
        self.triple = t
        self.quotients = {d: Quotient(t.N_at(d), t.W_at(d)) for d in t.degrees()}
        self.space = GradedSpace.from_dims({d: q.dim for d, q in self.quotients.items()}, prefix="r")

    def project(self, d: int, v: Vector) -> Vector:
        coords = self.quotients[d].project(v)
        return {i: c for i, c in enumerate(coords) if c}

    def representatives(self, d: int) -> List[Vector]:
        q = self.quotients.get(d)
        return list(q.representatives) if q else []

    def lift(self, d: int, coords: Vector) -> Vector:
        q = self.quotients[d]
        return q.lift([coords.get(i, 0) for i in range(q.dim)])


def reduce(t: ConstraintTriple) -> Tuple[GradedSpace, Reduction]:
    r = Reduction(t)
    return r.space, r


# ---------------------------------------------------------------- maps


class ConstraintMap:
    """A graded linear map between ambients, checked against both triples."""

    def __init__(self, source: ConstraintTriple, target: ConstraintTriple, f: GradedMap):
        if f.source != source.ambient or f.target != target.ambient:
            raise ValueError("map does not match the triples' ambient spaces")
        self.source = source
        self.target = target
        self.f = f

    def violation(self):
        """First ``(part, degree, vector, image)`` breaking the morphism property, or None."""
        for d in self.source.degrees():
            m = self.f.block(d)
            e = d + self.f.degree
            for part, src, dst in (("W", self.source.W_at(d), self.target.W_at(e)), ("N", self.source.N_at(d), self.target.N_at(e))):
                for v in src.basis:
                    img = m.apply(v)
                    if not dst.contains(img):
                        return part, d, v, img
        return None

    @property
    def is_morphism(self) -> bool:
        return self.violation() is None

    def compose(self, first: "ConstraintMap") -> "ConstraintMap":
        """``self after first``."""
        return ConstraintMap(first.source, self.target, self.f.compose(first.f))

    def reduced(self, rs: Optional[Reduction] = None, rt: Optional[Reduction] = None) -> GradedMap:
        """The induced map on reductions (only meaningful for morphisms)."""
        rs = rs or Reduction(self.source)
        rt = rt or Reduction(self.target)
        blocks = {}
        for d in self.source.degrees():
            e = d + self.f.degree
            cols = []
            for rep in rs.representatives(d):
                img = self.f.block(d).apply(rep)
                cols.append(rt.project(e, img) if e in rt.quotients else {})
            blocks[d] = ExactMatrix.from_columns(cols, rt.space.dim(e))
        return GradedMap(rs.space, rt.space, self.f.degree, blocks)


def _adapted_basis(t: ConstraintTriple, d: int) -> Tuple[List[Vector], int, int]:
    """Basis of T_d listing N first, then W, then the rest."""
    n = t.ambient.dim(d)
    basis = list(t.N_at(d).basis)
    cur = span(n, basis)
    marks = []
    for part in (t.W_at(d).basis, Subspace.full(n).basis):
        for v in part:
            if not cur.contains(v):
                basis.append(v)
                cur = cur + span(n, [v])
        marks.append(len(basis))
    return basis, t.N_at(d).dim, marks[0]


def _random_vector(rng: random.Random, space: Subspace) -> Vector:
    out: Vector = {}
    for b in space.basis:
        c = rng.randint(-3, 3)
        for i, x in b.items():
            out[i] = out.get(i, 0) + c * x
    return {i: c for i, c in out.items() if c}


def random_triple(rng: random.Random, max_dim: int = 4, degrees: Sequence[int] = (0, 1)) -> ConstraintTriple:
    """Seeded triple with ambient dimension at most ``max_dim`` in each degree."""
    dims = {d: rng.randint(1, max_dim) for d in degrees}
    W, N = {}, {}
    for d, n in dims.items():
        wdim = rng.randint(0, n)
        wvecs = [{i: Fraction(rng.randint(-3, 3)) for i in range(n)} for _ in range(wdim)]
        Wd = span(n, [{i: c for i, c in v.items() if c} for v in wvecs])
        ndim = rng.randint(0, Wd.dim)
        N[d] = span(n, [_random_vector(rng, Wd) for _ in range(ndim)])
        W[d] = Wd
    return ConstraintTriple(GradedSpace.from_dims(dims), W, N)


def random_morphism(rng: random.Random, a: ConstraintTriple, b: ConstraintTriple, degree: int = 0) -> ConstraintMap:
    """Random constraint morphism: N goes to N', W to W', the rest anywhere."""
    blocks = {}
    for d in a.degrees():
        e = d + degree
        rows = b.ambient.dim(e)
        basis, nn, nw = _adapted_basis(a, d)
        images = []
        for idx in range(len(basis)):
            target = b.N_at(e) if idx < nn else b.W_at(e) if idx < nw else b.T_at(e)
            images.append(_random_vector(rng, target))
        # f = images * basis^-1
        B = ExactMatrix.from_columns(basis, a.ambient.dim(d))
        cols = []
        for i in range(a.ambient.dim(d)):
            x = solve(B, {i: 1})
            col: Vector = {}
            for j, c in x.items():
                for r, y in images[j].items():
                    col[r] = col.get(r, 0) + c * y
            cols.append({r: c for r, c in col.items() if c})
        blocks[d] = ExactMatrix.from_columns(cols, rows)
    return ConstraintMap(a, b, GradedMap(a.ambient, b.ambient, degree, blocks))


# ---------------------------------------------------------------- tensor products and hom


def _layout_index(a: GradedSpace, b: GradedSpace):
    return {d: {slot: i for i, slot in enumerate(slots)} for d, slots in tensor_layout(a, b).items()}


def _kron(u: Vector, v: Vector, index, p: int, q: int) -> Vector:
    idx = index[p + q]
    return {idx[(p, i, q, j)]: x * y for i, x in u.items() for j, y in v.items()}


def _tensor_spans(a: GradedSpace, b: GradedSpace, pairs) -> Parts:
    """``{d: span of u (x) v}`` for ``pairs = [(parts_a, parts_b), ...]``."""
    index = _layout_index(a, b)
    vecs: Dict[int, List[Vector]] = {d: [] for d in index}
    for pa, pb in pairs:
        for p in a.degrees():
            for q in b.degrees():
                for u in pa(p).basis:
                    for v in pb(q).basis:
                        vecs[p + q].append(_kron(u, v, index, p, q))
    T = tensor(a, b)
    return {d: span(T.dim(d), vs) for d, vs in vecs.items()}


def ctensor(a: ConstraintTriple, b: ConstraintTriple) -> ConstraintTriple:
    """Weak tensor product: W (x) W' wanted, N (x) W' + W (x) N' null."""
    A, B = a.ambient, b.ambient
    W = _tensor_spans(A, B, [(a.W_at, b.W_at)])
    N = _tensor_spans(A, B, [(a.N_at, b.W_at), (a.W_at, b.N_at)])
    return ConstraintTriple(tensor(A, B), W, N)


def cstrong_tensor(a: ConstraintTriple, b: ConstraintTriple) -> ConstraintTriple:
    """Strong tensor product: N (x) T' + T (x) N' is null, and added to W (x) W'."""
    A, B = a.ambient, b.ambient
    null_pairs = [(a.N_at, b.T_at), (a.T_at, b.N_at)]
    W = _tensor_spans(A, B, [(a.W_at, b.W_at)] + null_pairs)
    N = _tensor_spans(A, B, null_pairs)
    return ConstraintTriple(tensor(A, B), W, N)


def hom_layout(a: GradedSpace, b: GradedSpace) -> Dict[int, List[Tuple[int, int, int]]]:
    """For each map degree d, the matrix-unit slots ``(p, r, c)``: basis c of a_p to basis r of b_(p+d)."""
    out: Dict[int, List[Tuple[int, int, int]]] = {}
    for p in a.degrees():
        for q in b.degrees():
            out.setdefault(q - p, []).extend((p, r, c) for r in range(b.dim(q)) for c in range(a.dim(p)))
    return out


def _hom_rows(slots_index, p: int, d: int, src: Subspace, dst: Subspace) -> List[Vector]:
    """Rows expressing ``f_p(src) <= dst`` on the matrix-unit coordinates."""
    rows = []
    for w in src.basis:
        for ann in dst.annihilator():
            row = {}
            for r, a in ann.items():
                for c, x in w.items():
                    row[slots_index[(p, r, c)]] = a * x
            if row:
                rows.append(row)
    return rows


def cihom(a: ConstraintTriple, b: ConstraintTriple) -> ConstraintTriple:
    """Internal hom, with the mapping conditions imposed degree by degree."""
    layout = hom_layout(a.ambient, b.ambient)
    ambient = GradedSpace({d: [f"{p}:{r}<-{c}" for p, r, c in slots] for d, slots in layout.items()})
    W, N = {}, {}
    for d, slots in layout.items():
        index = {s: i for i, s in enumerate(slots)}
        wrows, nrows = [], []
        for p in a.degrees():
            q = p + d
            if not b.ambient.dim(q):
                continue
            wrows += _hom_rows(index, p, d, a.W_at(p), b.W_at(q))
            wrows += _hom_rows(index, p, d, a.N_at(p), b.N_at(q))
            nrows += _hom_rows(index, p, d, a.W_at(p), b.N_at(q))
        W[d] = kernel_of_rows(wrows, len(slots))
        N[d] = kernel_of_rows(nrows, len(slots))
    return ConstraintTriple(ambient, W, N)


def hom_to_map(a: ConstraintTriple, b: ConstraintTriple, d: int, v: Vector) -> ConstraintMap:
    """Read an element of ``cihom(a, b)`` in degree d as a graded map."""
    slots = hom_layout(a.ambient, b.ambient)[d]
    entries: Dict[int, Dict[Tuple[int, int], Fraction]] = {}
    for i, c in v.items():
        p, r, col = slots[i]
        entries.setdefault(p, {})[(r, col)] = c
    blocks = {p: ExactMatrix(b.ambient.dim(p + d), a.ambient.dim(p), entries.get(p, {})) for p in a.degrees()}
    return ConstraintMap(a, b, GradedMap(a.ambient, b.ambient, d, blocks))


@dataclass
class MonoidalityWitness:
    """The map ``[w] (x) [w'] -> [w (x) w']`` per degree, and whether it is an isomorphism."""

    matrices: Dict[int, ExactMatrix]
    isomorphism: bool
    well_defined: bool
    failure: Optional[Tuple] = None

    def to_json(self):
        out = {
            "isomorphism": self.isomorphism,
            "well_defined": self.well_defined,
            "matrices": {str(d): [[str(x) for x in row] for row in m.to_dense()] for d, m in sorted(self.matrices.items())},
        }
        if self.failure is not None:
            out["failure"] = [str(x) for x in self.failure]
        return out


def monoidality_witness(a: ConstraintTriple, b: ConstraintTriple) -> MonoidalityWitness:
    ab = ctensor(a, b)
    ra, rb, rab = Reduction(a), Reduction(b), Reduction(ab)
    index = _layout_index(a.ambient, b.ambient)
    red_layout = tensor_layout(ra.space, rb.space)
    matrices = {}
    iso = True
    failure = None
    for d in sorted(set(red_layout) | set(rab.space.degrees())):
        slots = red_layout.get(d, [])
        cols = []
        for p, i, q, j in slots:
            u = ra.representatives(p)[i]
            v = rb.representatives(q)[j]
            cols.append(rab.project(d, _kron(u, v, index, p, q)))
        m = ExactMatrix.from_columns(cols, rab.space.dim(d))
        matrices[d] = m
        if m.rows != m.cols or rank(m) != m.cols:
            iso = False
            failure = failure or ("not invertible", d, m.rows, m.cols)
    # independence of representatives: N (x) W' and W (x) N' go to zero
    ok = True
    for p in a.degrees():
        for q in b.degrees():
            for u, v in [(x, y) for x in a.N_at(p).basis for y in b.W_at(q).basis] + [
                (x, y) for x in a.W_at(p).basis for y in b.N_at(q).basis
            ]:
                if rab.project(p + q, _kron(u, v, index, p, q)):
                    ok = False
                    failure = failure or ("representative dependence", p, q)
    return MonoidalityWitness(matrices, iso and ok, ok, failure)


# ---------------------------------------------------------------- algebra checks

Product = Callable[[int, Vector, int, Vector], Tuple[int, Vector]]


@dataclass
class ConstraintAlgebraWitness:
    triple: ConstraintTriple
    is_algebra: bool
    is_strong: bool
    witness: Optional[Tuple] = None
    strong_witness: Optional[Tuple] = None
    checked: int = 0

    def to_json(self):
        return {
            "is_algebra": self.is_algebra,
            "is_strong": self.is_strong,
            "witness": _fmt_witness(self.witness),
            "strong_witness": _fmt_witness(self.strong_witness),
            "checked": self.checked,
        }


def _fmt_witness(w):
    if w is None:
        return None
    return [str(x) if not isinstance(x, dict) else {str(k): str(v) for k, v in x.items()} for x in w]


def _inclusion(t: ConstraintTriple, mult: Product, left, right, target) -> Tuple[Optional[Tuple], int]:
    """First product of basis elements of ``left x right`` escaping ``target``."""
    n = 0
    for p in t.degrees():
        for q in t.degrees():
            for u in left(p).basis:
                for v in right(q).basis:
                    n += 1
                    d, w = mult(p, u, q, v)
                    if w and (d not in t.ambient.components or not target(d).contains(w)):
                        return (p, u, q, v, w), n
    return None, n


def check_constraint_algebra(t: ConstraintTriple, mult: Product) -> ConstraintAlgebraWitness:
    """W a subalgebra, N a two-sided ideal in W; strong when N is an ideal in T."""
    total = 0
    witness = None
    for name, left, right, target in (
        ("W*W", t.W_at, t.W_at, t.W_at),
        ("N*W", t.N_at, t.W_at, t.N_at),
        ("W*N", t.W_at, t.N_at, t.N_at),
    ):
        w, n = _inclusion(t, mult, left, right, target)
        total += n
        if w is not None and witness is None:
            witness = (name,) + w
    strong = None
    for name, left, right in (("N*T", t.N_at, t.T_at), ("T*N", t.T_at, t.N_at)):
        w, n = _inclusion(t, mult, left, right, t.N_at)
        total += n
        if w is not None and strong is None:
            strong = (name,) + w
    return ConstraintAlgebraWitness(t, witness is None, witness is None and strong is None, witness, strong, total)


def truncated_polynomial_triple(D: int, null_power: int = 1):
    """``(Q[x]/(x^(D+1)), same, (x^null_power))`` with its multiplication."""
    n = D + 1
    t = make_triple(n, Subspace.full(n), Subspace.coordinate(n, range(null_power, n)))

    def mult(p, u, q, v):
        out = {}
        for i, a in u.items():
            for j, b in v.items():
                if i + j <= D:
                    out[i + j] = out.get(i + j, 0) + a * b
        return 0, {k: c for k, c in out.items() if c}

    return t, mult


def check_constraint_gerstenhaber(t: ConstraintTriple, wedge_op: Product, bracket_op: Product, strong: bool = True) -> Report:
    """The four inclusions making N a Gerstenhaber ideal in the subalgebra W, plus strongness."""
    rep = Report("constraint-gerstenhaber")
    for name, op, left, right, target in (
        ("{W,W} in W", bracket_op, t.W_at, t.W_at, t.W_at),
        ("W^W in W", wedge_op, t.W_at, t.W_at, t.W_at),
        ("{N,W} in N", bracket_op, t.N_at, t.W_at, t.N_at),
        ("W^N in N", wedge_op, t.W_at, t.N_at, t.N_at),
    ):
        w, n = _inclusion(t, op, left, right, target)
        rep.add(name, w is None, n, _fmt_witness(w))
    if strong:
        w, n = _inclusion(t, wedge_op, t.N_at, t.T_at, t.N_at)
        rep.details["strong"] = w is None
        rep.details["strong_witness"] = _fmt_witness(w)
    return rep


# ---------------------------------------------------------------- constraint Lie-Rinehart data


class ConstraintLR:
    """A constraint Lie-Rinehart algebra over a constraint algebra with monomial parts.

    The algebra parts A_W, A_N are given by predicates on exponent vectors (so
    coordinate ideals are exact). L_W and L_N are given by module generators and
    by membership predicates on elements.
    """

    def __init__(
        self,
        inst: LieRinehartInstance,
        wanted: Sequence[LRElement],
        null: Sequence[LRElement],
        field_in_W: Callable[[LRElement], bool],
        field_in_N: Callable[[LRElement], bool],
        a_wanted: Callable = lambda m: True,
        a_null: Callable = lambda m: False,
        label: str = "",
    ):
        self.inst = inst
        self.wanted = list(wanted)
        self.null = list(null)
        self.field_in_W = field_in_W
        self.field_in_N = field_in_N
        self.a_wanted = a_wanted
        self.a_null = a_null
        self.label = label
        self._wmv = [Multivector.from_element(x) for x in self.wanted]
        self._nmv = [Multivector.from_element(x) for x in self.null]

    @classmethod
    def lie(cls, inst: LieRinehartInstance, W: Sequence[Vector], N: Sequence[Vector], label: str = "") -> "ConstraintLR":
        """Subalgebra W with N inside it, over the constraint algebra (Q, Q, 0)."""
        n = inst.rank
        Ws, Ns = span(n, W), span(n, N)

        def elem(v):
            return inst.element({i: Poly.const(c, 0) for i, c in v.items()})

        def coords(x):
            return {i: p.constant_term() for i, p in x.coeffs.items() if p}

        return cls(
            inst,
            [elem(v) for v in Ws.basis],
            [elem(v) for v in Ns.basis],
            lambda x: Ws.contains(coords(x)),
            lambda x: Ns.contains(coords(x)),
            label=label,
        )

    @classmethod
    def coordinate_ideal(cls, inst: LieRinehartInstance, variables: Sequence[int], label: str = "") -> "ConstraintLR":
        """Derivations of (A, A, I) for the coordinate ideal I generated by ``variables``."""
        S = tuple(sorted(variables))
        n = inst.nvars
        x = inst.var
        wanted = [inst.basis_element(j) for j in range(n) if j not in S]
        wanted += [LRElement.single(inst, s, x(t)) for s in S for t in S]
        null = [LRElement.single(inst, j, x(t)) for j in range(n) for t in S]

        def in_I(p: Poly) -> bool:
            return p.in_coordinate_ideal(S)

        def fw(X):
            return all(in_I(X.coeffs.get(s, inst.zero())) for s in S)

        def fn(X):
            return all(in_I(c) for c in X.coeffs.values())

        return cls(inst, wanted, null, fw, fn, a_null=lambda m: sum(m[s] for s in S) >= 1, label=label)

    def poly_in(self, p: Poly, part: str) -> bool:
        pred = self.a_wanted if part == "W" else self.a_null
        return all(pred(m) for m in p.terms)

    def _tuples(self, k: int):
        """Generator tuples for the W-test and for the null-first test."""
        w = list(combinations(range(len(self._wmv)), k))
        nf = [(i,) + rest for i in range(len(self._nmv)) for rest in combinations(range(len(self._wmv)), k - 1)] if k else []
        return w, nf

    def evaluate(self, alpha: CEForm, fields: Sequence[Multivector]) -> Poly:
        """``alpha`` on a tuple of fields (up to an overall sign)."""
        if not fields:
            return alpha.value(())
        return contract(wedge_all(fields, self.inst), alpha).value(())

    def form_defect(self, alpha: CEForm, part: str):
        """None if ``alpha`` lies in the W or N part of CE, else ``(tuple, value)``."""
        w, nf = self._tuples(alpha.k)
        first = "W" if part == "W" else "N"
        for t in w:
            v = self.evaluate(alpha, [self._wmv[i] for i in t])
            if not self.poly_in(v, first):
                return ("W",) + t, v
        if part == "W":
            for t in nf:
                v = self.evaluate(alpha, [self._nmv[t[0]]] + [self._wmv[i] for i in t[1:]])
                if not self.poly_in(v, "N"):
                    return ("N",) + t, v
        return None

    def form_in(self, alpha: CEForm, part: str) -> bool:
        return self.form_defect(alpha, part) is None

    def form_parts(self, k: int, bound: int):
        """The slice of k-forms at the bound, with its W and N subspaces."""
        sl = form_slice(self.inst, k, bound)
        w, nf = self._tuples(k)
        rows_w: Dict[Tuple, Vector] = {}
        rows_n: Dict[Tuple, Vector] = {}
        for col, e in enumerate(sl.basis()):
            for t in w:
                v = self.evaluate(e, [self._wmv[i] for i in t])
                for m, c in v.terms.items():
                    if not self.a_wanted(m):
                        rows_w.setdefault(("w", t, m), {})[col] = c
                    if not self.a_null(m):
                        rows_n.setdefault(("n", t, m), {})[col] = c
            for t in nf:
                v = self.evaluate(e, [self._nmv[t[0]]] + [self._wmv[i] for i in t[1:]])
                for m, c in v.terms.items():
                    if not self.a_null(m):
                        rows_w.setdefault(("nf", t, m), {})[col] = c
        W = kernel_of_rows(list(rows_w.values()), sl.dim)
        N = kernel_of_rows(list(rows_n.values()), sl.dim)
        return sl, W, N

    def multivector_reps(self, k: int, part: str, bound: int) -> List[Multivector]:
        """Spanning representatives of the W or N part of the k-th exterior power."""
        inst = self.inst
        if k == 0:
            pred = self.a_wanted if part == "W" else self.a_null
            return [Multivector.scalar(inst, Poly(inst.nvars, {m: 1})) for m in monomials(inst.nvars, bound) if pred(m)]
        mults = [Poly(inst.nvars, {m: 1}) for m in monomials(inst.nvars, bound) if self.a_wanted(m)]
        if part == "W":
            bases = [wedge_all([self._wmv[i] for i in t], inst) for t in combinations(range(len(self._wmv)), k)]
        else:
            bases = [
                wedge(self._nmv[i], wedge_all([self._wmv[j] for j in t], inst))
                for i in range(len(self._nmv))
                for t in combinations(range(len(self._wmv)), k - 1)
            ]
        out = []
        for b in bases:
            if not b:
                continue
            for m in mults:
                out.append(b.scale(m))
        return out


@dataclass
class ConstraintBV:
    lr: ConstraintLR
    ce: ConstraintTriple
    forms: Dict[int, object]
    report: Report
    exterior: Optional[ConstraintTriple] = None
    extras: Dict[str, object] = field(default_factory=dict)


def _vector_to_multivector(inst, words, v: Vector) -> Multivector:
    return Multivector(inst, {words[i]: Poly.const(c, inst.nvars) for i, c in v.items()})


def _multivector_to_vector(index, x: Multivector) -> Vector:
    return {index[w]: p.constant_term() for w, p in x.terms.items() if p}


def exterior_triple(lr: ConstraintLR) -> Tuple[ConstraintTriple, Dict[int, List], Dict[int, Dict]]:
    """The exterior-algebra triple of a lie-backend constraint Lie algebra, on word bases."""
    inst = lr.inst
    if inst.nvars:
        raise ValueError("exact exterior triples need the lie backend")
    n = inst.rank
    words = {k: list(combinations(range(n), k)) for k in range(n + 1)}
    index = {k: {w: i for i, w in enumerate(ws)} for k, ws in words.items()}
    W, N = {}, {}
    for k in range(n + 1):
        W[k] = span(len(words[k]), [_multivector_to_vector(index[k], x) for x in lr.multivector_reps(k, "W", 0)])
        N[k] = span(len(words[k]), [_multivector_to_vector(index[k], x) for x in lr.multivector_reps(k, "N", 0)])
    space = GradedSpace({k: ["^".join(map(str, w)) or "1" for w in ws] for k, ws in words.items()})
    return ConstraintTriple(space, W, N), words, index


def exterior_ops(lr: ConstraintLR, words, index):
    inst = lr.inst

    def to_mv(p, u):
        return _vector_to_multivector(inst, words[p], u)

    def wedge_op(p, u, q, v):
        if p + q not in index:
            return p + q, {}
        return p + q, _multivector_to_vector(index[p + q], wedge(to_mv(p, u), to_mv(q, v)))

    def bracket_op(p, u, q, v):
        d = p + q - 1
        if d not in index:
            return d, {}
        return d, _multivector_to_vector(index[d], schouten(to_mv(p, u), to_mv(q, v)))

    return wedge_op, bracket_op


def constraint_ce(lr: ConstraintLR, bound: Optional[int] = None, max_degree: Optional[int] = None) -> ConstraintBV:
    """Build the CE triple and check d, iota and Lie are constraint morphisms on representatives.

    For the lie backend everything is exact. For the poly backend the form
    representatives come from the coefficient-degree window ``bound``; membership
    of the results is decided exactly through generator evaluation.
    """
    inst = lr.inst
    bound = 0 if not inst.nvars else (bound if bound is not None else (inst.degree_bound or 2))
    top = inst.rank if max_degree is None else min(max_degree, inst.rank)
    rep = Report("constraint")
    rep.bounds["coefficient_degree"] = bound
    rep.bounds["max_form_degree"] = top

    # the Lie-Rinehart structure itself is constraint
    bad = None
    n = 0
    for i, x in enumerate(lr.wanted):
        for j, y in enumerate(lr.wanted):
            n += 1
            if not lr.field_in_W(bracket(x, y)):
                bad = bad or ("[W,W]", i, j)
    for i, x in enumerate(lr.null):
        for j, y in enumerate(lr.wanted):
            n += 1
            if not lr.field_in_N(bracket(x, y)):
                bad = bad or ("[N,W]", i, j)
    rep.add("L_W subalgebra and L_N ideal in L_W", bad is None, n, bad)
    bad = None
    n = 0
    test = monomials(inst.nvars, bound)
    for part, gens, src, dst in (("W", lr.wanted, lr.a_null, "N"), ("N", lr.null, lr.a_wanted, "N")):
        for i, x in enumerate(gens):
            for m in test:
                if src(m):
                    n += 1
                    img = anchor_apply(x, Poly(inst.nvars, {m: 1}))
                    if not lr.poly_in(img, dst):
                        bad = bad or (f"rho({part})", i, m)
    rep.add("anchor is a constraint map", bad is None, n, bad)

    forms = {k: lr.form_parts(k, bound) for k in range(top + 1)}
    ce = ConstraintTriple(
        GradedSpace({k: [f"{w}|{m}" for w, m in sl.keys] for k, (sl, _, _) in forms.items()}),
        {k: W for k, (_, W, _) in forms.items()},
        {k: N for k, (_, _, N) in forms.items()},
        bound,
    )
    rep.dimensions["CE"] = {k: list(v) for k, v in ce.dims().items()}
    reps = {k: {"W": sl.elements(W), "N": sl.elements(N)} for k, (sl, W, N) in forms.items()}

    # d
    bad = None
    n = 0
    for k in range(top):
        for part in ("W", "N"):
            for a in reps[k][part]:
                n += 1
                if not lr.form_in(dce(a), part):
                    bad = bad or (f"d(CE_{part})", k, a.format(), lr.form_defect(dce(a), part))
    rep.add("d is a constraint morphism", bad is None, n, bad)

    # iota and Lie against W and N representatives of the exterior algebra
    mv = {k: {"W": lr.multivector_reps(k, "W", bound), "N": lr.multivector_reps(k, "N", bound)} for k in range(top + 1)}
    for opname, op, shift in (("iota", contract, 0), ("Lie", lie_derivative, 1)):
        bad = None
        n = 0
        for j in range(top + 1):
            for k in range(top + 1):
                if k - j + shift < 0 or k - j + shift > top:
                    continue
                for gpart, fpart, dst in (("W", "W", "W"), ("N", "W", "N"), ("W", "N", "N")):
                    for x in mv[j][gpart]:
                        for a in reps[k][fpart]:
                            n += 1
                            out = op(x, a)
                            if out and not lr.form_in(out, dst):
                                bad = bad or (f"{opname}(L_{gpart}, CE_{fpart})", j, k, x.format(), a.format())
        rep.add(f"{opname} is a constraint morphism", bad is None, n, bad)

    exterior = None
    extras = {}
    if not inst.nvars:
        exterior, words, index = exterior_triple(lr)
        wop, bop = exterior_ops(lr, words, index)
        g = check_constraint_gerstenhaber(exterior, wop, bop)
        rep.extend(g, "exterior algebra: ")
        rep.details["exterior_strong"] = g.details.get("strong")
        rep.dimensions["exterior"] = {k: list(v) for k, v in exterior.dims().items()}
        extras = {"words": words, "index": index}
    return ConstraintBV(lr, ce, forms, rep, exterior, extras)


# ---------------------------------------------------------------- suite


def constraint_suite(seed: int = 0, count: int = 50, max_dim: int = 4) -> Report:
    """Monoidality, functoriality, composition closure and the unit on seeded triples."""
    rng = random.Random(f"constraint:{seed}")
    rep = Report("constraint-spaces")
    rep.bounds["max_ambient_dim"] = max_dim
    triples = [random_triple(rng, max_dim) for _ in range(2 * count)]
    bad = None
    for i in range(count):
        a, b = triples[2 * i], triples[2 * i + 1]
        w = monoidality_witness(a, b)
        if not w.isomorphism and bad is None:
            bad = (i, w.to_json())
    rep.add("red(V (x) V') = red(V) (x) red(V')", bad is None, count, bad)

    bad = None
    for i in range(count):
        a = triples[i]
        u = ctensor(unit_triple(), a)
        if u.reduced_dims() != a.reduced_dims() or u.dims() != a.dims():
            bad = bad or (i,)
    rep.add("unit (k, k, 0) is neutral", bad is None, count, bad)

    bad = None
    for i in range(count):
        a, b = triples[2 * i], triples[2 * i + 1]
        s = cstrong_tensor(a, b)
        w = ctensor(a, b)
        nul = _tensor_spans(a.ambient, b.ambient, [(a.N_at, b.T_at), (a.T_at, b.N_at)])
        for d in s.degrees():
            if not (nul[d] <= s.N_at(d) and w.W_at(d) <= s.W_at(d) and w.N_at(d) <= s.N_at(d)):
                bad = bad or (i, d)
    rep.add("strong tensor absorbs T (x) N' and N (x) T'", bad is None, count, bad)

    bad = None
    n = 0
    for i in range(count // 2):
        a, b, c = random_triple(rng, max_dim), random_triple(rng, max_dim), random_triple(rng, max_dim)
        f = random_morphism(rng, a, b)
        g = random_morphism(rng, b, c)
        gf = g.compose(f)
        n += 1
        if not (f.is_morphism and g.is_morphism and gf.is_morphism):
            bad = bad or ("composition", i)
            continue
        if gf.reduced() != g.reduced().compose(f.reduced()):
            bad = bad or ("functoriality", i)
    rep.add("constraint maps compose and red is a functor", bad is None, n, bad)

    bad = None
    n = 0
    for i in range(count // 5):
        a, b = random_triple(rng, 3, (0,)), random_triple(rng, 3, (0,))
        h = cihom(a, b)
        for d in h.degrees():
            for v in h.W_at(d).basis:
                n += 1
                if not hom_to_map(a, b, d, v).is_morphism:
                    bad = bad or ("W element is not a morphism", i)
        f = random_morphism(rng, a, b)
        v = {}
        slots = hom_layout(a.ambient, b.ambient)[0]
        for s, (p, r, c) in enumerate(slots):
            x = f.f.block(p).entries.get((r, c))
            if x:
                v[s] = x
        n += 1
        if not h.W_at(0).contains(v):
            bad = bad or ("morphism missing from iHom_W", i)
    rep.add("iHom_W consists of exactly the morphisms", bad is None, n, bad)
    return rep
