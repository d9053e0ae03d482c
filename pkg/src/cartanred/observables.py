"""Hamiltonian pairs and the L-infinity algebra of observables of a cocycle.

Conventions (see the decisions ledger for why):

* a Hamiltonian pair ``(alpha, X)`` satisfies ``iota_X omega = -d alpha``;
* ``l2((a, X), (b, Y)) = (iota_Y iota_X omega, [X, Y])``, which is the
  skew bracket and the only sign that keeps pairs Hamiltonian;
* ``l_j = -(-1)^j iota_X1 ... iota_Xj omega`` for ``j >= 3``, the sign forced
  by ``d l_j = l_1 l_(j+1)`` once ``l2`` is fixed.

``convention="displayed"`` switches to ``(iota_X iota_Y omega, [X, Y])`` and
``-iota_X1 ... iota_Xj omega`` so the difference can be demonstrated.
"""

from __future__ import annotations

import random
from functools import lru_cache
from dataclasses import dataclass
from itertools import combinations, combinations_with_replacement, product
from math import comb
from typing import Dict, List, Optional, Sequence, Union

from .cartan import CEForm, contract, dce, lie_derivative
from .exactlin import nullspace
from .liering import LieRinehartInstance, bracket
from .multivec import Multivector, as_multivector, schouten
from .poly import Poly, monomials
from .report import Report
from .slices import field_slice, form_slice, image_matrix

CONVENTIONS = ("skew", "displayed")


class NotClosed(ValueError):
    pass


class NotHamiltonian(ValueError):
    pass


class Cocycle:
    """A closed (k+1)-form; ``k`` is the multisymplectic degree."""

    def __init__(self, omega: CEForm, check: bool = True):
        if omega.k < 2:
            raise ValueError("a cocycle of degree k needs a form of degree k+1 >= 2")
        if check:
            d = dce(omega)
            if d:
                raise NotClosed(f"d omega = {d!r} is not zero")
        self.omega = omega
        self.k = omega.k - 1

    @property
    def inst(self) -> LieRinehartInstance:
        return self.omega.inst

    def residual(self, alpha: CEForm, X) -> CEForm:
        """``iota_X omega + d alpha``; zero exactly for Hamiltonian pairs."""
        return contract(as_multivector(X), self.omega) + dce(alpha)

    def is_pair(self, alpha: CEForm, X) -> bool:
        if alpha.terms and alpha.k != self.k - 1:
            return False
        return not self.residual(alpha, X)

    def pair(self, alpha: CEForm, X) -> "HamPair":
        X = as_multivector(X)
        if alpha.terms and alpha.k != self.k - 1:
            raise NotHamiltonian(f"form part has degree {alpha.k}, expected {self.k - 1}")
        r = self.residual(alpha, X)
        if r:
            raise NotHamiltonian(f"iota_X omega + d alpha = {r!r}")
        return HamPair(_with_degree(alpha, self.k - 1), X)

    def zero_pair(self) -> "HamPair":
        return HamPair(CEForm.zero(self.inst, self.k - 1), Multivector.zero(self.inst))

    def __repr__(self):
        return f"Cocycle(k={self.k}, omega={self.omega!r})"


def _with_degree(alpha: CEForm, k: int) -> CEForm:
    if alpha.k == k:
        return alpha
    return CEForm._wrap(alpha.inst, dict(alpha.terms), k)


@dataclass(frozen=True)
class HamPair:
    alpha: CEForm
    X: Multivector

    def __add__(self, other: "HamPair") -> "HamPair":
        return HamPair(self.alpha + other.alpha, self.X + other.X)

    def __neg__(self):
        return HamPair(-self.alpha, -self.X)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "HamPair":
        return HamPair(self.alpha.scale(c), self.X.scale(c))

    def __bool__(self):
        return bool(self.alpha) or bool(self.X)

    def __eq__(self, other):
        return isinstance(other, HamPair) and self.alpha == other.alpha and self.X == other.X

    def __hash__(self):
        return hash((self.alpha, self.X))

    def to_json(self):
        return {"alpha": self.alpha.to_json(), "X": self.X.to_json()}

    def format(self) -> str:
        return f"({self.alpha.format('e*')}, {self.X.format('e')})"


Observable = Union[HamPair, CEForm]


def ham_pairs(cocycle: Cocycle, bound: Optional[int] = None) -> List[HamPair]:
    """Basis of Hamiltonian pairs whose coefficients have degree at most ``bound``.

    The lie backend has constant coefficients, so the answer is the full space.
    """
    inst = cocycle.inst
    if inst.nvars and bound is None:
        bound = inst.degree_bound
        if bound is None:
            raise ValueError("the poly backend needs a coefficient-degree bound")
    bound = bound or 0
    fs = form_slice(inst, cocycle.k - 1, bound)
    vs = field_slice(inst, bound)
    unknowns = [("a", e) for e in fs.basis()] + [("X", e) for e in vs.basis()]

    def image(u):
        kind, e = u
        return dce(e) if kind == "a" else contract(e, cocycle.omega)

    m, _ = image_matrix(unknowns, image)
    out = []
    na = fs.dim
    for v in nullspace(m).basis:
        a = fs.element({i: c for i, c in v.items() if i < na})
        X = vs.element({i - na: c for i, c in v.items() if i >= na})
        out.append(cocycle.pair(a, X))
    return out


class ObservablesComplex:
    """Graded carrier: ``Ham^0`` pairs and forms of degree ``k-1+i`` for ``-(k-1) <= i < 0``."""

    def __init__(self, cocycle: Cocycle, bound: Optional[int] = None):
        self.cocycle = cocycle
        self.bound = bound if bound is not None else (cocycle.inst.degree_bound or 0)
        self.ham0 = ham_pairs(cocycle, self.bound)

    @property
    def degrees(self) -> List[int]:
        return list(range(-(self.cocycle.k - 1), 1))

    def component(self, i: int) -> List:
        if i == 0:
            return list(self.ham0)
        if not -(self.cocycle.k - 1) <= i < 0:
            return []
        return form_slice(self.cocycle.inst, self.cocycle.k - 1 + i, self.bound).basis()

    def dims(self) -> Dict[int, int]:
        return {i: len(self.component(i)) for i in self.degrees}


def ham_degree(cocycle: Cocycle, x: Observable) -> int:
    if isinstance(x, HamPair):
        return 0
    return x.k - (cocycle.k - 1)


def leibniz_bracket(p: HamPair, q: HamPair) -> HamPair:
    return HamPair(lie_derivative(p.X, q.alpha), schouten(p.X, q.X))


def l1(cocycle: Cocycle, x: Observable) -> Observable:
    if isinstance(x, HamPair):
        return cocycle.zero_pair()
    i = ham_degree(cocycle, x)
    if i == -1:
        return HamPair(dce(x), Multivector.zero(cocycle.inst))
    return dce(x)


def _lj_sign(j: int, convention: str) -> int:
    if convention == "displayed":
        return -1
    return 1 if j % 2 else -1


def l2(cocycle: Cocycle, p: Observable, q: Observable, convention: str = "skew") -> HamPair:
    if not (isinstance(p, HamPair) and isinstance(q, HamPair)):
        return cocycle.zero_pair()
    inner = contract(p.X, contract(q.X, cocycle.omega))
    if convention == "skew":
        inner = -inner
    return HamPair(_with_degree(inner, cocycle.k - 1), schouten(p.X, q.X))


def lj(cocycle: Cocycle, xs: Sequence[Observable], convention: str = "skew") -> CEForm:
    j = len(xs)
    if j < 3:
        raise ValueError("lj needs at least three inputs")
    out_degree = cocycle.k + 1 - j
    if not all(isinstance(x, HamPair) for x in xs):
        return CEForm.zero(cocycle.inst, out_degree)
    a = cocycle.omega
    for x in reversed(xs):
        a = contract(x.X, a)
    return a.scale(_lj_sign(j, convention)) if a else CEForm.zero(cocycle.inst, out_degree)


def bracket_m(cocycle: Cocycle, xs: Sequence[Observable], convention: str = "skew") -> Observable:
    if len(xs) == 1:
        return l1(cocycle, xs[0])
    if len(xs) == 2:
        return l2(cocycle, xs[0], xs[1], convention)
    return lj(cocycle, xs, convention)


def _zero_like(cocycle, m):
    if m == 2:
        return cocycle.zero_pair()
    return CEForm.zero(cocycle.inst, cocycle.k + 1 - m)


def _eq(a: Observable, b: Observable) -> bool:
    if isinstance(a, HamPair) or isinstance(b, HamPair):
        za = a if isinstance(a, HamPair) else None
        zb = b if isinstance(b, HamPair) else None
        if za is None or zb is None:
            return not a and not b
        return za == zb
    return a == b


class Brackets:
    """The brackets of one cocycle with memoized contractions and binary brackets.

    Verification sweeps evaluate the same ``l2(x_i, x_j)`` and the same
    contraction chains many times; caching them keeps the sweeps fast.
    """

    def __init__(self, cocycle: Cocycle, convention: str = "skew"):
        if convention not in CONVENTIONS:
            raise ValueError(f"unknown convention {convention!r}")
        self.cocycle = cocycle
        self.convention = convention
        self._iota: Dict = {}
        self._l2: Dict = {}

    def iota(self, X: Multivector, form: CEForm) -> CEForm:
        key = (X, form.k, form)
        out = self._iota.get(key)
        if out is None:
            out = self._iota[key] = contract(X, form)
        return out

    def l2(self, p: Observable, q: Observable) -> HamPair:
        if not (isinstance(p, HamPair) and isinstance(q, HamPair)):
            return self.cocycle.zero_pair()
        key = (p, q)
        out = self._l2.get(key)
        if out is None:
            inner = self.iota(p.X, self.iota(q.X, self.cocycle.omega))
            if self.convention == "skew":
                inner = -inner
            out = self._l2[key] = HamPair(_with_degree(inner, self.cocycle.k - 1), schouten(p.X, q.X))
        return out

    def lj(self, xs: Sequence[Observable]) -> CEForm:
        j = len(xs)
        out_degree = self.cocycle.k + 1 - j
        if not all(isinstance(x, HamPair) for x in xs):
            return CEForm.zero(self.cocycle.inst, out_degree)
        a = self.cocycle.omega
        for x in reversed(xs):
            a = self.iota(x.X, a)
        return a.scale(_lj_sign(j, self.convention)) if a else CEForm.zero(self.cocycle.inst, out_degree)

    def bracket(self, xs: Sequence[Observable]) -> Observable:
        if len(xs) == 1:
            return l1(self.cocycle, xs[0])
        if len(xs) == 2:
            return self.l2(xs[0], xs[1])
        return self.lj(xs)

    def coboundary(self, m: int, xs: Sequence[HamPair]) -> Observable:
        """``sum_{i<j} (-1)^(i+j) l_m(l_2(x_i, x_j), x_1..x_i^..x_j^..x_(m+1))``."""
        total = _zero_like(self.cocycle, m)
        for i, j in combinations(range(len(xs)), 2):
            rest = [x for t, x in enumerate(xs) if t not in (i, j)]
            term = self.bracket([self.l2(xs[i], xs[j])] + rest)
            if (i + j) % 2:
                term = -term if isinstance(term, HamPair) else term.scale(-1)
            total = total + term
        return total

    def relation(self, m: int, xs: Sequence[HamPair]):
        """Both sides of ``(d l_m)(xs) = l_1(l_(m+1)(xs))``."""
        lhs = self.coboundary(m, xs)
        if m + 1 > self.cocycle.k + 1:
            rhs = _zero_like(self.cocycle, m)
        else:
            rhs = l1(self.cocycle, self.lj(xs))
        return lhs, rhs


def ce_coboundary(cocycle: Cocycle, m: int, xs: Sequence[HamPair], convention: str = "skew") -> Observable:
    return Brackets(cocycle, convention).coboundary(m, xs)


def linfty_relation(cocycle: Cocycle, m: int, xs: Sequence[HamPair], convention: str = "skew"):
    return Brackets(cocycle, convention).relation(m, xs)


def _tuples(corpus: Sequence, r: int, budget: int):
    if len(corpus) ** r <= budget:
        return product(corpus, repeat=r), "all ordered tuples"
    if comb(len(corpus) + r - 1, r) <= budget:
        return combinations_with_replacement(corpus, r), "all multisets"
    return combinations(corpus, r), "all subsets"


def verify_linfty(
    cocycle: Cocycle,
    corpus: Optional[Sequence[HamPair]] = None,
    convention: str = "skew",
    budget: int = 5000,
    bound: Optional[int] = None,
) -> Report:
    """Check l2 closure and ``d l_m = l_1 l_(m+1)`` for ``m = 2..k+1`` on the corpus."""
    if convention not in CONVENTIONS:
        raise ValueError(f"unknown convention {convention!r}")
    rep = Report("linfty")
    rep.bounds["k"] = cocycle.k
    if corpus is None:
        corpus = ham_pairs(cocycle, bound)
    corpus = list(corpus)
    rep.dimensions["corpus"] = len(corpus)
    rep.details["convention"] = convention
    ops = Brackets(cocycle, convention)

    n, bad = 0, None
    for p, q in product(corpus, repeat=2):
        n += 1
        r = ops.l2(p, q)
        if not cocycle.is_pair(r.alpha, r.X) and bad is None:
            bad = {"p": p, "q": q, "residual": cocycle.residual(r.alpha, r.X)}
    rep.add("l2 lands in Hamiltonian pairs", bad is None, n, bad)

    n, bad = 0, None
    for p, q in product(corpus, repeat=2):
        n += 1
        if ops.l2(p, q) != -ops.l2(q, p) and bad is None:
            bad = {"p": p, "q": q}
    rep.add("l2 antisymmetric", bad is None, n, bad)

    for m in range(2, cocycle.k + 2):
        tuples, how = _tuples(corpus, m + 1, budget)
        n, bad = 0, None
        for xs in tuples:
            n += 1
            lhs, rhs = ops.relation(m, xs)
            if not _eq(lhs, rhs) and bad is None:
                bad = {"inputs": list(xs), "lhs": lhs, "rhs": rhs}
        rep.add(f"d l{m} = l1 l{m + 1}", bad is None, n, bad, note=how)
    return rep


def check_leibniz_algebra(cocycle: Cocycle, corpus: Sequence[HamPair], budget: int = 5000) -> Report:
    """Closure and left Leibniz identity of the Leibniz bracket, and its exact gap to l2."""
    rep = Report("leibniz")
    corpus = list(corpus)
    n, bad = 0, None
    for p, q in product(corpus, repeat=2):
        n += 1
        r = leibniz_bracket(p, q)
        if not cocycle.is_pair(r.alpha, r.X) and bad is None:
            bad = {"p": p, "q": q}
    rep.add("Leibniz bracket closes on pairs", bad is None, n, bad)

    tuples, how = _tuples(corpus, 3, budget)
    n, bad = 0, None
    for a, b, c in tuples:
        n += 1
        lhs = leibniz_bracket(a, leibniz_bracket(b, c))
        rhs = leibniz_bracket(leibniz_bracket(a, b), c) + leibniz_bracket(b, leibniz_bracket(a, c))
        if lhs != rhs and bad is None:
            bad = {"a": a, "b": b, "c": c}
    rep.add("left Leibniz identity", bad is None, n, bad, note=how)

    # form parts differ by d(iota_X1 alpha_2)
    n, bad = 0, None
    for p, q in product(corpus, repeat=2):
        n += 1
        gap = leibniz_bracket(p, q).alpha - l2(cocycle, p, q).alpha
        witness = contract(p.X, q.alpha)
        if (gap != dce(witness) or dce(gap)) and bad is None:
            bad = {"p": p, "q": q, "gap": gap}
    rep.add("Leibniz minus skew bracket is exact", bad is None, n, bad)
    return rep


def check_covariant_momentum(
    cocycle: Cocycle,
    algebra: LieRinehartInstance,
    mu: Sequence[HamPair],
    action: Sequence[Multivector],
) -> Report:
    """``mu`` sends generator i of ``algebra`` to a pair covering ``action[i]`` and is a Leibniz morphism."""
    rep = Report("covariant momentum")
    g = algebra.rank
    if len(mu) != g or len(action) != g:
        raise ValueError("need one pair and one field per generator")
    n, bad = 0, None
    for i in range(g):
        n += 1
        if not cocycle.is_pair(mu[i].alpha, mu[i].X) and bad is None:
            bad = {"generator": i, "reason": "not a Hamiltonian pair"}
        if mu[i].X != as_multivector(action[i]) and bad is None:
            bad = {"generator": i, "reason": "field part differs from the action", "field": mu[i].X}
    rep.add("covers the infinitesimal action", bad is None, n, bad)

    def mu_of(coeffs: Dict[int, Poly]) -> HamPair:
        out = cocycle.zero_pair()
        for k, c in coeffs.items():
            out = out + mu[k].scale(c.constant_term())
        return out

    n, bad = 0, None
    for i in range(g):
        for j in range(g):
            n += 1
            lhs = mu_of(bracket(algebra.basis_element(i), algebra.basis_element(j)).coeffs)
            rhs = leibniz_bracket(mu[i], mu[j])
            if lhs != rhs and bad is None:
                bad = {"generators": [i, j], "mu_bracket": lhs, "leibniz": rhs}
    rep.add("morphism of Leibniz algebras", bad is None, n, bad)
    return rep


# the R^3 volume form example


def _grad(f: Poly):
    return [f.diff(i) for i in range(3)]


def _rot(a):
    return [a[2].diff(1) - a[1].diff(2), a[0].diff(2) - a[2].diff(0), a[1].diff(0) - a[0].diff(1)]


def _cross(a, b):
    return [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]


def _dot(a, b):
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


def _vadd(*vs):
    return [sum((v[i] for v in vs[1:]), vs[0][i]) for i in range(3)]


def _components(p: HamPair):
    return tuple(p.alpha.coeff((i,)) for i in range(3))


def r3_instance(bound: int = 2) -> LieRinehartInstance:
    return LieRinehartInstance.poly(["x", "y", "z"], degree_bound=bound, label="R3")


def r3_volume(inst: LieRinehartInstance) -> Cocycle:
    return Cocycle(CEForm.basis(inst, (0, 1, 2)))


def r3_corpus(inst, count: int = 20, coeff_degree: int = 2, seed: int = 0) -> List[List[Poly]]:
    """Seeded vector fields with coefficients of degree at most ``coeff_degree``."""
    rng = random.Random(seed)
    monos = monomials(3, coeff_degree)
    out = []
    while len(out) < count:
        v = []
        for _ in range(3):
            p = Poly.zero(3)
            for m in rng.sample(monos, rng.randint(1, 3)):
                p = p + Poly.monomial(m, rng.choice([-3, -2, -1, 1, 2, 3]))
            v.append(p)
        # constant fields have zero rot and make the identities vacuous
        if any(c.degree() > 0 for c in v):
            out.append(v)
    return out


def r3_pair(cocycle: Cocycle, a: Sequence[Poly]) -> HamPair:
    """The pair of the 1-form ``a . dx``; its field is ``-rot a``."""
    inst = cocycle.inst
    alpha = CEForm(inst, 1, {(i,): a[i] for i in range(3)})
    X = Multivector(inst, {(i,): -r for i, r in enumerate(_rot(a))})
    return cocycle.pair(alpha, X)


def r3_fixture_check(count: int = 20, coeff_degree: int = 2, seed: int = 0, budget: int = 5000) -> Report:
    """The three vector-calculus identities, literally and through the CE encoding."""
    inst = r3_instance(coeff_degree)
    omega = r3_volume(inst)
    rep = Report("r3-volume")
    rep.bounds.update({"coeff_degree": coeff_degree, "seed": seed})
    fields = r3_corpus(inst, count, coeff_degree, seed)
    funcs = [f[0] for f in r3_corpus(inst, max(3, count // 4), coeff_degree, seed + 1)]
    rep.dimensions["fields"] = len(fields)

    fields = [tuple(v) for v in fields]
    rot = lru_cache(maxsize=None)(lambda v: tuple(_rot(v)))
    vc_l2 = lru_cache(maxsize=None)(lambda X, Y: tuple(_cross(rot(X), rot(Y))))
    vc_l3 = lambda X, Y, Z: -_dot(vc_l2(X, Y), rot(Z))

    # literal identities with grad, rot, cross and dot
    n, bad = 0, None
    for f in funcs:
        for Y in fields:
            n += 1
            if any(vc_l2(tuple(_grad(f)), Y)) and bad is None:
                bad = {"f": f, "Y": Y}
    rep.add("vector calculus: l2(l1 f, Y) = 0", bad is None, n, bad)

    n, bad = 0, None
    for X, Y, Z in combinations(fields, 3):
        n += 1
        lhs = tuple(_vadd(vc_l2(vc_l2(X, Y), Z), vc_l2(vc_l2(Y, Z), X), vc_l2(vc_l2(Z, X), Y)))
        rhs = tuple(_grad(vc_l3(X, Y, Z)))
        if lhs != rhs and bad is None:
            bad = {"X": X, "Y": Y, "Z": Z}
    rep.add("vector calculus: l2(l2(X,Y),Z) + cyclic = l1 l3(X,Y,Z)", bad is None, n, bad, note="all subsets")

    quads = combinations(fields, 4)
    n, bad = 0, None
    for xs in quads:
        n += 1
        total = Poly.zero(3)
        for i, j in combinations(range(4), 2):
            rest = [x for t, x in enumerate(xs) if t not in (i, j)]
            term = vc_l3(vc_l2(xs[i], xs[j]), *rest)
            total = total + (term if (i + j) % 2 == 0 else -term)
        if total and bad is None:
            bad = {"inputs": list(xs), "residual": total}
    rep.add("vector calculus: signed sum of l3(l2(.,.),.,.) vanishes", bad is None, n, bad, note="all subsets")

    # the same identities through Hamiltonian pairs
    pairs = [r3_pair(omega, a) for a in fields]
    n, bad = 0, None
    for f in funcs:
        df = l1(omega, CEForm.function(inst, f))
        for q in pairs:
            n += 1
            if l2(omega, df, q) and bad is None:
                bad = {"f": f, "Y": q}
    rep.add("CE: l2(l1 f, Y) = 0", bad is None, n, bad)

    n, bad = 0, None
    for p, q in combinations(pairs, 2):
        n += 1
        got = [l2(omega, p, q).alpha.coeff((i,)) for i in range(3)]
        if list(vc_l2(_components(p), _components(q))) != got and bad is None:
            bad = {"p": p, "q": q}
    rep.add("CE l2 form part equals rot X x rot Y", bad is None, n, bad)

    n, bad = 0, None
    for xs in combinations(pairs, 3):
        n += 1
        vc = vc_l3(*[_components(x) for x in xs])
        ce = lj(omega, xs).coeff(())
        if vc != -ce and bad is None:
            bad = {"inputs": list(xs), "vector_calculus": vc, "ce": ce}
    rep.add("vector-calculus l3 = -(CE l3)", bad is None, n, bad)

    lin = verify_linfty(omega, pairs, budget=budget)
    rep.extend(lin, "CE: ")
    return rep
