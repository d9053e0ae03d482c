"""The Chevalley–Eilenberg module: d, contraction, Lie derivative.

A k-form is stored by its values on sorted basis words,
``alpha(e_w1, ..., e_wk)``. Contraction by ``x1 ^ ... ^ xm`` nests from the
right, so ``(iota_{e_I} alpha)(w) = alpha(I_m, ..., I_1, w)``.
"""

from __future__ import annotations

import random
from itertools import combinations
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .graded import commutator_sign, merge_sign, sort_word
from .liering import LieRinehartInstance
from .multivec import Multivector, WordDict, as_multivector, basis_multivectors, sample_multivectors, schouten, wedge
from .poly import Poly, monomials
from .report import Report

Word = Tuple[int, ...]


class CEForm(WordDict):
    __slots__ = ("k",)

    def __init__(self, inst: LieRinehartInstance, k: int, terms=None):
        super().__init__(inst, terms)
        for w in self.terms:
            if len(w) != k:
                raise ValueError(f"word {w} does not have length {k}")
        self.k = k

    @classmethod
    def _wrap(cls, inst, terms, k=None):
        x = super()._wrap(inst, terms)
        x.k = k
        return x

    def _rebuild(self, terms):
        return CEForm._wrap(self.inst, terms, self.k)

    @classmethod
    def zero(cls, inst, k: int = 0) -> "CEForm":
        return cls._wrap(inst, {}, k)

    @classmethod
    def function(cls, inst, f) -> "CEForm":
        return cls(inst, 0, {(): f})

    @classmethod
    def basis(cls, inst, word: Sequence[int], coeff=None) -> "CEForm":
        return cls(inst, len(word), {tuple(word): coeff if coeff is not None else inst.one()})

    def _check(self, other):
        super()._check(other)
        if self.terms and other.terms and self.k != other.k:
            raise ValueError(f"cannot add forms of degree {self.k} and {other.k}")

    def __add__(self, other):
        out = super().__add__(other)
        if not self.terms:
            out.k = other.k
        return out

    def __eq__(self, other):
        if not isinstance(other, CEForm) or other.inst is not self.inst:
            return False
        if not self.terms and not other.terms:
            return True
        return self.k == other.k and self.terms == other.terms

    def __hash__(self):
        return super().__hash__()

    def value(self, word: Sequence[int]) -> Poly:
        return self.coeff(word)

    def __repr__(self):
        return f"CEForm[{self.k}]({self.format('e*')})"


def dce(alpha: CEForm) -> CEForm:
    """``(d alpha)(X_0..X_k) = sum_i (-1)^i rho(X_i) alpha(..X_i^..)
    + sum_{i<j} (-1)^(i+j) alpha([X_i, X_j], ..X_i^..X_j^..)``."""
    inst, k = alpha.inst, alpha.k
    if k < 0 or k + 1 > inst.rank:
        return CEForm.zero(inst, k + 1)
    out: Dict[Word, Poly] = {}
    has_anchor = inst.nvars > 0
    for w in combinations(range(inst.rank), k + 1):
        val = None
        if has_anchor:
            for i in range(k + 1):
                a = alpha.terms.get(w[:i] + w[i + 1:])
                if a is None:
                    continue
                t = inst.anchor_basis(w[i], a)
                if t:
                    if i % 2:
                        t = -t
                    val = t if val is None else val + t
        for i in range(k + 1):
            for j in range(i + 1, k + 1):
                br = inst.basis_bracket(w[i], w[j])
                if not br:
                    continue
                rest = w[:i] + w[i + 1:j] + w[j + 1:]
                for m, c in br.items():
                    sign, ww = sort_word((m,) + rest)
                    if not sign:
                        continue
                    a = alpha.terms.get(ww)
                    if a is None:
                        continue
                    t = a * c
                    if (sign < 0) != bool((i + j) % 2):
                        t = -t
                    val = t if val is None else val + t
        if val:
            out[w] = val
    return CEForm._wrap(inst, out, k + 1)


def _contract_word(word: Word, coeff: Poly, alpha: CEForm, out: Dict[Word, Poly]) -> None:
    m = len(word)
    if m == 0:
        for w, a in alpha.terms.items():
            t = coeff * a
            if t:
                out[w] = out[w] + t if w in out else t
        return
    sset = set(word)
    rev = tuple(reversed(word))
    for v, a in alpha.terms.items():
        if not sset.issubset(v):
            continue
        rest = tuple(i for i in v if i not in sset)
        # alpha(rev + rest) = sign * alpha(v)
        sign, _ = sort_word(rev + rest)
        t = coeff * a
        if sign < 0:
            t = -t
        if rest in out:
            t = out[rest] + t
            if not t:
                del out[rest]
                continue
        if t:
            out[rest] = t


def contract(u, alpha: CEForm) -> CEForm:
    """``iota_u alpha``; for ``u = x1 ^ .. ^ xm`` this is ``iota_x1 .. iota_xm alpha``."""
    u = as_multivector(u)
    degs = u.degrees()
    if len(degs) > 1:
        raise ValueError("contraction needs a homogeneous multivector")
    m = degs[0] if degs else 0
    out: Dict[Word, Poly] = {}
    for word, c in u.terms.items():
        _contract_word(word, c, alpha, out)
    return CEForm._wrap(alpha.inst, out, alpha.k - m)


def lie_derivative(u, alpha: CEForm) -> CEForm:
    """``Lie_u = iota_u d - (-1)^|u| d iota_u``, summed over homogeneous parts."""
    u = as_multivector(u)
    out = None
    for m in u.degrees() or [0]:
        part = u.homogeneous_part(m)
        a = contract(part, dce(alpha))
        b = dce(contract(part, alpha))
        term = a - b if m % 2 == 0 else a + b
        out = term if out is None else out + term
    return out


def form_wedge(a: CEForm, b: CEForm) -> CEForm:
    """Wedge of forms with ``e^I ^ e^J = sign e^(I u J)`` on dual basis words."""
    out: Dict[Word, Poly] = {}
    for wa, ca in a.terms.items():
        for wb, cb in b.terms.items():
            sign, w = merge_sign(wa, wb)
            if not sign:
                continue
            t = ca * cb
            if sign < 0:
                t = -t
            if w in out:
                t = out[w] + t
                if not t:
                    del out[w]
                    continue
            out[w] = t
    return CEForm._wrap(a.inst, out, a.k + b.k)


def graded_commutator(P: Callable, p: int, Q: Callable, q: int, alpha: CEForm) -> CEForm:
    """``[P, Q] alpha = P Q alpha - (-1)^{pq} Q P alpha`` for operators of degrees p, q."""
    s = commutator_sign(p, q)
    return P(Q(alpha)) - Q(P(alpha)).scale(s)


def basis_forms(inst: LieRinehartInstance, max_degree: int) -> List[CEForm]:
    out = []
    for k in range(0, min(max_degree, inst.rank) + 1):
        for w in combinations(range(inst.rank), k):
            out.append(CEForm.basis(inst, w))
    return out


def sample_forms(inst, max_degree: int, coeff_degree: int, count: int, seed: int = 0) -> List[CEForm]:
    rng = random.Random(seed)
    monos = monomials(inst.nvars, coeff_degree)
    out = []
    for _ in range(count):
        k = rng.randint(0, min(max_degree, inst.rank))
        terms = {}
        for _ in range(rng.randint(1, 2)):
            w = tuple(sorted(rng.sample(range(inst.rank), k)))
            c = Poly.zero(inst.nvars)
            for _ in range(rng.randint(1, 2)):
                c = c + Poly.monomial(rng.choice(monos), rng.choice([-2, -1, 1, 2, 3]))
            terms[w] = terms[w] + c if w in terms else c
        out.append(CEForm(inst, k, terms))
    return out


class CartanOps:
    """``d``, ``iota`` and ``Lie`` with memoization, for exhaustive sweeps."""

    def __init__(self):
        self._d: Dict = {}
        self._i: Dict = {}
        self._l: Dict = {}
        self._s: Dict = {}
        self._w: Dict = {}

    def d(self, a: CEForm) -> CEForm:
        key = (a.k, a)
        out = self._d.get(key)
        if out is None:
            out = self._d[key] = dce(a)
        return out

    def iota(self, u: Multivector, a: CEForm) -> CEForm:
        key = (u, a.k, a)
        out = self._i.get(key)
        if out is None:
            out = self._i[key] = contract(u, a)
        return out

    def lie(self, u: Multivector, a: CEForm) -> CEForm:
        key = (u, a.k, a)
        out = self._l.get(key)
        if out is None:
            out = None
            for m in u.degrees() or [0]:
                part = u.homogeneous_part(m)
                x = self.iota(part, self.d(a))
                y = self.d(self.iota(part, a))
                term = x - y if m % 2 == 0 else x + y
                out = term if out is None else out + term
            self._l[key] = out
        return out

    def schouten(self, x: Multivector, y: Multivector) -> Multivector:
        key = (x, y)
        out = self._s.get(key)
        if out is None:
            out = self._s[key] = schouten(x, y)
        return out

    def wedge(self, x: Multivector, y: Multivector) -> Multivector:
        key = (x, y)
        out = self._w.get(key)
        if out is None:
            out = self._w[key] = wedge(x, y)
        return out


def cartan_relations(
    x: Multivector, y: Multivector, alpha: CEForm, sign_3b: str = "corrected", ops: Optional[CartanOps] = None
) -> Dict[str, Tuple[CEForm, CEForm]]:
    """Left and right sides of the Cartan relations for one ``(x, y, alpha)``.

    ``sign_3b`` selects the prefactor in ``iota_[x,y] = s [iota_x, Lie_y]``:
    ``"corrected"`` uses ``(-1)^(|y|-1)``, ``"printed"`` uses ``(-1)^|y|``.
    """
    ops = ops or CartanOps()
    p, q = x.degree, y.degree
    I = lambda u: (lambda a: ops.iota(u, a))
    L = lambda u: (lambda a: ops.lie(u, a))
    xy = ops.schouten(x, y)
    out = {}
    out["Lie_x = [iota_x, d]"] = (ops.lie(x, alpha), graded_commutator(I(x), -p, ops.d, 1, alpha))
    out["Lie_[x,y] = [Lie_x, Lie_y]"] = (
        ops.lie(xy, alpha) if xy else CEForm.zero(alpha.inst, alpha.k + 2 - p - q),
        graded_commutator(L(x), 1 - p, L(y), 1 - q, alpha),
    )
    iota_xy = ops.iota(xy, alpha) if xy else CEForm.zero(alpha.inst, alpha.k + 1 - p - q)
    out["iota_[x,y] = [Lie_x, iota_y]"] = (iota_xy, graded_commutator(L(x), 1 - p, I(y), -q, alpha))
    s = (1 if (q - 1) % 2 == 0 else -1) if sign_3b == "corrected" else (1 if q % 2 == 0 else -1)
    out["iota_[x,y] = s [iota_x, Lie_y]"] = (iota_xy, graded_commutator(I(x), -p, L(y), 1 - q, alpha).scale(s))
    xwy = ops.wedge(x, y)
    out["iota_(x^y) = iota_x iota_y"] = (ops.iota(xwy, alpha), ops.iota(x, ops.iota(y, alpha)))
    sy = 1 if q % 2 == 0 else -1
    out["Lie_(x^y) = iota_x Lie_y + (-1)^|y| Lie_x iota_y"] = (
        ops.lie(xwy, alpha),
        ops.iota(x, ops.lie(y, alpha)) + ops.lie(x, ops.iota(y, alpha)).scale(sy),
    )
    return out


def cartan_corpus(inst, max_wedge: int, max_form: int, samples: int = 10, seed: int = 0):
    if inst.nvars == 0:
        return basis_multivectors(inst, max_wedge), basis_forms(inst, max_form)
    xs = [Multivector.scalar(inst, inst.var(i)) for i in range(inst.nvars)]
    xs += sample_multivectors(inst, max_wedge, 2, samples, seed)
    fs = [CEForm.function(inst, inst.var(0))] + sample_forms(inst, max_form, 2, samples, seed + 1)
    return [x for x in xs if x], [f for f in fs if f]


def verify_cartan_identities(
    inst: LieRinehartInstance,
    max_wedge: int = 3,
    max_form: int = 3,
    multivectors: Optional[List[Multivector]] = None,
    forms: Optional[List[CEForm]] = None,
    sign_3b: str = "corrected",
    seed: int = 0,
    samples: int = 10,
) -> Report:
    """All six Cartan relations on every (x, y, alpha) drawn from the corpora.

    The lie backend default corpora are all basis words, which makes the check
    exhaustive up to the caps.
    """
    rep = Report("cartan")
    rep.bounds.update({"max_wedge": max_wedge, "max_form": max_form})
    if multivectors is None or forms is None:
        xs, fs = cartan_corpus(inst, max_wedge, max_form, samples, seed)
        multivectors = multivectors if multivectors is not None else xs
        forms = forms if forms is not None else fs
    names = None
    ops = CartanOps()
    counts: Dict[str, int] = {}
    bad: Dict[str, dict] = {}
    for alpha in forms:
        n = "d^2 = 0"
        counts[n] = counts.get(n, 0) + 1
        dd = dce(dce(alpha))
        if dd and n not in bad:
            bad[n] = {"alpha": alpha, "residual": dd}
        for x in multivectors:
            for y in multivectors:
                rel = cartan_relations(x, y, alpha, sign_3b, ops)
                if names is None:
                    names = list(rel) + ["d^2 = 0"]
                for n, (lhs, rhs) in rel.items():
                    counts[n] = counts.get(n, 0) + 1
                    if lhs != rhs and n not in bad:
                        bad[n] = {"x": x, "y": y, "alpha": alpha, "lhs": lhs, "rhs": rhs}
    for n in names or ["d^2 = 0"]:
        rep.add(n, n not in bad, counts.get(n, 0), bad.get(n))
    rep.dimensions.update({"multivectors": len(multivectors), "forms": len(forms)})
    return rep
