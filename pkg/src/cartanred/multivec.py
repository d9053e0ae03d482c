"""The Gerstenhaber algebra of multivectors: wedge product and Schouten bracket."""

from __future__ import annotations

import random
from itertools import combinations, product
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from .graded import merge_sign, sort_word
from .liering import BackendMismatch, LieRinehartInstance, LRElement, bracket
from .poly import Poly, monomials
from .report import Report

Word = Tuple[int, ...]


class WordDict:
    """Shared storage: sorted index words mapped to nonzero polynomial coefficients."""

    __slots__ = ("inst", "terms", "_hash")

    def __init__(self, inst: LieRinehartInstance, terms: Optional[Dict[Sequence[int], object]] = None):
        self.inst = inst
        clean: Dict[Word, Poly] = {}
        for word, c in (terms or {}).items():
            if not isinstance(c, Poly):
                c = inst.const(c)
            if not c:
                continue
            sign, w = sort_word(word)
            if not sign:
                continue
            if w and not (0 <= w[0] and w[-1] < inst.rank):
                raise ValueError(f"word {word} out of range for rank {inst.rank}")
            c = c if sign > 0 else -c
            if w in clean:
                c = clean[w] + c
                if not c:
                    del clean[w]
                    continue
            clean[w] = c
        self.terms = clean
        self._hash = None

    @classmethod
    def _wrap(cls, inst, terms):
        x = cls.__new__(cls)
        x.inst = inst
        x.terms = terms
        x._hash = None
        return x

    @classmethod
    def zero(cls, inst):
        return cls._wrap(inst, {})

    def _check(self, other):
        if type(other) is not type(self):
            raise TypeError(f"cannot combine {type(self).__name__} with {type(other).__name__}")
        if other.inst is not self.inst:
            raise BackendMismatch("operands belong to different instances")

    def __bool__(self):
        return bool(self.terms)

    def __add__(self, other):
        self._check(other)
        out = dict(self.terms)
        for w, c in other.terms.items():
            if w in out:
                v = out[w] + c
                if v:
                    out[w] = v
                else:
                    del out[w]
            else:
                out[w] = c
        return self._rebuild(out)

    def __neg__(self):
        return self._rebuild({w: -c for w, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, f):
        if not isinstance(f, Poly):
            f = self.inst.const(f)
        if not f:
            return self._rebuild({})
        out = {}
        for w, c in self.terms.items():
            v = f * c
            if v:
                out[w] = v
        return self._rebuild(out)

    def _rebuild(self, terms):
        return type(self)._wrap(self.inst, terms)

    def degrees(self):
        return sorted({len(w) for w in self.terms})

    def homogeneous_part(self, k: int):
        return self._rebuild({w: c for w, c in self.terms.items() if len(w) == k})

    def coeff(self, word: Sequence[int]) -> Poly:
        sign, w = sort_word(word)
        if not sign:
            return self.inst.zero()
        c = self.terms.get(w)
        if c is None:
            return self.inst.zero()
        return c if sign > 0 else -c

    def max_coeff_degree(self) -> int:
        return max((c.degree() for c in self.terms.values()), default=-1)

    def __eq__(self, other):
        return type(other) is type(self) and other.inst is self.inst and other.terms == self.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def format(self, symbol: str = "e") -> str:
        if not self.terms:
            return "0"
        parts = []
        names = self.inst.names
        for w, c in sorted(self.terms.items(), key=lambda t: (len(t[0]), t[0])):
            word = "^".join(f"{symbol}{i}" for i in w) or "1"
            parts.append(f"({c.format(names)})*{word}")
        return " + ".join(parts)

    def to_json(self):
        return {
            ".".join(map(str, w)): [{"coeff": str(c), "exponents": list(m)} for m, c in sorted(p.terms.items())]
            for w, p in sorted(self.terms.items())
        }


class Multivector(WordDict):
    """Element of the exterior algebra over A; the empty word is the A-part."""

    __slots__ = ()

    @property
    def degree(self) -> int:
        ds = self.degrees()
        if len(ds) > 1:
            raise ValueError("inhomogeneous multivector has no single degree")
        return ds[0] if ds else 0

    @classmethod
    def scalar(cls, inst, f) -> "Multivector":
        if not isinstance(f, Poly):
            f = inst.const(f)
        return cls(inst, {(): f})

    @classmethod
    def basis(cls, inst, word: Sequence[int], coeff=None) -> "Multivector":
        return cls(inst, {tuple(word): coeff if coeff is not None else inst.one()})

    @classmethod
    def from_element(cls, x: LRElement) -> "Multivector":
        return cls._wrap(x.inst, {(i,): c for i, c in x.coeffs.items()})

    def to_element(self) -> LRElement:
        if any(len(w) != 1 for w in self.terms):
            raise ValueError("only wedge-degree-1 multivectors are elements of the module")
        return LRElement(self.inst, {w[0]: c for w, c in self.terms.items()})

    def __repr__(self):
        return f"Multivector({self.format()})"


def as_multivector(x) -> Multivector:
    if isinstance(x, Multivector):
        return x
    if isinstance(x, LRElement):
        return Multivector.from_element(x)
    raise TypeError(f"expected a multivector, got {type(x).__name__}")


def wedge(u: Multivector, v: Multivector) -> Multivector:
    u, v = as_multivector(u), as_multivector(v)
    u._check(v)
    out: Dict[Word, Poly] = {}
    for wu, cu in u.terms.items():
        for wv, cv in v.terms.items():
            sign, w = merge_sign(wu, wv)
            if not sign:
                continue
            c = cu * cv
            if sign < 0:
                c = -c
            if w in out:
                c = out[w] + c
                if not c:
                    del out[w]
                    continue
            out[w] = c
    return Multivector._wrap(u.inst, out)


def wedge_all(items: Iterable[Multivector], inst: LieRinehartInstance) -> Multivector:
    out = Multivector.scalar(inst, 1)
    for x in items:
        out = wedge(out, x)
    return out


def _acc(out: Dict[Word, Poly], word: Sequence[int], c: Poly) -> None:
    if not c:
        return
    sign, w = sort_word(word)
    if not sign:
        return
    if sign < 0:
        c = -c
    if w in out:
        c = out[w] + c
        if not c:
            del out[w]
            return
    out[w] = c


def _function_bracket(inst, f: Poly, g: Poly, word: Word, out: Dict[Word, Poly], sign: int = 1) -> None:
    """Accumulate ``sign * [f, g e_word]`` where ``[f, y1^..^yn] = -sum_i (-1)^(i+1) rho(y_i)(f) (rest)``."""
    for pos, k in enumerate(word):
        d = inst.anchor_basis(k, f)
        if not d:
            continue
        # position is 1-based i = pos + 1, so -(-1)^(i+1) = (-1)^(pos+1)
        s = sign * (-1 if pos % 2 == 0 else 1)
        c = g * d
        _acc(out, word[:pos] + word[pos + 1:], c if s > 0 else -c)


def schouten(u: Multivector, v: Multivector) -> Multivector:
    """Schouten–Nijenhuis bracket, extended bilinearly from word terms."""
    u, v = as_multivector(u), as_multivector(v)
    u._check(v)
    inst = u.inst
    out: Dict[Word, Poly] = {}
    one = inst.one()
    for wi, f in u.terms.items():
        m = len(wi)
        for wj, g in v.terms.items():
            n = len(wj)
            if m == 0 and n == 0:
                continue
            if m == 0:
                _function_bracket(inst, f, g, wj, out)
                continue
            if n == 0:
                # graded antisymmetry: [X, g] = (-1)^m [g, X]
                _function_bracket(inst, g, f, wi, out, -1 if m % 2 else 1)
                continue
            # x_1 = f e_{wi[0]}, y_1 = g e_{wj[0]}; other factors are bare basis elements
            for p in range(m):
                xp = LRElement.single(inst, wi[p], f if p == 0 else one)
                rest_x = wi[:p] + wi[p + 1:]
                cx = one if p == 0 else f
                for q in range(n):
                    yq = LRElement.single(inst, wj[q], g if q == 0 else one)
                    br = bracket(xp, yq)
                    if not br.coeffs:
                        continue
                    rest_y = wj[:q] + wj[q + 1:]
                    cy = one if q == 0 else g
                    c_rest = cx * cy
                    s = -1 if (p + q) % 2 else 1
                    for k, ck in br.coeffs.items():
                        c = ck * c_rest
                        _acc(out, (k,) + rest_x + rest_y, c if s > 0 else -c)
    return Multivector._wrap(inst, out)


def basis_multivectors(inst: LieRinehartInstance, max_degree: int, min_degree: int = 0) -> List[Multivector]:
    """Constant-coefficient basis words of wedge degree in ``[min_degree, max_degree]``."""
    out = []
    for k in range(min_degree, min(max_degree, inst.rank) + 1):
        for w in combinations(range(inst.rank), k):
            out.append(Multivector.basis(inst, w))
    return out


def sample_multivectors(
    inst: LieRinehartInstance, max_degree: int, coeff_degree: int, count: int, seed: int = 0
) -> List[Multivector]:
    """Seeded random multivectors with monomial-combination coefficients."""
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
                c = c + Poly.monomial(rng.choice(monos), rng.choice([-2, -1, 1, 1, 2, 3]))
            terms[w] = terms[w] + c if w in terms else c
        out.append(Multivector(inst, terms))
    return out


def gerstenhaber_corpus(inst, max_wedge: int, samples: int = 12, seed: int = 0) -> List[Multivector]:
    if inst.nvars == 0:
        return basis_multivectors(inst, max_wedge)
    base = [Multivector.scalar(inst, inst.var(i)) for i in range(inst.nvars)]
    base += basis_multivectors(inst, min(max_wedge, 2), 1)
    return base + sample_multivectors(inst, max_wedge, 2, samples, seed)


def _deg(x: Multivector) -> int:
    return x.degree


def check_gerstenhaber(
    inst: LieRinehartInstance,
    max_wedge_degree: int = 3,
    corpus: Optional[List[Multivector]] = None,
    br: Callable = schouten,
    seed: int = 0,
    samples: int = 12,
) -> Report:
    """Graded antisymmetry, graded Jacobi and the derivation rule on a corpus.

    For the lie backend the default corpus is every basis word up to the wedge
    bound, so the check is exhaustive.
    """
    rep = Report("gerstenhaber")
    rep.bounds["max_wedge"] = max_wedge_degree
    xs = corpus if corpus is not None else gerstenhaber_corpus(inst, max_wedge_degree, samples, seed)
    xs = [x for x in xs if x]
    degs = [_deg(x) for x in xs]
    zero = Multivector.zero(inst)

    # graded antisymmetry {a,b} = -(-1)^{(|a|-1)(|b|-1)} {b,a}
    n, bad = 0, None
    brackets = {}
    for i, a in enumerate(xs):
        for j, b in enumerate(xs):
            brackets[(i, j)] = br(a, b)
    for i, a in enumerate(xs):
        for j in range(i, len(xs)):
            s = -1 if ((degs[i] - 1) * (degs[j] - 1)) % 2 else 1
            n += 1
            if brackets[(i, j)] + brackets[(j, i)].scale(s) != zero:
                bad = bad or {"a": a, "b": xs[j]}
    rep.add("graded antisymmetry", bad is None, n, bad)

    # restriction to the module bracket on wedge degree 1
    ones = [(i, x) for i, x in enumerate(xs) if degs[i] == 1]
    n, bad = 0, None
    for i, a in ones:
        for j, b in ones:
            n += 1
            if brackets[(i, j)] != Multivector.from_element(bracket(a.to_element(), b.to_element())):
                bad = bad or {"a": a, "b": b}
    rep.add("restricts to module bracket", bad is None, n, bad)

    # vanishing on A
    scal = [x for i, x in enumerate(xs) if degs[i] == 0]
    n, bad = 0, None
    for a in scal:
        for b in scal:
            n += 1
            if br(a, b):
                bad = bad or {"a": a, "b": b}
    rep.add("vanishes on A", bad is None, n, bad)

    memo: Dict = {}

    def cached(a, b):
        key = (a, b)
        out = memo.get(key)
        if out is None:
            out = memo[key] = br(a, b)
        return out

    # graded Jacobi: {a,{b,c}} = {{a,b},c} + (-1)^{(|a|-1)(|b|-1)} {b,{a,c}}
    n, bad = 0, None
    for i, a in enumerate(xs):
        for j, b in enumerate(xs):
            ab = brackets[(i, j)]
            s = -1 if ((degs[i] - 1) * (degs[j] - 1)) % 2 else 1
            for k, c in enumerate(xs):
                n += 1
                lhs = cached(a, brackets[(j, k)])
                rhs = cached(ab, c) + cached(b, brackets[(i, k)]).scale(s)
                if lhs != rhs and bad is None:
                    bad = {"a": a, "b": b, "c": c, "residual": lhs - rhs}
    rep.add("graded Jacobi", bad is None, n, bad)

    # derivation: {a, b^c} = {a,b}^c + (-1)^{(|a|-1)|b|} b^{a,c}
    wedges = {(j, k): wedge(b, c) for j, b in enumerate(xs) for k, c in enumerate(xs)}
    n, bad = 0, None
    for i, a in enumerate(xs):
        for j, b in enumerate(xs):
            s = -1 if ((degs[i] - 1) * degs[j]) % 2 else 1
            for k, c in enumerate(xs):
                n += 1
                lhs = cached(a, wedges[(j, k)])
                rhs = wedge(brackets[(i, j)], c) + wedge(b, brackets[(i, k)]).scale(s)
                if lhs != rhs and bad is None:
                    bad = {"a": a, "b": b, "c": c, "residual": lhs - rhs}
    rep.add("derivation rule", bad is None, n, bad)

    # wedge: associativity and graded commutativity
    n, bad = 0, None
    for i, a in enumerate(xs):
        for j, b in enumerate(xs):
            n += 1
            s = -1 if (degs[i] * degs[j]) % 2 else 1
            if wedge(a, b) != wedge(b, a).scale(s):
                bad = bad or {"a": a, "b": b}
    rep.add("wedge graded commutative", bad is None, n, bad)
    n, bad = 0, None
    for a, b, c in product(xs[: min(len(xs), 10)], repeat=3):
        n += 1
        if wedge(wedge(a, b), c) != wedge(a, wedge(b, c)):
            bad = bad or {"a": a, "b": b, "c": c}
    rep.add("wedge associative", bad is None, n, bad)
    rep.dimensions["corpus"] = len(xs)
    return rep
