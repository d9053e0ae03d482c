"""Sparse multivariate polynomials with rational coefficients."""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations_with_replacement
from math import comb
from operator import add
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

Monomial = Tuple[int, ...]


def rational(c):
    """Exact scalar: a plain int when integral, else a Fraction."""
    if isinstance(c, int) and not isinstance(c, bool):
        return c
    c = Fraction(c)
    return c.numerator if c.denominator == 1 else c


class Poly:
    """Immutable polynomial in ``nvars`` variables, stored as ``{exponents: coeff}``."""

    __slots__ = ("nvars", "terms", "_hash")

    def __init__(self, nvars: int, terms: Optional[Dict[Monomial, object]] = None):
        self.nvars = nvars
        clean = {}
        if terms:
            for mono, c in terms.items():
                if len(mono) != nvars:
                    raise ValueError(f"exponent vector {mono} has wrong length for {nvars} variables")
                c = rational(c)
                if c:
                    clean[tuple(mono)] = c
        self.terms = clean
        self._hash = None

    @classmethod
    def _wrap(cls, nvars, terms):
        p = cls.__new__(cls)
        p.nvars = nvars
        p.terms = terms
        p._hash = None
        return p

    @classmethod
    def const(cls, c, nvars: int) -> "Poly":
        c = rational(c)
        return cls._wrap(nvars, {(0,) * nvars: c} if c else {})

    @classmethod
    def zero(cls, nvars: int) -> "Poly":
        return cls._wrap(nvars, {})

    @classmethod
    def one(cls, nvars: int) -> "Poly":
        return cls.const(1, nvars)

    @classmethod
    def var(cls, i: int, nvars: int) -> "Poly":
        e = [0] * nvars
        e[i] = 1
        return cls._wrap(nvars, {tuple(e): 1})

    @classmethod
    def monomial(cls, exps: Sequence[int], c=1) -> "Poly":
        return cls(len(exps), {tuple(exps): c})

    def __bool__(self):
        return bool(self.terms)

    def is_constant(self) -> bool:
        return all(not any(m) for m in self.terms)

    def constant_term(self):
        return self.terms.get((0,) * self.nvars, 0)

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(m) for m in self.terms), default=-1)

    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            if other.nvars != self.nvars:
                raise ValueError(f"variable count mismatch: {self.nvars} vs {other.nvars}")
            return other
        return Poly.const(other, self.nvars)

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            v = out.get(m, 0) + c
            if v:
                out[m] = v
            else:
                out.pop(m, None)
        return Poly._wrap(self.nvars, out)

    __radd__ = __add__

    def __neg__(self):
        return Poly._wrap(self.nvars, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def scale(self, c) -> "Poly":
        c = rational(c)
        if not c:
            return Poly.zero(self.nvars)
        return Poly._wrap(self.nvars, {m: c * x for m, x in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, Poly):
            return self.scale(other)
        other = self._coerce(other)
        if not self.terms or not other.terms:
            return Poly.zero(self.nvars)
        out: Dict[Monomial, Fraction] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(map(add, m1, m2))
                v = out.get(m, 0) + c1 * c2
                if v:
                    out[m] = v
                else:
                    out.pop(m, None)
        return Poly._wrap(self.nvars, out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        out = Poly.one(self.nvars)
        for _ in range(n):
            out = out * self
        return out

    def diff(self, i: int) -> "Poly":
        out = {}
        for m, c in self.terms.items():
            e = m[i]
            if e:
                mm = m[:i] + (e - 1,) + m[i + 1:]
                out[mm] = c * e
        return Poly._wrap(self.nvars, out)

    def restrict_zero(self, variables: Iterable[int]) -> "Poly":
        """Set the given variables to zero."""
        vs = tuple(variables)
        return Poly._wrap(self.nvars, {m: c for m, c in self.terms.items() if not any(m[v] for v in vs)})

    def in_coordinate_ideal(self, variables: Iterable[int], power: int = 1) -> bool:
        """Membership in the ``power``-th power of the ideal generated by ``variables``."""
        vs = tuple(variables)
        return all(sum(m[v] for v in vs) >= power for m in self.terms)

    def evaluate(self, point: Sequence) -> Fraction:
        s = Fraction(0)
        for m, c in self.terms.items():
            t = c
            for x, e in zip(point, m):
                if e:
                    t *= Fraction(x) ** e
            s += t
        return s

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.nvars == other.nvars and self.terms == other.terms
        try:
            return self == Poly.const(other, self.nvars)
        except (TypeError, ValueError):
            return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self.terms.items())))
        return self._hash

    def format(self, names: Optional[Sequence[str]] = None) -> str:
        if not self.terms:
            return "0"
        names = names or [f"x{i}" for i in range(self.nvars)]
        parts = []
        for m in sorted(self.terms, key=lambda m: (-sum(m), tuple(-e for e in m))):
            c = self.terms[m]
            mono = "*".join(n if e == 1 else f"{n}^{e}" for n, e in zip(names, m) if e)
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self):
        return f"Poly({self.format()})"


def monomials(nvars: int, max_degree: int) -> List[Monomial]:
    """All exponent vectors of total degree at most ``max_degree``, graded then lexicographic."""
    out = []
    for d in range(max_degree + 1):
        block = []
        for combo in combinations_with_replacement(range(nvars), d):
            e = [0] * nvars
            for v in combo:
                e[v] += 1
            block.append(tuple(e))
        out.extend(sorted(block, reverse=True))
    return out


def count_monomials(nvars: int, max_degree: int) -> int:
    return comb(nvars + max_degree, max_degree)


def iter_terms(p: Poly) -> Iterator[Tuple[Monomial, Fraction]]:
    return iter(sorted(p.terms.items()))
