"""Finite coordinate windows on functions, fields and forms.

A slice fixes a wedge degree k and a coefficient-degree bound D. Its basis is
every pair (word, monomial) with ``len(word) == k`` and ``deg(monomial) <= D``.
Elements are turned into sparse rational vectors and back.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .cartan import CEForm
from .exactlin import ExactMatrix, Subspace, Vector, kernel_of_rows
from .multivec import Multivector
from .poly import Monomial, Poly, monomials

Key = Tuple[Tuple[int, ...], Monomial]


class OutOfWindow(ValueError):
    """An element has a term outside the slice."""


class Slice:
    def __init__(self, inst, k: int, bound: int, cls=None, words: Optional[Iterable[Sequence[int]]] = None):
        self.inst = inst
        self.k = k
        self.bound = bound
        self.cls = cls or CEForm
        self.words = [tuple(w) for w in words] if words is not None else list(combinations(range(inst.rank), k))
        self.monos = monomials(inst.nvars, bound)
        self.keys: List[Key] = [(w, m) for w in self.words for m in self.monos]
        self.index: Dict[Key, int] = {key: i for i, key in enumerate(self.keys)}

    @property
    def dim(self) -> int:
        return len(self.keys)

    def vector(self, x, strict: bool = True) -> Vector:
        out = {}
        for w, p in x.terms.items():
            for m, c in p.terms.items():
                i = self.index.get((w, m))
                if i is None:
                    if strict:
                        raise OutOfWindow(f"term {w}, {m} is outside the degree-{self.bound} window")
                    continue
                out[i] = c
        return out

    def contains(self, x) -> bool:
        return all((w, m) in self.index for w, p in x.terms.items() for m in p.terms)

    def element(self, v: Vector):
        terms: Dict[Tuple[int, ...], Dict[Monomial, Fraction]] = {}
        for i, c in v.items():
            w, m = self.keys[i]
            terms.setdefault(w, {})[m] = c
        polys = {w: Poly(self.inst.nvars, t) for w, t in terms.items()}
        return self._make(polys)

    def _make(self, polys):
        if self.cls is CEForm:
            return CEForm(self.inst, self.k, polys)
        return self.cls(self.inst, polys)

    def basis_element(self, i: int):
        w, m = self.keys[i]
        return self._make({w: Poly(self.inst.nvars, {m: 1})})

    def basis(self) -> List:
        return [self.basis_element(i) for i in range(self.dim)]

    def where(self, predicate) -> Subspace:
        """Coordinate subspace spanned by basis keys satisfying ``predicate(word, monomial)``."""
        return Subspace.coordinate(self.dim, [i for i, (w, m) in enumerate(self.keys) if predicate(w, m)])

    def ideal_subspace(self, variables: Sequence[int], power: int = 1) -> Subspace:
        """Elements whose coefficients all lie in the ``power``-th power of a coordinate ideal."""
        vs = tuple(variables)
        return self.where(lambda w, m: sum(m[v] for v in vs) >= power)

    def elements(self, space: Subspace) -> List:
        return [self.element(b) for b in space.basis]


class GrowingCoordinates:
    """Coordinates on an unbounded target: keys get indices on first use."""

    def __init__(self):
        self.index: Dict[Key, int] = {}
        self.keys: List[Key] = []

    def vector(self, x) -> Vector:
        out = {}
        for w, p in x.terms.items():
            for m, c in p.terms.items():
                key = (w, m)
                i = self.index.get(key)
                if i is None:
                    i = self.index[key] = len(self.keys)
                    self.keys.append(key)
                out[i] = c
        return out

    @property
    def dim(self) -> int:
        return len(self.keys)


def function_slice(inst, bound: int) -> Slice:
    return Slice(inst, 0, bound, CEForm)


def field_slice(inst, bound: int) -> Slice:
    return Slice(inst, 1, bound, Multivector)


def form_slice(inst, k: int, bound: int) -> Slice:
    return Slice(inst, k, bound, CEForm)


def multivector_slice(inst, k: int, bound: int) -> Slice:
    return Slice(inst, k, bound, Multivector)


def image_matrix(elements: Sequence, fn, coords: Optional[GrowingCoordinates] = None):
    """Matrix whose columns are ``fn(e)`` for each domain element, in growing coordinates."""
    coords = coords or GrowingCoordinates()
    cols = [coords.vector(fn(e)) for e in elements]
    return ExactMatrix.from_columns(cols, coords.dim), coords


def stacked_kernel(dim: int, blocks: Sequence[Sequence[Vector]]) -> Subspace:
    """Common kernel of several column-described maps on the same domain.

    Each block is a list of ``dim`` column vectors (the images of the domain basis).
    """
    rows: Dict[Tuple[int, int], Vector] = {}
    for b, cols in enumerate(blocks):
        for j, col in enumerate(cols):
            for r, c in col.items():
                rows.setdefault((b, r), {})[j] = c
    return kernel_of_rows(list(rows.values()), dim)
