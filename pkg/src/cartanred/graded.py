"""Graded vector spaces and the sign conventions used everywhere else.

Every sign in the package comes from here. Two rules are fixed:

* swapping adjacent homogeneous items of degrees p and q costs ``(-1)**(p*q)``;
* contraction by a wedge of vectors nests from the right, so
  ``iota(x1 ^ ... ^ xk) = iota(x1) ... iota(xk)`` and the last factor
  is inserted first.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .exactlin import DimensionError, ExactMatrix, Vector


def perm_sign(perm: Sequence[int]) -> int:
    """Ordinary sign of a permutation given as a sequence of distinct integers."""
    perm = list(perm)
    sign = 1
    seen = [False] * len(perm)
    rank = {v: i for i, v in enumerate(sorted(perm))}
    p = [rank[v] for v in perm]
    for i in range(len(p)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = p[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def koszul_sign(perm: Sequence[int], degrees: Sequence[int], exterior: bool = False) -> int:
    """Sign for moving items into the order ``perm``.

    ``perm[k]`` is the original position of the item that ends up in slot k
    and ``degrees`` are the degrees in the original order. With ``exterior``
    the ordinary permutation sign is multiplied in as well.
    """
    if len(perm) != len(degrees):
        raise DimensionError(f"permutation of length {len(perm)} but {len(degrees)} degrees")
    if sorted(perm) != list(range(len(perm))):
        raise ValueError(f"{perm} is not a permutation")
    parity = 0
    for a in range(len(perm)):
        for b in range(a + 1, len(perm)):
            i, j = perm[a], perm[b]
            if i > j:
                parity += degrees[i] * degrees[j]
                if exterior:
                    parity += 1
    return -1 if parity % 2 else 1


def sort_word(word: Sequence[int]) -> Tuple[int, Tuple[int, ...]]:
    """Sort a word of odd generators; returns (sign, sorted word), sign 0 on a repeat."""
    w = list(word)
    sign = 1
    # insertion sort counting transpositions
    for i in range(1, len(w)):
        j = i
        while j > 0 and w[j - 1] > w[j]:
            w[j - 1], w[j] = w[j], w[j - 1]
            sign = -sign
            j -= 1
    for a, b in zip(w, w[1:]):
        if a == b:
            return 0, ()
    return sign, tuple(w)


def merge_sign(u: Sequence[int], v: Sequence[int]) -> Tuple[int, Tuple[int, ...]]:
    """Sign and sorted result of concatenating two sorted odd words."""
    if set(u) & set(v):
        return 0, ()
    inversions = 0
    j = 0
    for a in u:
        while j < len(v) and v[j] < a:
            j += 1
        inversions += j
    return (-1 if inversions % 2 else 1), tuple(sorted((*u, *v)))


def commutator_sign(p: int, q: int) -> int:
    """Sign in ``[P, Q] = PQ - sign * QP`` for operators of degrees p and q."""
    return -1 if (p * q) % 2 else 1


class GradedSpace:
    """Finite-dimensional graded space: ``{degree: tuple of basis labels}``."""

    __slots__ = ("components",)

    def __init__(self, components: Optional[Dict[int, Sequence[str]]] = None):
        comps = {}
        for d, labels in (components or {}).items():
            labels = tuple(labels)
            if len(set(labels)) != len(labels):
                raise ValueError(f"duplicate basis labels in degree {d}")
            if labels:
                comps[int(d)] = labels
        self.components = comps

    @classmethod
    def from_dims(cls, dims: Dict[int, int], prefix: str = "b") -> "GradedSpace":
        return cls({d: [f"{prefix}{d}_{i}" for i in range(n)] for d, n in dims.items()})

    def dim(self, degree: int) -> int:
        return len(self.components.get(degree, ()))

    def degrees(self) -> List[int]:
        return sorted(self.components)

    def total_dim(self) -> int:
        return sum(len(v) for v in self.components.values())

    def labels(self, degree: int) -> Tuple[str, ...]:
        return self.components.get(degree, ())

    def dims(self) -> Dict[int, int]:
        return {d: len(v) for d, v in sorted(self.components.items())}

    def __eq__(self, other):
        return isinstance(other, GradedSpace) and self.components == other.components

    def __hash__(self):
        return hash(tuple(sorted(self.components.items())))

    def __repr__(self):
        return f"GradedSpace({self.dims()})"


def shift(v: GradedSpace, n: int) -> GradedSpace:
    """Degree i of the result is degree i + n of the input."""
    return GradedSpace({d - n: labels for d, labels in v.components.items()})


def reverse(v: GradedSpace) -> GradedSpace:
    return GradedSpace({-d: labels for d, labels in v.components.items()})


def tensor_layout(a: GradedSpace, b: GradedSpace) -> Dict[int, List[Tuple[int, int, int, int]]]:
    """For each total degree, the ordered list of (p, i, q, j) basis pairs."""
    out: Dict[int, List[Tuple[int, int, int, int]]] = {}
    for p in a.degrees():
        for q in b.degrees():
            slot = out.setdefault(p + q, [])
            for i in range(a.dim(p)):
                for j in range(b.dim(q)):
                    slot.append((p, i, q, j))
    for d in out:
        out[d].sort()
    return out


def tensor(a: GradedSpace, b: GradedSpace) -> GradedSpace:
    layout = tensor_layout(a, b)
    return GradedSpace(
        {d: [f"{a.labels(p)[i]}(x){b.labels(q)[j]}" for p, i, q, j in slots] for d, slots in layout.items()}
    )


class GradedElement:
    __slots__ = ("space", "coords")

    def __init__(self, space: GradedSpace, coords: Optional[Dict[Tuple[int, int], object]] = None):
        self.space = space
        clean = {}
        for (d, i), c in (coords or {}).items():
            if not 0 <= i < space.dim(d):
                raise DimensionError(f"no basis slot {i} in degree {d}")
            c = Fraction(c)
            if c:
                clean[(d, i)] = c
        self.coords = clean

    def component(self, degree: int) -> Vector:
        return {i: c for (d, i), c in self.coords.items() if d == degree}

    def is_homogeneous(self) -> bool:
        return len({d for d, _ in self.coords}) <= 1

    def degree(self) -> Optional[int]:
        ds = {d for d, _ in self.coords}
        return ds.pop() if len(ds) == 1 else None

    def __add__(self, other: "GradedElement") -> "GradedElement":
        out = dict(self.coords)
        for k, c in other.coords.items():
            out[k] = out.get(k, 0) + c
        return GradedElement(self.space, out)

    def __eq__(self, other):
        return isinstance(other, GradedElement) and self.space == other.space and self.coords == other.coords

    def __repr__(self):
        return f"GradedElement({self.coords})"


class GradedMap:
    """Degree-d linear map given by blocks ``V^i -> W^(i+d)``."""

    def __init__(self, source: GradedSpace, target: GradedSpace, degree: int, blocks: Dict[int, ExactMatrix]):
        self.source = source
        self.target = target
        self.degree = degree
        self.blocks = {}
        for i in source.degrees():
            m = blocks.get(i)
            rows, cols = target.dim(i + degree), source.dim(i)
            if m is None:
                m = ExactMatrix(rows, cols)
            elif (m.rows, m.cols) != (rows, cols):
                raise DimensionError(f"block in degree {i} is {m.rows}x{m.cols}, expected {rows}x{cols}")
            self.blocks[i] = m

    @classmethod
    def identity(cls, v: GradedSpace) -> "GradedMap":
        return cls(v, v, 0, {d: ExactMatrix.identity(v.dim(d)) for d in v.degrees()})

    def block(self, i: int) -> ExactMatrix:
        return self.blocks.get(i, ExactMatrix(self.target.dim(i + self.degree), self.source.dim(i)))

    def apply(self, x: GradedElement) -> GradedElement:
        out = {}
        for d in {d for d, _ in x.coords}:
            for r, c in self.block(d).apply(x.component(d)).items():
                out[(d + self.degree, r)] = c
        return GradedElement(self.target, out)

    def compose(self, first: "GradedMap") -> "GradedMap":
        """``self after first``."""
        if first.target != self.source:
            raise DimensionError("maps are not composable")
        blocks = {i: self.block(i + first.degree) @ first.block(i) for i in first.source.degrees()}
        return GradedMap(first.source, self.target, self.degree + first.degree, blocks)

    def __eq__(self, other):
        return (
            isinstance(other, GradedMap)
            and self.source == other.source
            and self.target == other.target
            and self.degree == other.degree
            and all(self.block(i) == other.block(i) for i in self.source.degrees())
        )

    def __repr__(self):
        return f"GradedMap(degree={self.degree}, {self.source!r} -> {self.target!r})"
