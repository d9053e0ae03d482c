"""Exact linear algebra over the rationals.

Vectors are sparse dicts ``{index: Fraction}`` with no stored zeros.
Every subspace is kept as its reduced row-echelon basis, so two
subspaces are equal exactly when their stored bases are equal.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

Vector = Dict[int, Fraction]

DENSE_LIMIT = 64


class DimensionError(ValueError):
    pass


class ContainmentError(ValueError):
    pass


def vec(entries) -> Vector:
    """Build a sparse vector from a dense sequence or a mapping."""
    if isinstance(entries, dict):
        items = entries.items()
    else:
        items = enumerate(entries)
    out = {}
    for i, x in items:
        x = Fraction(x)
        if x:
            out[i] = x
    return out


def dense(v: Vector, n: int) -> List[Fraction]:
    out = [Fraction(0)] * n
    for i, x in v.items():
        out[i] = x
    return out


def add_scaled(target: Vector, v: Vector, c) -> None:
    """In place: target += c * v."""
    if not c:
        return
    for i, x in v.items():
        y = target.get(i, 0) + c * x
        if y:
            target[i] = y
        else:
            target.pop(i, None)


def lincomb(pairs: Iterable[Tuple[object, Vector]]) -> Vector:
    out: Vector = {}
    for c, v in pairs:
        add_scaled(out, v, c)
    return out


def dot(u: Vector, v: Vector) -> Fraction:
    if len(u) > len(v):
        u, v = v, u
    s = Fraction(0)
    for i, x in u.items():
        y = v.get(i)
        if y is not None:
            s += x * y
    return s


class ExactMatrix:
    """Sparse rational matrix; ``entries`` maps ``(row, col)`` to a nonzero value."""

    __slots__ = ("rows", "cols", "_rows")

    def __init__(self, rows: int, cols: int, entries=None):
        self.rows = rows
        self.cols = cols
        self._rows: List[Vector] = [{} for _ in range(rows)]
        if entries:
            for (r, c), x in entries.items():
                if not (0 <= r < rows and 0 <= c < cols):
                    raise DimensionError(f"entry ({r}, {c}) outside {rows}x{cols}")
                x = Fraction(x)
                if x:
                    self._rows[r][c] = x

    @classmethod
    def from_rows(cls, rows: Sequence, cols: Optional[int] = None) -> "ExactMatrix":
        rows = [r if isinstance(r, dict) else vec(r) for r in rows]
        if cols is None:
            cols = max((max(r) + 1 for r in rows if r), default=0)
        m = cls(len(rows), cols)
        for i, r in enumerate(rows):
            for c, x in r.items():
                if c >= cols:
                    raise DimensionError(f"column {c} outside width {cols}")
                if x:
                    m._rows[i][c] = Fraction(x)
        return m

    @classmethod
    def from_dense(cls, rows: Sequence[Sequence]) -> "ExactMatrix":
        cols = len(rows[0]) if rows else 0
        return cls.from_rows([vec(r) for r in rows], cols)

    @classmethod
    def from_columns(cls, columns: Sequence[Vector], rows: int) -> "ExactMatrix":
        m = cls(rows, len(columns))
        for c, col in enumerate(columns):
            for r, x in col.items():
                if r >= rows:
                    raise DimensionError(f"row {r} outside height {rows}")
                m._rows[r][c] = x
        return m

    @classmethod
    def identity(cls, n: int) -> "ExactMatrix":
        return cls(n, n, {(i, i): 1 for i in range(n)})

    @property
    def entries(self) -> Dict[Tuple[int, int], Fraction]:
        return {(r, c): x for r, row in enumerate(self._rows) for c, x in row.items()}

    def row(self, i: int) -> Vector:
        return dict(self._rows[i])

    def row_vectors(self) -> List[Vector]:
        return [dict(r) for r in self._rows]

    def column_vectors(self) -> List[Vector]:
        cols: List[Vector] = [{} for _ in range(self.cols)]
        for r, row in enumerate(self._rows):
            for c, x in row.items():
                cols[c][r] = x
        return cols

    def to_dense(self) -> List[List[Fraction]]:
        return [dense(r, self.cols) for r in self._rows]

    def transpose(self) -> "ExactMatrix":
        return ExactMatrix.from_rows(self.column_vectors(), self.rows)

    def apply(self, v: Vector) -> Vector:
        out = {}
        for r, row in enumerate(self._rows):
            s = dot(row, v)
            if s:
                out[r] = s
        return out

    def __matmul__(self, other: "ExactMatrix") -> "ExactMatrix":
        if self.cols != other.rows:
            raise DimensionError(f"cannot compose {self.rows}x{self.cols} with {other.rows}x{other.cols}")
        out = ExactMatrix(self.rows, other.cols)
        for i, row in enumerate(self._rows):
            acc: Vector = {}
            for k, x in row.items():
                add_scaled(acc, other._rows[k], x)
            out._rows[i] = acc
        return out

    def __eq__(self, other):
        return (
            isinstance(other, ExactMatrix)
            and self.rows == other.rows
            and self.cols == other.cols
            and self._rows == other._rows
        )

    def __hash__(self):
        return hash((self.rows, self.cols, tuple(tuple(sorted(r.items())) for r in self._rows)))

    def __repr__(self):
        return f"ExactMatrix({self.rows}x{self.cols}, nnz={sum(len(r) for r in self._rows)})"


def _rref_rows_sparse(rows: List[Vector]) -> Tuple[List[Vector], List[int]]:
    pivots: List[int] = []
    basis: List[Vector] = []
    # pivot column -> position in basis
    where: Dict[int, int] = {}
    for row in rows:
        v = dict(row)
        for p, k in where.items():
            c = v.get(p)
            if c:
                add_scaled(v, basis[k], -c)
        if not v:
            continue
        p = min(v)
        inv = 1 / Fraction(v[p])
        v = {i: x * inv for i, x in v.items()}
        for k, b in enumerate(basis):
            c = b.get(p)
            if c:
                add_scaled(b, v, -c)
        where[p] = len(basis)
        basis.append(v)
        pivots.append(p)
    order = sorted(range(len(basis)), key=lambda k: pivots[k])
    return [basis[k] for k in order], [pivots[k] for k in order]


def _rref_rows_dense(rows: List[Vector], ncols: int) -> Tuple[List[Vector], List[int]]:
    a = [dense(r, ncols) for r in rows]
    m = len(a)
    pivots = []
    r = 0
    for c in range(ncols):
        if r >= m:
            break
        p = next((i for i in range(r, m) if a[i][c]), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        inv = 1 / Fraction(a[r][c])
        a[r] = [x * inv for x in a[r]]
        for i in range(m):
            if i != r and a[i][c]:
                f = a[i][c]
                ai, ar = a[i], a[r]
                a[i] = [x - f * y for x, y in zip(ai, ar)]
        pivots.append(c)
        r += 1
    return [vec(a[i]) for i in range(r)], pivots


def rref_rows(rows: Sequence[Vector], ncols: int, dense_limit: int = DENSE_LIMIT):
    """Reduced echelon basis of the row span and its pivot columns."""
    rows = list(rows)
    if ncols < dense_limit and rows:
        return _rref_rows_dense(rows, ncols)
    return _rref_rows_sparse(rows)


def rref(m: ExactMatrix, dense_limit: int = DENSE_LIMIT) -> Tuple[ExactMatrix, List[int]]:
    """Return the reduced row-echelon form (zero rows at the bottom) and pivots."""
    basis, pivots = rref_rows(m.row_vectors(), m.cols, dense_limit)
    out = ExactMatrix(m.rows, m.cols)
    for i, b in enumerate(basis):
        out._rows[i] = b
    return out, pivots


def rank(m: ExactMatrix) -> int:
    return len(rref(m)[1])


def solve(m: ExactMatrix, rhs) -> Optional[Vector]:
    """One solution of ``m x = rhs`` with all free variables set to zero, or None."""
    if isinstance(rhs, dict):
        if rhs and max(rhs) >= m.rows:
            raise DimensionError(f"rhs index {max(rhs)} outside {m.rows} rows")
    else:
        if len(rhs) != m.rows:
            raise DimensionError(f"rhs has length {len(rhs)}, expected {m.rows}")
        rhs = vec(rhs)
    n = m.cols
    aug = []
    for r, row in enumerate(m._rows):
        v = dict(row)
        if r in rhs:
            v[n] = rhs[r]
        aug.append(v)
    basis, pivots = rref_rows(aug, n + 1)
    if pivots and pivots[-1] == n:
        return None
    x = {}
    for b, p in zip(basis, pivots):
        c = b.get(n)
        if c:
            x[p] = c
    return x


def nullspace_vectors(m: ExactMatrix) -> List[Vector]:
    basis, pivots = rref_rows(m.row_vectors(), m.cols)
    piv = set(pivots)
    out = []
    for f in range(m.cols):
        if f in piv:
            continue
        v = {f: Fraction(1)}
        for b, p in zip(basis, pivots):
            c = b.get(f)
            if c:
                v[p] = -c
        out.append(v)
    return out


def nullspace(m: ExactMatrix) -> "Subspace":
    return Subspace(m.cols, nullspace_vectors(m))


def infeasibility_certificate(m: ExactMatrix, rhs: Vector) -> Optional[Vector]:
    """A row combination ``y`` with ``y m = 0`` and ``y . rhs != 0``, or None if solvable."""
    for y in nullspace_vectors(m.transpose()):
        if dot(y, rhs):
            return y
    return None


class Subspace:
    """A subspace of Q^n stored by its canonical reduced echelon basis."""

    __slots__ = ("ambient_dim", "basis", "pivots", "_key")

    def __init__(self, ambient_dim: int, vectors: Iterable[Vector] = ()):
        self.ambient_dim = ambient_dim
        vectors = [v if isinstance(v, dict) else vec(v) for v in vectors]
        for v in vectors:
            if v and max(v) >= ambient_dim:
                raise DimensionError(f"vector index {max(v)} outside ambient dimension {ambient_dim}")
        self.basis, self.pivots = rref_rows(vectors, ambient_dim)
        self._key = None

    @classmethod
    def _raw(cls, ambient_dim, basis, pivots):
        s = cls.__new__(cls)
        s.ambient_dim = ambient_dim
        s.basis = basis
        s.pivots = pivots
        s._key = None
        return s

    @classmethod
    def zero(cls, n: int) -> "Subspace":
        return cls._raw(n, [], [])

    @classmethod
    def full(cls, n: int) -> "Subspace":
        return cls._raw(n, [{i: Fraction(1)} for i in range(n)], list(range(n)))

    @classmethod
    def coordinate(cls, n: int, indices: Iterable[int]) -> "Subspace":
        idx = sorted(set(indices))
        return cls._raw(n, [{i: Fraction(1)} for i in idx], idx)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def __len__(self):
        return len(self.basis)

    def key(self):
        if self._key is None:
            self._key = (self.ambient_dim, tuple(tuple(sorted(b.items())) for b in self.basis))
        return self._key

    def __eq__(self, other):
        return isinstance(other, Subspace) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"Subspace(dim={self.dim}, ambient={self.ambient_dim})"

    def reduce(self, v: Vector) -> Vector:
        """Canonical representative of ``v`` modulo this subspace (zero on the pivots)."""
        r = dict(v)
        for b, p in zip(self.basis, self.pivots):
            c = r.get(p)
            if c:
                add_scaled(r, b, -c)
        return r

    def contains(self, v: Vector) -> bool:
        return not self.reduce(v)

    def __contains__(self, v):
        return self.contains(v)

    def coordinates(self, v: Vector) -> Optional[List[Fraction]]:
        """Coordinates of ``v`` in the echelon basis, or None if ``v`` is outside."""
        if self.reduce(v):
            return None
        return [v.get(p, Fraction(0)) for p in self.pivots]

    def issubspace(self, other: "Subspace") -> bool:
        return all(other.contains(b) for b in self.basis)

    def __le__(self, other):
        return self.issubspace(other)

    def __add__(self, other: "Subspace") -> "Subspace":
        _check_ambient(self, other)
        return Subspace(self.ambient_dim, self.basis + other.basis)

    def annihilator(self) -> List[Vector]:
        """Rows spanning the orthogonal complement under the standard pairing."""
        return nullspace_vectors(ExactMatrix.from_rows(self.basis, self.ambient_dim))

    def image(self, f: ExactMatrix) -> "Subspace":
        if f.cols != self.ambient_dim:
            raise DimensionError("map domain does not match ambient dimension")
        return Subspace(f.rows, [f.apply(b) for b in self.basis])


def _check_ambient(a: Subspace, b: Subspace) -> None:
    if a.ambient_dim != b.ambient_dim:
        raise DimensionError(f"ambient dimensions differ: {a.ambient_dim} vs {b.ambient_dim}")


def span(n: int, vectors: Iterable[Vector]) -> Subspace:
    return Subspace(n, vectors)


def intersect(a: Subspace, b: Subspace) -> Subspace:
    _check_ambient(a, b)
    rows = a.annihilator() + b.annihilator()
    if not rows:
        return Subspace.full(a.ambient_dim)
    return nullspace(ExactMatrix.from_rows(rows, a.ambient_dim))


def preimage(f: ExactMatrix, target: Subspace) -> Subspace:
    """``{v : f v in target}``."""
    if f.rows != target.ambient_dim:
        raise DimensionError(f"map codomain {f.rows} does not match target ambient {target.ambient_dim}")
    ann = target.annihilator()
    if not ann:
        return Subspace.full(f.cols)
    return nullspace(ExactMatrix.from_rows(ann, f.rows) @ f)


def kernel_of_rows(rows: List[Vector], n: int) -> Subspace:
    if not rows:
        return Subspace.full(n)
    return nullspace(ExactMatrix.from_rows(rows, n))


class Quotient:
    """``within / sub`` with representatives and a projection to coordinates."""

    def __init__(self, sub: Subspace, within: Subspace):
        _check_ambient(sub, within)
        if not sub.issubspace(within):
            raise ContainmentError("quotient requires sub to be contained in within")
        self.sub = sub
        self.within = within
        reduced = [sub.reduce(w) for w in within.basis]
        self._reps = Subspace(within.ambient_dim, [r for r in reduced if r])
        self.representatives: List[Vector] = self._reps.basis

    @property
    def dim(self) -> int:
        return len(self.representatives)

    def project(self, v: Vector) -> List[Fraction]:
        if not self.within.contains(v):
            raise ContainmentError("vector is not in the numerator space")
        r = self.sub.reduce(v)
        coords = self._reps.coordinates(r)
        assert coords is not None
        return coords

    def lift(self, coords: Sequence) -> Vector:
        return lincomb(zip(coords, self.representatives))


def quotient_basis(sub: Subspace, within: Subspace):
    q = Quotient(sub, within)
    return q.representatives, q.project
