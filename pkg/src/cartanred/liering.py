"""Lie–Rinehart algebras over polynomial rings, as free modules.

One engine serves both backends. ``A = Q[x_1..x_m]`` (``m = 0`` gives the
plain Lie-algebra case) and the module is free on ``e_0..e_{r-1}`` with

* brackets ``[e_i, e_j] = sum_k c_ij^k e_k`` with ``c_ij^k`` in ``A``,
* anchor ``rho(e_i) = sum_m a_i^m d/dx_m``.

The lie backend has ``m = 0`` and zero anchor. The poly backend has
``r = m``, ``e_i = d/dx_i`` and vanishing basis brackets.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from .poly import Poly


class MalformedInput(ValueError):
    pass


class JacobiViolation(ValueError):
    def __init__(self, i, j, k, residual):
        self.triple = (i, j, k)
        self.residual = residual
        super().__init__(f"Jacobi identity fails on basis triple ({i}, {j}, {k}): residual {residual}")


class BackendMismatch(ValueError):
    pass


class LieRinehartInstance:
    def __init__(
        self,
        backend: str,
        rank: int,
        nvars: int,
        brackets: Optional[Dict[Tuple[int, int], Dict[int, Poly]]] = None,
        anchor: Optional[Sequence[Dict[int, Poly]]] = None,
        names: Optional[Sequence[str]] = None,
        degree_bound: Optional[int] = None,
        label: str = "",
    ):
        if backend not in ("lie", "poly"):
            raise MalformedInput(f"unknown backend {backend!r}")
        self.backend = backend
        self.rank = rank
        self.nvars = nvars
        self.names = list(names) if names else [f"x{i}" for i in range(nvars)]
        self.degree_bound = degree_bound
        self.label = label
        table: Dict[Tuple[int, int], Dict[int, Poly]] = {}
        for (i, j), out in (brackets or {}).items():
            if not (0 <= i < rank and 0 <= j < rank):
                raise MalformedInput(f"bracket index ({i}, {j}) out of range for rank {rank}")
            clean = {k: p for k, p in out.items() if p}
            for k in clean:
                if not 0 <= k < rank:
                    raise MalformedInput(f"bracket output index {k} out of range for rank {rank}")
            if i == j:
                if clean:
                    raise MalformedInput(f"[e{i}, e{i}] must vanish")
                continue
            key, sign = ((i, j), 1) if i < j else ((j, i), -1)
            val = {k: p * sign for k, p in clean.items()}
            if key in table and table[key] != val:
                raise MalformedInput(f"bracket ({i}, {j}) is not antisymmetric")
            if val:
                table[key] = val
        self._brackets = table
        self._anchor = [dict(a) for a in (anchor or [{} for _ in range(rank)])]
        if len(self._anchor) != rank:
            raise MalformedInput("anchor must have one entry per basis element")

    @classmethod
    def lie(cls, dim: int, constants: Dict[Tuple[int, int], Dict[int, object]], label: str = "") -> "LieRinehartInstance":
        brackets = {ij: {k: Poly.const(c, 0) for k, c in out.items()} for ij, out in constants.items()}
        return cls("lie", dim, 0, brackets, label=label)

    @classmethod
    def poly(cls, names: Sequence[str], degree_bound: Optional[int] = None, label: str = "") -> "LieRinehartInstance":
        n = len(names)
        anchor = [{i: Poly.one(n)} for i in range(n)]
        return cls("poly", n, n, {}, anchor, names=names, degree_bound=degree_bound, label=label)

    # scalars

    def const(self, c) -> Poly:
        return Poly.const(c, self.nvars)

    def var(self, i: int) -> Poly:
        return Poly.var(i, self.nvars)

    def one(self) -> Poly:
        return Poly.one(self.nvars)

    def zero(self) -> Poly:
        return Poly.zero(self.nvars)

    # structure

    def basis_bracket(self, i: int, j: int) -> Dict[int, Poly]:
        if i < j:
            return self._brackets.get((i, j), {})
        if i > j:
            return {k: -p for k, p in self._brackets.get((j, i), {}).items()}
        return {}

    def structure_constants(self) -> Dict[Tuple[int, int], Dict[int, Poly]]:
        return {k: dict(v) for k, v in self._brackets.items()}

    def anchor_basis(self, i: int, f: Poly) -> Poly:
        out = self.zero()
        for m, a in self._anchor[i].items():
            d = f.diff(m)
            if d:
                out = out + a * d
        return out

    def element(self, coeffs) -> "LRElement":
        return LRElement(self, coeffs)

    def basis_element(self, i: int) -> "LRElement":
        return LRElement(self, {i: self.one()})

    def __repr__(self):
        return f"LieRinehartInstance({self.backend}, rank={self.rank}, nvars={self.nvars}{', ' + self.label if self.label else ''})"


class LRElement:
    """``sum_i coeffs[i] e_i`` with polynomial coefficients."""

    __slots__ = ("inst", "coeffs")

    def __init__(self, inst: LieRinehartInstance, coeffs):
        self.inst = inst
        if not isinstance(coeffs, dict):
            coeffs = dict(enumerate(coeffs))
        clean = {}
        for i, c in coeffs.items():
            if not isinstance(c, Poly):
                c = inst.const(c)
            if c.nvars != inst.nvars:
                raise BackendMismatch("coefficient ring does not match the instance")
            if not 0 <= i < inst.rank:
                raise MalformedInput(f"basis index {i} out of range")
            if c:
                clean[i] = c
        self.coeffs = clean

    @classmethod
    def single(cls, inst, i: int, c: Poly) -> "LRElement":
        x = cls.__new__(cls)
        x.inst = inst
        x.coeffs = {i: c} if c else {}
        return x

    def __bool__(self):
        return bool(self.coeffs)

    def __add__(self, other):
        _same(self, other)
        out = dict(self.coeffs)
        for i, c in other.coeffs.items():
            out[i] = out[i] + c if i in out else c
        return LRElement(self.inst, out)

    def __neg__(self):
        return LRElement(self.inst, {i: -c for i, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, f) -> "LRElement":
        if not isinstance(f, Poly):
            f = self.inst.const(f)
        return LRElement(self.inst, {i: f * c for i, c in self.coeffs.items()})

    def __eq__(self, other):
        return isinstance(other, LRElement) and self.inst is other.inst and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(frozenset(self.coeffs.items()))

    def __repr__(self):
        parts = [f"({c.format(self.inst.names)})*e{i}" for i, c in sorted(self.coeffs.items())]
        return "LRElement(" + (" + ".join(parts) or "0") + ")"


def _same(x: LRElement, y: LRElement) -> None:
    if x.inst is not y.inst:
        raise BackendMismatch("elements belong to different instances")


def anchor_apply(x: LRElement, f: Poly) -> Poly:
    out = x.inst.zero()
    for i, c in x.coeffs.items():
        d = x.inst.anchor_basis(i, f)
        if d:
            out = out + c * d
    return out


def bracket(x: LRElement, y: LRElement) -> LRElement:
    """``[f e_i, g e_j] = fg [e_i, e_j] + f rho(e_i)(g) e_j - g rho(e_j)(f) e_i``."""
    _same(x, y)
    inst = x.inst
    out: Dict[int, Poly] = {}

    def acc(k, p):
        if p:
            out[k] = out[k] + p if k in out else p

    for i, f in x.coeffs.items():
        for j, g in y.coeffs.items():
            fg = None
            for k, c in inst.basis_bracket(i, j).items():
                fg = fg if fg is not None else f * g
                acc(k, fg * c)
            acc(j, f * inst.anchor_basis(i, g))
            acc(i, -(g * inst.anchor_basis(j, f)))
    return LRElement(inst, out)


def jacobiator(x: LRElement, y: LRElement, z: LRElement, br: Callable = bracket) -> LRElement:
    return br(x, br(y, z)) + br(y, br(z, x)) + br(z, br(x, y))


def check_jacobi(inst: LieRinehartInstance) -> Optional[JacobiViolation]:
    """First failing basis triple, or None. Exhaustive over basis triples."""
    basis = [inst.basis_element(i) for i in range(inst.rank)]
    for i, j, k in combinations(range(inst.rank), 3):
        r = jacobiator(basis[i], basis[j], basis[k])
        if r:
            return JacobiViolation(i, j, k, r)
    return None


def check_anchor_morphism(inst: LieRinehartInstance, test_polys: Iterable[Poly]) -> Optional[Tuple[int, int, Poly, Poly]]:
    """``rho([e_i, e_j]) = [rho(e_i), rho(e_j)]`` on the given functions; first failure or None."""
    tests = list(test_polys)
    for i in range(inst.rank):
        for j in range(i + 1, inst.rank):
            br = bracket(inst.basis_element(i), inst.basis_element(j))
            for f in tests:
                lhs = anchor_apply(br, f)
                rhs = inst.anchor_basis(i, inst.anchor_basis(j, f)) - inst.anchor_basis(j, inst.anchor_basis(i, f))
                if lhs != rhs:
                    return i, j, f, lhs - rhs
    return None


@dataclass
class LeibnizReport:
    passed: bool
    checked: int
    counterexample: Optional[dict] = None


def validate_leibniz(inst, samples=None, br: Callable = bracket) -> LeibnizReport:
    """Check ``[X, fY] = f[X, Y] + rho(X)(f) Y`` on ``(X, f, Y)`` samples."""
    if samples is None:
        samples = default_leibniz_samples(inst)
    n = 0
    for x, f, y in samples:
        lhs = br(x, y.scale(f))
        rhs = br(x, y).scale(f) + y.scale(anchor_apply(x, f))
        n += 1
        if lhs != rhs:
            return LeibnizReport(False, n, {"X": x, "f": f, "Y": y, "residual": lhs - rhs})
    return LeibnizReport(True, n)


def default_leibniz_samples(inst: LieRinehartInstance, max_degree: int = 2):
    from .poly import monomials

    funcs = [Poly.monomial(m) for m in monomials(inst.nvars, max_degree)] if inst.nvars else [inst.const(2)]
    fields = [inst.basis_element(i) for i in range(inst.rank)]
    if inst.nvars:
        fields += [inst.basis_element(i).scale(inst.var(v)) for i in range(inst.rank) for v in range(inst.nvars)]
    for x, y in product(fields, repeat=2):
        for f in funcs:
            yield x, f, y


def _rational(v) -> Fraction:
    try:
        return Fraction(v)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise MalformedInput(f"not a rational number: {v!r}") from exc


def parse_poly(terms, nvars: int) -> Poly:
    """Polynomial from ``[{"coeff": "p/q", "exponents": [...]}, ...]`` or a bare rational."""
    if isinstance(terms, (str, int)):
        return Poly.const(_rational(terms), nvars)
    out = Poly.zero(nvars)
    for t in terms:
        exps = tuple(t.get("exponents", [0] * nvars))
        if len(exps) != nvars:
            raise MalformedInput(f"exponent vector {list(exps)} needs {nvars} entries")
        out = out + Poly(nvars, {exps: _rational(t["coeff"])})
    return out


def poly_to_json(p: Poly):
    return [{"coeff": str(c), "exponents": list(m)} for m, c in sorted(p.terms.items())]


def load_instance(desc: dict, validate: bool = True) -> LieRinehartInstance:
    """Build an instance from its JSON description (the ``backend`` object)."""
    kind = desc.get("type")
    if kind == "lie":
        dim = desc.get("dim")
        if not isinstance(dim, int) or dim < 0:
            raise MalformedInput("lie backend needs a non-negative integer 'dim'")
        constants: Dict[Tuple[int, int], Dict[int, Fraction]] = {}
        for key, out in desc.get("structure_constants", {}).items():
            try:
                i, j = (int(s) for s in key.split(","))
            except ValueError as exc:
                raise MalformedInput(f"bad structure-constant key {key!r}") from exc
            constants[(i, j)] = {int(k): _rational(c) for k, c in out.items()}
        inst = LieRinehartInstance.lie(dim, constants, label=desc.get("label", ""))
    elif kind == "poly":
        names = desc.get("variables")
        if not names or not all(isinstance(n, str) for n in names):
            raise MalformedInput("poly backend needs a non-empty list of variable names")
        inst = LieRinehartInstance.poly(names, desc.get("degree_bound"), label=desc.get("label", ""))
    else:
        raise MalformedInput(f"unknown backend type {kind!r}")
    if validate:
        bad = check_jacobi(inst)
        if bad is not None:
            raise bad
    return inst


def instance_to_json(inst: LieRinehartInstance) -> dict:
    if inst.backend == "lie":
        sc = {}
        for (i, j), out in sorted(inst.structure_constants().items()):
            sc[f"{i},{j}"] = {str(k): str(p.constant_term()) for k, p in sorted(out.items())}
        return {"type": "lie", "dim": inst.rank, "structure_constants": sc}
    out = {"type": "poly", "variables": list(inst.names)}
    if inst.degree_bound is not None:
        out["degree_bound"] = inst.degree_bound
    return out
