"""Command-line front end.

    python3 -m cartanred verify --input inst.json --suite cartan
    python3 -m cartanred ham0 --input inst.json --degree-bound 2
    python3 -m cartanred reduce --input inst.json
    python3 -m cartanred fixture r5-residue --format json

Exit codes: 0 pass, 1 property failure, 2 an expected infeasibility did not
show up, 3 input error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence

import jsonschema

from . import fixtures
from .cartan import CEForm, dce, verify_cartan_identities
from .constraint import ConstraintLR, constraint_ce, constraint_suite
from .liering import LieRinehartInstance, MalformedInput, JacobiViolation, load_instance, parse_poly
from .multivec import Multivector, check_gerstenhaber
from .observables import Cocycle, NotClosed, ham_pairs, r3_fixture_check, verify_linfty
from .report import Report, jsonable

EXIT_PASS, EXIT_FAIL, EXIT_MISMATCH, EXIT_INPUT = 0, 1, 2, 3

SUITES = ("cartan", "gerstenhaber", "linfty", "constraint", "reduction")
FIXTURES = ("r3-volume", "so3-volume", "r5-residue", "symplectic-imq", "constraint-manifold")
# fixtures whose report must carry an infeasibility certificate
EXPECT_INFEASIBLE = {"r5-residue"}

_rational = {"type": "string", "pattern": r"^-?\d+(/\d+)?$"}
_poly = {
    "type": "array",
    "items": {
        "type": "object",
        "required": ["coeff", "exponents"],
        "properties": {"coeff": _rational, "exponents": {"type": "array", "items": {"type": "integer", "minimum": 0}}},
        "additionalProperties": False,
    },
}
_scalar = {"oneOf": [_rational, _poly]}
_sparse = {"type": "object", "patternProperties": {r"^\d+$": _scalar}, "additionalProperties": False}

SCHEMA: Dict[str, Any] = {
    "type": "object",
    "required": ["schema_version", "backend"],
    "properties": {
        "schema_version": {"const": 1},
        "backend": {
            "type": "object",
            "required": ["type"],
            "properties": {
                "type": {"enum": ["lie", "poly"]},
                "dim": {"type": "integer", "minimum": 0},
                "structure_constants": {
                    "type": "object",
                    "patternProperties": {r"^\d+,\d+$": {"type": "object", "patternProperties": {r"^\d+$": _rational}, "additionalProperties": False}},
                    "additionalProperties": False,
                },
                "variables": {"type": "array", "items": {"type": "string"}, "minItems": 1},
                "degree_bound": {"type": "integer", "minimum": 0},
                "label": {"type": "string"},
            },
            "additionalProperties": False,
        },
        "omega": {"$ref": "#/$defs/form"},
        "constraint": {
            "type": "object",
            "properties": {
                "ideal": {"type": "array", "items": {"type": "integer", "minimum": 0}},
                "wanted": {"type": "array", "items": _sparse},
                "null": {"type": "array", "items": _sparse},
                "symmetries": {"type": "array", "items": _sparse},
                "momentum": {"type": "array", "items": {"$ref": "#/$defs/form"}},
            },
            "additionalProperties": False,
        },
        "degree_bound": {"type": "integer", "minimum": 0},
    },
    "additionalProperties": False,
    "$defs": {
        "form": {
            "type": "object",
            "required": ["degree", "terms"],
            "properties": {
                "degree": {"type": "integer", "minimum": 0},
                "terms": {"type": "object", "patternProperties": {r"^(\d+(\.\d+)*)?$": _scalar}, "additionalProperties": False},
            },
            "additionalProperties": False,
        }
    },
}


class InputError(ValueError):
    pass


class OmegaNotClosed(Exception):
    """Raised by commands that need a cocycle; reported as a failed check, not an input error."""

    def __init__(self, d_omega: CEForm):
        super().__init__("omega is not closed")
        self.d_omega = d_omega

    def report(self, suite: str) -> Report:
        rep = Report(suite)
        rep.add("d omega = 0", False, 1, self.d_omega.format("d"))
        return rep


def _locate(text: str, path: Sequence) -> Optional[int]:
    """Best-effort line number of the innermost object key on ``path``."""
    pos, line = 0, None
    for key in path:
        if isinstance(key, int):
            continue
        i = text.find(json.dumps(key), pos)
        if i < 0:
            break
        pos = i + 1
        line = text.count("\n", 0, i) + 1
    return line


class InstanceFile:
    """Parsed and validated instance description."""

    def __init__(self, raw: dict, source: str = "<input>"):
        self.raw = raw
        self.source = source
        try:
            self.instance = load_instance(raw["backend"])
        except (MalformedInput, JacobiViolation) as exc:
            raise InputError(f"{source}: backend: {exc}") from exc
        self.degree_bound = raw.get("degree_bound")
        self.omega = self._form(raw["omega"]) if "omega" in raw else None
        self.constraint = raw.get("constraint")
        self.momentum = [self._form(m) for m in self.constraint.get("momentum", [])] if self.constraint and "momentum" in self.constraint else None

    def _scalar(self, x) -> Any:
        nv = self.instance.nvars
        if isinstance(x, str):
            return self.instance.const(Fraction(x))
        try:
            return parse_poly(x, nv)
        except (MalformedInput, ValueError) as exc:
            raise InputError(f"{self.source}: {exc}") from exc

    def _form(self, desc) -> CEForm:
        terms = {}
        inst = self.instance
        for key, c in desc["terms"].items():
            word = tuple(int(s) for s in key.split(".")) if key else ()
            if len(word) != desc["degree"] or any(i >= inst.rank for i in word):
                raise InputError(f"{self.source}: form term {key}: word does not match degree {desc['degree']} and rank {inst.rank}")
            if len(set(word)) != len(word):
                raise InputError(f"{self.source}: form term {key}: repeated index")
            terms[word] = self._scalar(c)
        # words may come unsorted; normalise through the antisymmetric constructor
        out = CEForm.zero(inst, desc["degree"])
        for w, p in terms.items():
            out = out + _sorted_basis(inst, w, p)
        return out

    def field(self, desc) -> Multivector:
        inst = self.instance
        terms = {}
        for k, c in desc.items():
            i = int(k)
            if i >= inst.rank:
                raise InputError(f"{self.source}: field index {i} out of range for rank {inst.rank}")
            terms[(i,)] = self._scalar(c)
        return Multivector(inst, terms)

    def vector(self, desc) -> Dict[int, Fraction]:
        out = {}
        for k, c in desc.items():
            if not isinstance(c, str):
                raise InputError(f"{self.source}: subspace vectors need rational entries")
            if int(k) >= self.instance.rank:
                raise InputError(f"{self.source}: vector index {k} out of range")
            out[int(k)] = Fraction(c)
        return out

    def bound(self, cli_bound: Optional[int]) -> int:
        if cli_bound is not None:
            return cli_bound
        if self.degree_bound is not None:
            return self.degree_bound
        return 3

    def cocycle(self) -> Cocycle:
        if self.omega is None:
            raise InputError(f"{self.source}: this command needs an 'omega' entry")
        try:
            return Cocycle(self.omega)
        except NotClosed as exc:
            raise OmegaNotClosed(dce(self.omega)) from exc
        except ValueError as exc:
            raise InputError(f"{self.source}: omega: {exc}") from exc

    def constraint_lr(self) -> ConstraintLR:
        c = self.constraint
        if c is None:
            raise InputError(f"{self.source}: this command needs a 'constraint' entry")
        inst = self.instance
        if inst.backend == "lie":
            if "wanted" not in c:
                raise InputError(f"{self.source}: constraint.wanted is required for the lie backend")
            return ConstraintLR.lie(inst, [self.vector(v) for v in c["wanted"]], [self.vector(v) for v in c.get("null", [])])
        return ConstraintLR.coordinate_ideal(inst, c.get("ideal", []))

    def symmetry_data(self):
        from .reduction import IdealNotPreserved, SymmetryData

        c = self.constraint or {}
        if self.instance.backend != "poly":
            raise InputError(f"{self.source}: symmetry data needs the poly backend")
        try:
            return SymmetryData(self.instance, c.get("ideal", []), [self.field(x) for x in c.get("symmetries", [])])
        except IdealNotPreserved as exc:
            raise InputError(f"{self.source}: constraint.symmetries: {exc}") from exc


def _sorted_basis(inst, word, p) -> CEForm:
    from .graded import sort_word

    sign, w = sort_word(word)
    return CEForm(inst, len(word), {w: p * sign})


def parse_instance(path: str) -> InstanceFile:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from exc
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}:{exc.lineno}:{exc.colno}: invalid JSON: {exc.msg}") from exc
    validator = jsonschema.Draft202012Validator(SCHEMA)
    errors = sorted(validator.iter_errors(raw), key=lambda e: list(map(str, e.absolute_path)))
    if errors:
        lines = []
        for e in errors:
            where = ".".join(str(p) for p in e.absolute_path) or "<root>"
            ln = _locate(text, list(e.absolute_path))
            prefix = f"{path}:{ln}" if ln else path
            lines.append(f"{prefix}: {where}: {e.message}")
        raise InputError("\n".join(lines))
    return InstanceFile(raw, path)


# ---------------------------------------------------------------- commands


def cmd_verify(inst_file: InstanceFile, suite: str, bound: Optional[int] = None, seed: int = 0, max_wedge: int = 3) -> Report:
    inst = inst_file.instance
    D = inst_file.bound(bound)
    if suite == "cartan":
        return verify_cartan_identities(inst, max_wedge=max_wedge, max_form=3, seed=seed)
    if suite == "gerstenhaber":
        return check_gerstenhaber(inst, max_wedge, seed=seed)
    if suite == "linfty":
        return verify_linfty(inst_file.cocycle(), bound=D)
    if suite == "constraint":
        if inst_file.constraint is None:
            return constraint_suite(seed)
        return constraint_ce(inst_file.constraint_lr(), bound=D).report
    if suite == "reduction":
        return _reduction_report(inst_file, D, full=True)
    raise InputError(f"unknown suite {suite!r}")


def _reduction_report(inst_file: InstanceFile, D: int, full: bool) -> Report:
    from . import reduction as red

    cocycle = inst_file.cocycle()
    if inst_file.instance.backend == "lie":
        return red.lie_reduction(inst_file.constraint_lr(), cocycle.omega)
    sym = inst_file.symmetry_data()
    rep = Report("reduction")
    rep.bounds["coefficient_degree"] = D
    rep.extend(red.check_cocycle_condition(sym, cocycle.omega, inst_file.momentum))
    if full:
        A, r = red.build_Aprime(sym, D)
        rep.extend(r)
        Y, r = red.build_Y(sym, D)
        rep.extend(r)
        rep.details["Y_bracket_strong"] = r.details.get("bracket_strong")
        _, _, r = red.build_Bprime(sym, D, max_degree=cocycle.k + 1)
        rep.extend(r)
        _, Fbar = red.compute_Fbar(sym, D)
        _, Fs = sym.F_slice(D)
        rep.add("closure window inside Fbar window", Fs <= Fbar, Fs.dim)
    ro = red.reduced_observables(sym, cocycle, D)
    rep.extend(ro.report)
    rep.details["l2_table"] = ro.tables.get("l2", [])
    rep.details["representatives"] = {str(i): [x.format() if hasattr(x, "alpha") else x.format("d") for x in ro.representatives(i)] for i in sorted(ro.quotients)}
    return rep


def cmd_ham0(inst_file: InstanceFile, bound: Optional[int] = None) -> Report:
    cocycle = inst_file.cocycle()
    inst = inst_file.instance
    D = inst_file.bound(bound) if inst.nvars else None
    pairs = ham_pairs(cocycle, D)
    rep = Report("ham0")
    if D is not None:
        rep.bounds["coefficient_degree"] = D
    bad = [p.format() for p in pairs if not cocycle.is_pair(p.alpha, p.X)]
    rep.add("basis elements are Hamiltonian pairs", not bad, len(pairs), bad[0] if bad else None)
    rep.dimensions["Ham0"] = len(pairs)
    rep.details["basis"] = [p.format() for p in pairs]
    return rep


def cmd_reduce(inst_file: InstanceFile, bound: Optional[int] = None) -> Report:
    return _reduction_report(inst_file, inst_file.bound(bound), full=False)


def cmd_fixture(name: str, bound: Optional[int] = None, seed: int = 0) -> Report:
    from . import reduction as red

    D = 3 if bound is None else bound
    if name == "r3-volume":
        return r3_fixture_check(count=20, coeff_degree=2, seed=seed)
    if name == "so3-volume":
        rep = verify_linfty(fixtures.so3_volume())
        rep.suite = "so3-volume"
        return rep
    if name == "r5-residue":
        return red.residue_defect_check(D)
    if name == "symplectic-imq":
        return red.symplectic_denominator_check(D)
    if name == "constraint-manifold":
        return red.constraint_manifold_check(D)
    raise InputError(f"unknown fixture {name!r}")


def exit_code(rep: Report, expect_infeasible: bool = False) -> int:
    if expect_infeasible and rep.infeasible is None:
        return EXIT_MISMATCH
    return EXIT_PASS if rep.passed else EXIT_FAIL


def render(rep: Report, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(jsonable(rep.to_json()), sort_keys=True, indent=2)
    return rep.to_text()


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--degree-bound", type=int, default=None, help="coefficient degree window (default 3)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--max-wedge", type=int, default=3)

    p = argparse.ArgumentParser(prog="cartanred", description="Exact checks for Lie-Rinehart calculus and reduction of observables.")
    sub = p.add_subparsers(dest="command", required=True)
    v = sub.add_parser("verify", parents=[common], help="run a verification suite on an instance")
    v.add_argument("--input", required=True)
    v.add_argument("--suite", choices=SUITES, required=True)
    h = sub.add_parser("ham0", parents=[common], help="list a basis of Hamiltonian pairs")
    h.add_argument("--input", required=True)
    r = sub.add_parser("reduce", parents=[common], help="reduced observables of an instance")
    r.add_argument("--input", required=True)
    f = sub.add_parser("fixture", parents=[common], help="run a shipped example")
    f.add_argument("name", choices=FIXTURES)
    return p


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_PASS
    start = time.perf_counter()
    try:
        if args.command == "fixture":
            rep = cmd_fixture(args.name, args.degree_bound, args.seed)
            expect = args.name in EXPECT_INFEASIBLE
        else:
            inst_file = parse_instance(args.input)
            expect = False
            if args.command == "verify":
                rep = cmd_verify(inst_file, args.suite, args.degree_bound, args.seed, args.max_wedge)
            elif args.command == "ham0":
                rep = cmd_ham0(inst_file, args.degree_bound)
            else:
                rep = cmd_reduce(inst_file, args.degree_bound)
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OmegaNotClosed as exc:
        rep = exc.report(getattr(args, "suite", None) or args.command)
        expect = False
    rep.timing = time.perf_counter() - start
    print(render(rep, args.format))
    return exit_code(rep, expect)
