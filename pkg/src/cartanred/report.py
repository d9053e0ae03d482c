"""Verification reports and JSON-safe conversion of exact values."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional

from .poly import Poly


def jsonable(x: Any) -> Any:
    """Convert exact values to JSON-friendly data. Rationals become ``"p/q"`` strings."""
    if hasattr(x, "to_json"):
        return x.to_json()
    if isinstance(x, bool) or x is None or isinstance(x, str):
        return x
    if isinstance(x, int):
        return x
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, Poly):
        return [{"coeff": str(c), "exponents": list(m)} for m, c in sorted(x.terms.items())]
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    return repr(x)


@dataclass
class Check:
    name: str
    passed: bool
    count: int = 0
    witness: Any = None
    note: str = ""

    def to_json(self):
        out = {"name": self.name, "passed": self.passed, "count": self.count}
        if self.witness is not None:
            out["witness"] = jsonable(self.witness)
        if self.note:
            out["note"] = self.note
        return out


@dataclass
class Report:
    suite: str
    checks: List[Check] = field(default_factory=list)
    dimensions: Dict[str, Any] = field(default_factory=dict)
    bounds: Dict[str, Any] = field(default_factory=dict)
    details: Dict[str, Any] = field(default_factory=dict)
    infeasible: Optional[Dict[str, Any]] = None
    timing: Optional[float] = None

    def add(self, name: str, passed: bool, count: int = 0, witness=None, note: str = "") -> Check:
        c = Check(name, bool(passed), count, witness, note)
        self.checks.append(c)
        return c

    def extend(self, other: "Report", prefix: str = "") -> None:
        for c in other.checks:
            self.checks.append(Check(prefix + c.name, c.passed, c.count, c.witness, c.note))
        self.dimensions.update({prefix + k: v for k, v in other.dimensions.items()})
        self.bounds.update(other.bounds)
        if other.infeasible is not None:
            self.infeasible = other.infeasible

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def status(self) -> str:
        if not self.passed:
            return "fail"
        if self.infeasible is not None:
            return "infeasible"
        return "pass"

    def failures(self) -> List[Check]:
        return [c for c in self.checks if not c.passed]

    def check(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_json(self):
        out = {
            "suite": self.suite,
            "status": self.status,
            "checks": [c.to_json() for c in self.checks],
            "dimensions": jsonable(self.dimensions),
            "bounds": jsonable(self.bounds),
        }
        if self.details:
            out["details"] = jsonable(self.details)
        if self.infeasible is not None:
            out["infeasibility_certificate"] = jsonable(self.infeasible)
        return out

    def to_text(self) -> str:
        lines = [f"suite {self.suite}: {self.status.upper()}"]
        for k, v in self.bounds.items():
            lines.append(f"  bound {k} = {v}")
        for c in self.checks:
            mark = "ok  " if c.passed else "FAIL"
            extra = f" ({c.count} checked)" if c.count else ""
            lines.append(f"  [{mark}] {c.name}{extra}")
            if c.note:
                lines.append(f"         {c.note}")
            if not c.passed and c.witness is not None:
                lines.append(f"         witness: {jsonable(c.witness)}")
        for k, v in self.dimensions.items():
            lines.append(f"  dim {k} = {jsonable(v)}")
        if self.infeasible is not None:
            lines.append(f"  infeasibility certificate: {jsonable(self.infeasible)}")
        if self.timing is not None:
            lines.append(f"  time {self.timing:.2f}s")
        return "\n".join(lines)
