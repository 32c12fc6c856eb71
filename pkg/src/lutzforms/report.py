"""Verification checks and the versioned JSON report document."""
from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Sequence

import numpy as np

from . import __version__
from .forms import DifferentialForm, VectorField
from .scalar import DEFAULT_SEED, Exact, ScalarExpr, ZeroStatus, is_zero, to_text

__all__ = ["SCHEMA", "SCHEMA_VERSION", "Status", "Check", "Observation", "ReportDocument",
           "symbolic_check", "truth_check", "jsonable", "expr_text"]

SCHEMA = "lutzforms.report"
SCHEMA_VERSION = 1


class Status(str, enum.Enum):
    SYMBOLIC_PASS = "symbolic-pass"
    GRID_PASS = "grid-pass"
    FAIL = "fail"


@dataclass
class Check:
    name: str
    status: Status
    payload: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.status is not Status.FAIL

    def to_json(self) -> dict:
        return {"name": self.name, "status": self.status.value, "payload": jsonable(self.payload)}


@dataclass
class Observation:
    """Something reported but not asserted."""
    name: str
    payload: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"name": self.name, "payload": jsonable(self.payload)}


def _round(x: float) -> float | str:
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return float(f"{x:.12g}")


def jsonable(obj: Any) -> Any:
    """Deterministic JSON-ready copy: floats rounded, exact values as strings."""
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _round(float(obj))
    if isinstance(obj, (Fraction, Exact)):
        return str(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, ScalarExpr):
        return to_text(obj)
    if isinstance(obj, (DifferentialForm, VectorField)):
        return obj.to_text()
    if isinstance(obj, np.ndarray):
        return [jsonable(x) for x in obj.tolist()]
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        items = [jsonable(x) for x in obj]
        return sorted(items, key=repr) if isinstance(obj, (set, frozenset)) else items
    if hasattr(obj, "to_json"):
        return jsonable(obj.to_json())
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def expr_text(x, names: Sequence[str] | None = None) -> str:
    if isinstance(x, ScalarExpr):
        return to_text(x, names)
    return x.to_text()


def _difference_zero(diff, seed: int, profiles=None) -> tuple[ZeroStatus, dict]:
    if isinstance(diff, ScalarExpr):
        parts = {(): diff}
        chart = None
    elif isinstance(diff, VectorField):
        parts = {(i,): c for i, c in diff.components.items()}
        chart = diff.chart
    else:
        parts = diff.components
        chart = diff.chart
    worst = ZeroStatus.SYMBOLIC_ZERO
    for key, comp in parts.items():
        zt = is_zero(comp, chart, seed=seed, profiles=profiles)
        if zt.status is ZeroStatus.NONZERO:
            return zt.status, {"component": list(key), "witness": list(zt.witness),
                               "value": zt.value}
        if zt.status is ZeroStatus.PROBABLY_ZERO:
            worst = zt.status
    return worst, {}


def symbolic_check(name: str, computed, expected, *, seed: int = DEFAULT_SEED,
                   names: Sequence[str] | None = None, profiles=None, **extra) -> Check:
    """Compare two expressions, forms or vector fields through their canonical difference."""
    diff = computed - expected
    status, witness = _difference_zero(diff, seed, profiles)
    payload = {"computed": expr_text(computed, names), "expected": expr_text(expected, names),
               "zero_test": status.value, **extra}
    if witness:
        payload["difference"] = expr_text(diff, names)
        payload.update(witness)
    if status is ZeroStatus.SYMBOLIC_ZERO:
        return Check(name, Status.SYMBOLIC_PASS, payload)
    if status is ZeroStatus.PROBABLY_ZERO:
        return Check(name, Status.GRID_PASS, payload)
    return Check(name, Status.FAIL, payload)


def truth_check(name: str, ok: bool, payload: dict | None = None, *, grid: bool = True) -> Check:
    """A check decided outside the symbolic engine (grid scans, bookkeeping)."""
    if not ok:
        return Check(name, Status.FAIL, payload or {})
    return Check(name, Status.GRID_PASS if grid else Status.SYMBOLIC_PASS, payload or {})


@dataclass
class ReportDocument:
    construction: str
    parameters: dict
    seed: int
    checks: list[Check] = field(default_factory=list)
    observations: list[Observation] = field(default_factory=list)

    @property
    def failed(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    @property
    def ok(self) -> bool:
        return not self.failed

    def to_json(self) -> dict:
        return {
            "schema": SCHEMA,
            "schema_version": SCHEMA_VERSION,
            "tool_version": __version__,
            "seed": self.seed,
            "construction": self.construction,
            "parameters": jsonable(self.parameters),
            "checks": [c.to_json() for c in self.checks],
            "observations": [o.to_json() for o in self.observations],
            "summary": {"checks": len(self.checks), "failed": len(self.failed),
                        "status": "pass" if self.ok else "fail"},
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=2, ensure_ascii=True) + "\n"
