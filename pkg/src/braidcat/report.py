"""Check records and deterministic JSON report emission.

Every verification in the library produces :class:`CheckRecord` rows; the CLI
assembles them into a versioned report.  Serialization is byte-deterministic:
insertion-ordered fields, floats printed with 17 significant digits, complex
numbers as [re, im] pairs.
"""

from __future__ import annotations

from dataclasses import dataclass, field


SCHEMA = "braidcat-report/1"


@dataclass
class CheckRecord:
    """One verified identity: its name, the law it instantiates, the measured
    residual against the pinned tolerance, and auxiliary integers (dimensions,
    counts) in ``details``."""

    name: str
    law: str
    residual: float | None
    tolerance: float | None
    passed: bool
    details: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        out = {"name": self.name, "law": self.law}
        if self.residual is not None:
            out["residual"] = float(self.residual)
        if self.tolerance is not None:
            out["tolerance"] = float(self.tolerance)
        out["pass"] = bool(self.passed)
        if self.details:
            out["details"] = dict(sorted(self.details.items()))
        return out


def record(name: str, law: str, residual, tolerance, **details) -> CheckRecord:
    return CheckRecord(name, law, float(residual), float(tolerance),
                       float(residual) <= float(tolerance), details)


def all_passed(records) -> bool:
    return all(r.passed for r in records)


def worst(records) -> float:
    vals = [r.residual for r in records if r.residual is not None]
    return max(vals) if vals else 0.0


def _emit(obj, out: list):
    if obj is None:
        out.append("null")
    elif obj is True:
        out.append("true")
    elif obj is False:
        out.append("false")
    elif isinstance(obj, str):
        out.append('"' + obj.replace("\\", "\\\\").replace('"', '\\"') + '"')
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, float):
        out.append(format(obj, ".17g"))
    elif isinstance(obj, complex):
        _emit([obj.real, obj.imag], out)
    elif isinstance(obj, dict):
        out.append("{")
        for i, (k, v) in enumerate(obj.items()):
            if i:
                out.append(",")
            _emit(str(k), out)
            out.append(":")
            _emit(v, out)
        out.append("}")
    elif isinstance(obj, (list, tuple)):
        out.append("[")
        for i, v in enumerate(obj):
            if i:
                out.append(",")
            _emit(v, out)
        out.append("]")
    else:
        raise TypeError(f"cannot serialize {type(obj)!r}")


def dumps(obj) -> str:
    """Deterministic JSON text (fixed field order, '.17g' floats)."""
    out: list = []
    _emit(obj, out)
    return "".join(out)


def make_report(command: str, records, **header) -> dict:
    body = {"schema": SCHEMA, "command": command}
    for k, v in header.items():
        if v is not None:
            body[k] = v
    body["checks"] = [r.as_dict() for r in records]
    body["pass"] = all_passed(records)
    return body
