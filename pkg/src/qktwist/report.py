"""Structured verification reports.

Every check carries a name, a self-contained statement of the identity it
verifies, the verification mode, and a residual summary.  Reports render to
JSON and to text deterministically (same bytes for the same inputs), and the
text mirrors the JSON one-to-one.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Dict, List, Optional

from .scalars import fe_is_zero


def _clip(text: str, limit: int = 160) -> str:
    return text if len(text) <= limit else text[: limit - 3] + "..."


class CheckResult:
    __slots__ = ("name", "statement", "mode", "passed", "residual", "witness", "informational")

    def __init__(self, name, statement, mode, passed, residual="", witness=None, informational=False):
        self.name = name
        self.statement = statement
        self.mode = mode
        self.passed = passed
        self.residual = residual
        self.witness = witness
        self.informational = informational

    # -- constructors ---------------------------------------------------------

    @classmethod
    def boolean(cls, name, statement, ok, detail="", mode="symbolic"):
        return cls(name, statement, mode, bool(ok), residual=detail if not ok else "0")

    @classmethod
    def info(cls, name, statement, note=""):
        return cls(name, statement, "informational", True, residual=note, informational=True)

    @classmethod
    def residual_form(cls, name, statement, form, mode="symbolic", points=()):
        """Pass iff a residual form vanishes (symbolically or at every point)."""
        if mode == "symbolic":
            if form.is_zero:
                return cls(name, statement, mode, True, residual="0")
            return cls(
                name,
                statement,
                mode,
                False,
                residual=_clip(f"{len(form.comps)} nonzero components; e.g. {form}"),
            )
        for point in points:
            values = form.eval_at(point)
            for idx, value in values.items():
                if not fe_is_zero(value):
                    return cls(
                        name,
                        statement,
                        mode,
                        False,
                        residual=_clip(f"component {idx} = {value}"),
                        witness=point.as_named(),
                    )
        return cls(name, statement, mode, True, residual=f"0 at {len(tuple(points))} points")

    @classmethod
    def residual_coefficient(cls, name, statement, coeff, mode="symbolic", points=()):
        if mode == "symbolic":
            if coeff.is_zero:
                return cls(name, statement, mode, True, residual="0")
            return cls(name, statement, mode, False, residual=_clip(str(coeff)))
        for point in points:
            value = coeff.eval_at(point.values)
            if not fe_is_zero(value):
                return cls(name, statement, mode, False, residual=_clip(str(value)), witness=point.as_named())
        return cls(name, statement, mode, True, residual=f"0 at {len(tuple(points))} points")

    @classmethod
    def residual_matrix(cls, name, statement, rows, mode="symbolic"):
        """Pass iff every entry of a matrix of coefficients is zero."""
        bad = []
        for i, row in enumerate(rows):
            for j, entry in enumerate(row):
                if not entry.is_zero:
                    bad.append((i, j, entry))
        if not bad:
            return cls(name, statement, mode, True, residual="0")
        i, j, entry = bad[0]
        return cls(
            name, statement, mode, False,
            residual=_clip(f"{len(bad)} nonzero entries; [{i}][{j}] = {entry}"),
        )

    @classmethod
    def nonzero_witness(cls, name, statement, form, points, mode="sampled"):
        """Pass iff the residual is provably nonzero at some sampled point."""
        for point in points:
            values = form.eval_at(point)
            for idx, value in values.items():
                if not fe_is_zero(value):
                    return cls(
                        name, statement, mode, True,
                        residual=_clip(f"nonzero witness: component {idx} = {value}"),
                        witness=point.as_named(),
                    )
        return cls(name, statement, mode, False, residual="no nonzero value found at sampled points")

    def to_dict(self) -> Dict:
        out = {
            "name": self.name,
            "statement": self.statement,
            "mode": self.mode,
            "residual_zero": bool(self.passed),
            "residual": self.residual,
        }
        if self.witness is not None:
            out["witness_point"] = self.witness
        if self.informational:
            out["informational"] = True
        return out


class VerificationReport:
    """Ordered list of check results with an overall verdict."""

    def __init__(self, name: str):
        self.name = name
        self.checks: List[CheckResult] = []

    def add(self, check: CheckResult) -> CheckResult:
        self.checks.append(check)
        return check

    def extend(self, other: "VerificationReport", prefix: Optional[str] = None) -> None:
        for check in other.checks:
            if prefix:
                check = CheckResult(
                    f"{prefix}.{check.name}", check.statement, check.mode,
                    check.passed, check.residual, check.witness, check.informational,
                )
            self.checks.append(check)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks if not c.informational)

    def failures(self) -> List[CheckResult]:
        return [c for c in self.checks if not c.informational and not c.passed]

    def to_dict(self) -> Dict:
        return {
            "report": self.name,
            "overall_pass": self.passed,
            "checks": [c.to_dict() for c in self.checks],
        }

    def to_json(self, extra: Optional[Dict] = None) -> str:
        payload = self.to_dict()
        if extra:
            payload.update(extra)
        return json.dumps(payload, sort_keys=True, indent=2) + "\n"

    def to_text(self, extra: Optional[Dict] = None) -> str:
        lines = [f"report: {self.name}", f"overall: {'PASS' if self.passed else 'FAIL'}"]
        if extra:
            for key in sorted(extra):
                lines.append(f"{key}: {json.dumps(extra[key], sort_keys=True)}")
        for c in self.checks:
            status = "info" if c.informational else ("pass" if c.passed else "FAIL")
            line = f"[{status:4}] {c.name} ({c.mode}): {c.statement}"
            if c.residual:
                line += f" | residual: {c.residual}"
            if c.witness is not None:
                line += f" | witness: {json.dumps(c.witness, sort_keys=True)}"
            lines.append(line)
        return "\n".join(lines) + "\n"
