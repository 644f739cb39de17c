"""Pass/fail reporting shared by validation, composition and the CLI."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    residual: Optional[float] = None
    witness: Optional[str] = None

    def render(self) -> str:
        status = "ok" if self.passed else "FAIL"
        parts = [f"[{status}] {self.name}"]
        if self.residual is not None:
            parts.append(f"residual={self.residual:.3g}")
        if self.witness and not self.passed:
            parts.append(f"witness={self.witness}")
        return "  ".join(parts)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "residual": self.residual,
            "witness": self.witness,
        }


@dataclass
class Report:
    title: str
    checks: list[CheckResult] = field(default_factory=list)
    notes: dict = field(default_factory=dict)

    def add(self, name: str, passed: bool, residual=None, witness=None) -> CheckResult:
        res = CheckResult(name, bool(passed), None if residual is None else float(residual), witness)
        self.checks.append(res)
        return res

    def extend(self, other: "Report") -> None:
        self.checks.extend(other.checks)
        self.notes.update(other.notes)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def max_residual(self) -> float:
        return max((c.residual for c in self.checks if c.residual is not None), default=0.0)

    def failures(self) -> list[CheckResult]:
        return [c for c in self.checks if not c.passed]

    def render(self) -> str:
        lines = [f"== {self.title} =="]
        lines += [c.render() for c in self.checks]
        for key, val in self.notes.items():
            lines.append(f"note: {key} = {val}")
        lines.append(f"=> {'PASS' if self.passed else 'FAIL'}")
        return "\n".join(lines)

    def to_json(self) -> dict:
        return {
            "title": self.title,
            "passed": self.passed,
            "checks": [c.to_json() for c in self.checks],
            "notes": {k: str(v) for k, v in self.notes.items()},
        }
