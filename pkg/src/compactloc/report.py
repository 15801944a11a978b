"""Pass/fail/inconclusive reports for axiom checks."""
from __future__ import annotations

import json
from dataclasses import dataclass, field

PASS, FAIL, INCONCLUSIVE = "pass", "fail", "inconclusive"


@dataclass
class Check:
    name: str
    status: str
    detail: str = ""
    witness: str = ""

    def to_dict(self) -> dict:
        out = {"name": self.name, "status": self.status}
        if self.detail:
            out["detail"] = self.detail
        if self.witness:
            out["witness"] = self.witness
        return out


@dataclass
class Report:
    title: str
    checks: list[Check] = field(default_factory=list)

    def add(self, name: str, ok: bool | None, detail: str = "", witness=None) -> Check:
        status = INCONCLUSIVE if ok is None else (PASS if ok else FAIL)
        c = Check(name, status, detail, "" if witness is None else str(witness))
        self.checks.append(c)
        return c

    def extend(self, other: "Report", prefix: str | None = None) -> "Report":
        prefix = other.title if prefix is None else prefix
        for c in other.checks:
            name = f"{prefix}: {c.name}" if prefix else c.name
            self.checks.append(Check(name, c.status, c.detail, c.witness))
        return self

    @property
    def status(self) -> str:
        statuses = {c.status for c in self.checks}
        if FAIL in statuses:
            return FAIL
        if INCONCLUSIVE in statuses:
            return INCONCLUSIVE
        return PASS

    @property
    def ok(self) -> bool:
        return self.status == PASS

    def failures(self) -> list[Check]:
        return [c for c in self.checks if c.status == FAIL]

    def get(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {"title": self.title, "status": self.status, "checks": [c.to_dict() for c in self.checks]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def to_text(self) -> str:
        lines = [f"== {self.title}: {self.status.upper()}"]
        for c in self.checks:
            line = f"  [{c.status:^12}] {c.name}"
            if c.detail:
                line += f" -- {c.detail}"
            lines.append(line)
            if c.witness and c.status != PASS:
                lines.append(f"      witness: {c.witness}")
        return "\n".join(lines)

    def __str__(self):
        return self.to_text()
