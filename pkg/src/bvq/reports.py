"""Report objects returned by the validators."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class Violation:
    axiom: str
    witness: tuple
    detail: str = ""

    def to_dict(self):
        return {"axiom": self.axiom, "witness": [str(w) for w in self.witness], "detail": self.detail}


@dataclass
class ValidationReport:
    subject: str
    violations: list = field(default_factory=list)
    checked: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.violations

    def __bool__(self):
        return self.ok

    def add(self, axiom, witness, detail=""):
        self.violations.append(Violation(axiom, tuple(witness), detail))

    def axioms_failed(self):
        return sorted({v.axiom for v in self.violations})

    def first(self, axiom=None):
        for v in self.violations:
            if axiom is None or v.axiom == axiom:
                return v
        return None

    def to_dict(self):
        return {
            "subject": self.subject,
            "ok": self.ok,
            "checked": list(self.checked),
            "violations": [v.to_dict() for v in self.violations],
        }

    def __str__(self):
        if self.ok:
            return f"{self.subject}: ok ({', '.join(self.checked)})"
        lines = [f"{self.subject}: {len(self.violations)} violation(s)"]
        for v in self.violations[:10]:
            lines.append(f"  {v.axiom} at {v.witness}: {v.detail}")
        return "\n".join(lines)
