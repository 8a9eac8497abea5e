"""Named residuals with tolerance verdicts."""
from __future__ import annotations

import math
from dataclasses import dataclass, field


@dataclass(frozen=True)
class Check:
    """One residual and its verdict.

    ``relation`` is "<=" (value must not exceed tolerance) or ">" (value must
    exceed tolerance, used for margins). Informational checks document a
    quantity without gating the report.
    """

    name: str
    value: float
    tolerance: float
    relation: str = "<="
    informational: bool = False

    @property
    def passed(self):
        if math.isnan(self.value):
            return False
        if self.relation == "<=":
            return self.value <= self.tolerance
        return self.value > self.tolerance

    def as_dict(self):
        return {
            "name": self.name,
            "value": self.value,
            "tolerance": self.tolerance,
            "relation": self.relation,
            "informational": self.informational,
            "pass": self.passed,
        }


@dataclass
class DiagnosticReport:
    name: str
    checks: list = field(default_factory=list)
    data: dict = field(default_factory=dict)

    def add(self, name, value, tolerance, relation="<=", informational=False):
        check = Check(name, float(value), float(tolerance), relation, informational)
        self.checks.append(check)
        return check

    @property
    def passed(self):
        return all(c.passed for c in self.checks if not c.informational)

    def failures(self):
        return [c for c in self.checks if not c.informational and not c.passed]

    def values(self, prefix):
        return [c.value for c in self.checks if c.name.startswith(prefix)]

    def max_value(self, prefix):
        vals = self.values(prefix)
        return max(vals) if vals else 0.0

    def check(self, name):
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def __getitem__(self, key):
        return self.data[key]

    def as_dict(self):
        return {
            "name": self.name,
            "pass": self.passed,
            "checks": [c.as_dict() for c in self.checks],
        }
