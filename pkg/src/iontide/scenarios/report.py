"""Pass/fail records of scenario runs and their text and JSON renderings."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

from .. import __version__

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_CONFIG = 2


@dataclass
class Check:
    """One comparison.  ``passed`` is None for a check that was skipped."""

    name: str
    expected: str
    got: str
    tolerance: str
    passed: bool | None
    criterion: int | None = None  # acceptance criterion number, if the check is one
    note: str = ""

    def __post_init__(self):
        if self.passed is not None:
            self.passed = bool(self.passed)

    @property
    def status(self) -> str:
        return "SKIP" if self.passed is None else ("PASS" if self.passed else "FAIL")


def within(name: str, got: float, expected: float, tol: float, criterion: int | None = None, fmt: str = ".6g", note: str = "") -> Check:
    """Absolute-tolerance check ``|got - expected| <= tol``."""
    ok = math.isfinite(got) and abs(got - expected) <= tol
    return Check(name, format(expected, fmt), format(got, fmt), f"+-{tol:{fmt}}", ok, criterion, note)


@dataclass
class RunReport:
    scenario: str
    parameters: dict[str, str] = field(default_factory=dict)
    checks: list[Check] = field(default_factory=list)
    wall_time: float = 0.0
    version: str = __version__
    failures: list[str] = field(default_factory=list)  # per-point errors that did not stop the run

    def add(self, check: Check) -> Check:
        if any(c.name == check.name for c in self.checks):
            raise ValueError(f"duplicate check {check.name!r}")
        self.checks.append(check)
        return check

    @property
    def passed(self) -> bool:
        return all(c.passed is not False for c in self.checks)

    @property
    def exit_code(self) -> int:
        return EXIT_PASS if self.passed else EXIT_FAIL

    def to_json(self) -> str:
        data = asdict(self)
        for c, d in zip(self.checks, data["checks"]):
            d["status"] = c.status
        return json.dumps(data, indent=2)

    def table(self) -> str:
        rows = [("status", "criterion", "check", "expected", "got", "tolerance")]
        for c in self.checks:
            rows.append((c.status, "" if c.criterion is None else str(c.criterion), c.name, c.expected, c.got, c.tolerance))
        widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
        lines = [f"scenario {self.scenario}  ({self.wall_time:.1f} s, iontide {self.version})"]
        for r in rows:
            lines.append("  ".join(v.ljust(w) for v, w in zip(r, widths)).rstrip())
        for f in self.failures:
            lines.append(f"  point failure: {f}")
        return "\n".join(lines)
