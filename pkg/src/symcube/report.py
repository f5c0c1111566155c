"""Uniform pass/fail reports for the verification operations."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class ReportEntry:
    label: str
    ok: bool
    detail: str = ""

    def __str__(self):
        status = "ok" if self.ok else "FAIL"
        return f"{status:4} {self.label}" + (f"  [{self.detail}]" if self.detail else "")


@dataclass
class Report:
    """A named list of checks, each either passing or failing."""

    name: str
    entries: list[ReportEntry] = field(default_factory=list)

    def check(self, label: str, ok: bool, detail: str = ""):
        self.entries.append(ReportEntry(label, bool(ok), detail))
        return ok

    @property
    def ok(self) -> bool:
        return all(e.ok for e in self.entries)

    @property
    def failures(self) -> list[ReportEntry]:
        return [e for e in self.entries if not e.ok]

    def summary(self) -> str:
        n, bad = len(self.entries), len(self.failures)
        status = "PASS" if bad == 0 else "FAIL"
        return f"{self.name}: {n - bad}/{n} checks passed [{status}]"

    def __str__(self):
        lines = [self.summary()]
        lines.extend(str(e) for e in self.failures)
        return "\n".join(lines)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "ok": self.ok,
            "checked": len(self.entries),
            "failed": len(self.failures),
            "failures": [
                {"label": e.label, "detail": e.detail} for e in self.failures
            ],
        }
