"""Pass/fail bookkeeping shared by the verification routines."""

from __future__ import annotations


class CheckResult:
    """Outcome of one named identity check."""

    __slots__ = ("name", "status", "detail")

    def __init__(self, name: str, ok: bool, detail: str = "") -> None:
        self.name = name
        self.status = "pass" if ok else "fail"
        self.detail = detail

    @property
    def ok(self) -> bool:
        return self.status == "pass"

    def to_dict(self) -> dict:
        return {"name": self.name, "status": self.status, "detail": self.detail}

    def __repr__(self) -> str:
        return f"CheckResult({self.name!r}, {self.status!r})"


class Report:
    """Ordered collection of check results."""

    def __init__(self, title: str = "") -> None:
        self.title = title
        self.checks: list[CheckResult] = []

    def add(self, name: str, ok: bool, detail: str = "") -> bool:
        self.checks.append(CheckResult(name, bool(ok), detail))
        return bool(ok)

    def extend(self, other: "Report") -> None:
        self.checks.extend(other.checks)

    @property
    def passed(self) -> bool:
        return all(c.ok for c in self.checks)

    def failures(self) -> list[CheckResult]:
        return [c for c in self.checks if not c.ok]

    def summary(self) -> str:
        npass = sum(1 for c in self.checks if c.ok)
        return f"{npass}/{len(self.checks)} checks passed"

    def to_dict(self) -> dict:
        return {"title": self.title, "checks": [c.to_dict() for c in self.checks]}
