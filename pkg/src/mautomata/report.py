"""Plain-text verdict reports with a machine-readable ``RESULT`` footer."""
from __future__ import annotations

from dataclasses import dataclass, field

PASS, FAIL, INCONCLUSIVE = "pass", "fail", "inconclusive"
EXIT_CODES = {PASS: 0, FAIL: 1, INCONCLUSIVE: 2}


@dataclass
class Verdict:
    name: str
    status: str
    detail: str = ""

    def line(self) -> str:
        return f"VERDICT {self.name} {self.status}" + (f" {self.detail}" if self.detail else "")


@dataclass
class Report:
    title: str
    verdicts: list[Verdict] = field(default_factory=list)
    info: list[str] = field(default_factory=list)

    def add(self, name: str, status: str | bool, detail: str = "") -> Verdict:
        if isinstance(status, bool):
            status = PASS if status else FAIL
        v = Verdict(name, status, detail)
        self.verdicts.append(v)
        return v

    def extend(self, other: "Report", prefix: str = "") -> None:
        self.info.extend(other.info)
        for v in other.verdicts:
            self.verdicts.append(Verdict(prefix + v.name, v.status, v.detail))

    @property
    def result(self) -> str:
        statuses = {v.status for v in self.verdicts}
        if FAIL in statuses:
            return FAIL
        if statuses - {PASS}:
            return INCONCLUSIVE
        return PASS

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.result]

    def lines(self) -> list[str]:
        out = [f"# {self.title}"]
        out += [f"INFO {line}" for line in self.info]
        out += [v.line() for v in self.verdicts]
        out.append(f"RESULT {self.result}")
        return out

    def render(self) -> str:
        return "\n".join(self.lines()) + "\n"


def result_from_text(text: str) -> str | None:
    """Read the ``RESULT`` footer back out of rendered report text."""
    for line in reversed(text.strip().splitlines()):
        if line.startswith("RESULT "):
            return line.split()[1]
    return None
