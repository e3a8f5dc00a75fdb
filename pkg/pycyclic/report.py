import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional

from loguru import logger


class CheckStatus(Enum):
    PASS = "pass"
    FAIL = "fail"
    SKIP = "skip"


@dataclass
class Check:
    name: str
    status: CheckStatus
    detail: str = ""
    witness: Any = None

    def to_dict(self) -> Dict:
        entry = {"name": self.name, "status": self.status.value}
        if self.detail:
            entry["detail"] = self.detail
        if self.witness is not None:
            entry["witness"] = _plain(self.witness)
        return entry


def _plain(value):
    # witnesses hold tuples, Fractions and labels; JSON wants lists and strings
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (int, str, bool)) or value is None:
        return value
    return str(value)


@dataclass
class Report:
    """An ordered certificate of named checks.

    A report never raises on failure: callers inspect `passed` or the
    failures, and the CLI turns failures into a nonzero exit status.
    """

    title: str
    checks: List[Check] = field(default_factory=list)
    meta: Dict[str, Any] = field(default_factory=dict)

    def add(self, name: str, ok: bool, detail: str = "", witness=None) -> bool:
        status = CheckStatus.PASS if ok else CheckStatus.FAIL
        if not ok:
            logger.warning(f"{self.title}: check {name} failed {detail}")
        self.checks.append(Check(name, status, detail, None if ok else witness))
        return ok

    def skip(self, name: str, detail: str = "") -> None:
        logger.debug(f"{self.title}: check {name} skipped {detail}")
        self.checks.append(Check(name, CheckStatus.SKIP, detail))

    def merge(self, other: "Report", prefix: Optional[str] = None) -> "Report":
        prefix = other.title if prefix is None else prefix
        for check in other.checks:
            name = f"{prefix}/{check.name}" if prefix else check.name
            self.checks.append(Check(name, check.status, check.detail, check.witness))
        return self

    @property
    def passed(self) -> bool:
        return not self.failures

    @property
    def failures(self) -> List[Check]:
        return [c for c in self.checks if c.status == CheckStatus.FAIL]

    @property
    def skipped(self) -> List[Check]:
        return [c for c in self.checks if c.status == CheckStatus.SKIP]

    def count(self, status: CheckStatus) -> int:
        return sum(1 for c in self.checks if c.status == status)

    def to_dict(self) -> Dict:
        return {
            "title": self.title,
            "passed": self.passed,
            "counts": {s.value: self.count(s) for s in CheckStatus},
            "meta": _plain(self.meta),
            "checks": [c.to_dict() for c in self.checks],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def to_text(self) -> str:
        lines = [f"# {self.title}"]
        for key in sorted(self.meta):
            lines.append(f"# {key}: {self.meta[key]}")
        for check in self.checks:
            line = f"{check.status.value.upper():4} {check.name}"
            if check.detail:
                line += f"  {check.detail}"
            if check.witness is not None:
                line += f"  witness={_plain(check.witness)}"
            lines.append(line)
        lines.append(
            f"# {self.count(CheckStatus.PASS)} passed, "
            f"{self.count(CheckStatus.FAIL)} failed, "
            f"{self.count(CheckStatus.SKIP)} skipped"
        )
        return "\n".join(lines) + "\n"
