# utils/report.py
import hashlib
import json
from dataclasses import asdict, dataclass
from typing import Any, Dict, List, Optional


def config_digest(config: Dict[str, Any]) -> str:
    """SHA-256 of the canonical JSON form of a resolved config."""
    canonical = json.dumps(config, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(canonical.encode()).hexdigest()


@dataclass
class CheckRecord:
    name: str
    metric: float
    tolerance: float
    passed: bool
    seconds: float
    detail: str = ""

    def as_row(self) -> Dict[str, Any]:
        row = asdict(self)
        row["pass"] = row.pop("passed")
        row["metric"] = _json_number(self.metric)
        if not row["detail"]:
            row.pop("detail")
        return row


def _json_number(value: float):
    return value if value == value and abs(value) != float("inf") else str(value)


class VerificationReport:
    """Collects one record per executed check."""

    def __init__(self, version: str, config: Dict[str, Any], seed: Optional[int] = None):
        self.version = version
        self.config_digest = config_digest(config)
        self.seed = seed
        self.records: List[CheckRecord] = []

    def record(self, name, metric, tolerance, passed, seconds, detail="") -> CheckRecord:
        entry = CheckRecord(name, float(metric), float(tolerance), bool(passed), float(seconds), detail)
        self.records.append(entry)
        return entry

    @property
    def all_pass(self) -> bool:
        return all(r.passed for r in self.records)

    def failures(self) -> List[CheckRecord]:
        return [r for r in self.records if not r.passed]

    def summary(self) -> Dict[str, int]:
        return {
            "total": len(self.records),
            "passed": sum(r.passed for r in self.records),
            "failed": len(self.failures()),
        }

    def to_document(self) -> Dict[str, Any]:
        return {
            "version": self.version,
            "config_digest": self.config_digest,
            "seed": self.seed,
            "all_pass": self.all_pass,
            "checks": [r.as_row() for r in self.records],
        }
