"""Result container for individual verification checks.

Every quantitative check in the package reduces to comparing a left-hand
side against a right-hand side; the report stores both, the signed slack
rhs - lhs, and a pass flag defined uniformly as slack >= -tolerance.
Probe reports (synthetic inputs constructed to violate an inequality on
purpose) carry probe=True so batch drivers can exclude them from exit
status while still writing them out.
"""

import hashlib
import json
import time
from dataclasses import dataclass, field


def _jsonable(x):
    if hasattr(x, "tolist"):
        return x.tolist()
    if hasattr(x, "item"):
        return x.item()
    return str(x)


def digest_inputs(inputs: dict) -> str:
    """Short stable hash of a check's input dictionary."""
    blob = json.dumps(inputs, sort_keys=True, default=_jsonable)
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()[:16]


@dataclass
class VerificationReport:
    check: str
    lhs: float
    rhs: float
    slack: float
    tolerance: float
    passed: bool
    probe: bool = False
    inputs_digest: str = ""
    grid: dict = field(default_factory=dict)
    wall_time_s: float = 0.0

    def to_dict(self) -> dict:
        return {
            "check": self.check,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "slack": self.slack,
            "tolerance": self.tolerance,
            "passed": self.passed,
            "probe": self.probe,
            "inputs_digest": self.inputs_digest,
            "grid": self.grid,
            "wall_time_s": self.wall_time_s,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, default=_jsonable)


def build_report(
    check: str,
    lhs: float,
    rhs: float,
    *,
    tolerance: float,
    inputs: dict = None,
    grid: dict = None,
    probe: bool = False,
    started: float = None,
) -> VerificationReport:
    """Assemble a report; slack = rhs - lhs, pass iff slack >= -tolerance."""
    if tolerance <= 0:
        raise ValueError("tolerance must be positive")
    lhs = float(lhs)
    rhs = float(rhs)
    slack = rhs - lhs
    wall = 0.0 if started is None else time.perf_counter() - started
    return VerificationReport(
        check=check,
        lhs=lhs,
        rhs=rhs,
        slack=slack,
        tolerance=float(tolerance),
        passed=bool(slack >= -tolerance),
        probe=probe,
        inputs_digest=digest_inputs(inputs or {}),
        grid=dict(grid or {}),
        wall_time_s=wall,
    )
