"""Pass/fail reports written by verifiers and experiments."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Dict, Optional


def _clean(value: Any) -> Any:
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, dict):
        return {k: _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    if hasattr(value, "item") and callable(value.item):
        return _clean(value.item())
    return value


@dataclass
class Report:
    """One statistical or exact check.

    ``inconclusive`` marks runs that could not be judged (too much
    swallowing, unreachable stopping levels); ``no_data`` marks empty runs.
    Neither counts as a pass.
    """

    test: str
    params: Dict[str, Any]
    runs: int
    estimate: Optional[float]
    stderr: Optional[float]
    passed: bool
    tolerance: str = ""
    reference: str = ""
    inconclusive: bool = False
    no_data: bool = False
    details: Dict[str, Any] = field(default_factory=dict)

    @classmethod
    def empty(cls, test: str, params: Dict[str, Any], reference: str = "") -> "Report":
        return cls(
            test=test,
            params=params,
            runs=0,
            estimate=None,
            stderr=None,
            passed=False,
            reference=reference,
            no_data=True,
        )

    def to_dict(self) -> Dict[str, Any]:
        return _clean(
            {
                "test": self.test,
                "params": self.params,
                "runs": self.runs,
                "estimate": self.estimate,
                "stderr": self.stderr,
                "pass": bool(self.passed),
                "tolerance": self.tolerance,
                "reference": self.reference,
                "inconclusive": self.inconclusive,
                "noData": self.no_data,
                "details": self.details,
            }
        )
