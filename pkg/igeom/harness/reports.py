"""Report files and the pass/fail summary of a run."""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional

from igeom.core import Report


def binomial_report(
    test: str,
    params: Dict[str, Any],
    successes: int,
    runs: int,
    *,
    passed: bool,
    tolerance: str,
    reference: str,
    **details: Any,
) -> Report:
    """Report of a proportion with its binomial standard error."""

    if runs == 0:
        return Report.empty(test, params, reference)
    p = successes / runs
    return Report(
        test=test,
        params=params,
        runs=runs,
        estimate=p,
        stderr=math.sqrt(max(p * (1.0 - p), 0.0) / runs),
        passed=passed,
        tolerance=tolerance,
        reference=reference,
        details={"successes": successes, **details},
    )


def exact_report(test: str, params: Dict[str, Any], error: float, bound: float, reference: str, **details: Any) -> Report:
    """Deterministic check of ``error <= bound``."""

    return Report(
        test=test,
        params=params,
        runs=1,
        estimate=error,
        stderr=0.0,
        passed=bool(error <= bound),
        tolerance=f"<= {bound:g}",
        reference=reference,
        details=details,
    )


def write_report(path: str | Path, reports: Report | Iterable[Report]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    items = [reports] if isinstance(reports, Report) else list(reports)
    payload: Any = items[0].to_dict() if len(items) == 1 else [r.to_dict() for r in items]
    path.write_text(json.dumps(payload, indent=2, sort_keys=True), encoding="utf-8")
    return path


def summarize(reports: List[Report]) -> Dict[str, Any]:
    return {
        "tests": [
            {"test": r.test, "pass": r.passed, "inconclusive": r.inconclusive, "noData": r.no_data}
            for r in reports
        ],
        "pass": overall_pass(reports),
    }


def overall_pass(reports: List[Report]) -> Optional[bool]:
    """``None`` when nothing was checked (figure runs), else all reports passed."""

    if not reports:
        return None
    return all(r.passed for r in reports)
