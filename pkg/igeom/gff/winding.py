"""Winding bookkeeping: boundary heights change by chi per radian of turning."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from igeom.core import DerivedConstants


@dataclass(frozen=True)
class WindingRecord:
    """Cumulative signed turning of a polyline, counterclockwise positive."""

    cumulative_turning: float = 0.0

    @classmethod
    def from_polyline(cls, points: np.ndarray) -> "WindingRecord":
        points = np.asarray(points, dtype=complex)
        if points.size < 3:
            return cls(0.0)
        segments = np.diff(points)
        segments = segments[segments != 0]
        if segments.size < 2:
            return cls(0.0)
        turns = np.angle(segments[1:] / segments[:-1])
        return cls(float(np.sum(turns)))

    @classmethod
    def quarter_turns(cls, count: int) -> "WindingRecord":
        return cls(count * np.pi / 2)

    def __add__(self, other: "WindingRecord") -> "WindingRecord":
        return WindingRecord(self.cumulative_turning + other.cumulative_turning)

    def concat(self, other: "WindingRecord", junction_turn: float = 0.0) -> "WindingRecord":
        """Record of this path followed by ``other``, turning ``junction_turn`` at the joint."""
        return WindingRecord(self.cumulative_turning + junction_turn + other.cumulative_turning)


def winding_boundary_value(base: float, turning: WindingRecord, chi: float) -> float:
    return base + chi * turning.cumulative_turning


def flow_line_heights(turning: WindingRecord, consts: DerivedConstants) -> Tuple[float, float]:
    """Boundary heights ``(left, right)`` along a flow line that has turned by ``turning``."""

    left = winding_boundary_value(-consts.lam_prime, turning, consts.chi)
    right = winding_boundary_value(consts.lam_prime, turning, consts.chi)
    return left, right
