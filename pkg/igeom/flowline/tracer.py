"""Euler tracing of flow lines of ``e^{i(h/chi + theta)}`` on a discrete field."""

from __future__ import annotations

import bisect
import enum
import logging
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from igeom.core import (
    DegenerateStartError,
    DerivedConstants,
    DomainError,
    OrderingError,
    ParameterDomainError,
    max_simple_angle_gap,
)
from igeom.gff import DiscreteField, TriangulatedGrid, eval_pl
from logging_config import register_log_translations

logger = logging.getLogger(__name__)

register_log_translations(
    {
        "Traced %d flow lines (%d steps, %d merged, %d hit the boundary)": {
            "ru": "Построено %d линий потока (%d шагов, %d слились, %d достигли границы)",
        },
    }
)

_ON_BOUNDARY = 1e-12
LAUNCH_STEPS = 2


class TerminationKind(str, enum.Enum):
    BOUNDARY_HIT = "boundaryHit"
    MAX_LENGTH = "maxLength"
    MERGED_INTO = "mergedInto"
    LEFT_DOMAIN = "leftDomain"


@dataclass(frozen=True)
class Termination:
    kind: TerminationKind
    point: Optional[complex] = None
    path_id: Optional[int] = None

    def describe(self) -> str:
        if self.kind is TerminationKind.MERGED_INTO:
            return f"{self.kind.value}({self.path_id})"
        if self.kind is TerminationKind.BOUNDARY_HIT and self.point is not None:
            return f"{self.kind.value}({self.point.real:.6f},{self.point.imag:.6f})"
        return self.kind.value


@dataclass(frozen=True)
class AngleSchedule:
    """Angles ``angles[k]`` used from arclength ``change_times[k-1]`` on."""

    angles: Tuple[float, ...]
    change_times: Tuple[float, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "angles", tuple(float(a) for a in self.angles))
        object.__setattr__(self, "change_times", tuple(float(t) for t in self.change_times))
        if not self.angles:
            raise ParameterDomainError("an angle schedule needs at least one angle")
        if len(self.angles) != len(self.change_times) + 1:
            raise ParameterDomainError("an angle schedule needs one more angle than change times")
        times = self.change_times
        if any(t <= 0 for t in times) or any(b <= a for a, b in zip(times, times[1:])):
            raise OrderingError("angle change times must be positive and strictly increasing")

    @classmethod
    def fixed(cls, theta: float) -> "AngleSchedule":
        return cls(angles=(theta,))

    @property
    def is_fixed(self) -> bool:
        return len(self.angles) == 1

    def angle_at(self, arclength: float) -> float:
        return self.angles[bisect.bisect_right(self.change_times, arclength)]

    def switch_steps(self, step: float) -> Tuple[int, ...]:
        """Euler step index at which each change takes effect."""
        return tuple(int(round(t / step)) for t in self.change_times)

    def angle_for_step(self, k: int, step: float) -> float:
        return self.angles[bisect.bisect_right(self.switch_steps(step), k)]

    def check_simple(self, consts: DerivedConstants) -> None:
        """Reject schedules whose angles spread by ``2 lambda / chi`` or more."""
        spread = max(self.angles) - min(self.angles)
        if spread >= max_simple_angle_gap(consts):
            raise ParameterDomainError(
                f"angle spread {spread:.6f} is not below 2*lambda/chi = {max_simple_angle_gap(consts):.6f}"
            )


ScheduleLike = Union[float, AngleSchedule]


def _as_schedule(value: ScheduleLike) -> AngleSchedule:
    return value if isinstance(value, AngleSchedule) else AngleSchedule.fixed(float(value))


@dataclass(frozen=True)
class FlowPath:
    points: np.ndarray
    schedule: AngleSchedule
    step: float
    termination: Termination
    path_id: int = 0
    generation: int = 0

    @property
    def length(self) -> float:
        return self.step * (len(self.points) - 1)

    @property
    def start(self) -> complex:
        return complex(self.points[0])

    @property
    def tip(self) -> complex:
        return complex(self.points[-1])

    @property
    def theta(self) -> float:
        return self.schedule.angles[-1]

    def parameters(self) -> np.ndarray:
        return self.step * np.arange(len(self.points))

    def angles(self) -> np.ndarray:
        switches = self.schedule.switch_steps(self.step)
        index = np.searchsorted(np.asarray(switches, dtype=int), np.arange(len(self.points)), side="right")
        return np.asarray(self.schedule.angles)[index]


class MergeRegistry:
    """Cells visited by earlier paths, keyed by cell and rounded angle.

    A path entering a cell that an earlier generation traced with the same
    angle has joined that flow line and stops there.
    """

    def __init__(self, grid: TriangulatedGrid, angle_digits: int = 9) -> None:
        self.grid = grid
        self.angle_digits = angle_digits
        self._owners: Dict[Tuple[int, float], Tuple[int, int]] = {}

    def _key(self, cell: int, theta: float) -> Tuple[int, float]:
        return int(cell), round(float(theta), self.angle_digits)

    def owner(self, cell: int, theta: float, generation: int) -> Optional[int]:
        entry = self._owners.get(self._key(cell, theta))
        if entry is None or entry[1] >= generation:
            return None
        return entry[0]

    def register(self, path: FlowPath) -> None:
        cells = self.grid.cell_of(path.points)
        thetas = path.angles()
        for cell, theta in zip(cells, thetas):
            self._owners.setdefault(self._key(cell, theta), (path.path_id, path.generation))

    def __len__(self) -> int:
        return len(self._owners)


def _check_start(field: DiscreteField, start: complex, heading: float) -> None:
    grid = field.grid
    if not grid.contains(start):
        raise DomainError(f"start {start} lies outside {grid.box}")
    if grid.distance_to_boundary(start) > _ON_BOUNDARY:
        return
    x_lo, y_lo, x_hi, y_hi = grid.box
    inward = 0j
    inward += 1 if abs(start.real - x_lo) <= _ON_BOUNDARY else 0
    inward -= 1 if abs(start.real - x_hi) <= _ON_BOUNDARY else 0
    inward += 1j if abs(start.imag - y_lo) <= _ON_BOUNDARY else 0
    inward -= 1j if abs(start.imag - y_hi) <= _ON_BOUNDARY else 0
    direction = complex(math.cos(heading), math.sin(heading))
    if (direction * inward.conjugate()).real <= 0:
        raise DegenerateStartError(f"flow line from boundary point {start} does not point into the domain")


def trace_many(
    field: DiscreteField,
    starts: Sequence[complex],
    schedules: Sequence[ScheduleLike],
    step: float,
    max_len: float,
    *,
    registry: Optional[MergeRegistry] = None,
    generation: int = 0,
    path_ids: Optional[Sequence[int]] = None,
) -> List[FlowPath]:
    """Trace several flow lines in lock-step; each result equals tracing it alone."""

    if not (field.chi > 0):
        raise ParameterDomainError(f"flow lines need chi > 0, field has chi={field.chi}")
    if step <= 0:
        raise ParameterDomainError(f"step must be positive, got {step}")
    if len(starts) != len(schedules):
        raise ParameterDomainError("one schedule per start is required")
    count = len(starts)
    if count == 0:
        return []

    grid = field.grid
    plans = [_as_schedule(s) for s in schedules]
    ids = list(range(count)) if path_ids is None else [int(i) for i in path_ids]
    n_steps = max(int(math.floor(max_len / step + 1e-9)), 0)
    starts_arr = np.asarray(starts, dtype=complex)

    switch_table = [np.asarray(p.switch_steps(step), dtype=int) for p in plans]
    angle_table = [np.asarray(p.angles) for p in plans]

    def thetas_at(k: int, index: np.ndarray) -> np.ndarray:
        return np.array(
            [angle_table[i][np.searchsorted(switch_table[i], k, side="right")] for i in index]
        )

    # direction of travel decides which triangle owns a point on a shared edge
    travel = thetas_at(0, np.arange(count)) + field.heading_offset
    start_h = eval_pl(field, starts_arr, travel)
    start_heading = np.atleast_1d(start_h) / field.chi + travel
    for i in range(count):
        _check_start(field, complex(starts_arr[i]), float(start_heading[i]))

    trail = np.full((n_steps + 1, count), np.nan + 0j, dtype=complex)
    trail[0] = starts_arr
    lengths = np.ones(count, dtype=int)
    terminations: List[Optional[Termination]] = [None] * count
    active = np.ones(count, dtype=bool)
    position = starts_arr.copy()

    for k in range(n_steps):
        index = np.flatnonzero(active)
        if index.size == 0:
            break
        z = position[index]
        h = np.atleast_1d(eval_pl(field, z, travel[index]))
        heading = h / field.chi + thetas_at(k, index) + field.heading_offset
        travel[index] = heading
        nxt = z + step * np.exp(1j * heading)

        inside = np.atleast_1d(grid.contains(nxt))
        for i in index[~inside]:
            terminations[i] = Termination(TerminationKind.LEFT_DOMAIN)
            active[i] = False
        index, nxt = index[inside], nxt[inside]

        trail[k + 1, index] = nxt
        position[index] = nxt
        lengths[index] = k + 2

        if (k + 1) > LAUNCH_STEPS:
            near = np.atleast_1d(grid.distance_to_boundary(nxt)) < step
            for i, p in zip(index[near], nxt[near]):
                terminations[i] = Termination(TerminationKind.BOUNDARY_HIT, point=complex(p))
                active[i] = False
            index, nxt = index[~near], nxt[~near]

        if registry is not None and (k + 1) > LAUNCH_STEPS and index.size:
            cells = grid.cell_of(nxt)
            thetas = thetas_at(k + 1, index)
            for i, cell, theta in zip(index, cells, thetas):
                owner = registry.owner(int(cell), float(theta), generation)
                if owner is not None:
                    terminations[i] = Termination(TerminationKind.MERGED_INTO, path_id=owner)
                    active[i] = False

    paths = []
    for i in range(count):
        termination = terminations[i] or Termination(TerminationKind.MAX_LENGTH)
        paths.append(
            FlowPath(
                points=trail[: lengths[i], i].copy(),
                schedule=plans[i],
                step=step,
                termination=termination,
                path_id=ids[i],
                generation=generation,
            )
        )
    if registry is not None:
        for path in paths:
            registry.register(path)
    logger.debug(
        "Traced %d flow lines (%d steps, %d merged, %d hit the boundary)",
        count,
        n_steps,
        sum(p.termination.kind is TerminationKind.MERGED_INTO for p in paths),
        sum(p.termination.kind is TerminationKind.BOUNDARY_HIT for p in paths),
    )
    return paths


def trace_flow_line(
    field: DiscreteField,
    start: complex,
    theta: float,
    step: float,
    max_len: float,
) -> FlowPath:
    return trace_many(field, [start], [theta], step, max_len)[0]


def trace_angle_varying(
    field: DiscreteField,
    start: complex,
    schedule: AngleSchedule,
    step: float,
    max_len: float,
) -> FlowPath:
    """Fixed-angle segments glued tip to start; the angle switches at the step nearest each change time."""

    return trace_many(field, [start], [schedule], step, max_len)[0]


def default_step(grid: TriangulatedGrid, factor: float = 0.5) -> float:
    return factor * grid.spacing


def default_max_length(grid: TriangulatedGrid) -> float:
    """Generous cap: four times the box perimeter."""
    return 16.0 * grid.side


__all__ = [
    "AngleSchedule",
    "FlowPath",
    "MergeRegistry",
    "Termination",
    "TerminationKind",
    "default_max_length",
    "default_step",
    "trace_angle_varying",
    "trace_flow_line",
    "trace_many",
]
