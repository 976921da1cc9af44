"""Piecewise-constant boundary data: step functions on R and traces on a square."""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from typing import Any, Iterable, List, Mapping, Sequence, Tuple

import numpy as np

from igeom.core import OrderingError, ParameterDomainError


@dataclass(frozen=True)
class StepFunction:
    """``values[0]`` left of ``breaks[0]``, ``values[k]`` on ``(breaks[k-1], breaks[k])``."""

    breaks: Tuple[float, ...]
    values: Tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "breaks", tuple(float(b) for b in self.breaks))
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if len(self.values) != len(self.breaks) + 1:
            raise ParameterDomainError("a step function needs one more value than breaks")
        if any(b <= a for a, b in zip(self.breaks, self.breaks[1:])):
            raise OrderingError("step function breaks must be strictly increasing")

    @classmethod
    def constant(cls, value: float) -> "StepFunction":
        return cls(breaks=(), values=(value,))

    @classmethod
    def two_sided(cls, left: float, right: float, at: float = 0.0) -> "StepFunction":
        return cls(breaks=(at,), values=(left, right))

    def __call__(self, s: float) -> float:
        """Value at ``s``; at a break the mean of the one-sided limits."""
        if s == np.inf:
            return self.values[-1]
        if s == -np.inf:
            return self.values[0]
        k = bisect.bisect_left(self.breaks, s)
        if k < len(self.breaks) and self.breaks[k] == s:
            return 0.5 * (self.values[k] + self.values[k + 1])
        return self.values[k]

    def at_infinity(self) -> float:
        return 0.5 * (self.values[0] + self.values[-1])

    @property
    def jumps(self) -> Tuple[float, ...]:
        return tuple(b - a for a, b in zip(self.values, self.values[1:]))


@dataclass(frozen=True)
class BoundaryTrace:
    """Values on the boundary vertices of a grid in counterclockwise order."""

    vertices: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        vertices = np.asarray(self.vertices, dtype=int)
        values = np.asarray(self.values, dtype=float)
        if vertices.ndim != 2 or vertices.shape[1] != 2:
            raise ParameterDomainError("boundary vertices must be (row, col) pairs")
        if values.shape != (vertices.shape[0],):
            raise ParameterDomainError("one boundary value per boundary vertex is required")
        if not np.all(np.isfinite(values)):
            raise ParameterDomainError("boundary values must be finite")
        object.__setattr__(self, "vertices", vertices)
        object.__setattr__(self, "values", values)

    @classmethod
    def constant(cls, vertices: np.ndarray, value: float = 0.0) -> "BoundaryTrace":
        vertices = np.asarray(vertices, dtype=int)
        return cls(vertices=vertices, values=np.full(vertices.shape[0], float(value)))

    @classmethod
    def from_arcs(cls, vertices: np.ndarray, arcs: Iterable[Mapping[str, Any]]) -> "BoundaryTrace":
        """Build from ``{fromIndex, toIndex, value}`` arcs; ``toIndex`` is exclusive and may wrap."""
        vertices = np.asarray(vertices, dtype=int)
        count = vertices.shape[0]
        values = np.full(count, np.nan)
        for arc in arcs:
            start = int(arc["fromIndex"]) % count
            stop = int(arc["toIndex"]) % count
            length = (stop - start) % count or count
            index = (start + np.arange(length)) % count
            values[index] = float(arc["value"])
        if np.isnan(values).any():
            raise ParameterDomainError("boundary arcs do not cover every boundary vertex")
        return cls(vertices=vertices, values=values)

    def arcs(self) -> List[dict[str, float]]:
        """Maximal constant runs as ``{fromIndex, toIndex, value}`` (cyclic)."""
        values = self.values
        count = values.shape[0]
        changes = [i for i in range(count) if values[i] != values[i - 1]]
        if not changes:
            return [{"fromIndex": 0, "toIndex": count, "value": float(values[0])}]
        result = []
        for k, start in enumerate(changes):
            stop = changes[(k + 1) % len(changes)]
            result.append({"fromIndex": start, "toIndex": stop, "value": float(values[start])})
        return result

    @property
    def arc_count(self) -> int:
        return len(self.arcs())

    def plus(self, other: "BoundaryTrace") -> "BoundaryTrace":
        if not np.array_equal(self.vertices, other.vertices):
            raise ParameterDomainError("boundary traces live on different vertex lists")
        return BoundaryTrace(vertices=self.vertices, values=self.values + other.values)

    def as_grid(self, n: int) -> np.ndarray:
        """Dense (n, n) array holding the trace on the boundary and 0 elsewhere."""
        grid_values = np.zeros((n, n))
        grid_values[self.vertices[:, 0], self.vertices[:, 1]] = self.values
        return grid_values


def step_from_pairs(pairs: Sequence[Sequence[float]], rightmost: float) -> StepFunction:
    """``[(break, value_left_of_break), ...]`` plus the value right of the last break."""
    breaks = tuple(float(b) for b, _ in pairs)
    values = tuple(float(v) for _, v in pairs) + (float(rightmost),)
    return StepFunction(breaks=breaks, values=values)
