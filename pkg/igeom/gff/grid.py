"""Triangulated square grids and piecewise-linear fields on them."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional, Tuple

import numpy as np

from igeom.core import DomainError, ParameterDomainError

from .boundary import BoundaryTrace

_INSIDE_TOLERANCE = 1e-12
_TIE_NUDGE = 1e-7


@dataclass(frozen=True)
class TriangulatedGrid:
    """``n`` x ``n`` vertices on a square box; each cell is cut along its SW-NE diagonal.

    Vertex ``(row, col)`` sits at ``(x0 + col * spacing, y0 + row * spacing)``.
    """

    n: int
    x0: float = -1.0
    y0: float = -1.0
    side: float = 2.0

    def __post_init__(self) -> None:
        if self.n < 3:
            raise ParameterDomainError(f"grid needs at least 3 vertices per side, got {self.n}")
        if self.side <= 0:
            raise ParameterDomainError("grid side length must be positive")

    @classmethod
    def unit_square(cls, n: int) -> "TriangulatedGrid":
        """The [-1, 1]^2 grid every figure of the lab is drawn on."""
        return cls(n=n)

    @property
    def spacing(self) -> float:
        return self.side / (self.n - 1)

    @property
    def box(self) -> Tuple[float, float, float, float]:
        return (self.x0, self.y0, self.x0 + self.side, self.y0 + self.side)

    @property
    def cell_count(self) -> int:
        return (self.n - 1) ** 2

    def vertex(self, row: int, col: int) -> complex:
        return complex(self.x0 + col * self.spacing, self.y0 + row * self.spacing)

    def coordinates(self) -> np.ndarray:
        """Complex vertex positions, shape (n, n), indexed ``[row, col]``."""
        axis = self.x0 + self.spacing * np.arange(self.n)
        rows = self.y0 + self.spacing * np.arange(self.n)
        return axis[None, :] + 1j * rows[:, None]

    def interior_mask(self) -> np.ndarray:
        mask = np.zeros((self.n, self.n), dtype=bool)
        mask[1:-1, 1:-1] = True
        return mask

    def boundary_indices(self) -> np.ndarray:
        """Boundary vertices counterclockwise from the lower-left corner, shape (4(n-1), 2)."""
        last = self.n - 1
        bottom = [(0, c) for c in range(0, last)]
        right = [(r, last) for r in range(0, last)]
        top = [(last, c) for c in range(last, 0, -1)]
        left = [(r, 0) for r in range(last, 0, -1)]
        return np.array(bottom + right + top + left, dtype=int)

    def contains(self, z: complex | np.ndarray) -> np.ndarray | bool:
        x_lo, y_lo, x_hi, y_hi = self.box
        z = np.asarray(z)
        inside = (
            (z.real >= x_lo - _INSIDE_TOLERANCE)
            & (z.real <= x_hi + _INSIDE_TOLERANCE)
            & (z.imag >= y_lo - _INSIDE_TOLERANCE)
            & (z.imag <= y_hi + _INSIDE_TOLERANCE)
        )
        return bool(inside) if inside.ndim == 0 else inside

    def distance_to_boundary(self, z: complex | np.ndarray) -> np.ndarray | float:
        x_lo, y_lo, x_hi, y_hi = self.box
        z = np.asarray(z)
        dist = np.minimum.reduce(
            [z.real - x_lo, x_hi - z.real, z.imag - y_lo, y_hi - z.imag]
        )
        return float(dist) if dist.ndim == 0 else dist

    def cell_of(self, z: np.ndarray) -> np.ndarray:
        """Flat index ``row * (n - 1) + col`` of the cell containing each point."""
        u = (np.asarray(z).real - self.x0) / self.spacing
        v = (np.asarray(z).imag - self.y0) / self.spacing
        col = np.clip(np.floor(u).astype(int), 0, self.n - 2)
        row = np.clip(np.floor(v).astype(int), 0, self.n - 2)
        return row * (self.n - 1) + col

    def nearest_vertex(self, z: complex) -> Tuple[int, int]:
        col = int(round((z.real - self.x0) / self.spacing))
        row = int(round((z.imag - self.y0) / self.spacing))
        return min(max(row, 0), self.n - 1), min(max(col, 0), self.n - 1)


@dataclass(frozen=True)
class DiscreteField:
    """Vertex values of a field that is linear on every triangle of ``grid``.

    ``heading_offset`` is added to ``h / chi + theta`` when the field drives flow
    lines; ``pi / 2`` makes ``e^{ih}`` point north.
    """

    grid: TriangulatedGrid
    values: np.ndarray
    boundary: Optional[BoundaryTrace] = None
    chi: float = math.nan
    heading_offset: float = 0.0
    label: str = field(default="", compare=False)

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float)
        if values.shape != (self.grid.n, self.grid.n):
            raise ParameterDomainError(
                f"field values must have shape {(self.grid.n, self.grid.n)}, got {values.shape}"
            )
        if not np.all(np.isfinite(values)):
            raise ParameterDomainError("field values must be finite")
        object.__setattr__(self, "values", values)

    def with_chi(self, chi: float, heading_offset: float | None = None) -> "DiscreteField":
        offset = self.heading_offset if heading_offset is None else heading_offset
        return replace(self, chi=float(chi), heading_offset=float(offset))

    def __add__(self, other: "DiscreteField") -> "DiscreteField":
        if other.grid != self.grid:
            raise ParameterDomainError("cannot add fields on different grids")
        boundary = other.boundary if self.boundary is None else self.boundary
        if self.boundary is not None and other.boundary is not None:
            boundary = self.boundary.plus(other.boundary)
        chi = self.chi if not math.isnan(self.chi) else other.chi
        return DiscreteField(
            grid=self.grid,
            values=self.values + other.values,
            boundary=boundary,
            chi=chi,
            heading_offset=self.heading_offset or other.heading_offset,
        )

    def __call__(self, z: complex | np.ndarray) -> np.ndarray | float:
        return eval_pl(self, z)


@dataclass(frozen=True)
class TrianglePick:
    """Cell ``(row, col)``, local coordinates ``(fu, fv)`` and whether the upper triangle is used."""

    row: np.ndarray
    col: np.ndarray
    fu: np.ndarray
    fv: np.ndarray
    upper: np.ndarray


def _cell_coordinates(grid: TriangulatedGrid, z: np.ndarray) -> TrianglePick:
    u = (z.real - grid.x0) / grid.spacing
    v = (z.imag - grid.y0) / grid.spacing
    col = np.clip(np.floor(u).astype(int), 0, grid.n - 2)
    row = np.clip(np.floor(v).astype(int), 0, grid.n - 2)
    fu, fv = u - col, v - row
    return TrianglePick(row, col, fu, fv, fv > fu)


def locate_triangle(
    grid: TriangulatedGrid, point: complex | np.ndarray, heading: float | np.ndarray | None = None
) -> TrianglePick:
    """Triangle used to evaluate at ``point``.

    A point on an edge or vertex belongs to several triangles. With a travel
    ``heading`` the one lying left of the direction of travel is taken;
    without one the lower triangle of the point's cell is.
    """

    z = np.asarray(point, dtype=complex)
    pick = _cell_coordinates(grid, z)
    if heading is None:
        return pick
    on_edge = (pick.fu == 0) | (pick.fv == 0) | (pick.fu == pick.fv) | (pick.fu == 1) | (pick.fv == 1)
    if not np.any(on_edge):
        return pick
    nudge = _TIE_NUDGE * grid.spacing * 1j * np.exp(1j * np.asarray(heading, dtype=float))
    left = _cell_coordinates(grid, z + nudge)
    # barycentric coordinates of the point itself inside the left-hand triangle
    u = (z.real - grid.x0) / grid.spacing
    v = (z.imag - grid.y0) / grid.spacing
    return TrianglePick(
        row=np.where(on_edge, left.row, pick.row),
        col=np.where(on_edge, left.col, pick.col),
        fu=np.where(on_edge, u - left.col, pick.fu),
        fv=np.where(on_edge, v - left.row, pick.fv),
        upper=np.where(on_edge, left.upper, pick.upper),
    )


def eval_pl(
    field: DiscreteField, point: complex | np.ndarray, heading: float | np.ndarray | None = None
) -> np.ndarray | float:
    """Barycentric interpolation on the triangle containing each point.

    Points on shared edges use :func:`locate_triangle`; the field is continuous
    there, so only rounding depends on the choice.
    """

    grid = field.grid
    z = np.asarray(point, dtype=complex)
    if not np.all(grid.contains(z)):
        raise DomainError(f"point outside {grid.box}")

    pick = locate_triangle(grid, z, heading)
    row, col, fu, fv = pick.row, pick.col, pick.fu, pick.fv
    values = field.values
    f00 = values[row, col]
    f10 = values[row, col + 1]
    f01 = values[row + 1, col]
    f11 = values[row + 1, col + 1]

    lower = f00 + fu * (f10 - f00) + fv * (f11 - f10)
    upper = f00 + fv * (f01 - f00) + fu * (f11 - f01)
    result = np.where(pick.upper, upper, lower)
    return float(result) if result.ndim == 0 else result
