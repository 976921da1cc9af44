"""Field files and boundary-arc JSON."""

from __future__ import annotations

import json
import logging
import math
import struct
from pathlib import Path
from typing import Any, List, Mapping

import numpy as np

from igeom.core import ParameterDomainError
from logging_config import register_log_translations

from .boundary import BoundaryTrace
from .grid import DiscreteField, TriangulatedGrid

logger = logging.getLogger(__name__)

register_log_translations(
    {
        "Wrote field %s (n=%d)": {"ru": "Поле записано в %s (n=%d)"},
    }
)

FIELD_MAGIC = b"IGF1"
_HEADER = struct.Struct("<4sIdd")


def write_field(path: str | Path, field: DiscreteField) -> Path:
    """Header ``IGF1, n, spacing, chi`` then row-major little-endian float64 values."""

    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    chi = 0.0 if math.isnan(field.chi) else field.chi
    header = _HEADER.pack(FIELD_MAGIC, field.grid.n, field.grid.spacing, chi)
    with path.open("wb") as handle:
        handle.write(header)
        handle.write(np.ascontiguousarray(field.values, dtype="<f8").tobytes())
    logger.debug("Wrote field %s (n=%d)", path, field.grid.n)
    return path


def read_field(path: str | Path) -> DiscreteField:
    """Inverse of :func:`write_field`; the grid is centred on the origin."""

    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size:
        raise ParameterDomainError(f"{path} is too short to be a field file")
    magic, n, spacing, chi = _HEADER.unpack_from(raw)
    if magic != FIELD_MAGIC:
        raise ParameterDomainError(f"{path} is not a field file (magic {magic!r})")
    values = np.frombuffer(raw, dtype="<f8", offset=_HEADER.size)
    if values.size != n * n:
        raise ParameterDomainError(f"{path}: expected {n * n} values, found {values.size}")
    side = spacing * (n - 1)
    grid = TriangulatedGrid(n=n, x0=-side / 2, y0=-side / 2, side=side)
    values = values.reshape(n, n).astype(float)
    boundary_vertices = grid.boundary_indices()
    boundary = BoundaryTrace(
        vertices=boundary_vertices,
        values=values[boundary_vertices[:, 0], boundary_vertices[:, 1]],
    )
    return DiscreteField(grid, values, boundary, chi=chi if chi > 0 else math.nan)


def write_boundary_arcs(path: str | Path, trace: BoundaryTrace) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(trace.arcs(), indent=2), encoding="utf-8")
    return path


def read_boundary_arcs(path: str | Path, grid: TriangulatedGrid) -> BoundaryTrace:
    arcs: List[Mapping[str, Any]] = json.loads(Path(path).read_text(encoding="utf-8"))
    return BoundaryTrace.from_arcs(grid.boundary_indices(), arcs)
