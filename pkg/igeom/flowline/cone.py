"""Fans of fixed-angle flow lines and the iterated light cone."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Iterable, List, Optional, Sequence

import numpy as np

from igeom.core import ParameterDomainError
from igeom.gff import DiscreteField, TriangulatedGrid
from logging_config import register_log_translations

from .tracer import FlowPath, MergeRegistry, default_max_length, trace_many

logger = logging.getLogger(__name__)

register_log_translations(
    {
        "Light cone generation %d: %d seeds, %d paths, %d points so far": {
            "ru": "Световой конус, поколение %d: %d затравок, %d путей, %d точек всего",
        },
        "Light cone seeds capped at %d (had %d)": {
            "ru": "Число затравок светового конуса ограничено %d (было %d)",
        },
    }
)

CONE_ANGLE = math.pi / 2


@dataclass(frozen=True)
class LightConeSet:
    """Trace points of the cone; ``generation[k]`` counts the angle changes used to reach point k."""

    points: np.ndarray
    generation: np.ndarray
    paths: List[FlowPath] = field(default_factory=list, compare=False)

    @property
    def generation_count(self) -> int:
        return int(self.generation.max()) + 1 if self.generation.size else 0

    def up_to(self, generation: int) -> np.ndarray:
        return self.points[self.generation <= generation]

    def boundary_paths(self) -> List[FlowPath]:
        return [p for p in self.paths if p.generation == 0]


def fan_angles(angle_count: int) -> np.ndarray:
    if angle_count < 2:
        raise ParameterDomainError(f"a fan needs at least 2 angles, got {angle_count}")
    return np.linspace(-CONE_ANGLE, CONE_ANGLE, angle_count)


def fan(
    field: DiscreteField,
    start: complex,
    angle_count: int,
    step: float,
    max_len: Optional[float] = None,
) -> List[FlowPath]:
    """One flow line per equally spaced angle in [-pi/2, pi/2], lowest angle first."""

    angles = fan_angles(angle_count)
    max_len = default_max_length(field.grid) if max_len is None else max_len
    return trace_many(field, [start] * angle_count, list(angles), step, max_len)


def _dedupe_seeds(grid: TriangulatedGrid, seeds: Sequence[complex], thetas: Sequence[float]):
    seen = set()
    kept_seeds, kept_thetas = [], []
    cells = grid.cell_of(np.asarray(seeds, dtype=complex)) if seeds else []
    for seed, theta, cell in zip(seeds, thetas, cells):
        key = (int(cell), round(theta, 9))
        if key in seen:
            continue
        seen.add(key)
        kept_seeds.append(seed)
        kept_thetas.append(theta)
    return kept_seeds, kept_thetas


def light_cone(
    field: DiscreteField,
    start: complex,
    iterations: int,
    step: float,
    *,
    seed_stride: int = 5,
    max_len: Optional[float] = None,
    max_paths_per_generation: int = 400,
) -> LightConeSet:
    """Iterate angle-varying flow lines alternating between +pi/2 and -pi/2.

    Generation 0 is the pair of flow lines at +-pi/2 from ``start``. Every
    later generation re-seeds each ``seed_stride``-th vertex of the previous
    generation with the opposite angle. Paths that run into an earlier trace of
    the same angle stop there, which keeps the growth finite.
    """

    if iterations < 1:
        raise ParameterDomainError(f"light cone needs at least one iteration, got {iterations}")
    if seed_stride < 1:
        raise ParameterDomainError("seed stride must be at least 1")
    grid = field.grid
    max_len = default_max_length(grid) if max_len is None else max_len
    registry = MergeRegistry(grid)

    current = trace_many(
        field,
        [start, start],
        [CONE_ANGLE, -CONE_ANGLE],
        step,
        max_len,
        registry=registry,
        generation=0,
        path_ids=[0, 1],
    )
    paths: List[FlowPath] = list(current)
    next_id = 2

    for generation in range(1, iterations):
        seeds: List[complex] = []
        thetas: List[float] = []
        for parent in current:
            for point in parent.points[seed_stride::seed_stride]:
                if grid.distance_to_boundary(point) <= step:
                    continue
                seeds.append(complex(point))
                thetas.append(-parent.theta)
        seeds, thetas = _dedupe_seeds(grid, seeds, thetas)
        if len(seeds) > max_paths_per_generation:
            logger.info("Light cone seeds capped at %d (had %d)", max_paths_per_generation, len(seeds))
            keep = np.linspace(0, len(seeds) - 1, max_paths_per_generation).round().astype(int)
            seeds = [seeds[i] for i in keep]
            thetas = [thetas[i] for i in keep]
        if not seeds:
            break
        current = trace_many(
            field,
            seeds,
            thetas,
            step,
            max_len,
            registry=registry,
            generation=generation,
            path_ids=range(next_id, next_id + len(seeds)),
        )
        next_id += len(seeds)
        paths.extend(current)
        logger.debug(
            "Light cone generation %d: %d seeds, %d paths, %d points so far",
            generation,
            len(seeds),
            len(paths),
            sum(len(p.points) for p in paths),
        )

    points = np.concatenate([p.points for p in paths])
    generation_tags = np.concatenate([np.full(len(p.points), p.generation) for p in paths])
    return LightConeSet(points=points, generation=generation_tags, paths=paths)


def _polyline_samples(paths: Iterable[FlowPath | np.ndarray]) -> np.ndarray:
    chunks = []
    for path in paths:
        points = np.asarray(getattr(path, "points", path), dtype=complex)
        chunks.append(points)
        if len(points) > 1:
            chunks.append(0.5 * (points[1:] + points[:-1]))
    return np.concatenate(chunks) if chunks else np.empty(0, dtype=complex)


def area_fraction(paths: Iterable[FlowPath | np.ndarray], grid: TriangulatedGrid) -> float:
    """Fraction of grid cells touched by vertices or segment midpoints of the paths."""

    samples = _polyline_samples(paths)
    if samples.size == 0:
        return 0.0
    samples = samples[np.asarray(grid.contains(samples), dtype=bool)]
    touched = np.unique(grid.cell_of(samples))
    return touched.size / grid.cell_count
