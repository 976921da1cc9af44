"""Monte-Carlo estimate of how often the trace comes near a boundary interval."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from igeom.core import ParameterDomainError, SeedLike, SleParams, run_seeds
from logging_config import register_log_translations

from .driver import DEFAULT_COLLISION_FACTOR, simulate_driver_batch
from .loewner import extract_curve

logger = logging.getLogger(__name__)

register_log_translations(
    {
        "Boundary hits: %d of %d runs near [%.3g, %.3g]": {
            "ru": "Касания границы: %d из %d прогонов рядом с [%.3g, %.3g]",
        },
    }
)


@dataclass(frozen=True)
class HitEstimate:
    hits: int
    runs: int

    @property
    def estimate(self) -> float:
        return self.hits / self.runs if self.runs else math.nan

    @property
    def stderr(self) -> float:
        if not self.runs:
            return math.nan
        p = self.estimate
        return math.sqrt(max(p * (1.0 - p), 0.0) / self.runs)

    def __add__(self, other: "HitEstimate") -> "HitEstimate":
        return HitEstimate(self.hits + other.hits, self.runs + other.runs)


def distance_to_interval(points: np.ndarray, interval: Tuple[float, float]) -> np.ndarray:
    a, b = interval
    x = np.real(points)
    dx = np.maximum.reduce([a - x, np.zeros_like(x), x - b])
    return np.hypot(dx, np.imag(points))


def _check_interval(params: SleParams, interval: Tuple[float, float]) -> None:
    a, b = interval
    if not a < b:
        raise ParameterDomainError(f"interval must satisfy a < b, got {interval}")
    for point in params.points_l + params.points_r:
        if a <= point <= b:
            raise ParameterDomainError(f"force point {point} lies inside the target interval")


def count_boundary_hits(
    params: SleParams,
    interval: Tuple[float, float],
    proximity: float,
    seeds: Sequence[SeedLike],
    *,
    T: float,
    dt: float,
    tip_offset: float | None = None,
    stride: int = 10,
    collision_factor: float = DEFAULT_COLLISION_FACTOR,
) -> HitEstimate:
    """Hits among the runs of ``seeds``; the unit of work the harness distributes."""

    _check_interval(params, interval)
    tip_offset = tip_offset if tip_offset is not None else 0.25 * proximity
    batch = simulate_driver_batch(params, dt, T, seeds, collision_factor=collision_factor)
    hits = 0
    for i in range(batch.runs):
        curve = extract_curve(batch.path(i), tip_offset, stride=stride)
        if np.any(distance_to_interval(curve.vertices, interval) <= proximity):
            hits += 1
    return HitEstimate(hits=hits, runs=batch.runs)


def boundary_hit_probability(
    params: SleParams,
    interval: Tuple[float, float],
    proximity: float,
    runs: int,
    seed: int,
    *,
    T: float = 5.0,
    dt: float = 1e-3,
    stride: int = 10,
) -> HitEstimate:
    """Fraction of traces entering the ``proximity`` neighbourhood of ``interval`` by capacity time ``T``."""

    if proximity <= 0:
        raise ParameterDomainError("proximity must be positive")
    estimate = HitEstimate(0, 0)
    chunk = 100
    for start in range(0, runs, chunk):
        seeds = run_seeds(seed, start, min(chunk, runs - start))
        estimate = estimate + count_boundary_hits(params, interval, proximity, seeds, T=T, dt=dt, stride=stride)
    logger.info("Boundary hits: %d of %d runs near [%.3g, %.3g]", estimate.hits, estimate.runs, *interval)
    return estimate
