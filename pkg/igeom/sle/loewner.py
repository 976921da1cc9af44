"""Chordal Loewner flow for piecewise-constant drivers.

Over each step the driver is frozen at its value at the end of the step, so
``g`` moves by the exact vertical-slit map ``W + sqrt((g - W)^2 + 4 dt)``.
Composition of such maps is exact; half-plane capacity adds up to ``2 t``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterator, Optional

import numpy as np

from igeom.core import ParameterDomainError
from logging_config import register_log_translations

from .driver import DriverBatch, DriverPath

logger = logging.getLogger(__name__)

register_log_translations(
    {
        "Extracting curve: %d samples over %d steps": {
            "ru": "Извлечение кривой: %d точек по %d шагам",
        },
    }
)

DEFAULT_SWALLOW_CUTOFF = 1e-6


def _upper_root(w: np.ndarray, reference: np.ndarray) -> np.ndarray:
    """Square root with ``Im >= 0``; on the real line it takes the sign of ``reference``."""
    root = np.sqrt(w)
    flip = (root.imag < 0) | ((root.imag == 0) & (np.real(reference) < 0))
    return np.where(flip, -root, root)


def slit_step(g: np.ndarray, w: np.ndarray, dt: float) -> tuple[np.ndarray, np.ndarray]:
    """Forward step of the slit map; returns ``(new g, derivative factor)``."""
    offset = g - w
    root = _upper_root(offset * offset + 4.0 * dt, offset)
    return w + root, offset / root


def inverse_slit_step(z: np.ndarray, w: np.ndarray, dt: float) -> np.ndarray:
    offset = z - w
    return w + _upper_root(offset * offset - 4.0 * dt, offset)


@dataclass(frozen=True)
class MapState:
    tracked_point: complex
    time: float
    g: complex
    log_deriv: complex
    swallowed: bool
    swallow_time: Optional[float] = None

    @property
    def log_conformal_radius(self) -> float:
        return float(np.log(2.0 * self.g.imag) - self.log_deriv.real)


@dataclass(frozen=True)
class MapTrajectory:
    """``g_t(z)`` and ``log g_t'(z)`` at every step up to swallowing (inclusive of t = 0)."""

    tracked_point: complex
    dt: float
    g: np.ndarray
    log_deriv: np.ndarray
    swallow_index: Optional[int] = None

    @property
    def swallowed(self) -> bool:
        return self.swallow_index is not None

    @property
    def swallow_time(self) -> Optional[float]:
        return None if self.swallow_index is None else self.dt * self.swallow_index

    @property
    def times(self) -> np.ndarray:
        return self.dt * np.arange(len(self.g))

    def log_conformal_radius(self) -> np.ndarray:
        return np.log(2.0 * self.g.imag) - self.log_deriv.real

    def conformal_radius(self) -> np.ndarray:
        return 2.0 * self.g.imag / np.abs(np.exp(self.log_deriv))

    def state(self, k: int) -> MapState:
        return MapState(
            tracked_point=self.tracked_point,
            time=self.dt * k,
            g=complex(self.g[k]),
            log_deriv=complex(self.log_deriv[k]),
            swallowed=self.swallow_index is not None and k >= self.swallow_index,
            swallow_time=self.swallow_time,
        )

    def states(self) -> Iterator[MapState]:
        for k in range(len(self.g)):
            yield self.state(k)


@dataclass(frozen=True)
class BatchTrajectory:
    """Many drivers, one tracked point; entries after swallowing are NaN."""

    tracked_point: complex
    dt: float
    g: np.ndarray
    log_deriv: np.ndarray
    swallow_index: np.ndarray

    def row(self, i: int) -> MapTrajectory:
        end = int(self.swallow_index[i]) if self.swallow_index[i] >= 0 else self.g.shape[1] - 1
        return MapTrajectory(
            tracked_point=self.tracked_point,
            dt=self.dt,
            g=self.g[i, : end + 1].copy(),
            log_deriv=self.log_deriv[i, : end + 1].copy(),
            swallow_index=None if self.swallow_index[i] < 0 else int(self.swallow_index[i]),
        )


def loewner_forward_batch(
    W: np.ndarray,
    z: complex,
    dt: float,
    *,
    cutoff: float = DEFAULT_SWALLOW_CUTOFF,
    last_steps: Optional[np.ndarray] = None,
) -> BatchTrajectory:
    """Track ``z`` under every row of ``W`` (shape (runs, steps + 1)).

    ``last_steps[i]`` ends run ``i`` early (drivers stopped at a threshold).
    """

    W = np.atleast_2d(np.asarray(W, dtype=float))
    runs, columns = W.shape
    g = np.full((runs, columns), np.nan + 0j, dtype=complex)
    logd = np.full((runs, columns), np.nan + 0j, dtype=complex)
    swallow = np.full(runs, -1, dtype=int)
    limit = np.full(runs, columns - 1) if last_steps is None else np.asarray(last_steps, dtype=int)

    current = np.full(runs, complex(z))
    current_log = np.zeros(runs, dtype=complex)
    g[:, 0] = current
    logd[:, 0] = 0.0
    active = np.abs(current - W[:, 0]) >= cutoff
    swallow[~active] = 0

    for k in range(columns - 1):
        active &= k < limit
        if not active.any():
            break
        idx = np.flatnonzero(active)
        w_next = W[idx, k + 1]
        new, factor = slit_step(current[idx], w_next, dt)
        current[idx] = new
        current_log[idx] += np.log(factor)
        g[idx, k + 1] = new
        logd[idx, k + 1] = current_log[idx]
        gone = np.abs(new - w_next) < cutoff
        swallow[idx[gone]] = k + 1
        active[idx[gone]] = False
    return BatchTrajectory(tracked_point=complex(z), dt=dt, g=g, log_deriv=logd, swallow_index=swallow)


def loewner_forward(
    driver: DriverPath,
    z: complex,
    *,
    cutoff: float = DEFAULT_SWALLOW_CUTOFF,
) -> MapTrajectory:
    """``g_t(z)`` and ``log g_t'(z)`` along the driver, stopping when ``z`` is swallowed."""

    return loewner_forward_batch(driver.W[None, :], z, driver.dt, cutoff=cutoff).row(0)


def forward_driver_batch(batch: DriverBatch, z: complex, **options: float) -> BatchTrajectory:
    return loewner_forward_batch(batch.W, z, batch.dt, last_steps=batch.valid_steps(), **options)


@dataclass(frozen=True)
class CurvePolyline:
    vertices: np.ndarray
    times: np.ndarray
    dt: float
    tip_offset: float

    def sup_distance(self, other: "CurvePolyline") -> float:
        """Sup distance at the common sample times."""
        common, mine, theirs = np.intersect1d(
            np.round(self.times, 12), np.round(other.times, 12), return_indices=True
        )
        if common.size == 0:
            raise ParameterDomainError("curves share no sample times")
        return float(np.max(np.abs(self.vertices[mine] - other.vertices[theirs])))


def extract_curve(driver: DriverPath, tip_offset: float, *, stride: int = 1) -> CurvePolyline:
    """Trace by running every sampled tip ``W_n + i tip_offset`` back to time 0.

    All sample times are pulled back together, so the cost is quadratic in
    the number of steps.
    """

    if tip_offset <= 0:
        raise ParameterDomainError(f"tip offset must be positive, got {tip_offset}")
    if stride < 1:
        raise ParameterDomainError("stride must be at least 1")
    W = np.asarray(driver.W, dtype=float)
    n_steps = len(W) - 1
    sample = np.arange(0, n_steps + 1, stride)
    if sample[-1] != n_steps:
        sample = np.append(sample, n_steps)
    logger.debug("Extracting curve: %d samples over %d steps", sample.size, n_steps)

    z = W[sample] + 1j * tip_offset
    for k in range(n_steps - 1, -1, -1):
        pending = sample > k
        if not pending.any():
            continue
        z[pending] = inverse_slit_step(z[pending], W[k + 1], driver.dt)
    z[sample == 0] = W[0]
    return CurvePolyline(vertices=z, times=driver.dt * sample, dt=driver.dt, tip_offset=tip_offset)
