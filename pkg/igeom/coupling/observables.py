"""The coupled field's harmonic part at a tracked point, evaluated along the Loewner flow."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Tuple

import numpy as np

from igeom.sle import BatchTrajectory, DriverBatch, DriverPath, MapTrajectory

from .profile import HarmonicProfile, harmonic_step_extension


@dataclass(frozen=True)
class CouplingObservable:
    z: complex
    time: float
    h_value: float
    log_cr: float


@dataclass(frozen=True)
class ObservableTrajectory:
    """``h_t(z)`` and ``log CR(z; H minus K_t)`` at every step before ``z`` is swallowed."""

    z: complex
    dt: float
    h: np.ndarray
    log_cr: np.ndarray
    swallowed: bool = False

    def __len__(self) -> int:
        return self.h.size

    @property
    def times(self) -> np.ndarray:
        return self.dt * np.arange(self.h.size)

    def at(self, k: int) -> CouplingObservable:
        return CouplingObservable(self.z, self.dt * k, float(self.h[k]), float(self.log_cr[k]))

    def __iter__(self) -> Iterator[CouplingObservable]:
        for k in range(len(self)):
            yield self.at(k)


def _observables(
    profile: HarmonicProfile,
    g: np.ndarray,
    log_deriv: np.ndarray,
    W: np.ndarray,
    V_left: np.ndarray,
    V_right: np.ndarray,
) -> Tuple[np.ndarray, np.ndarray]:
    """``g``, ``log_deriv`` and ``W`` share a shape ``S``; ``V_*`` are ``S + (k,)``."""

    f = g - W
    breaks = profile.breaks(V_left - W[..., None], V_right - W[..., None])
    arg_derivative = np.imag(log_deriv)
    h = harmonic_step_extension(breaks, np.asarray(profile.values), f) - profile.consts.chi * arg_derivative
    with np.errstate(divide="ignore", invalid="ignore"):
        log_cr = np.log(2.0 * np.imag(f)) - np.real(log_deriv)
    return h, log_cr


def evaluate_h_t(driver: DriverPath, trajectory: MapTrajectory, profile: HarmonicProfile) -> ObservableTrajectory:
    """``h_t(z) = h0_t(f_t(z)) - chi arg f_t'(z)`` with ``f_t = g_t - W_t``; stops before swallowing."""

    end = trajectory.swallow_index if trajectory.swallowed else trajectory.g.size
    g = trajectory.g[:end]
    W = driver.W[:end]
    h, log_cr = _observables(
        profile,
        g,
        trajectory.log_deriv[:end],
        W,
        driver.V_left[:, :end].T,
        driver.V_right[:, :end].T,
    )
    return ObservableTrajectory(
        z=trajectory.tracked_point,
        dt=trajectory.dt,
        h=h,
        log_cr=log_cr,
        swallowed=trajectory.swallowed,
    )


def evaluate_h_batch(
    batch: DriverBatch, trajectory: BatchTrajectory, profile: HarmonicProfile
) -> Tuple[np.ndarray, np.ndarray]:
    """``(h, log_cr)`` of shape ``(runs, steps + 1)``; NaN from the swallow step on and after a threshold."""

    h, log_cr = _observables(
        profile,
        trajectory.g,
        trajectory.log_deriv,
        batch.W,
        np.moveaxis(batch.V_left, 1, -1),
        np.moveaxis(batch.V_right, 1, -1),
    )
    rows = np.flatnonzero(trajectory.swallow_index >= 0)
    for row in rows:
        h[row, trajectory.swallow_index[row] :] = np.nan
        log_cr[row, trajectory.swallow_index[row] :] = np.nan
    return h, log_cr
