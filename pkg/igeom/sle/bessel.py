"""Bessel processes through their squares.

``Z = X^2`` solves ``dZ = delta dt + 2 sqrt(Z) dB``. For ``delta > 1`` one
step is drawn from the exact transition (a scaled noncentral chi-square
written as a shifted Gaussian square plus a central chi-square); the
full-truncation Euler step ``Z <- max(Z + delta dt + 2 sqrt(Z dt) xi, 0)`` is
kept as an alternative and for dimensions where hitting 0 ends the process.
"""

from __future__ import annotations

import math
from typing import Literal, Sequence

import numpy as np
from scipy import special

from igeom.core import OutOfScopeError, ParameterDomainError, SeedLike, make_rng

BesselScheme = Literal["exact", "truncated"]


def squared_bessel_step(
    z: np.ndarray,
    delta: float | np.ndarray,
    dt: float,
    xi: np.ndarray,
    u: np.ndarray,
    *,
    scheme: BesselScheme = "exact",
    drift: np.ndarray | float = 0.0,
) -> np.ndarray:
    """One step of the squared process from ``z`` with Gaussian ``xi`` and uniform ``u``.

    ``xi`` enters as ``+2 sqrt(z dt) xi`` to first order in both schemes.
    ``drift`` is an extra ``dZ`` drift integrated explicitly.
    """

    z = np.asarray(z, dtype=float)
    delta = np.broadcast_to(np.asarray(delta, dtype=float), z.shape)
    exact = (scheme == "exact") & (delta > 1.0)
    out = np.empty_like(z)

    if np.any(exact):
        ze, de = z[exact], delta[exact]
        shifted = (xi[exact] + np.sqrt(ze / dt)) ** 2
        central = 2.0 * special.gammaincinv((de - 1.0) / 2.0, np.clip(u[exact], 1e-300, 1.0 - 1e-16))
        out[exact] = dt * (shifted + central)
    rest = ~exact
    if np.any(rest):
        zr = z[rest]
        out[rest] = zr + delta[rest] * dt + 2.0 * np.sqrt(zr * dt) * xi[rest]

    out = out + np.asarray(drift) * dt
    return np.maximum(out, 0.0)


def simulate_bessel(
    delta: float,
    x0: float,
    dt: float,
    T: float,
    seed: SeedLike,
    *,
    scheme: BesselScheme = "exact",
) -> np.ndarray:
    """Bessel path sampled at ``0, dt, ..., T``; non-negative, instantaneously reflecting at 0."""

    if delta <= 1.0:
        raise OutOfScopeError(f"Bessel dimension must exceed 1, got {delta}")
    if x0 < 0:
        raise ParameterDomainError(f"Bessel start must be non-negative, got {x0}")
    if dt <= 0 or T < 0:
        raise ParameterDomainError("dt must be positive and T non-negative")
    return simulate_bessel_batch(delta, x0, dt, T, [seed], scheme=scheme)[0]


def simulate_bessel_batch(
    delta: float,
    x0: float,
    dt: float,
    T: float,
    seeds: Sequence[SeedLike],
    *,
    scheme: BesselScheme = "exact",
) -> np.ndarray:
    """Many independent paths, shape (runs, steps + 1); row ``i`` equals ``simulate_bessel`` with ``seeds[i]``."""

    if delta <= 1.0:
        raise OutOfScopeError(f"Bessel dimension must exceed 1, got {delta}")
    n_steps = int(round(T / dt))
    runs = len(seeds)
    xi = np.empty((runs, n_steps))
    u = np.empty((runs, n_steps))
    for i, seed in enumerate(seeds):
        rng = make_rng(seed)
        xi[i] = rng.standard_normal(n_steps)
        u[i] = rng.random(n_steps)

    z = np.empty((runs, n_steps + 1))
    z[:, 0] = x0 * x0
    for k in range(n_steps):
        z[:, k + 1] = squared_bessel_step(z[:, k], delta, dt, xi[:, k], u[:, k], scheme=scheme)
    return np.sqrt(z)


def occupation_fraction(path: np.ndarray, dt: float, window_factor: float = 0.1) -> float:
    """Fraction of sampled times (after the start) with ``X <= window_factor * sqrt(dt)``."""

    path = np.asarray(path, dtype=float)
    if path.size < 2:
        return 0.0
    return float(np.mean(path[1:] <= window_factor * math.sqrt(dt)))
