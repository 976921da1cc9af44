"""Boundary heights of the GFF coupled with an SLE_kappa(rho) and their harmonic extension."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np
from scipy import integrate

from igeom.core import DerivedConstants, ParameterDomainError, SleParams, derive_constants
from igeom.core.params import Side


def harmonic_step_extension(breaks: np.ndarray, values: np.ndarray, w: np.ndarray | complex) -> np.ndarray:
    """Bounded harmonic function in H with step boundary values.

    ``values[0]`` lies left of ``breaks[0]`` and ``values[-1]`` right of
    ``breaks[-1]``; ``breaks`` may repeat. ``breaks`` can carry leading batch
    axes that broadcast against ``w``:

        u(w) = values[-1] + sum_j (values[j] - values[j+1]) arg(w - breaks[j]) / pi
    """

    breaks = np.asarray(breaks, dtype=float)
    values = np.asarray(values, dtype=float)
    if values.shape[-1] != breaks.shape[-1] + 1:
        raise ParameterDomainError("a step function needs one more value than breaks")
    w = np.asarray(w, dtype=complex)
    drops = values[..., :-1] - values[..., 1:]
    angles = np.angle(w[..., None] - breaks) / math.pi
    return values[..., -1] + np.sum(drops * angles, axis=-1)


@dataclass(frozen=True)
class HarmonicProfile:
    """Heights -lambda(1 + partial sums) left of the tip and lambda(1 + partial sums) right of it.

    Break order is ascending: left force-point images from the outermost in,
    the tip at 0, then right images from the innermost out.
    """

    params: SleParams
    consts: DerivedConstants = field(init=False)
    values: Tuple[float, ...] = field(init=False)

    def __post_init__(self) -> None:
        consts = derive_constants(self.params.kappa)
        lam = consts.lam
        left = -lam * (1.0 + np.cumsum((0.0,) + self.params.weights_l))
        right = lam * (1.0 + np.cumsum((0.0,) + self.params.weights_r))
        object.__setattr__(self, "consts", consts)
        object.__setattr__(self, "values", tuple(float(v) for v in np.concatenate([left[::-1], right])))

    @property
    def jumps(self) -> Tuple[float, ...]:
        return tuple(b - a for a, b in zip(self.values, self.values[1:]))

    @property
    def tip_index(self) -> int:
        return len(self.params.weights_l)

    def breaks(self, left_images: Optional[np.ndarray] = None, right_images: Optional[np.ndarray] = None) -> np.ndarray:
        """Ascending break points; images default to the initial force points.

        Batched images of shape ``(runs, k)`` give breaks of shape ``(runs, m)``.
        """

        left = np.asarray(self.params.points_l if left_images is None else left_images, dtype=float)
        right = np.asarray(self.params.points_r if right_images is None else right_images, dtype=float)
        batch = np.broadcast_shapes(left.shape[:-1], right.shape[:-1]) if left.ndim > 1 or right.ndim > 1 else ()
        left = np.broadcast_to(left, batch + (len(self.params.points_l),))
        right = np.broadcast_to(right, batch + (len(self.params.points_r),))
        tip = np.zeros(batch + (1,))
        return np.concatenate([left[..., ::-1], tip, right], axis=-1)

    def extension(self, w: np.ndarray | complex, breaks: Optional[np.ndarray] = None) -> np.ndarray:
        return harmonic_step_extension(self.breaks() if breaks is None else breaks, np.asarray(self.values), w)


def harmonic_profile_value(
    profile: HarmonicProfile,
    s: float,
    *,
    side: Optional[Side] = None,
    breaks: Optional[np.ndarray] = None,
) -> float:
    """Boundary height at ``s``.

    ``side`` picks the one-sided value at a break; 0 itself needs it because
    0^- and 0^+ carry different heights. Away from 0, a break without a side
    gets the mean of the one-sided values.
    """

    points = profile.breaks() if breaks is None else np.asarray(breaks, dtype=float)
    if points.ndim != 1:
        raise ParameterDomainError("harmonic_profile_value takes a single set of breaks")
    if s == 0.0 and side is None:
        raise ParameterDomainError("the height at 0 needs a side tag (L for 0^-, R for 0^+)")
    values = profile.values
    below = int(np.searchsorted(points, s, side="left"))
    above = int(np.searchsorted(points, s, side="right"))
    if side == "L":
        return values[below]
    if side == "R":
        return values[above]
    if below == above:
        return values[below]
    return 0.5 * (values[below] + values[above])


def poisson_extension(profile: HarmonicProfile, w: complex, *, breaks: Optional[np.ndarray] = None) -> float:
    """Harmonic extension by quadrature of the half-plane Poisson kernel; a cross-check of the closed form."""

    points = profile.breaks() if breaks is None else np.asarray(breaks, dtype=float)
    x, y = w.real, w.imag
    if y <= 0:
        raise ParameterDomainError("the Poisson kernel needs Im w > 0")

    def _kernel(s: float) -> float:
        return y / (math.pi * ((x - s) ** 2 + y * y))

    edges = [-math.inf, *(float(p) for p in points), math.inf]
    total = 0.0
    for value, lo, hi in zip(profile.values, edges[:-1], edges[1:]):
        if hi > lo:
            total += value * integrate.quad(_kernel, lo, hi, epsabs=1e-13, epsrel=1e-12)[0]
    return total
