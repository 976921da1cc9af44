"""Driving processes of SLE_kappa(rho) with several force points on each side.

Away from collisions the pair ``dW = sqrt(kappa) dB + sum rho/(W - V) dt``,
``dV = 2/(V - W) dt`` is stepped by Euler-Maruyama. Inside the diffusive
scale of the nearest force point the gap ``X = |V - W| / sqrt(kappa)`` is a
Bessel process whose dimension comes from the summed weight of the points
sitting at that location; it is stepped through its square, and the force
point moves by the integral of ``2 / (sqrt(kappa) X)``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from igeom.core import (
    CONTINUATION_THRESHOLD,
    ParameterDomainError,
    SeedLike,
    SleParams,
    bessel_dimension,
    make_rng,
)
from igeom.core.params import Side
from logging_config import register_log_translations

from .bessel import squared_bessel_step

logger = logging.getLogger(__name__)

register_log_translations(
    {
        "Driver batch: %d runs x %d steps (kappa=%.4g, %d force points)": {
            "ru": "Пакет драйверов: %d прогонов x %d шагов (kappa=%.4g, %d силовых точек)",
        },
        "Continuation threshold at t=0 on side %s (weight %.4g)": {
            "ru": "Порог продолжения при t=0 со стороны %s (вес %.4g)",
        },
        "%d of %d runs stopped at the continuation threshold": {
            "ru": "%d из %d прогонов остановлены на пороге продолжения",
        },
    }
)

DEFAULT_COLLISION_FACTOR = 3.0
DEFAULT_MICRO_GAP_LOG = -12.0


@dataclass(frozen=True)
class MergeEvent:
    """Same-side force points ``inner`` and ``outer`` became one at ``time``."""

    time: float
    side: Side
    inner: int
    outer: int


@dataclass(frozen=True)
class DriverPath:
    params: SleParams
    dt: float
    W: np.ndarray
    V_left: np.ndarray
    V_right: np.ndarray
    threshold_time: Optional[float] = None
    merged_groups: Tuple[MergeEvent, ...] = ()
    collision: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=bool))

    @property
    def n_steps(self) -> int:
        return len(self.W) - 1

    @property
    def times(self) -> np.ndarray:
        return self.dt * np.arange(len(self.W))

    @property
    def T(self) -> float:
        return self.dt * self.n_steps

    @property
    def V(self) -> Dict[str, np.ndarray]:
        columns = {f"V_{i + 1}L": row for i, row in enumerate(self.V_left)}
        columns.update({f"V_{i + 1}R": row for i, row in enumerate(self.V_right)})
        return columns

    def ordering_holds(self) -> bool:
        ok = True
        if len(self.V_left):
            ok &= bool(np.all(self.V_left[0] <= self.W))
            ok &= bool(np.all(np.diff(self.V_left, axis=1) <= 0))
        if len(self.V_right):
            ok &= bool(np.all(self.W <= self.V_right[0]))
            ok &= bool(np.all(np.diff(self.V_right, axis=1) >= 0))
        return ok


@dataclass
class DriverBatch:
    """Lock-step simulation of many runs of the same parameters.

    Arrays are indexed ``[run, ..., step]``; runs that reached the
    continuation threshold keep their last values after ``threshold_index``.
    """

    params: SleParams
    dt: float
    W: np.ndarray
    V_left: np.ndarray
    V_right: np.ndarray
    threshold_index: np.ndarray
    collision: np.ndarray
    merges: List[List[MergeEvent]]

    @property
    def runs(self) -> int:
        return self.W.shape[0]

    @property
    def n_steps(self) -> int:
        return self.W.shape[1] - 1

    @property
    def times(self) -> np.ndarray:
        return self.dt * np.arange(self.n_steps + 1)

    def valid_steps(self) -> np.ndarray:
        """Number of simulated steps per run."""
        return np.where(self.threshold_index >= 0, self.threshold_index, self.n_steps)

    def path(self, index: int) -> DriverPath:
        end = int(self.valid_steps()[index])
        threshold = None if self.threshold_index[index] < 0 else self.dt * int(self.threshold_index[index])
        return DriverPath(
            params=self.params,
            dt=self.dt,
            W=self.W[index, : end + 1].copy(),
            V_left=self.V_left[index, :, : end + 1].copy(),
            V_right=self.V_right[index, :, : end + 1].copy(),
            threshold_time=threshold,
            merged_groups=tuple(self.merges[index]),
            collision=self.collision[index, :end].copy(),
        )


def _noise(seeds: Sequence[SeedLike], n_steps: int) -> Tuple[np.ndarray, np.ndarray]:
    xi = np.empty((len(seeds), n_steps))
    u = np.empty((len(seeds), n_steps))
    for i, seed in enumerate(seeds):
        rng = make_rng(seed)
        xi[i] = rng.standard_normal(n_steps)
        u[i] = rng.random(n_steps)
    return xi, u


def _initial_points(params: SleParams, micro_gap_log: float) -> Tuple[np.ndarray, np.ndarray]:
    left = np.asarray(params.points_l, dtype=float)
    right = np.asarray(params.points_r, dtype=float)
    if left.size and right.size and left[0] == 0.0 and right[0] == 0.0:
        half = 0.5 * math.exp(micro_gap_log)
        if left.size > 1:
            half = min(half, 0.5 * abs(left[1]))
        if right.size > 1:
            half = min(half, 0.5 * right[1])
        left[0], right[0] = -half, half
    return left, right


def _immediate_threshold(params: SleParams) -> Optional[Side]:
    if params.points_l and params.points_l[0] == 0.0 and params.weights_l[0] <= CONTINUATION_THRESHOLD:
        return "L"
    if params.points_r and params.points_r[0] == 0.0 and params.weights_r[0] <= CONTINUATION_THRESHOLD:
        return "R"
    return None


def _record_merges(before: np.ndarray, after: np.ndarray, idx: np.ndarray, side: Side, time: float, merges) -> None:
    if after.shape[1] < 2:
        return
    fresh = (after[:, 1:] == after[:, :-1]) & ~(before[:, 1:] == before[:, :-1])
    for row, j in np.argwhere(fresh):
        merges[idx[row]].append(MergeEvent(time=time, side=side, inner=int(j), outer=int(j + 1)))


def simulate_driver_batch(
    params: SleParams,
    dt: float,
    T: float,
    seeds: Sequence[SeedLike],
    *,
    collision_factor: float = DEFAULT_COLLISION_FACTOR,
    micro_gap_log: float = DEFAULT_MICRO_GAP_LOG,
) -> DriverBatch:
    """Run ``len(seeds)`` independent drivers; run ``i`` only reads the stream of ``seeds[i]``."""

    if dt <= 0 or T < 0:
        raise ParameterDomainError("dt must be positive and T non-negative")
    kappa = params.kappa
    sk, sdt = math.sqrt(kappa), math.sqrt(dt)
    n_steps = int(round(T / dt))
    runs = len(seeds)
    wl = np.asarray(params.weights_l, dtype=float)
    wr = np.asarray(params.weights_r, dtype=float)
    kl, kr = wl.size, wr.size
    cut = collision_factor * math.sqrt(kappa * dt)

    logger.debug(
        "Driver batch: %d runs x %d steps (kappa=%.4g, %d force points)",
        runs,
        n_steps,
        kappa,
        kl + kr,
    )

    xl0, xr0 = _initial_points(params, micro_gap_log)
    W = np.zeros((runs, n_steps + 1))
    VL = np.zeros((runs, kl, n_steps + 1))
    VR = np.zeros((runs, kr, n_steps + 1))
    VL[:, :, 0] = xl0
    VR[:, :, 0] = xr0
    collision = np.zeros((runs, n_steps), dtype=bool)
    threshold_index = np.full(runs, -1, dtype=int)
    merges: List[List[MergeEvent]] = [[] for _ in range(runs)]

    w = np.zeros(runs)
    vl = np.tile(xl0, (runs, 1))
    vr = np.tile(xr0, (runs, 1))
    alive = np.ones(runs, dtype=bool)

    side = _immediate_threshold(params)
    if side is not None:
        weight = params.weights_l[0] if side == "L" else params.weights_r[0]
        logger.info("Continuation threshold at t=0 on side %s (weight %.4g)", side, weight)
        threshold_index[:] = 0
        alive[:] = False

    xi, u = _noise(seeds, n_steps) if alive.any() else (None, None)

    for k in range(n_steps):
        idx = np.flatnonzero(alive)
        if idx.size == 0:
            W[:, k + 1 :] = w[:, None]
            VL[:, :, k + 1 :] = vl[:, :, None]
            VR[:, :, k + 1 :] = vr[:, :, None]
            break
        w_, l_, r_ = w[idx], vl[idx], vr[idx]
        x, uu = xi[idx, k], u[idx, k]
        m = idx.size

        group_r = r_ == r_[:, :1] if kr else np.zeros((m, 0), dtype=bool)
        group_l = l_ == l_[:, :1] if kl else np.zeros((m, 0), dtype=bool)
        gap_r = r_[:, 0] - w_ if kr else np.full(m, np.inf)
        gap_l = w_ - l_[:, 0] if kl else np.full(m, np.inf)

        dist_r = np.maximum(r_ - w_[:, None], cut)
        dist_l = np.maximum(w_[:, None] - l_, cut)
        drift_r = -wr / dist_r
        drift_l = wl / dist_l
        total = drift_r.sum(axis=1) + drift_l.sum(axis=1)

        w_new = w_ + total * dt + sk * sdt * x
        r_new = r_ + 2.0 * dt / dist_r
        l_new = l_ - 2.0 * dt / dist_l

        use_r = (gap_r < cut) & (gap_r <= gap_l)
        use_l = (gap_l < cut) & ~use_r
        hit_zero = np.zeros(m, dtype=bool)
        group_weight = np.zeros(m)

        if use_r.any():
            j = use_r
            rho = group_r[j] @ wr
            X = gap_r[j] / sk
            other = total[j] - (drift_r[j] * group_r[j]).sum(axis=1)
            Z = squared_bessel_step(
                X * X, bessel_dimension(kappa, rho), dt, -x[j], uu[j], drift=-2.0 * X * other / sk
            )
            X_new = np.sqrt(Z)
            inner = r_[j, 0] + 2.0 * (dt / np.maximum(0.5 * (X + X_new), sdt)) / sk
            r_new[j] = np.where(group_r[j], inner[:, None], r_new[j])
            w_new[j] = inner - sk * X_new
            hit_zero[j] = Z == 0.0
            group_weight[j] = rho

        if use_l.any():
            j = use_l
            rho = group_l[j] @ wl
            X = gap_l[j] / sk
            other = total[j] - (drift_l[j] * group_l[j]).sum(axis=1)
            Z = squared_bessel_step(
                X * X, bessel_dimension(kappa, rho), dt, x[j], uu[j], drift=2.0 * X * other / sk
            )
            X_new = np.sqrt(Z)
            inner = l_[j, 0] - 2.0 * (dt / np.maximum(0.5 * (X + X_new), sdt)) / sk
            l_new[j] = np.where(group_l[j], inner[:, None], l_new[j])
            w_new[j] = inner + sk * X_new
            hit_zero[j] = Z == 0.0
            group_weight[j] = rho

        # Same-side points that meet stay together.
        r_new = np.maximum.accumulate(r_new, axis=1)
        l_new = np.minimum.accumulate(l_new, axis=1)
        time = dt * (k + 1)
        _record_merges(r_, r_new, idx, "R", time, merges)
        _record_merges(l_, l_new, idx, "L", time, merges)

        regular = ~(use_r | use_l)
        stop = hit_zero & (group_weight <= CONTINUATION_THRESHOLD)
        if kr:
            over = regular & (w_new > r_new[:, 0])
            weight_r = (r_new == r_new[:, :1]) @ wr
            stop |= over & (weight_r <= CONTINUATION_THRESHOLD)
            w_new = np.where(over, 2.0 * r_new[:, 0] - w_new, w_new)
        if kl:
            over = regular & (w_new < l_new[:, 0])
            weight_l = (l_new == l_new[:, :1]) @ wl
            stop |= over & (weight_l <= CONTINUATION_THRESHOLD)
            w_new = np.where(over, 2.0 * l_new[:, 0] - w_new, w_new)
        if kr:
            w_new = np.minimum(w_new, r_new[:, 0])
        if kl:
            w_new = np.maximum(w_new, l_new[:, 0])

        w[idx], vl[idx], vr[idx] = w_new, l_new, r_new
        collision[idx, k] = use_r | use_l
        if stop.any():
            threshold_index[idx[stop]] = k + 1
            alive[idx[stop]] = False
        W[:, k + 1] = w
        VL[:, :, k + 1] = vl
        VR[:, :, k + 1] = vr

    stopped = int(np.sum(threshold_index >= 0))
    if stopped:
        logger.info("%d of %d runs stopped at the continuation threshold", stopped, runs)
    return DriverBatch(
        params=params,
        dt=dt,
        W=W,
        V_left=VL,
        V_right=VR,
        threshold_index=threshold_index,
        collision=collision,
        merges=merges,
    )


def simulate_driver(
    params: SleParams,
    dt: float,
    T: float,
    seed: SeedLike,
    **options: float,
) -> DriverPath:
    return simulate_driver_batch(params, dt, T, [seed], **options).path(0)


def collision_occupation(driver: DriverPath | DriverBatch) -> float:
    """Fraction of simulated steps spent in the collision regime of some force point."""

    if isinstance(driver, DriverBatch):
        steps = driver.valid_steps()
        mask = np.arange(driver.n_steps)[None, :] < steps[:, None]
        total = int(mask.sum())
        return float(driver.collision[mask].sum() / total) if total else 0.0
    if driver.collision.size == 0:
        return 0.0
    return float(driver.collision.mean())


def zero_driver(dt: float, T: float, kappa: float = 1.0) -> DriverPath:
    """``W = 0`` with no force points; the vertical slit."""

    n_steps = int(round(T / dt))
    return DriverPath(
        params=SleParams.plain(kappa),
        dt=dt,
        W=np.zeros(n_steps + 1),
        V_left=np.zeros((0, n_steps + 1)),
        V_right=np.zeros((0, n_steps + 1)),
        collision=np.zeros(n_steps, dtype=bool),
    )
