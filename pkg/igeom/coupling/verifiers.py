"""Monte-Carlo checks of the martingale and variance structure of the coupling.

Both verifiers split the runs into chunks of independent seed streams; a
``mapper`` with the signature of the builtin ``map`` lets the harness spread
chunks over a worker pool. Results never depend on the chunking.
"""

from __future__ import annotations

import functools
import logging
import math
from dataclasses import dataclass
from typing import Any, Callable, Dict, Iterable, List, Sequence

import numpy as np

from igeom.core import (
    ParameterDomainError,
    Report,
    SeedLike,
    SleParams,
    correlation_stderr,
    mean_stderr,
    normality_pvalue,
    run_seeds,
    variance_stderr,
)
from igeom.sle import forward_driver_batch, simulate_driver_batch
from logging_config import register_log_translations

from .observables import evaluate_h_batch
from .profile import HarmonicProfile

logger = logging.getLogger(__name__)

register_log_translations(
    {
        "Martingale check at z=%s, tau=%g: mean %.4g +- %.3g over %d runs": {
            "ru": "Проверка мартингала в z=%s, tau=%g: среднее %.4g +- %.3g по %d прогонам",
        },
        "Variance check at z=%s, s=%g: ratio %.4g +- %.3g over %d runs": {
            "ru": "Проверка дисперсии в z=%s, s=%g: отношение %.4g +- %.3g по %d прогонам",
        },
        "%s inconclusive: %d of %d runs unusable": {
            "ru": "%s без вывода: %d из %d прогонов непригодны",
        },
        "Chunk %d/%d done": {
            "ru": "Пакет %d/%d готов",
        },
    }
)

Mapper = Callable[..., Iterable[Any]]

MIN_DECREMENT = 0.05
VARIANCE_BAND = (0.85, 1.15)
NORMALITY_LEVEL = 0.01
UNUSABLE_LIMIT = 0.05
DEFAULT_CHUNK = 500


@dataclass(frozen=True)
class ChunkSamples:
    """Per-run samples of one chunk; ``unusable`` counts swallowed, stopped or unfinished runs."""

    first: np.ndarray
    second: np.ndarray
    unusable: int
    runs: int


def _chunks(seed: int, runs: int, chunk: int) -> List[List[np.random.SeedSequence]]:
    return [run_seeds(seed, start, min(chunk, runs - start)) for start in range(0, runs, chunk)]


def _gather(results: Iterable[ChunkSamples], count: int) -> ChunkSamples:
    parts = []
    for index, part in enumerate(results, start=1):
        parts.append(part)
        logger.debug("Chunk %d/%d done", index, count)
    if not parts:
        empty = np.zeros(0)
        return ChunkSamples(empty, empty, 0, 0)
    return ChunkSamples(
        first=np.concatenate([p.first for p in parts]),
        second=np.concatenate([p.second for p in parts]),
        unusable=sum(p.unusable for p in parts),
        runs=sum(p.runs for p in parts),
    )


def _report_params(params: SleParams, z: complex, **extra: Any) -> Dict[str, Any]:
    return {**params.to_dict(), "z": [z.real, z.imag], **extra}


def martingale_samples(
    params: SleParams,
    z: complex,
    capacity_time: float,
    seeds: Sequence[SeedLike],
    *,
    dt: float = 1e-3,
) -> ChunkSamples:
    """``h_tau(z) - h_0(z)`` for the runs in which ``z`` survives to ``tau``."""

    steps = int(round(capacity_time / dt))
    batch = simulate_driver_batch(params, dt, steps * dt, seeds)
    trajectory = forward_driver_batch(batch, z)
    h, _ = evaluate_h_batch(batch, trajectory, HarmonicProfile(params))
    deviation = h[:, steps] - h[:, 0]
    usable = np.isfinite(deviation)
    return ChunkSamples(deviation[usable], np.zeros(0), int((~usable).sum()), batch.runs)


def martingale_test(
    params: SleParams,
    z: complex,
    capacity_time: float,
    runs: int,
    seed: int,
    *,
    dt: float = 1e-3,
    chunk: int = DEFAULT_CHUNK,
    mapper: Mapper = map,
) -> Report:
    """Pass iff the mean change of ``h(z)`` up to capacity time ``tau`` is within 3 standard errors of 0."""

    z = complex(z)
    if z.imag <= 0:
        raise ParameterDomainError("the tracked point must lie in the upper half-plane")
    if capacity_time < 0:
        raise ParameterDomainError("capacity time must be non-negative")
    report_params = _report_params(params, z, capacityTime=capacity_time, dt=dt)
    reference = "h_t(z) is a martingale in t"
    if runs <= 0:
        return Report.empty("martingale", report_params, reference)
    if int(round(capacity_time / dt)) == 0:
        return Report("martingale", report_params, runs, 0.0, 0.0, True, "|mean| <= 3 stderr", reference)

    chunks = _chunks(seed, runs, chunk)
    work = functools.partial(martingale_samples, params, z, capacity_time, dt=dt)
    samples = _gather(mapper(work, chunks), len(chunks))
    estimate = mean_stderr(samples.first)
    inconclusive = samples.unusable > UNUSABLE_LIMIT * samples.runs or estimate.count < 2
    passed = not inconclusive and estimate.within(0.0)
    logger.info(
        "Martingale check at z=%s, tau=%g: mean %.4g +- %.3g over %d runs",
        z,
        capacity_time,
        estimate.mean,
        estimate.stderr,
        estimate.count,
    )
    if inconclusive:
        logger.warning("%s inconclusive: %d of %d runs unusable", "martingale", samples.unusable, samples.runs)
    return Report(
        test="martingale",
        params=report_params,
        runs=samples.runs,
        estimate=estimate.mean,
        stderr=estimate.stderr,
        passed=passed,
        tolerance="|mean| <= 3 stderr",
        reference=reference,
        inconclusive=inconclusive,
        details={"swallowedOrStopped": samples.unusable},
    )


def stop_at_decrement(h: np.ndarray, log_cr: np.ndarray, decrement: float) -> np.ndarray:
    """``h`` at the first time ``log_cr`` has dropped by ``decrement``, linearly interpolated; NaN if never."""

    h = np.atleast_2d(h)
    log_cr = np.atleast_2d(log_cr)
    drop = log_cr[:, :1] - log_cr
    reached = np.nan_to_num(drop, nan=-np.inf) >= decrement
    hit = reached.any(axis=1)
    k = np.argmax(reached, axis=1)
    out = np.full(h.shape[0], np.nan)
    rows = np.flatnonzero(hit & (k > 0))
    if rows.size:
        k = k[rows]
        lo, hi = drop[rows, k - 1], drop[rows, k]
        alpha = (decrement - lo) / (hi - lo)
        out[rows] = h[rows, k - 1] + alpha * (h[rows, k] - h[rows, k - 1])
    return out


def decrement_samples(
    params: SleParams,
    z: complex,
    decrement: float,
    seeds: Sequence[SeedLike],
    *,
    dt: float = 1e-3,
    max_time: float = 2.0,
) -> ChunkSamples:
    """Increments of ``h(z)`` over two successive log conformal radius drops of size ``decrement``."""

    batch = simulate_driver_batch(params, dt, max_time, seeds)
    trajectory = forward_driver_batch(batch, z)
    h, log_cr = evaluate_h_batch(batch, trajectory, HarmonicProfile(params))
    first = stop_at_decrement(h, log_cr, decrement)
    second = stop_at_decrement(h, log_cr, 2.0 * decrement)
    usable = np.isfinite(first) & np.isfinite(second)
    start = h[usable, 0]
    return ChunkSamples(
        first=first[usable] - start,
        second=second[usable] - first[usable],
        unusable=int((~usable).sum()),
        runs=batch.runs,
    )


def fitted_coefficient(levels: Sequence[float], variances: Sequence[float]) -> float:
    """Least-squares slope through the origin of variance against log conformal radius drop."""

    s = np.asarray(levels, dtype=float)
    v = np.asarray(variances, dtype=float)
    return float(np.dot(s, v) / np.dot(s, s))


def variance_vs_logCR_test(
    params: SleParams,
    z: complex,
    cr_decrement: float,
    runs: int,
    seed: int,
    *,
    dt: float = 1e-3,
    max_time: float = 2.0,
    chunk: int = DEFAULT_CHUNK,
    mapper: Mapper = map,
) -> Report:
    """``Var[h_{tau_s}(z) - h_0(z)] / s`` against 1, with normality and independent increments."""

    z = complex(z)
    if z.imag <= 0:
        raise ParameterDomainError("the tracked point must lie in the upper half-plane")
    if cr_decrement < MIN_DECREMENT:
        raise ParameterDomainError(f"the log conformal radius decrement must be at least {MIN_DECREMENT}")
    report_params = _report_params(params, z, crDecrement=cr_decrement, dt=dt, maxTime=max_time)
    reference = "h(z) is a Brownian motion in minus log conformal radius"
    tolerance = f"ratio in [{VARIANCE_BAND[0]}, {VARIANCE_BAND[1]}], normality p >= {NORMALITY_LEVEL}"
    if runs <= 0:
        return Report.empty("varianceCR", report_params, reference)

    chunks = _chunks(seed, runs, chunk)
    work = functools.partial(decrement_samples, params, z, cr_decrement, dt=dt, max_time=max_time)
    samples = _gather(mapper(work, chunks), len(chunks))
    used = samples.first.size
    inconclusive = samples.unusable > UNUSABLE_LIMIT * samples.runs or used < 20
    if used < 4:
        logger.warning("%s inconclusive: %d of %d runs unusable", "varianceCR", samples.unusable, samples.runs)
        return Report(
            "varianceCR", report_params, samples.runs, None, None, False, tolerance, reference, inconclusive=True
        )

    variance, variance_se = variance_stderr(samples.first)
    ratio, ratio_se = variance / cr_decrement, variance_se / cr_decrement
    second_variance, _ = variance_stderr(samples.second)
    total_variance, _ = variance_stderr(samples.first + samples.second)
    p_value = normality_pvalue(samples.first)
    correlation, correlation_se = correlation_stderr(samples.first, samples.second)
    coefficient = fitted_coefficient((cr_decrement, 2.0 * cr_decrement), (variance, total_variance))

    normal = not (p_value < NORMALITY_LEVEL)
    independent = not (abs(correlation) > 3.0 * correlation_se)
    in_band = VARIANCE_BAND[0] <= ratio <= VARIANCE_BAND[1]
    passed = not inconclusive and in_band and normal and independent

    logger.info(
        "Variance check at z=%s, s=%g: ratio %.4g +- %.3g over %d runs", z, cr_decrement, ratio, ratio_se, used
    )
    if inconclusive:
        logger.warning("%s inconclusive: %d of %d runs unusable", "varianceCR", samples.unusable, samples.runs)
    return Report(
        test="varianceCR",
        params=report_params,
        runs=samples.runs,
        estimate=ratio,
        stderr=ratio_se,
        passed=passed,
        tolerance=tolerance,
        reference=reference,
        inconclusive=inconclusive,
        details={
            "varianceRatio": ratio,
            "secondRatio": second_variance / cr_decrement,
            "normalityP": p_value,
            "incrementCorrelation": correlation,
            "incrementCorrelationStderr": correlation_se,
            "fittedCoefficient": coefficient,
            "sqrtKappa": math.sqrt(params.kappa),
            "unreached": samples.unusable,
        },
    )
