"""Experiment registry: validate a document, run it, write reports and a manifest.

Every experiment reads its parameters up front (so a bad document fails
before anything is written), then maps independent trials over the worker
pool and reduces the results in trial order.
"""

from __future__ import annotations

import csv
import functools
import logging
import math
import time
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.spatial import cKDTree

import igeom
from config import COLLISION_FACTOR, CONFORMAL_TOL, JOBS, OUTPUT_DIR, RUNS_DATABASE_URL, SEED_STRIDE
from igeom.core import (
    IDENTITY_TOLERANCE,
    ConfigValidationError,
    OrderingError,
    Report,
    SleParams,
    derive_constants,
    dual_constants,
    is_strictly_decreasing,
    ks_two_sample,
    pooled_difference,
    run_seed,
    run_seeds,
)
from igeom.coupling import martingale_test, variance_vs_logCR_test
from igeom.flowline import (
    CONE_ANGLE,
    area_fraction,
    count_transversal_crossings,
    default_max_length,
    detect_first_crossing,
    detect_merge,
    directed_hausdorff,
    fan,
    light_cone,
    trace_many,
    write_light_cone_csv,
    write_paths_csv,
)
from igeom.gff import TriangulatedGrid, gaussian_conditioning, markov_decomposition, square_map
from igeom.sle import (
    HitEstimate,
    collision_occupation,
    count_boundary_hits,
    extract_curve,
    loewner_forward,
    simulate_driver_batch,
    zero_driver,
)
from logging_config import register_log_translations

from .config import ExperimentConfig, ParameterReader
from .fields import FieldSetup, as_point, hit_interval, read_field_setup, read_sle_params
from .manifest import RunManifest, record_manifest
from .pool import WorkerPool
from .render import render_light_cone, render_paths
from .reports import binomial_report, exact_report, overall_pass, summarize, write_report

logger = logging.getLogger(__name__)

register_log_translations(
    {
        "Experiment %s started (seed %d, %d runs, %d jobs) -> %s": {
            "ru": "Эксперимент %s запущен (seed %d, %d прогонов, %d процессов) -> %s",
        },
        "Experiment %s finished in %.1fs: %s": {
            "ru": "Эксперимент %s завершён за %.1f с: %s",
        },
        "Check %s failed: estimate %s (tolerance %s)": {
            "ru": "Проверка %s не пройдена: оценка %s (допуск %s)",
        },
        "Check %s passed: estimate %s": {
            "ru": "Проверка %s пройдена: оценка %s",
        },
        "Check %s has no data": {
            "ru": "Для проверки %s нет данных",
        },
    }
)

SQUARE_BOX = (-1.0, -1.0, 1.0, 1.0)
DRIVER_CHUNK = 500
HIT_CHUNK = 100
# merges must share at least this many grid spacings of path
MERGE_TAIL_CELLS = 4.0
# crossing pairs closer than this many spacings are one grid-scale touch
TOUCH_CELLS = 2.0


@dataclass
class ExperimentContext:
    config: ExperimentConfig
    settings: Dict[str, Any]
    out_dir: Path
    pool: WorkerPool
    manifest: RunManifest
    reports: List[Report] = field(default_factory=list)

    @property
    def runs(self) -> int:
        return self.config.runs

    @property
    def seed(self) -> int:
        return self.config.seed

    def trial_seeds(self, count: Optional[int] = None, offset: int = 0) -> list:
        count = self.runs if count is None else count
        return [run_seed(self.seed, offset + i) for i in range(count)]

    def chunks(self, size: int, root: Optional[int] = None) -> list:
        root = self.seed if root is None else root
        return [run_seeds(root, start, min(size, self.runs - start)) for start in range(0, self.runs, size)]

    def output(self, name: str) -> Path:
        return self.out_dir / name

    def keep(self, path: Path, kind: Optional[str] = None) -> Path:
        self.manifest.add_output(path, kind)
        return path

    def report(self, report: Report) -> Report:
        self.reports.append(report)
        return report


@dataclass(frozen=True)
class Experiment:
    name: str
    read: Callable[[ExperimentConfig], Dict[str, Any]]
    execute: Callable[[ExperimentContext], None]
    reference: str = ""


def _write_rows(path: Path, header: Sequence[str], rows: Sequence[Sequence[Any]]) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(header)
        writer.writerows(rows)
    return path


# constants ----------------------------------------------------------------


def _read_constants(config: ExperimentConfig) -> Dict[str, Any]:
    reader = config.reader()
    return {
        "kappaCount": reader.integer("kappaCount", 100, minimum=1),
        "kappaMax": reader.number("kappaMax", 16.0, positive=True),
        "mapPoints": reader.numbers("mapPoints", [-5.0, -1.0, -0.5, 0.3, 1.2, 4.0]),
    }


def _run_constants(ctx: ExperimentContext) -> None:
    s = ctx.settings
    kappas = np.linspace(s["kappaMax"] / s["kappaCount"], s["kappaMax"], s["kappaCount"])
    rows, worst, worst_dual = [], 0.0, 0.0
    for kappa in kappas:
        consts = derive_constants(float(kappa))
        dual = dual_constants(float(kappa))
        worst = max(worst, consts.winding_residual, consts.full_revolution_residual)
        worst_dual = max(worst_dual, abs(dual.chi + consts.chi), abs(dual.kappa_prime - kappa))
        rows.append(
            (kappa, consts.lam, consts.lam_prime, consts.chi, consts.winding_residual, consts.full_revolution_residual)
        )
    header = ("kappa", "lambda", "lambdaPrime", "chi", "windingResidual", "revolutionResidual")
    ctx.keep(_write_rows(ctx.output("constants.csv"), header, rows))
    counted = {"kappaCount": s["kappaCount"]}
    ctx.report(
        exact_report(
            "constantIdentities",
            counted,
            worst,
            IDENTITY_TOLERANCE,
            "2 pi chi = (4 - kappa) lambda, lambda' = lambda - pi chi / 2",
        )
    )
    ctx.report(exact_report("dualConstants", counted, worst_dual, 1e-9, "chi(16 / kappa) = -chi(kappa)"))

    anchor = square_map()
    errors = []
    for x in s["mapPoints"]:
        z = anchor.forward(x)
        errors.append(abs(z - anchor.quadrature_forward(x)))
        errors.append(abs(anchor.inverse(z) - x) / max(1.0, abs(x)))
    ctx.report(
        exact_report(
            "squareMap",
            {"points": list(s["mapPoints"])},
            max(errors),
            CONFORMAL_TOL,
            "Schwarz-Christoffel map of H onto the square",
        )
    )


# Loewner flow for the zero driver -------------------------------------------


def _read_loewner_zero(config: ExperimentConfig) -> Dict[str, Any]:
    reader = config.reader()
    z = reader.point("z", [0.0, 1.0])
    if z.imag <= 0:
        raise ConfigValidationError(reader.path_of("z"), "must lie in the upper half-plane")
    return {
        "dt": reader.number("dt", 1e-4, positive=True),
        "T": reader.number("T", 1.0, positive=True),
        "z": z,
        "tipOffset": reader.number("tipOffset", 0.01, positive=True),
        "stride": reader.integer("stride", 100, minimum=1),
    }


def _run_loewner_zero(ctx: ExperimentContext) -> None:
    s = ctx.settings
    driver = zero_driver(s["dt"], s["T"])
    trajectory = loewner_forward(driver, s["z"])
    t = trajectory.times
    exact = np.sqrt(s["z"] ** 2 + 4.0 * t)
    exact = np.where(exact.imag < 0, -exact, exact)
    map_error = float(np.max(np.abs(trajectory.g - exact)))
    exact_log_cr = np.log(2.0 * exact.imag) - np.log(np.abs(s["z"] / exact))
    cr_error = float(np.max(np.abs(trajectory.log_conformal_radius() - exact_log_cr)))
    curve = extract_curve(driver, s["tipOffset"], stride=s["stride"])
    curve_error = float(np.max(np.abs(curve.vertices - 2j * np.sqrt(curve.times))))
    ctx.keep(
        _write_rows(
            ctx.output("curve.csv"),
            ("t", "x", "y"),
            [(t_, v.real, v.imag) for t_, v in zip(curve.times, curve.vertices)],
        )
    )
    params = {"dt": s["dt"], "T": s["T"], "z": as_point(s["z"]), "tipOffset": s["tipOffset"]}
    ctx.report(exact_report("zeroDriverMap", params, map_error, 1e-6, "g_t(z) = sqrt(z^2 + 4t)"))
    ctx.report(exact_report("zeroDriverConformalRadius", params, cr_error, 1e-6, "CR = 2 Im g / |g'|"))
    ctx.report(exact_report("zeroDriverCurve", params, curve_error, 2.0 * s["tipOffset"], "trace is 2i sqrt(t)"))


# driver sanity --------------------------------------------------------------


def _terminal_w(params: SleParams, dt: float, T: float, seeds: Sequence[Any]) -> np.ndarray:
    return simulate_driver_batch(params, dt, T, seeds, collision_factor=COLLISION_FACTOR).W[:, -1]


def _read_driver_sanity(config: ExperimentConfig) -> Dict[str, Any]:
    reader = config.reader()
    return {
        "kappa": reader.number("kappa", 2.0, positive=True),
        "dt": reader.number("dt", 1e-3, positive=True),
        "T": reader.number("T", 1.0, positive=True),
        "forcePoint": reader.number("forcePoint", 1.0, minimum=0.0),
        "scaleWeight": reader.number("scaleWeight", 1.0, minimum=-1.9),
        "scaleFactor": reader.number("scaleFactor", 2.0, positive=True),
    }


def _run_driver_sanity(ctx: ExperimentContext) -> None:
    s = ctx.settings
    plain = SleParams.plain(s["kappa"])
    zero_weight = SleParams.single_right(s["kappa"], 0.0, s["forcePoint"])
    at_tip = SleParams.single_right(s["kappa"], s["scaleWeight"], 0.0)
    c = s["scaleFactor"]
    params = {**s}
    if ctx.runs == 0:
        for name in ("driverVariance", "zeroWeightDriver", "scaleInvariance"):
            ctx.report(Report.empty(name, params))
        return

    def terminal(p: SleParams, T: float, root: int) -> np.ndarray:
        work = functools.partial(_terminal_w, p, s["dt"], T)
        return np.concatenate(ctx.pool.run(work, ctx.chunks(DRIVER_CHUNK, root=root)))

    plain_w = terminal(plain, s["T"], ctx.seed)
    other_w = terminal(zero_weight, s["T"], ctx.seed + 1)
    ratio = float(np.var(plain_w, ddof=1) / (s["kappa"] * s["T"]))
    ratio_se = ratio * math.sqrt(2.0 / (plain_w.size - 1)) if plain_w.size > 1 else math.nan
    ctx.report(
        Report(
            "driverVariance",
            params,
            plain_w.size,
            ratio,
            ratio_se,
            0.95 <= ratio <= 1.05,
            "in [0.95, 1.05]",
            "W = sqrt(kappa) B without force points",
        )
    )
    statistic, critical = ks_two_sample(plain_w, other_w)
    ctx.report(
        Report(
            "zeroWeightDriver",
            params,
            other_w.size,
            statistic,
            None,
            statistic < critical,
            f"KS < {critical:.4g}",
            "a weight-0 force point exerts no drift",
            details={"critical": critical},
        )
    )

    # force point at 0+: W_{c^2 t} / c has the law of W_t
    short_w = terminal(at_tip, s["T"], ctx.seed + 2)
    long_w = terminal(at_tip, c * c * s["T"], ctx.seed + 3) / c
    statistic, critical = ks_two_sample(short_w, long_w)
    ctx.report(
        Report(
            "scaleInvariance",
            params,
            short_w.size,
            statistic,
            None,
            statistic < critical,
            f"KS < {critical:.4g}",
            "a single force point at 0+ keeps Brownian scaling",
            details={"critical": critical, "c": c},
        )
    )
    rows = list(zip(plain_w, other_w, short_w, long_w))
    ctx.keep(_write_rows(ctx.output("terminal_W.csv"), ("plain", "zeroWeight", "scaleShort", "scaleLong"), rows))


# boundary hitting -----------------------------------------------------------


def _read_boundary_hit(config: ExperimentConfig) -> Dict[str, Any]:
    reader = config.reader()
    weights = reader.numbers("weights", [-1.5, -0.5], length=2)
    if not weights[0] < weights[1]:
        raise ConfigValidationError(reader.path_of("weights"), "the first weight must be the smaller")
    interval = hit_interval(reader)
    if interval[0] <= 0:
        raise ConfigValidationError(reader.path_of("interval"), "must lie right of the force point at 0+")
    return {
        "kappa": reader.number("kappa", 2.0, positive=True),
        "weights": weights,
        "interval": interval,
        "proximity": reader.number("proximity", 0.05, positive=True),
        "T": reader.number("T", 5.0, positive=True),
        "dt": reader.number("dt", 1e-3, positive=True),
        "stride": reader.integer("stride", 10, minimum=1),
        "control": bool(reader.raw("control", True)),
        "minGap": reader.number("minGap", 0.15),
        "maxAbove": reader.number("maxAbove", 0.05),
    }


def _hits(ctx: ExperimentContext, params: SleParams) -> HitEstimate:
    s = ctx.settings
    work = functools.partial(
        count_boundary_hits,
        params,
        s["interval"],
        s["proximity"],
        T=s["T"],
        dt=s["dt"],
        stride=s["stride"],
        collision_factor=COLLISION_FACTOR,
    )
    total = HitEstimate(0, 0)
    for part in ctx.pool.map(work, ctx.chunks(HIT_CHUNK)):
        total = total + part
    return total


def _run_boundary_hit(ctx: ExperimentContext) -> None:
    s = ctx.settings
    low, high = s["weights"]
    params = {k: (list(v) if isinstance(v, tuple) else v) for k, v in s.items()}
    if ctx.runs == 0:
        ctx.report(Report.empty("boundaryHit", params))
        return
    below = _hits(ctx, SleParams.single_right(s["kappa"], low, 0.0))
    above = _hits(ctx, SleParams.single_right(s["kappa"], high, 0.0))
    gap = below.estimate - above.estimate
    gap_se = math.hypot(below.stderr, above.stderr)
    rows = [(low, below.hits, below.runs, below.estimate), (high, above.hits, above.runs, above.estimate)]
    ctx.report(
        Report(
            test="boundaryHit",
            params=params,
            runs=below.runs,
            estimate=gap,
            stderr=gap_se,
            passed=gap >= s["minGap"] and above.estimate <= s["maxAbove"],
            tolerance=f"gap >= {s['minGap']}, upper estimate <= {s['maxAbove']}",
            reference="rho <= kappa/2 - 2 hits the boundary, rho >= kappa/2 - 2 avoids it",
            details={"belowThreshold": below.estimate, "aboveThreshold": above.estimate},
        )
    )
    if s["control"]:
        zero = _hits(ctx, SleParams.single_right(s["kappa"], 0.0, 0.0))
        plain = _hits(ctx, SleParams.plain(s["kappa"]))
        diff, se = pooled_difference(zero.estimate, zero.runs, plain.estimate, plain.runs)
        rows += [(0.0, zero.hits, zero.runs, zero.estimate), (math.nan, plain.hits, plain.runs, plain.estimate)]
        ctx.report(
            Report(
                "boundaryHitControl",
                params,
                zero.runs,
                diff,
                se,
                abs(diff) <= 2.0 * se if se > 0 else diff == 0,
                "|difference| <= 2 pooled stderr",
                "rho = 0 is plain SLE",
            )
        )
    ctx.keep(_write_rows(ctx.output("hits.csv"), ("weight", "hits", "runs", "estimate"), rows))


# reflection -----------------------------------------------------------------


def _occupation(params: SleParams, dt: float, T: float, seeds: Sequence[Any]) -> Tuple[float, int]:
    batch = simulate_driver_batch(params, dt, T, seeds, collision_factor=COLLISION_FACTOR)
    return collision_occupation(batch), int(batch.valid_steps().sum())


def _read_reflection(config: ExperimentConfig) -> Dict[str, Any]:
    reader = config.reader()
    dts = reader.numbers("dts", [1e-3, 1e-4, 1e-5])
    if len(dts) < 2 or any(dt <= 0 for dt in dts):
        raise ConfigValidationError(reader.path_of("dts"), "needs at least two positive steps")
    return {
        "sle": read_sle_params(reader, default={"kappa": 2.0, "weightsR": [-1.0], "pointsR": [0.0]}),
        "dts": tuple(sorted(dts, reverse=True)),
        "T": reader.number("T", 0.5, positive=True),
    }


def _run_reflection(ctx: ExperimentContext) -> None:
    s = ctx.settings
    params = {**s["sle"].to_dict(), "dts": list(s["dts"]), "T": s["T"]}
    if ctx.runs == 0:
        ctx.report(Report.empty("reflection", params))
        return
    fractions = []
    for dt in s["dts"]:
        parts = ctx.pool.run(functools.partial(_occupation, s["sle"], dt, s["T"]), ctx.chunks(max(1, DRIVER_CHUNK // 50)))
        steps = sum(n for _, n in parts)
        fractions.append(sum(f * n for f, n in parts) / steps if steps else math.nan)
    ctx.keep(_write_rows(ctx.output("occupation.csv"), ("dt", "collisionOccupation"), list(zip(s["dts"], fractions))))
    ctx.report(
        Report(
            "reflection",
            params,
            ctx.runs,
            fractions[-1],
            None,
            is_strictly_decreasing(fractions),
            "strictly decreasing in dt",
            "instantaneous reflection of W off its force points",
            details={"fractions": fractions},
        )
    )


# coupling -------------------------------------------------------------------


def _read_martingale(config: ExperimentConfig) -> Dict[str, Any]:
    reader = config.reader()
    cases = reader.raw("cases", [{"sle": {"kappa": 2.0}, "z": [0.0, 1.0]}])
    if not isinstance(cases, list) or not cases:
        raise ConfigValidationError(reader.path_of("cases"), "must be a non-empty list")
    parsed = []
    for index, case in enumerate(cases):
        if not isinstance(case, dict):
            raise ConfigValidationError(f"{reader.path_of('cases')}[{index}]", "must be an object")
        sub = ParameterReader(case, f"{reader.path_of('cases')}[{index}]")
        z = sub.point("z", [0.0, 1.0])
        if z.imag <= 0:
            raise ConfigValidationError(sub.path_of("z"), "must lie in the upper half-plane")
        parsed.append((read_sle_params(sub), z))
    return {
        "cases": parsed,
        "capacityTime": reader.number("capacityTime", 0.1, minimum=0.0),
        "dt": reader.number("dt", 1e-3, positive=True),
    }


def _run_martingale(ctx: ExperimentContext) -> None:
    s = ctx.settings
    for params, z in s["cases"]:
        ctx.report(
            martingale_test(params, z, s["capacityTime"], ctx.runs, ctx.seed, dt=s["dt"], mapper=ctx.pool.map)
        )


def _read_variance(config: ExperimentConfig) -> Dict[str, Any]:
    reader = config.reader()
    z = reader.point("z", [0.0, 1.0])
    if z.imag <= 0:
        raise ConfigValidationError(reader.path_of("z"), "must lie in the upper half-plane")
    return {
        "sle": read_sle_params(reader),
        "z": z,
        "crDecrement": reader.number("crDecrement", 0.2, minimum=0.05),
        "dt": reader.number("dt", 1e-3, positive=True),
        "maxTime": reader.number("maxTime", 2.0, positive=True),
    }


def _run_variance(ctx: ExperimentContext) -> None:
    s = ctx.settings
    ctx.report(
        variance_vs_logCR_test(
            s["sle"],
            s["z"],
            s["crDecrement"],
            ctx.runs,
            ctx.seed,
            dt=s["dt"],
            max_time=s["maxTime"],
            mapper=ctx.pool.map,
        )
    )


# flow-line trials -------------------------------------------------------------


def _monotonicity_trial(setup: FieldSetup, start: complex, theta1: float, theta2: float, seed: Any) -> bool:
    field = setup.build(seed)
    start = setup.snap_inside(start)
    a, b = trace_many(field, [start, start], [theta1, theta2], setup.step, default_max_length(field.grid))
    return detect_first_crossing(a, b) is not None


def _merge_trial(setup: FieldSetup, starts: Tuple[complex, complex], theta: float, seed: Any) -> Tuple[bool, bool]:
    field = setup.build(seed)
    inside = [setup.snap_inside(p) for p in starts]
    a, b = trace_many(field, inside, [theta, theta], setup.step, default_max_length(field.grid))
    tree = cKDTree(np.column_stack([b.points.real, b.points.imag]))
    closest, _ = tree.query(np.column_stack([a.points.real, a.points.imag]))
    close = bool(np.min(closest) <= field.grid.spacing)
    eps = 2.0 * field.grid.spacing
    tail = MERGE_TAIL_CELLS * field.grid.spacing
    merged = detect_merge(a, b, eps, min_tail=tail) is not None or detect_merge(b, a, eps, min_tail=tail) is not None
    return close, merged


def _cross_trial(setup: FieldSetup, starts: Tuple[complex, complex], theta1: float, theta2: float, seed: Any) -> int:
    """Transversal crossings of the theta1 line (started at or right of the other) with the theta2 line."""

    if not theta1 > theta2:
        raise OrderingError(f"cross needs theta1 > theta2, got {theta1} and {theta2}")
    if starts[0].real < starts[1].real:
        raise OrderingError(f"the theta1 line must start at or right of the theta2 line, got {starts[0]} and {starts[1]}")
    field = setup.build(seed)
    inside = [setup.snap_inside(p) for p in starts]
    a, b = trace_many(field, inside, [theta1, theta2], setup.step, default_max_length(field.grid))
    return count_transversal_crossings(a, b, TOUCH_CELLS * field.grid.spacing)


def _duality_trial(
    setup: FieldSetup,
    start: complex,
    thetas: Tuple[float, ...],
    iterations: int,
    seed_stride: int,
    seed: Any,
) -> Tuple[float, bool]:
    field = setup.build(seed)
    max_len = default_max_length(field.grid)
    cone = light_cone(field, start, iterations, setup.step, seed_stride=seed_stride)
    worst = 0.0
    for line in trace_many(field, [start] * len(thetas), list(thetas), setup.step, max_len):
        worst = max(worst, directed_hausdorff(line, cone.points, b_is_polyline=False))
    extremes = trace_many(field, [start, start], [CONE_ANGLE, -CONE_ANGLE], setup.step, max_len)
    exact = all(np.array_equal(p.points, q.points) for p, q in zip(cone.boundary_paths(), extremes))
    return worst / field.grid.spacing, exact


def _fan_area_trial(setup: FieldSetup, angle_count: int, seed: Any) -> float:
    field = setup.build(seed)
    return area_fraction(fan(field, setup.bottom_start(), angle_count, setup.step), field.grid)


def _read_monotonicity(config: ExperimentConfig) -> Dict[str, Any]:
    reader = config.reader()
    theta1, theta2 = reader.number("theta1", -math.pi / 4), reader.number("theta2", math.pi / 4)
    if not theta1 < theta2:
        raise ConfigValidationError(reader.path_of("theta1"), "must be below theta2")
    setup = read_field_setup(reader)
    return {
        "field": setup,
        "start": reader.point("start", [0.0, -1.0]),
        "theta1": theta1,
        "theta2": theta2,
        "maxRate": reader.number("maxRate", 0.02, minimum=0.0, maximum=1.0),
    }


def _run_monotonicity(ctx: ExperimentContext) -> None:
    s = ctx.settings
    params = {"field": s["field"].to_dict(), "start": as_point(s["start"]), "theta1": s["theta1"], "theta2": s["theta2"]}
    work = functools.partial(_monotonicity_trial, s["field"], s["start"], s["theta1"], s["theta2"])
    crossed = ctx.pool.run(work, ctx.trial_seeds())
    ctx.keep(_write_rows(ctx.output("trials.csv"), ("run", "crossed"), [(i, int(c)) for i, c in enumerate(crossed)]))
    rate = sum(crossed) / len(crossed) if crossed else math.nan
    ctx.report(
        binomial_report(
            "monotonicity",
            params,
            sum(crossed),
            len(crossed),
            passed=bool(crossed) and rate <= s["maxRate"],
            tolerance=f"crossing rate <= {s['maxRate']}",
            reference="a lower-angle flow line stays to the right of a higher-angle one",
        )
    )


def _two_starts(reader: ParameterReader, default: list) -> Tuple[complex, complex]:
    """Two start points on or inside the square; boundary points are snapped inward when run."""

    raw = reader.raw("starts", default)
    if not isinstance(raw, list) or len(raw) != 2:
        raise ConfigValidationError(reader.path_of("starts"), "needs exactly two points")
    points = []
    for index, item in enumerate(raw):
        sub = ParameterReader({"p": item}, f"{reader.path_of('starts')}[{index}]")
        point = sub.point("p")
        if not (abs(point.real) <= 1 and abs(point.imag) <= 1):
            raise ConfigValidationError(f"{reader.path_of('starts')}[{index}]", "must lie in the closed square")
        points.append(point)
    if points[0] == points[1]:
        raise ConfigValidationError(reader.path_of("starts"), "the two starts must differ")
    return points[0], points[1]


def _read_merge(config: ExperimentConfig) -> Dict[str, Any]:
    reader = config.reader()
    return {
        "field": read_field_setup(reader),
        "starts": _two_starts(reader, [[-0.3, -1.0], [0.3, -1.0]]),
        "theta": reader.number("theta", 0.0),
        "minRate": reader.number("minRate", 0.95, minimum=0.0, maximum=1.0),
    }


def _run_merge(ctx: ExperimentContext) -> None:
    s = ctx.settings
    params = {"field": s["field"].to_dict(), "starts": [as_point(p) for p in s["starts"]], "theta": s["theta"]}
    results = ctx.pool.run(functools.partial(_merge_trial, s["field"], s["starts"], s["theta"]), ctx.trial_seeds())
    merged_rows = [(i, int(c), int(m)) for i, (c, m) in enumerate(results)]
    ctx.keep(_write_rows(ctx.output("trials.csv"), ("run", "close", "merged"), merged_rows))
    close = [m for c, m in results if c]
    rate = sum(close) / len(close) if close else math.nan
    ctx.report(
        binomial_report(
            "merge",
            params,
            sum(close),
            len(close),
            passed=bool(close) and rate >= s["minRate"],
            tolerance=f"merge rate among close pairs >= {s['minRate']}",
            reference="equal-angle flow lines merge on meeting and never separate",
            closeRuns=len(close),
            totalRuns=len(results),
        )
    )


def _read_cross(config: ExperimentConfig) -> Dict[str, Any]:
    reader = config.reader()
    theta1, theta2 = reader.number("theta1", math.pi / 4), reader.number("theta2", -math.pi / 4)
    if not theta2 < theta1 < theta2 + math.pi:
        raise ConfigValidationError(reader.path_of("theta1"), "must satisfy theta2 < theta1 < theta2 + pi")
    starts = _two_starts(reader, [[0.3, -1.0], [-0.3, -1.0]])
    if starts[0].real < starts[1].real:
        raise ConfigValidationError(reader.path_of("starts"), "the theta1 line must start at or right of the theta2 line")
    return {
        "field": read_field_setup(reader),
        "starts": starts,
        "theta1": theta1,
        "theta2": theta2,
        "maxRate": reader.number("maxRate", 0.05, minimum=0.0, maximum=1.0),
    }


def _run_cross(ctx: ExperimentContext) -> None:
    s = ctx.settings
    params = {
        "field": s["field"].to_dict(),
        "starts": [as_point(p) for p in s["starts"]],
        "theta1": s["theta1"],
        "theta2": s["theta2"],
    }
    work = functools.partial(_cross_trial, s["field"], s["starts"], s["theta1"], s["theta2"])
    counts = ctx.pool.run(work, ctx.trial_seeds())
    ctx.keep(_write_rows(ctx.output("trials.csv"), ("run", "crossings"), list(enumerate(counts))))
    again = sum(1 for c in counts if c >= 2)
    rate = again / len(counts) if counts else math.nan
    ctx.report(
        binomial_report(
            "cross",
            params,
            again,
            len(counts),
            passed=bool(counts) and rate <= s["maxRate"],
            tolerance=f"second-crossing rate <= {s['maxRate']}",
            reference="flow lines of angle gap in (0, pi) cross at most once",
            crossedOnce=sum(1 for c in counts if c == 1),
        )
    )


def _read_duality(config: ExperimentConfig) -> Dict[str, Any]:
    reader = config.reader()
    thetas = reader.numbers("thetas", [-math.pi / 4, 0.0, math.pi / 4])
    if any(abs(t) > CONE_ANGLE for t in thetas):
        raise ConfigValidationError(reader.path_of("thetas"), "angles must lie in [-pi/2, pi/2]")
    setup = read_field_setup(reader, n=200)
    return {
        "field": setup,
        "thetas": thetas,
        "iterations": reader.integer("iterations", 3, minimum=1),
        "seedStride": reader.integer("seedStride", SEED_STRIDE, minimum=1),
        "spacings": reader.number("spacings", 3.0, positive=True),
        "minRate": reader.number("minRate", 0.9, minimum=0.0, maximum=1.0),
    }


def _run_duality(ctx: ExperimentContext) -> None:
    s = ctx.settings
    setup: FieldSetup = s["field"]
    start = setup.bottom_start()
    params = {
        "field": setup.to_dict(),
        "thetas": list(s["thetas"]),
        "iterations": s["iterations"],
        "seedStride": s["seedStride"],
    }
    work = functools.partial(_duality_trial, setup, start, s["thetas"], s["iterations"], s["seedStride"])
    results = ctx.pool.run(work, ctx.trial_seeds())
    trial_rows = [(i, d, int(e)) for i, (d, e) in enumerate(results)]
    ctx.keep(_write_rows(ctx.output("trials.csv"), ("run", "hausdorffSpacings", "boundaryExact"), trial_rows))
    within = sum(1 for d, _ in results if d <= s["spacings"])
    rate = within / len(results) if results else math.nan
    ctx.report(
        binomial_report(
            "duality",
            params,
            within,
            len(results),
            passed=bool(results) and rate >= s["minRate"],
            tolerance=f"within {s['spacings']} spacings in >= {s['minRate']} of runs",
            reference="the light cone contains every flow line with angle in [-pi/2, pi/2]",
        )
    )
    exact = sum(1 for _, e in results if e)
    ctx.report(
        binomial_report(
            "lightConeBoundary",
            params,
            exact,
            len(results),
            passed=bool(results) and exact == len(results),
            tolerance="every run",
            reference="the first light-cone generation is the pair of +-pi/2 flow lines",
        )
    )


def _read_fan_area(config: ExperimentConfig) -> Dict[str, Any]:
    reader = config.reader()
    sizes = tuple(int(n) for n in reader.numbers("sizes", [50, 100, 200]))
    if len(sizes) < 2 or any(n < 3 for n in sizes) or list(sizes) != sorted(set(sizes)):
        raise ConfigValidationError(reader.path_of("sizes"), "needs at least two increasing grid sizes >= 3")
    return {
        "field": read_field_setup(reader, kappa=0.25),
        "sizes": sizes,
        "angleCount": reader.integer("angleCount", 50, minimum=2),
    }


def _run_fan_area(ctx: ExperimentContext) -> None:
    s = ctx.settings
    params = {"field": s["field"].to_dict(), "sizes": list(s["sizes"]), "angleCount": s["angleCount"]}
    if ctx.runs == 0:
        ctx.report(Report.empty("fanArea", params))
        return
    means, rows = [], []
    for n in s["sizes"]:
        setup = replace(s["field"], n=n)
        fractions = ctx.pool.run(functools.partial(_fan_area_trial, setup, s["angleCount"]), ctx.trial_seeds())
        means.append(float(np.mean(fractions)))
        rows += [(n, i, f) for i, f in enumerate(fractions)]
    ctx.keep(_write_rows(ctx.output("fan_area.csv"), ("n", "run", "areaFraction"), rows))
    ctx.report(
        Report(
            "fanArea",
            params,
            ctx.runs,
            means[-1],
            None,
            is_strictly_decreasing(means),
            "mean coverage strictly decreasing in n",
            "the fan has zero Lebesgue measure",
            details={"means": means},
        )
    )


# Markov property --------------------------------------------------------------


def _read_markov(config: ExperimentConfig) -> Dict[str, Any]:
    reader = config.reader()
    n = reader.integer("n", 12, minimum=4)
    r0, r1, c0, c1 = (int(v) for v in reader.numbers("window", [4, 8, 4, 8], length=4))
    if not (1 <= r0 < r1 <= n - 1 and 1 <= c0 < c1 <= n - 1):
        raise ConfigValidationError(reader.path_of("window"), "rows and columns must lie inside the grid interior")
    return {"n": n, "window": (r0, r1, c0, c1), "tolerance": reader.number("tolerance", 1e-8, positive=True)}


def _run_markov(ctx: ExperimentContext) -> None:
    s = ctx.settings
    grid = TriangulatedGrid(s["n"])
    mask = np.zeros((grid.n, grid.n), dtype=bool)
    r0, r1, c0, c1 = s["window"]
    mask[r0:r1, c0:c1] = True
    direct = markov_decomposition(grid, mask)
    conditioned = gaussian_conditioning(grid, mask)
    mean_error = float(np.max(np.abs(direct.mean_operator - conditioned.mean_operator)))
    cov_error = float(np.max(np.abs(direct.covariance - conditioned.covariance)))
    params = {"n": s["n"], "window": list(s["window"])}
    ctx.report(exact_report("markovMean", params, mean_error, s["tolerance"], "conditional mean is the harmonic extension"))
    ctx.report(
        exact_report("markovCovariance", params, cov_error, s["tolerance"], "conditional law inside is a zero-boundary GFF")
    )


# figures ----------------------------------------------------------------------

FIGURE_KINDS = ("fan", "northFans", "grid", "twoFans", "lightCone")


def _read_figure(config: ExperimentConfig) -> Dict[str, Any]:
    reader = config.reader()
    kind = reader.choice("kind", FIGURE_KINDS)
    settings: Dict[str, Any] = {
        "kind": kind,
        "angleCount": reader.integer("angleCount", 12, minimum=2),
        "size": reader.integer("size", 800, minimum=16),
    }
    if kind == "northFans":
        kappas = reader.numbers("kappas", [0.125, 1.0, 2.0])
        if any(not 0 < k < 4 for k in kappas):
            raise ConfigValidationError(reader.path_of("kappas"), "flow lines need 0 < kappa < 4")
        settings["kappas"] = kappas
        settings["field"] = read_field_setup(reader, kappa=kappas[0], n=200)
    else:
        settings["field"] = read_field_setup(reader, kappa=4.0 / 3.0 if kind == "fan" else 0.5, n=200)
    if kind == "twoFans":
        settings["starts"] = _two_starts(reader, [[-0.3, -0.5], [0.3, -0.5]])
    if kind == "grid":
        settings["startCount"] = reader.integer("startCount", 16, minimum=1)
    if kind == "lightCone":
        settings["iterations"] = reader.integer("iterations", 4, minimum=1)
        settings["seedStride"] = reader.integer("seedStride", SEED_STRIDE, minimum=1)
    return settings


def _figure_paths(ctx: ExperimentContext, name: str, paths: list) -> None:
    size = ctx.settings["size"]
    ctx.keep(write_paths_csv(ctx.output(f"{name}.csv"), paths), "csv")
    ctx.keep(render_paths(paths, ctx.output(f"{name}.png"), size=(size, size), box=SQUARE_BOX), "png")


def _run_figure(ctx: ExperimentContext) -> None:
    s = ctx.settings
    setup: FieldSetup = s["field"]
    seed = run_seed(ctx.seed, 0)
    kind = s["kind"]
    if kind == "northFans":
        for kappa in s["kappas"]:
            variant = replace(setup, kappa=kappa)
            field = variant.build(seed)
            _figure_paths(ctx, f"fan_kappa_{kappa:g}", fan(field, variant.bottom_start(), s["angleCount"], variant.step))
        return
    field = setup.build(seed)
    if kind == "fan":
        _figure_paths(ctx, "fan", fan(field, setup.bottom_start(), s["angleCount"], setup.step))
    elif kind == "twoFans":
        paths = []
        for start in s["starts"]:
            paths += fan(field, setup.snap_inside(start), s["angleCount"], setup.step)
        _figure_paths(ctx, "two_fans", paths)
    elif kind == "grid":
        xs = np.linspace(-1.0, 1.0, s["startCount"] + 2)[1:-1]
        starts = [setup.snap_inside(complex(x, -1.0)) for x in xs]
        quarter = math.pi / 4
        paths = trace_many(
            field,
            starts * 2,
            [quarter] * len(starts) + [-quarter] * len(starts),
            setup.step,
            default_max_length(field.grid),
        )
        _figure_paths(ctx, "grid", paths)
    elif kind == "lightCone":
        cone = light_cone(field, setup.bottom_start(), s["iterations"], setup.step, seed_stride=s["seedStride"])
        size = s["size"]
        ctx.keep(write_light_cone_csv(ctx.output("light_cone.csv"), cone), "csv")
        ctx.keep(render_light_cone(cone, ctx.output("light_cone.png"), size=(size, size), box=SQUARE_BOX), "png")


EXPERIMENTS: Dict[str, Experiment] = {
    "constants": Experiment("constants", _read_constants, _run_constants),
    "loewnerZero": Experiment("loewnerZero", _read_loewner_zero, _run_loewner_zero),
    "driverSanity": Experiment("driverSanity", _read_driver_sanity, _run_driver_sanity),
    "boundaryHit": Experiment("boundaryHit", _read_boundary_hit, _run_boundary_hit),
    "reflection": Experiment("reflection", _read_reflection, _run_reflection),
    "martingale": Experiment("martingale", _read_martingale, _run_martingale),
    "varianceCR": Experiment("varianceCR", _read_variance, _run_variance),
    "monotonicity": Experiment("monotonicity", _read_monotonicity, _run_monotonicity),
    "merge": Experiment("merge", _read_merge, _run_merge),
    "cross": Experiment("cross", _read_cross, _run_cross),
    "duality": Experiment("duality", _read_duality, _run_duality),
    "fanArea": Experiment("fanArea", _read_fan_area, _run_fan_area),
    "markov": Experiment("markov", _read_markov, _run_markov),
    "figure": Experiment("figure", _read_figure, _run_figure),
}


def validate_config(config: ExperimentConfig) -> Dict[str, Any]:
    """Typed settings of ``config``; raises ConfigValidationError before any work happens."""

    return EXPERIMENTS[config.experiment].read(config)


def default_out_dir(config: ExperimentConfig, root: Optional[Path] = None) -> Path:
    root = OUTPUT_DIR if root is None else Path(root)
    return root / f"{config.experiment}-{config.config_hash()[:12]}-{config.seed}"


def _log_report(report: Report) -> None:
    if report.no_data:
        logger.warning("Check %s has no data", report.test)
    elif report.passed:
        logger.info("Check %s passed: estimate %s", report.test, report.estimate)
    else:
        logger.warning("Check %s failed: estimate %s (tolerance %s)", report.test, report.estimate, report.tolerance)


def run_experiment(
    config: ExperimentConfig,
    *,
    out_dir: Optional[Path] = None,
    jobs: Optional[int] = None,
    database_url: Optional[str] = RUNS_DATABASE_URL,
) -> RunManifest:
    """Run ``config``; outputs, ``report.json`` and ``manifest.json`` land in ``out_dir``."""

    settings = validate_config(config)
    out_dir = Path(out_dir) if out_dir is not None else default_out_dir(config)
    out_dir.mkdir(parents=True, exist_ok=True)
    jobs = JOBS if jobs is None else max(int(jobs), 1)
    manifest = RunManifest.start(
        config.experiment, config.config_hash(), config.seed, igeom.__version__, out_dir, config.to_dict()
    )
    logger.info(
        "Experiment %s started (seed %d, %d runs, %d jobs) -> %s",
        config.experiment,
        config.seed,
        config.runs,
        jobs,
        out_dir,
    )
    started = time.perf_counter()
    with WorkerPool(jobs) as pool:
        ctx = ExperimentContext(config=config, settings=settings, out_dir=out_dir, pool=pool, manifest=manifest)
        EXPERIMENTS[config.experiment].execute(ctx)

    for report in ctx.reports:
        _log_report(report)
    if ctx.reports:
        ctx.keep(write_report(out_dir / "report.json", ctx.reports), "json")
    summary = summarize(ctx.reports)
    manifest.finish(overall_pass(ctx.reports), summary)
    manifest.write()
    record_manifest(manifest, database_url)
    logger.info(
        "Experiment %s finished in %.1fs: %s",
        config.experiment,
        time.perf_counter() - started,
        {None: "no checks", True: "pass", False: "fail"}[manifest.passed],
    )
    return manifest
