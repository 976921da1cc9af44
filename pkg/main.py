"""
igeom-lab: imaginary geometry laboratory.

Samples discrete Gaussian free fields, traces flow lines, fans and light
cones, simulates SLE_kappa(rho) and runs the acceptance experiments.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Callable, Dict

from logging_config import (
    available_log_languages,
    get_default_log_language,
    register_log_translations,
    setup_logging,
)

from config import LOG_LANGUAGE, OUTPUT_DIR, SEED_STRIDE

register_log_translations(
    {
        "Wrote %s": {
            "ru": "Записан файл %s",
        },
        "Run failed: %s": {
            "ru": "Запуск завершился ошибкой: %s",
        },
        "Acceptance failed for %s; see %s": {
            "ru": "Проверка %s не пройдена; см. %s",
        },
        "Acceptance passed for %s; outputs in %s": {
            "ru": "Проверка %s пройдена; результаты в %s",
        },
        "Outputs of %s in %s": {
            "ru": "Результаты %s в %s",
        },
        "Available presets: %s": {
            "ru": "Доступные пресеты: %s",
        },
    }
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_ERROR = 2


def _normalize_log_language(candidate: str | None) -> str:
    """Validate and normalize a log language candidate."""

    available = {lang.lower() for lang in available_log_languages()}
    if candidate:
        normalized = candidate.strip().lower()
        if normalized in available:
            return normalized
    return get_default_log_language()


def configure_logging(*, language: str | None = None, level: str | int | None = logging.INFO) -> str:
    """Set up logging once per process and return the active language."""

    effective_language = _normalize_log_language(language or LOG_LANGUAGE)
    setup_logging(level=level, language=effective_language)
    return effective_language


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, metavar="PATH", help="JSON document with the parameters")
    parser.add_argument("--seed", type=int, metavar="N", help="root seed (default 0)")
    parser.add_argument("--out", type=Path, metavar="DIR", help="output directory")
    parser.add_argument("--jobs", type=int, metavar="N", help="worker processes")


def _add_field_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--kappa", type=float, help="flow-line kappa in (0, 4)")
    parser.add_argument("--n", type=int, help="grid vertices per side")
    parser.add_argument("--boundary", choices=("flowLine", "zero", "constant"))
    parser.add_argument("--field", type=Path, metavar="PATH", help="reuse a field file instead of sampling")


def _add_sle_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--kappa", type=float, help="kappa of a plain SLE when --config is not given")
    parser.add_argument("--dt", type=float, default=1e-3)
    parser.add_argument("--T", dest="T", type=float, default=1.0, help="capacity time horizon")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="Imaginary geometry laboratory")
    parser.add_argument(
        "--log-language",
        dest="log_language",
        choices=available_log_languages(),
        metavar="LANG",
        help="Override log language (default from .env)",
    )
    parser.add_argument(
        "--log-level",
        dest="log_level",
        metavar="LEVEL",
        help="Override base log level (name or number)",
    )
    verbs = parser.add_subparsers(dest="verb", required=True)

    sample = verbs.add_parser("sample-gff", help="sample a GFF with flow-line boundary data")
    _add_common(sample)
    _add_field_options(sample)

    trace = verbs.add_parser("trace", help="trace one flow line")
    _add_common(trace)
    _add_field_options(trace)
    trace.add_argument("--start", type=float, nargs=2, metavar=("X", "Y"))
    trace.add_argument("--theta", type=float, default=0.0)

    fan_parser = verbs.add_parser("fan", help="fixed-angle flow lines over [-pi/2, pi/2]")
    _add_common(fan_parser)
    _add_field_options(fan_parser)
    fan_parser.add_argument("--angles", type=int, default=12)

    cone = verbs.add_parser("lightcone", help="iterated angle-varying flow lines")
    _add_common(cone)
    _add_field_options(cone)
    cone.add_argument("--iterations", type=int, default=3)
    cone.add_argument("--seed-stride", dest="seed_stride", type=int)

    drive = verbs.add_parser("drive", help="simulate an SLE_kappa(rho) driver")
    _add_common(drive)
    _add_sle_options(drive)

    curve = verbs.add_parser("curve", help="simulate a driver and extract its trace")
    _add_common(curve)
    _add_sle_options(curve)
    curve.add_argument("--tip-offset", dest="tip_offset", type=float, default=1e-2)
    curve.add_argument("--stride", type=int, default=10)

    experiment = verbs.add_parser("experiment", help="run a preset or a JSON experiment document")
    experiment.add_argument("name", nargs="?", help="preset name")
    _add_common(experiment)
    experiment.add_argument("--runs", type=int, metavar="N", help="override the run count")

    render = verbs.add_parser("render", help="draw a paths CSV as PNG")
    render.add_argument("paths", type=Path, help="CSV written by fan, trace or lightcone")
    render.add_argument("--out", type=Path, metavar="DIR")
    render.add_argument("--size", type=int, default=800)
    return parser


def parse_cli_args(argv: list[str] | None = None) -> tuple[argparse.Namespace, list[str]]:
    """Parse and return known CLI arguments plus unhandled extras."""

    return build_parser().parse_known_args(argv)


# Configure logging immediately for library consumers; main block may override later.
configure_logging(language=LOG_LANGUAGE, level=logging.INFO)

from igeom.core import ConfigValidationError, IGeomError, SleParams, run_seed
from igeom.flowline import (
    default_max_length,
    fan,
    light_cone,
    read_paths_csv,
    trace_flow_line,
    write_light_cone_csv,
    write_path_csv,
    write_paths_csv,
)
from igeom.gff import read_field, write_boundary_arcs, write_field
from igeom.harness import (
    FieldSetup,
    ParameterReader,
    get_preset,
    load_config,
    preset_names,
    read_field_setup,
    render_light_cone,
    render_paths,
    run_experiment,
)
from igeom.harness.fields import HEADINGS
from igeom.sle import extract_curve, read_params, simulate_driver, write_curve_csv, write_driver_csv, write_params


def _read_json(path: Path | None) -> Dict[str, Any]:
    if path is None:
        return {}
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigValidationError("$", f"cannot read {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigValidationError("$", f"{path} must hold a JSON object")
    return data.get("parameters", data)


def _out_dir(args: argparse.Namespace, default: str) -> Path:
    out = args.out if args.out is not None else OUTPUT_DIR / default
    out.mkdir(parents=True, exist_ok=True)
    return out


def _seed(args: argparse.Namespace) -> int:
    return 0 if args.seed is None else args.seed


def _field_setup(args: argparse.Namespace) -> FieldSetup:
    data = _read_json(args.config)
    section = dict(data.get("field", {}))
    for key, value in (("kappa", args.kappa), ("n", args.n), ("boundary", args.boundary)):
        if value is not None:
            section[key] = value
    return read_field_setup(ParameterReader({**data, "field": section}))


def _field(args: argparse.Namespace, setup: FieldSetup):
    if args.field is not None:
        return read_field(args.field).with_chi(setup.chi, HEADINGS[setup.heading])
    return setup.build(run_seed(_seed(args), 0))


def _sle_params(args: argparse.Namespace) -> SleParams:
    if args.config is not None:
        return read_params(args.config)
    return SleParams.plain(args.kappa if args.kappa is not None else 2.0)


def _wrote(path: Path) -> Path:
    logger.info("Wrote %s", path)
    return path


def cmd_sample_gff(args: argparse.Namespace) -> int:
    setup = _field_setup(args)
    out = _out_dir(args, f"gff-{setup.n}-{_seed(args)}")
    field = _field(args, setup)
    _wrote(write_field(out / "field.igf", field))
    _wrote(write_boundary_arcs(out / "boundary.json", setup.boundary_trace()))
    return EXIT_OK


def cmd_trace(args: argparse.Namespace) -> int:
    setup = _field_setup(args)
    out = _out_dir(args, f"trace-{_seed(args)}")
    field = _field(args, setup)
    start = complex(*args.start) if args.start else setup.bottom_start()
    path = trace_flow_line(field, start, args.theta, setup.step, default_max_length(field.grid))
    logger.info("Outputs of %s in %s", "trace", out)
    _wrote(write_path_csv(out / "path.csv", path))
    _wrote(render_paths([path], out / "path.png", box=field.grid.box))
    return EXIT_OK


def cmd_fan(args: argparse.Namespace) -> int:
    setup = _field_setup(args)
    out = _out_dir(args, f"fan-{_seed(args)}")
    field = _field(args, setup)
    paths = fan(field, setup.bottom_start(), args.angles, setup.step)
    _wrote(write_paths_csv(out / "fan.csv", paths))
    _wrote(render_paths(paths, out / "fan.png", box=field.grid.box))
    return EXIT_OK


def cmd_lightcone(args: argparse.Namespace) -> int:
    setup = _field_setup(args)
    out = _out_dir(args, f"lightcone-{_seed(args)}")
    field = _field(args, setup)
    stride = args.seed_stride or SEED_STRIDE
    cone = light_cone(field, setup.bottom_start(), args.iterations, setup.step, seed_stride=stride)
    _wrote(write_light_cone_csv(out / "light_cone.csv", cone))
    _wrote(write_paths_csv(out / "light_cone_paths.csv", cone.paths))
    _wrote(render_light_cone(cone, out / "light_cone.png", box=field.grid.box))
    return EXIT_OK


def cmd_drive(args: argparse.Namespace) -> int:
    params = _sle_params(args)
    out = _out_dir(args, f"drive-{_seed(args)}")
    driver = simulate_driver(params, args.dt, args.T, run_seed(_seed(args), 0))
    _wrote(write_driver_csv(out / "driver.csv", driver))
    _wrote(write_params(out / "params.json", params))
    return EXIT_OK


def cmd_curve(args: argparse.Namespace) -> int:
    params = _sle_params(args)
    out = _out_dir(args, f"curve-{_seed(args)}")
    driver = simulate_driver(params, args.dt, args.T, run_seed(_seed(args), 0))
    curve = extract_curve(driver, args.tip_offset, stride=args.stride)
    _wrote(write_driver_csv(out / "driver.csv", driver))
    _wrote(write_curve_csv(out / "curve.csv", curve))
    _wrote(render_paths([curve], out / "curve.png"))
    return EXIT_OK


def cmd_experiment(args: argparse.Namespace) -> int:
    if args.config is not None:
        config = load_config(args.config)
    elif args.name:
        config = get_preset(args.name)
    else:
        logger.info("Available presets: %s", ", ".join(preset_names()))
        raise ConfigValidationError("name", "give a preset name or --config PATH")
    config = config.with_overrides(seed=args.seed, runs=args.runs)
    manifest = run_experiment(config, out_dir=args.out, jobs=args.jobs)
    if manifest.passed is False:
        logger.warning("Acceptance failed for %s; see %s", config.experiment, manifest.out_dir)
        return EXIT_FAILED
    if manifest.passed:
        logger.info("Acceptance passed for %s; outputs in %s", config.experiment, manifest.out_dir)
    else:
        logger.info("Outputs of %s in %s", config.experiment, manifest.out_dir)
    return EXIT_OK


def cmd_render(args: argparse.Namespace) -> int:
    try:
        polylines = read_paths_csv(args.paths)
    except (OSError, ValueError) as exc:
        raise ConfigValidationError("paths", str(exc)) from exc
    out = args.out if args.out is not None else args.paths.parent
    _wrote(render_paths(polylines, out / f"{args.paths.stem}.png", size=(args.size, args.size)))
    return EXIT_OK


COMMANDS: Dict[str, Callable[[argparse.Namespace], int]] = {
    "sample-gff": cmd_sample_gff,
    "trace": cmd_trace,
    "fan": cmd_fan,
    "lightcone": cmd_lightcone,
    "drive": cmd_drive,
    "curve": cmd_curve,
    "experiment": cmd_experiment,
    "render": cmd_render,
}


def main(argv: list[str] | None = None) -> int:
    args, remaining_argv = parse_cli_args(argv)
    if remaining_argv:
        build_parser().error(f"unrecognized arguments: {' '.join(remaining_argv)}")
    configure_logging(language=args.log_language, level=args.log_level or logging.INFO)
    try:
        return COMMANDS[args.verb](args)
    except IGeomError as exc:
        logger.error("Run failed: %s", exc)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
