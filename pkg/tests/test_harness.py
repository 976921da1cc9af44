import json
import math

import numpy as np
import pytest
from PIL import Image
from sqlalchemy import create_engine, func, select
from sqlalchemy.orm import Session

import main
from db import RunOutput, RunRecord
from igeom.core import ConfigValidationError, OrderingError
from igeom.flowline import count_transversal_crossings, read_paths_csv, trace_many, write_paths_csv
from igeom.gff import DiscreteField, TriangulatedGrid
from igeom.harness import (
    EXPERIMENT_NAMES,
    ParameterReader,
    WorkerPool,
    count_foreground,
    default_out_dir,
    get_preset,
    hues_for,
    load_config,
    parse_config,
    preset_names,
    read_field_setup,
    read_manifest,
    record_manifest,
    render_paths,
    run_experiment,
    validate_config,
)
from igeom.harness.experiments import _cross_trial

TINY_FAN = {
    "experiment": "figure",
    "parameters": {"kind": "fan", "field": {"kappa": 1.0, "n": 12}, "angleCount": 3, "size": 64},
    "seed": 1,
}
MARKOV = {"experiment": "markov", "parameters": {"n": 8, "window": [3, 5, 3, 5]}}


@pytest.mark.parametrize(
    "document, field_path",
    [
        ({"experiment": "nonsense"}, "experiment"),
        ({"experiment": "markov", "seed": -1}, "seed"),
        ({"experiment": "markov", "seed": True}, "seed"),
        ({"experiment": "markov", "seed": 2**64}, "seed"),
        ({"experiment": "markov", "runs": -3}, "runs"),
        ({"experiment": "markov", "parameters": [1, 2]}, "parameters"),
        ([1, 2], "$"),
    ],
)
def test_parse_config_rejects(document, field_path):
    with pytest.raises(ConfigValidationError) as info:
        parse_config(document)
    assert info.value.field_path == field_path


def test_config_hash_ignores_key_order():
    a = parse_config({"experiment": "merge", "parameters": {"theta": 0.0, "minRate": 0.9}, "seed": 3})
    b = parse_config({"seed": 3, "parameters": {"minRate": 0.9, "theta": 0.0}, "experiment": "merge"})
    assert a.config_hash() == b.config_hash()
    assert a.config_hash() != a.with_overrides(seed=4).config_hash()
    assert len(a.config_hash()) == 64


def test_overrides_keep_the_rest():
    config = parse_config({"experiment": "merge", "parameters": {"theta": 0.5}, "seed": 3, "runs": 10})
    changed = config.with_overrides(runs=20, parameters={"minRate": 0.8})
    assert changed.seed == 3 and changed.runs == 20
    assert changed.parameters == {"theta": 0.5, "minRate": 0.8}


def test_load_config_rejects_bad_json(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json", encoding="utf-8")
    with pytest.raises(ConfigValidationError):
        load_config(path)


def test_reader_names_field_paths():
    reader = ParameterReader({"field": {"kappa": "big"}, "start": [1.0], "count": 2.5})
    with pytest.raises(ConfigValidationError) as info:
        reader.section("field").number("kappa")
    assert info.value.field_path == "parameters.field.kappa"
    with pytest.raises(ConfigValidationError) as info:
        reader.point("start")
    assert info.value.field_path == "parameters.start"
    with pytest.raises(ConfigValidationError):
        reader.integer("count")
    with pytest.raises(ConfigValidationError) as info:
        reader.number("missing")
    assert "required" in str(info.value)
    assert reader.number("missing", 1.5) == 1.5


def test_field_setup_needs_kappa_below_four():
    with pytest.raises(ConfigValidationError) as info:
        read_field_setup(ParameterReader({"field": {"kappa": 5.0}}))
    assert info.value.field_path == "parameters.field.kappa"
    setup = read_field_setup(ParameterReader({"field": {"kappa": 0.5, "n": 21}}))
    assert setup.bottom_start() == pytest.approx(-0.7j)


@pytest.mark.parametrize("name", preset_names())
def test_presets_validate(name):
    config = get_preset(name)
    assert config.experiment in EXPERIMENT_NAMES
    validate_config(config)


def test_unknown_preset():
    with pytest.raises(ConfigValidationError):
        get_preset("spiral")


def test_bad_figure_kind_fails_before_writing(tmp_path):
    config = parse_config({"experiment": "figure", "parameters": {"kind": "spiral"}})
    with pytest.raises(ConfigValidationError) as info:
        run_experiment(config, out_dir=tmp_path / "out", jobs=1, database_url=None)
    assert info.value.field_path == "parameters.kind"
    assert not (tmp_path / "out").exists()


def test_default_out_dir_names_the_run(tmp_path):
    config = parse_config({**MARKOV, "seed": 9})
    out = default_out_dir(config, tmp_path)
    assert out.parent == tmp_path
    assert out.name == f"markov-{config.config_hash()[:12]}-9"


def test_hues_follow_keys():
    assert hues_for([3.0, 1.0, 2.0]) == pytest.approx([270.0, 0.0, 135.0])
    assert hues_for([0.5, 0.5]) == [0.0, 0.0]


def test_render_horizontal_segment(tmp_path):
    segment = np.array([-0.5, 0.5], dtype=complex)
    out = render_paths([segment], tmp_path / "h.png", size=(101, 101), box=(-1, -1, 1, 1))
    assert count_foreground(out) == 51
    with Image.open(out) as image:
        assert image.getpixel((50, 50)) != (255, 255, 255)
        assert image.getpixel((50, 40)) == (255, 255, 255)


def test_render_rejects_nothing(tmp_path):
    with pytest.raises(ConfigValidationError):
        render_paths([], tmp_path / "x.png")
    with pytest.raises(ConfigValidationError):
        render_paths([np.empty(0, dtype=complex)], tmp_path / "x.png")


def test_worker_pool_keeps_order():
    with WorkerPool(1) as pool:
        assert list(pool.map(abs, [-3, 2, -1])) == [3, 2, 1]
        assert pool.run(str, [1, 2]) == ["1", "2"]


def test_markov_experiment_passes(tmp_path):
    manifest = run_experiment(parse_config(MARKOV), out_dir=tmp_path, jobs=1, database_url=None)
    assert manifest.passed is True
    reports = json.loads((tmp_path / "report.json").read_text(encoding="utf-8"))
    assert [r["test"] for r in reports] == ["markovMean", "markovCovariance"]
    on_disk = read_manifest(tmp_path / "manifest.json")
    assert on_disk["pass"] is True
    assert on_disk["configHash"] == parse_config(MARKOV).config_hash()
    assert [o["path"] for o in on_disk["outputs"]] == ["report.json"]


def test_constants_experiment_checks_identities(tmp_path):
    config = parse_config({"experiment": "constants", "parameters": {"kappaCount": 20}})
    run_experiment(config, out_dir=tmp_path, jobs=1, database_url=None)
    reports = {r["test"]: r for r in json.loads((tmp_path / "report.json").read_text(encoding="utf-8"))}
    assert reports["constantIdentities"]["pass"] is True
    assert reports["dualConstants"]["pass"] is True
    assert "squareMap" in reports
    assert (tmp_path / "constants.csv").exists()


def test_zero_runs_give_no_data(tmp_path):
    config = get_preset("martingale").with_overrides(runs=0)
    manifest = run_experiment(config, out_dir=tmp_path, jobs=1, database_url=None)
    assert manifest.passed is False
    reports = json.loads((tmp_path / "report.json").read_text(encoding="utf-8"))
    assert all(r["noData"] for r in reports)


def test_figure_is_reproducible(tmp_path):
    config = parse_config(TINY_FAN)
    first = run_experiment(config, out_dir=tmp_path / "a", jobs=1, database_url=None)
    second = run_experiment(config, out_dir=tmp_path / "b", jobs=1, database_url=None)
    assert first.passed is None
    assert set(first.digests()) == {"fan.csv", "fan.png"}
    assert first.digests() == second.digests()
    assert not (tmp_path / "a" / "report.json").exists()


def test_manifest_goes_into_registry(tmp_path):
    manifest = run_experiment(parse_config(MARKOV), out_dir=tmp_path / "run", jobs=1, database_url=None)
    url = f"sqlite:///{(tmp_path / 'registry.db').as_posix()}"
    run_id = record_manifest(manifest, url)
    assert run_id == 1
    engine = create_engine(url)
    with Session(engine) as session:
        record = session.get(RunRecord, run_id)
        assert record.experiment == "markov"
        assert record.passed is True
        assert session.scalar(select(func.count()).select_from(RunOutput)) == 1
    engine.dispose()


def test_registry_is_optional(tmp_path):
    manifest = run_experiment(parse_config(MARKOV), out_dir=tmp_path, jobs=1, database_url=None)
    assert record_manifest(manifest, None) is None
    assert record_manifest(manifest, "") is None
    assert record_manifest(manifest, "nosuchdialect://nowhere") is None


def test_cli_experiment_exit_codes(tmp_path):
    assert main.main(["experiment", "markov", "--out", str(tmp_path / "ok")]) == main.EXIT_OK
    assert main.main(["experiment", "martingale", "--runs", "0", "--out", str(tmp_path / "empty")]) == main.EXIT_FAILED
    assert main.main(["experiment", "--out", str(tmp_path / "none")]) == main.EXIT_ERROR


def test_cli_rejects_bad_documents(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"experiment": "markov", "parameters": {"window": [0, 3, 1, 3]}}), encoding="utf-8")
    assert main.main(["experiment", "--config", str(bad), "--out", str(tmp_path / "bad")]) == main.EXIT_ERROR
    assert main.main(["fan", "--kappa", "5", "--n", "12", "--out", str(tmp_path / "fan")]) == main.EXIT_ERROR


def test_cli_fan_then_render(tmp_path):
    out = tmp_path / "fan"
    assert main.main(["fan", "--kappa", "1", "--n", "12", "--angles", "3", "--out", str(out)]) == main.EXIT_OK
    assert (out / "fan.csv").exists() and (out / "fan.png").exists()
    drawn = tmp_path / "drawn"
    assert main.main(["render", str(out / "fan.csv"), "--out", str(drawn), "--size", "64"]) == main.EXIT_OK
    assert count_foreground(drawn / "fan.png") > 0


def test_cli_render_missing_file(tmp_path):
    assert main.main(["render", str(tmp_path / "nothing.csv")]) == main.EXIT_ERROR


def test_paths_csv_renders_from_disk(tmp_path):
    field = DiscreteField(TriangulatedGrid(9), np.zeros((9, 9)), chi=1.0)
    paths = trace_many(field, [0j, 0.2j], [0.0, 0.0], 0.1, 0.5)
    polylines = read_paths_csv(write_paths_csv(tmp_path / "p.csv", paths))
    assert count_foreground(render_paths(polylines, tmp_path / "p.png", size=(50, 50))) > 0


def test_driver_sanity_reports(tmp_path):
    config = get_preset("driverSanity").with_overrides(runs=40, parameters={"dt": 0.01, "T": 0.2})
    run_experiment(config, out_dir=tmp_path, jobs=1, database_url=None)
    reports = json.loads((tmp_path / "report.json").read_text(encoding="utf-8"))
    assert [r["test"] for r in reports] == ["driverVariance", "zeroWeightDriver", "scaleInvariance"]
    assert all(r["runs"] == 40 for r in reports)
    assert (tmp_path / "terminal_W.csv").exists()


def test_cli_sample_then_trace_the_saved_field(tmp_path):
    gff = tmp_path / "gff"
    field_options = ["--kappa", "1", "--n", "12", "--seed", "4"]
    assert main.main(["sample-gff", *field_options, "--out", str(gff)]) == main.EXIT_OK
    assert (gff / "field.igf").exists() and (gff / "boundary.json").exists()
    traced = tmp_path / "trace"
    argv = ["trace", *field_options, "--field", str(gff / "field.igf"), "--theta", "0.3", "--out", str(traced)]
    assert main.main(argv) == main.EXIT_OK
    assert len(read_paths_csv(traced / "path.csv")) == 1


def test_cli_lightcone(tmp_path):
    out = tmp_path / "cone"
    argv = ["lightcone", "--kappa", "1", "--n", "12", "--iterations", "2", "--seed-stride", "3", "--out", str(out)]
    assert main.main(argv) == main.EXIT_OK
    assert {p.name for p in out.iterdir()} == {"light_cone.csv", "light_cone_paths.csv", "light_cone.png"}


def test_cli_drive_then_curve_from_saved_params(tmp_path):
    drive = tmp_path / "drive"
    assert main.main(["drive", "--kappa", "2", "--dt", "0.005", "--T", "0.05", "--out", str(drive)]) == main.EXIT_OK
    assert (drive / "driver.csv").exists()
    curve = tmp_path / "curve"
    argv = ["curve", "--config", str(drive / "params.json"), "--dt", "0.005", "--T", "0.05", "--stride", "2"]
    assert main.main([*argv, "--out", str(curve)]) == main.EXIT_OK
    assert (curve / "curve.csv").exists() and (curve / "curve.png").exists()


SMALL_FIELD = {"kappa": 0.5, "n": 16}


def _trial_rows(path):
    header, *rows = path.read_text(encoding="utf-8").splitlines()
    return header.split(","), [[int(v) for v in row.split(",")] for row in rows]


def _report(out_dir, test):
    return {r["test"]: r for r in json.loads((out_dir / "report.json").read_text(encoding="utf-8"))}[test]


def test_boundary_starts_snap_inside():
    setup = read_field_setup(ParameterReader({"field": {"kappa": 0.5, "n": 21}}))
    assert setup.snap_inside(0.3 - 1j) == pytest.approx(0.3 - 0.7j)
    assert setup.snap_inside(1 + 1j) == pytest.approx(0.7 + 0.7j)
    assert setup.snap_inside(-0.2 + 0.4j) == -0.2 + 0.4j
    with pytest.raises(ConfigValidationError):
        setup.snap_inside(1.2 + 0j)


def test_cross_preset_puts_the_higher_angle_on_the_right():
    params = get_preset("cross").parameters
    assert params["theta1"] > params["theta2"]
    (x1, y1), (x2, y2) = params["starts"]
    assert x1 >= x2
    assert y1 == y2 == -1.0


@pytest.mark.parametrize(
    "parameters, field_path",
    [
        ({"starts": [[-0.3, -1.0], [0.3, -1.0]]}, "parameters.starts"),
        ({"starts": [[0.3, -1.0], [0.3, -1.0]]}, "parameters.starts"),
        ({"starts": [[0.3, -1.5], [-0.3, -1.0]]}, "parameters.starts[0]"),
        ({"starts": [[0.3, -1.0]]}, "parameters.starts"),
    ],
)
def test_cross_rejects_bad_starts(parameters, field_path):
    with pytest.raises(ConfigValidationError) as info:
        validate_config(parse_config({"experiment": "cross", "parameters": parameters}))
    assert info.value.field_path == field_path


def test_cross_trial_checks_the_ordering():
    setup = read_field_setup(ParameterReader({"field": SMALL_FIELD}))
    with pytest.raises(OrderingError):
        _cross_trial(setup, (-0.3 - 1j, 0.3 - 1j), math.pi / 4, -math.pi / 4, 0)
    with pytest.raises(OrderingError):
        _cross_trial(setup, (0.3 - 1j, -0.3 - 1j), -math.pi / 4, math.pi / 4, 0)


def test_flat_field_lines_cross_once_from_the_right_order():
    field = DiscreteField(TriangulatedGrid(21), np.zeros((21, 21)), chi=1.0, heading_offset=math.pi / 2)
    thetas = [math.pi / 4, -math.pi / 4]
    a, b = trace_many(field, [0.3 - 0.7j, -0.3 - 0.7j], thetas, 0.05, 3.0)
    assert count_transversal_crossings(a, b, 0.2) == 1
    a, b = trace_many(field, [-0.3 - 0.7j, 0.3 - 0.7j], thetas, 0.05, 3.0)
    assert count_transversal_crossings(a, b, 0.2) == 0


def test_small_cross_run_reports_its_trials(tmp_path):
    config = get_preset("cross").with_overrides(runs=3, parameters={"field": SMALL_FIELD})
    run_experiment(config, out_dir=tmp_path, jobs=1, database_url=None)
    header, rows = _trial_rows(tmp_path / "trials.csv")
    assert header == ["run", "crossings"]
    assert [r[0] for r in rows] == [0, 1, 2]
    assert all(count >= 0 for _, count in rows)
    report = _report(tmp_path, "cross")
    assert report["runs"] == 3
    assert report["estimate"] == pytest.approx(sum(1 for _, c in rows if c >= 2) / 3)
    assert report["details"]["crossedOnce"] == sum(1 for _, c in rows if c == 1)
    assert report["params"]["starts"][0][0] >= report["params"]["starts"][1][0]


def test_small_merge_run_reports_close_pairs(tmp_path):
    config = get_preset("merge").with_overrides(runs=3, parameters={"field": SMALL_FIELD})
    run_experiment(config, out_dir=tmp_path, jobs=1, database_url=None)
    header, rows = _trial_rows(tmp_path / "trials.csv")
    assert header == ["run", "close", "merged"]
    assert len(rows) == 3
    close = [merged for _, c, merged in rows if c]
    report = _report(tmp_path, "merge")
    if close:
        assert report["runs"] == len(close)
        assert report["estimate"] == pytest.approx(sum(close) / len(close))
    else:
        assert report["noData"] is True


def test_small_monotonicity_run_reports_its_trials(tmp_path):
    config = get_preset("monotonicity").with_overrides(runs=3, parameters={"field": SMALL_FIELD})
    manifest = run_experiment(config, out_dir=tmp_path, jobs=1, database_url=None)
    header, rows = _trial_rows(tmp_path / "trials.csv")
    assert header == ["run", "crossed"]
    assert all(crossed in (0, 1) for _, crossed in rows)
    report = _report(tmp_path, "monotonicity")
    assert report["runs"] == 3
    assert report["estimate"] == pytest.approx(sum(c for _, c in rows) / 3)
    assert manifest.passed is report["pass"]
