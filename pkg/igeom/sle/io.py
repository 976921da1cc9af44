"""Driver, curve and parameter files."""

from __future__ import annotations

import csv
import json
from pathlib import Path

from igeom.core import SleParams

from .driver import DriverPath
from .loewner import CurvePolyline


def driver_columns(driver: DriverPath) -> list[str]:
    return ["t", "W", *driver.V.keys()]


def write_driver_csv(path: str | Path, driver: DriverPath) -> Path:
    """Columns ``t, W, V_1L..V_kL, V_1R..V_lR``."""

    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    columns = [driver.times, driver.W, *driver.V.values()]
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(driver_columns(driver))
        for row in zip(*columns):
            writer.writerow([repr(float(v)) for v in row])
    return path


def write_curve_csv(path: str | Path, curve: CurvePolyline) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(("t", "x", "y"))
        for t, z in zip(curve.times, curve.vertices):
            writer.writerow((repr(float(t)), repr(float(z.real)), repr(float(z.imag))))
    return path


def write_params(path: str | Path, params: SleParams) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(params.to_dict(), indent=2), encoding="utf-8")
    return path


def read_params(path: str | Path) -> SleParams:
    return SleParams.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))
