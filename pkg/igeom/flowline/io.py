"""CSV files for traced paths and light cones."""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Iterable

import numpy as np

from .cone import LightConeSet
from .tracer import FlowPath

PATH_HEADER = ("t", "x", "y", "theta")
CONE_HEADER = ("x", "y", "generation")


def _open_for_write(path: str | Path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    return path.open("w", newline="", encoding="utf-8")


def write_path_csv(path: str | Path, flow: FlowPath) -> Path:
    with _open_for_write(path) as handle:
        writer = csv.writer(handle)
        writer.writerow(PATH_HEADER)
        for t, z, theta in zip(flow.parameters(), flow.points, flow.angles()):
            writer.writerow((repr(float(t)), repr(float(z.real)), repr(float(z.imag)), repr(float(theta))))
    return Path(path)


def write_paths_csv(path: str | Path, flows: Iterable[FlowPath]) -> Path:
    """Several paths in one file, with an extra leading ``path`` column."""

    with _open_for_write(path) as handle:
        writer = csv.writer(handle)
        writer.writerow(("path", *PATH_HEADER))
        for flow in flows:
            for t, z, theta in zip(flow.parameters(), flow.points, flow.angles()):
                writer.writerow(
                    (flow.path_id, repr(float(t)), repr(float(z.real)), repr(float(z.imag)), repr(float(theta)))
                )
    return Path(path)


def read_path_csv(path: str | Path) -> np.ndarray:
    """Rows of ``t, x, y, theta`` as a float array of shape (k, 4)."""

    with Path(path).open(newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        header = next(reader)
        if tuple(header[-4:]) != PATH_HEADER:
            raise ValueError(f"{path}: unexpected header {header}")
        rows = [[float(v) for v in row[-4:]] for row in reader]
    return np.asarray(rows, dtype=float).reshape(-1, 4)


def write_light_cone_csv(path: str | Path, cone: LightConeSet) -> Path:
    with _open_for_write(path) as handle:
        writer = csv.writer(handle)
        writer.writerow(CONE_HEADER)
        for z, generation in zip(cone.points, cone.generation):
            writer.writerow((repr(float(z.real)), repr(float(z.imag)), int(generation)))
    return Path(path)


def read_paths_csv(path: str | Path) -> list[np.ndarray]:
    """Complex polylines of a :func:`write_paths_csv` file in path order; a single-path file gives one."""

    table = read_path_csv(path)
    with Path(path).open(newline="", encoding="utf-8") as handle:
        header = next(csv.reader(handle))
    points = table[:, 1] + 1j * table[:, 2]
    if header[0] != "path":
        return [points]
    with Path(path).open(newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        next(reader)
        ids = np.asarray([int(row[0]) for row in reader], dtype=int)
    order = list(dict.fromkeys(ids.tolist()))
    return [points[ids == i] for i in order]
