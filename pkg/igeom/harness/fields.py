"""Square-domain fields and force-point parameters as experiments read them from a document."""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import Any, Mapping

import numpy as np

from config import SAMPLER, STEP_FACTOR
from igeom.core import ConfigValidationError, IGeomError, SleParams, derive_constants
from igeom.gff import (
    BoundaryTrace,
    DiscreteField,
    StepFunction,
    TriangulatedGrid,
    pullback_boundary_data,
    sample_field,
)

from .config import ParameterReader

BOUNDARY_KINDS = ("flowLine", "zero", "constant")
HEADINGS = {"north": math.pi / 2, "literal": 0.0}
START_LIFT = 3.0
_ON_EDGE = 1e-12


@dataclass(frozen=True)
class FieldSetup:
    """A GFF on the [-1, 1]^2 grid with boundary data of one of three kinds.

    ``flowLine`` pulls ``-lambda | lambda`` on R back through the square map,
    so the angle-0 flow line runs from -i to i; ``zero`` and ``constant`` are
    what they say.
    """

    kappa: float
    n: int
    boundary: str = "flowLine"
    boundary_value: float = 0.0
    heading: str = "north"
    sampler: str = SAMPLER
    step_factor: float = STEP_FACTOR

    @property
    def grid(self) -> TriangulatedGrid:
        return TriangulatedGrid(self.n)

    @property
    def chi(self) -> float:
        return derive_constants(self.kappa).chi

    @property
    def step(self) -> float:
        return self.step_factor * self.grid.spacing

    def boundary_trace(self) -> BoundaryTrace:
        return _boundary_trace(self.kappa, self.n, self.boundary, self.boundary_value)

    def build(self, seed: Any) -> DiscreteField:
        return sample_field(
            self.grid,
            self.boundary_trace(),
            seed,
            chi=self.chi,
            heading_offset=HEADINGS[self.heading],
            method=self.sampler,
        )

    def snap_inside(self, point: complex, lift: float = START_LIFT) -> complex:
        """Move a boundary point ``lift`` spacings inward; interior points stay put.

        Flow lines at extreme angles cannot start on the boundary itself, so
        boundary starts launch from just inside it.
        """

        x, y = point.real, point.imag
        if abs(x) > 1 + _ON_EDGE or abs(y) > 1 + _ON_EDGE:
            raise ConfigValidationError("start", f"{point} lies outside the square")
        inset = lift * self.grid.spacing
        if abs(x) >= 1 - _ON_EDGE:
            x = math.copysign(1 - inset, x)
        if abs(y) >= 1 - _ON_EDGE:
            y = math.copysign(1 - inset, y)
        return complex(x, y)

    def bottom_start(self, lift: float = START_LIFT) -> complex:
        return self.snap_inside(-1j, lift)

    def to_dict(self) -> dict[str, Any]:
        return {
            "kappa": self.kappa,
            "n": self.n,
            "boundary": self.boundary,
            "boundaryValue": self.boundary_value,
            "heading": self.heading,
            "sampler": self.sampler,
            "stepFactor": self.step_factor,
        }


@functools.lru_cache(maxsize=16)
def _boundary_trace(kappa: float, n: int, kind: str, value: float) -> BoundaryTrace:
    grid = TriangulatedGrid(n)
    if kind == "flowLine":
        consts = derive_constants(kappa)
        return pullback_boundary_data(StepFunction.two_sided(-consts.lam, consts.lam), grid, consts.chi)
    return BoundaryTrace.constant(grid.boundary_indices(), value if kind == "constant" else 0.0)


def read_field_setup(reader: ParameterReader, key: str = "field", **defaults: Any) -> FieldSetup:
    section = reader.section(key, defaults or {})
    setup = FieldSetup(
        kappa=section.number("kappa", defaults.get("kappa", 0.5), positive=True),
        n=section.integer("n", defaults.get("n", 100), minimum=3),
        boundary=section.choice("boundary", BOUNDARY_KINDS, defaults.get("boundary", "flowLine")),
        boundary_value=section.number("boundaryValue", 0.0),
        heading=section.choice("heading", tuple(HEADINGS), defaults.get("heading", "north")),
        sampler=section.choice("sampler", ("cholesky", "spectral"), SAMPLER),
        step_factor=section.number("stepFactor", STEP_FACTOR, positive=True),
    )
    if not setup.chi > 0:
        raise ConfigValidationError(section.path_of("kappa"), "flow lines need kappa < 4")
    return setup


def read_sle_params(reader: ParameterReader, key: str = "sle", default: Mapping[str, Any] | None = None) -> SleParams:
    data = reader.raw(key, default if default is not None else {"kappa": 2.0})
    if not isinstance(data, Mapping):
        raise ConfigValidationError(reader.path_of(key), "must be an object")
    try:
        return SleParams.from_dict(data)
    except IGeomError as exc:
        raise ConfigValidationError(reader.path_of(key), str(exc)) from exc


def hit_interval(reader: ParameterReader, key: str = "interval", default=(1.0, 2.0)) -> tuple[float, float]:
    a, b = reader.numbers(key, list(default), length=2)
    if not a < b:
        raise ConfigValidationError(reader.path_of(key), "must satisfy a < b")
    return a, b


def as_point(value: complex) -> list[float]:
    return [float(np.real(value)), float(np.imag(value))]
