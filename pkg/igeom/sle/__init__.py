"""Bessel processes, SLE_kappa(rho) drivers and the Loewner flow."""

from .bessel import (
    BesselScheme,
    occupation_fraction,
    simulate_bessel,
    simulate_bessel_batch,
    squared_bessel_step,
)
from .driver import (
    DEFAULT_COLLISION_FACTOR,
    DEFAULT_MICRO_GAP_LOG,
    DriverBatch,
    DriverPath,
    MergeEvent,
    collision_occupation,
    simulate_driver,
    simulate_driver_batch,
    zero_driver,
)
from .hitting import HitEstimate, boundary_hit_probability, count_boundary_hits, distance_to_interval
from .io import read_params, write_curve_csv, write_driver_csv, write_params
from .loewner import (
    DEFAULT_SWALLOW_CUTOFF,
    BatchTrajectory,
    CurvePolyline,
    MapState,
    MapTrajectory,
    extract_curve,
    forward_driver_batch,
    inverse_slit_step,
    loewner_forward,
    loewner_forward_batch,
    slit_step,
)

__all__ = [
    "DEFAULT_COLLISION_FACTOR",
    "DEFAULT_MICRO_GAP_LOG",
    "DEFAULT_SWALLOW_CUTOFF",
    "BatchTrajectory",
    "BesselScheme",
    "CurvePolyline",
    "DriverBatch",
    "DriverPath",
    "HitEstimate",
    "MapState",
    "MapTrajectory",
    "MergeEvent",
    "boundary_hit_probability",
    "collision_occupation",
    "count_boundary_hits",
    "distance_to_interval",
    "extract_curve",
    "forward_driver_batch",
    "inverse_slit_step",
    "loewner_forward",
    "loewner_forward_batch",
    "occupation_fraction",
    "read_params",
    "simulate_bessel",
    "simulate_bessel_batch",
    "simulate_driver",
    "simulate_driver_batch",
    "slit_step",
    "squared_bessel_step",
    "write_curve_csv",
    "write_driver_csv",
    "write_params",
    "zero_driver",
]
