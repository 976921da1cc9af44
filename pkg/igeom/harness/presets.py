"""Shipped experiment documents, one per acceptance check and per figure."""

from __future__ import annotations

import copy
import math
from typing import Any, Dict

from igeom.core import ConfigValidationError

from .config import ExperimentConfig, parse_config

_QUARTER = math.pi / 4

_PRESETS: Dict[str, Dict[str, Any]] = {
    "constants": {
        "experiment": "constants",
        "parameters": {"kappaCount": 100, "kappaMax": 16.0},
    },
    "loewnerZero": {
        "experiment": "loewnerZero",
        "parameters": {"dt": 1e-4, "T": 1.0, "z": [0.0, 1.0], "tipOffset": 0.01, "stride": 100},
    },
    "driverSanity": {
        "experiment": "driverSanity",
        "parameters": {"kappa": 2.0, "dt": 1e-3, "T": 1.0, "forcePoint": 1.0},
        "seed": 11,
        "runs": 10_000,
    },
    "boundaryHit": {
        "experiment": "boundaryHit",
        "parameters": {
            "kappa": 2.0,
            "weights": [-1.5, -0.5],
            "interval": [1.0, 2.0],
            "proximity": 0.05,
            "T": 5.0,
            "dt": 1e-3,
            "stride": 10,
            "control": True,
        },
        "seed": 17,
        "runs": 2000,
    },
    "reflection": {
        "experiment": "reflection",
        "parameters": {"sle": {"kappa": 2.0, "weightsR": [-1.0], "pointsR": [0.0]}, "dts": [1e-3, 1e-4, 1e-5], "T": 0.5},
        "seed": 23,
        "runs": 20,
    },
    "martingale": {
        "experiment": "martingale",
        "parameters": {
            "cases": [
                {"sle": {"kappa": 2.0}, "z": [0.0, 1.0]},
                {"sle": {"kappa": 2.0}, "z": [0.0, 2.0]},
                {"sle": {"kappa": 2.0, "weightsR": [1.0], "pointsR": [1.0]}, "z": [0.0, 1.0]},
                {"sle": {"kappa": 2.0, "weightsR": [1.0], "pointsR": [1.0]}, "z": [0.0, 2.0]},
            ],
            "capacityTime": 0.1,
            "dt": 1e-3,
        },
        "seed": 29,
        "runs": 10_000,
    },
    "varianceCR": {
        "experiment": "varianceCR",
        "parameters": {"sle": {"kappa": 2.0}, "z": [0.0, 1.0], "crDecrement": 0.2, "dt": 1e-3, "maxTime": 2.0},
        "seed": 31,
        "runs": 10_000,
    },
    "monotonicity": {
        "experiment": "monotonicity",
        "parameters": {"field": {"kappa": 0.5, "n": 100}, "theta1": -_QUARTER, "theta2": _QUARTER, "maxRate": 0.02},
        "seed": 37,
        "runs": 200,
    },
    "merge": {
        "experiment": "merge",
        "parameters": {
            "field": {"kappa": 0.5, "n": 100},
            "starts": [[-0.3, -1.0], [0.3, -1.0]],
            "theta": 0.0,
            "minRate": 0.95,
        },
        "seed": 41,
        "runs": 200,
    },
    "cross": {
        "experiment": "cross",
        "parameters": {
            "field": {"kappa": 0.5, "n": 100},
            "starts": [[0.3, -1.0], [-0.3, -1.0]],
            "theta1": _QUARTER,
            "theta2": -_QUARTER,
            "maxRate": 0.05,
        },
        "seed": 43,
        "runs": 200,
    },
    "duality": {
        "experiment": "duality",
        "parameters": {
            "field": {"kappa": 0.5, "n": 200},
            "thetas": [-_QUARTER, 0.0, _QUARTER],
            "iterations": 3,
            "seedStride": 5,
            "spacings": 3.0,
            "minRate": 0.9,
        },
        "seed": 47,
        "runs": 100,
    },
    "fanArea": {
        "experiment": "fanArea",
        "parameters": {"field": {"kappa": 0.25}, "sizes": [50, 100, 200], "angleCount": 50},
        "seed": 53,
        "runs": 20,
    },
    "markov": {
        "experiment": "markov",
        "parameters": {"n": 12, "window": [4, 8, 4, 8], "tolerance": 1e-8},
    },
    "fan": {
        "experiment": "figure",
        "parameters": {"kind": "fan", "field": {"kappa": 4.0 / 3.0, "n": 300}, "angleCount": 12},
        "seed": 1,
    },
    "northFans": {
        "experiment": "figure",
        "parameters": {"kind": "northFans", "field": {"n": 200}, "kappas": [0.125, 1.0, 2.0], "angleCount": 12},
        "seed": 2,
    },
    "grid": {
        "experiment": "figure",
        "parameters": {"kind": "grid", "field": {"kappa": 0.5, "n": 200}, "startCount": 16},
        "seed": 3,
    },
    "twoFans": {
        "experiment": "figure",
        "parameters": {
            "kind": "twoFans",
            "field": {"kappa": 0.5, "n": 200},
            "starts": [[-0.5, -0.9], [0.5, -0.9]],
            "angleCount": 12,
        },
        "seed": 4,
    },
    "lightCone": {
        "experiment": "figure",
        "parameters": {"kind": "lightCone", "field": {"kappa": 0.5, "n": 200}, "iterations": 4, "seedStride": 5},
        "seed": 5,
    },
}


def preset_names() -> tuple[str, ...]:
    return tuple(_PRESETS)


def get_preset(name: str) -> ExperimentConfig:
    document = _PRESETS.get(name)
    if document is None:
        raise ConfigValidationError("preset", f"unknown preset {name!r}; available: {', '.join(_PRESETS)}")
    return parse_config(copy.deepcopy(document))
