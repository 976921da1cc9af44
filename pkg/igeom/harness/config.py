"""Experiment documents: one JSON object naming the experiment, its parameters, seed and run count."""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Sequence

from igeom.core import ConfigValidationError

EXPERIMENTS = (
    "monotonicity",
    "merge",
    "cross",
    "duality",
    "fanArea",
    "boundaryHit",
    "martingale",
    "varianceCR",
    "figure",
    "constants",
    "loewnerZero",
    "driverSanity",
    "reflection",
    "markov",
)

_MAX_SEED = 2**64 - 1


def canonical_json(data: Any) -> bytes:
    return json.dumps(data, sort_keys=True, separators=(",", ":"), ensure_ascii=True).encode("ascii")


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    parameters: Dict[str, Any] = field(default_factory=dict)
    seed: int = 0
    runs: int = 0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "experiment": self.experiment,
            "parameters": self.parameters,
            "seed": self.seed,
            "runs": self.runs,
        }

    def config_hash(self) -> str:
        return hashlib.sha256(canonical_json(self.to_dict())).hexdigest()

    def reader(self) -> "ParameterReader":
        return ParameterReader(self.parameters)

    def with_overrides(
        self,
        *,
        seed: Optional[int] = None,
        runs: Optional[int] = None,
        parameters: Optional[Mapping[str, Any]] = None,
    ) -> "ExperimentConfig":
        merged = {**self.parameters, **(parameters or {})}
        return parse_config(
            {
                "experiment": self.experiment,
                "parameters": merged,
                "seed": self.seed if seed is None else seed,
                "runs": self.runs if runs is None else runs,
            }
        )


def parse_config(data: Mapping[str, Any]) -> ExperimentConfig:
    if not isinstance(data, Mapping):
        raise ConfigValidationError("$", "an experiment document must be a JSON object")
    experiment = data.get("experiment")
    if experiment not in EXPERIMENTS:
        raise ConfigValidationError("experiment", f"unknown experiment {experiment!r}; expected one of {EXPERIMENTS}")
    parameters = data.get("parameters", {}) or {}
    if not isinstance(parameters, Mapping):
        raise ConfigValidationError("parameters", "must be an object")
    seed = data.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int) or not 0 <= seed <= _MAX_SEED:
        raise ConfigValidationError("seed", "must be an integer in [0, 2^64)")
    runs = data.get("runs", 0)
    if isinstance(runs, bool) or not isinstance(runs, int) or runs < 0:
        raise ConfigValidationError("runs", "must be a non-negative integer")
    return ExperimentConfig(experiment=experiment, parameters=dict(parameters), seed=seed, runs=runs)


def load_config(path: str | Path) -> ExperimentConfig:
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigValidationError("$", f"{path} is not valid JSON: {exc}") from exc
    return parse_config(data)


_MISSING = object()


class ParameterReader:
    """Typed access to ``parameters``; every failure names its dotted field path."""

    def __init__(self, data: Mapping[str, Any], prefix: str = "parameters") -> None:
        self._data = data
        self._prefix = prefix

    def _path(self, key: str) -> str:
        return f"{self._prefix}.{key}"

    def _get(self, key: str, default: Any) -> Any:
        value = self._data.get(key, default)
        if value is _MISSING:
            raise ConfigValidationError(self._path(key), "is required")
        return value

    def number(
        self,
        key: str,
        default: Any = _MISSING,
        *,
        minimum: Optional[float] = None,
        maximum: Optional[float] = None,
        positive: bool = False,
    ) -> float:
        value = self._get(key, default)
        if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
            raise ConfigValidationError(self._path(key), f"must be a finite number, got {value!r}")
        value = float(value)
        if positive and value <= 0:
            raise ConfigValidationError(self._path(key), "must be positive")
        if minimum is not None and value < minimum:
            raise ConfigValidationError(self._path(key), f"must be >= {minimum}")
        if maximum is not None and value > maximum:
            raise ConfigValidationError(self._path(key), f"must be <= {maximum}")
        return value

    def integer(self, key: str, default: Any = _MISSING, *, minimum: Optional[int] = None) -> int:
        value = self._get(key, default)
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigValidationError(self._path(key), f"must be an integer, got {value!r}")
        if minimum is not None and value < minimum:
            raise ConfigValidationError(self._path(key), f"must be >= {minimum}")
        return value

    def numbers(self, key: str, default: Any = _MISSING, *, length: Optional[int] = None) -> tuple[float, ...]:
        value = self._get(key, default)
        if not isinstance(value, Sequence) or isinstance(value, str):
            raise ConfigValidationError(self._path(key), "must be a list of numbers")
        if length is not None and len(value) != length:
            raise ConfigValidationError(self._path(key), f"must have {length} entries")
        out = []
        for index, item in enumerate(value):
            if isinstance(item, bool) or not isinstance(item, (int, float)) or not math.isfinite(item):
                raise ConfigValidationError(f"{self._path(key)}[{index}]", f"must be a finite number, got {item!r}")
            out.append(float(item))
        return tuple(out)

    def choice(self, key: str, options: Sequence[str], default: Any = _MISSING) -> str:
        value = self._get(key, default)
        if value not in options:
            raise ConfigValidationError(self._path(key), f"must be one of {tuple(options)}, got {value!r}")
        return value

    def point(self, key: str, default: Any = _MISSING) -> complex:
        x, y = self.numbers(key, default, length=2)
        return complex(x, y)

    def section(self, key: str, default: Any = _MISSING) -> "ParameterReader":
        value = self._get(key, default)
        if not isinstance(value, Mapping):
            raise ConfigValidationError(self._path(key), "must be an object")
        return ParameterReader(value, self._path(key))

    def raw(self, key: str, default: Any = _MISSING) -> Any:
        return self._get(key, default)

    def path_of(self, key: str) -> str:
        return self._path(key)
