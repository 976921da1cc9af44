"""SLE_kappa(rho) parameter objects."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Literal, Mapping, Sequence, Tuple

import numpy as np

from .errors import OrderingError, ParameterDomainError

Side = Literal["L", "R"]


@dataclass(frozen=True)
class ForcePoint:
    """A weighted marked boundary point.

    A position of 0 on side ``L`` is the point 0^- and on side ``R`` it is 0^+;
    the side tag is what distinguishes them.
    """

    position: float
    weight: float
    side: Side

    @property
    def at_tip(self) -> bool:
        return self.position == 0.0


@dataclass(frozen=True)
class SleParams:
    kappa: float
    weights_l: Tuple[float, ...] = ()
    weights_r: Tuple[float, ...] = ()
    points_l: Tuple[float, ...] = ()
    points_r: Tuple[float, ...] = ()
    label: str = field(default="", compare=False)

    def __post_init__(self) -> None:
        for name in ("weights_l", "weights_r", "points_l", "points_r"):
            object.__setattr__(self, name, tuple(float(v) for v in getattr(self, name)))

        if not np.isfinite(self.kappa) or self.kappa <= 0:
            raise ParameterDomainError(f"kappa must be positive, got {self.kappa}")
        if len(self.weights_l) != len(self.points_l):
            raise ParameterDomainError("weights_l and points_l differ in length")
        if len(self.weights_r) != len(self.points_r):
            raise ParameterDomainError("weights_r and points_r differ in length")

        if self.points_l:
            if self.points_l[0] > 0:
                raise OrderingError("left force points must be <= 0")
            if any(b >= a for a, b in zip(self.points_l, self.points_l[1:])):
                raise OrderingError("left force points must be strictly decreasing")
        if self.points_r:
            if self.points_r[0] < 0:
                raise OrderingError("right force points must be >= 0")
            if any(b <= a for a, b in zip(self.points_r, self.points_r[1:])):
                raise OrderingError("right force points must be strictly increasing")

    @classmethod
    def plain(cls, kappa: float) -> "SleParams":
        return cls(kappa=kappa)

    @classmethod
    def single_right(cls, kappa: float, rho: float, x: float = 0.0) -> "SleParams":
        return cls(kappa=kappa, weights_r=(rho,), points_r=(x,))

    @classmethod
    def single_left(cls, kappa: float, rho: float, x: float = 0.0) -> "SleParams":
        return cls(kappa=kappa, weights_l=(rho,), points_l=(x,))

    @property
    def force_points(self) -> Tuple[ForcePoint, ...]:
        left = tuple(ForcePoint(x, w, "L") for x, w in zip(self.points_l, self.weights_l))
        right = tuple(ForcePoint(x, w, "R") for x, w in zip(self.points_r, self.weights_r))
        return left + right

    @property
    def force_point_count(self) -> int:
        return len(self.points_l) + len(self.points_r)

    def to_dict(self) -> dict[str, Any]:
        return {
            "kappa": self.kappa,
            "weightsL": list(self.weights_l),
            "weightsR": list(self.weights_r),
            "pointsL": list(self.points_l),
            "pointsR": list(self.points_r),
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "SleParams":
        def _floats(key: str) -> Sequence[float]:
            return tuple(float(v) for v in data.get(key, ()) or ())

        if "kappa" not in data:
            raise ParameterDomainError("kappa is required")
        return cls(
            kappa=float(data["kappa"]),
            weights_l=_floats("weightsL"),
            weights_r=_floats("weightsR"),
            points_l=_floats("pointsL"),
            points_r=_floats("pointsR"),
        )
