"""Closed-form constants of the imaginary geometry of a given kappa."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

from .errors import ParameterDomainError

IDENTITY_TOLERANCE = 1e-12

BoundaryInteraction = Literal["avoids", "hits", "absorbed"]
StripRegime = Literal["hits", "escapes_left", "escapes_right"]


@dataclass(frozen=True)
class DerivedConstants:
    kappa: float
    lam: float
    lam_prime: float
    chi: float
    kappa_prime: float

    @property
    def full_revolution_residual(self) -> float:
        """|lambda' - (lambda - pi chi / 2)|."""
        return abs(self.lam_prime - (self.lam - 0.5 * math.pi * self.chi))

    @property
    def winding_residual(self) -> float:
        """|2 pi chi - (4 - kappa) lambda|."""
        return abs(2.0 * math.pi * self.chi - (4.0 - self.kappa) * self.lam)

    def identities_hold(self, tolerance: float = IDENTITY_TOLERANCE) -> bool:
        return self.full_revolution_residual < tolerance and self.winding_residual < tolerance


def derive_constants(kappa: float) -> DerivedConstants:
    if not math.isfinite(kappa) or kappa <= 0:
        raise ParameterDomainError(f"kappa must be positive, got {kappa}")
    root = math.sqrt(kappa)
    return DerivedConstants(
        kappa=kappa,
        lam=math.pi / root,
        lam_prime=math.pi * root / 4.0,
        chi=2.0 / root - root / 2.0,
        kappa_prime=16.0 / kappa,
    )


def dual_constants(kappa: float) -> DerivedConstants:
    """Constants of the counterflow geometry, kappa' = 16 / kappa."""

    return derive_constants(16.0 / derive_constants(kappa).kappa)


def bessel_dimension(kappa: float, rho: float) -> float:
    if kappa <= 0:
        raise ParameterDomainError(f"kappa must be positive, got {kappa}")
    return 1.0 + 2.0 * (rho + 2.0) / kappa


def boundary_interaction(kappa: float, rho: float) -> BoundaryInteraction:
    """How a single-force-point SLE_kappa(rho) meets the boundary beyond its force point."""

    if rho >= kappa / 2.0 - 2.0:
        return "avoids"
    if rho > kappa / 2.0 - 4.0:
        return "hits"
    return "absorbed"


def strip_hitting_regime(height: float, consts: DerivedConstants) -> StripRegime:
    """Behaviour of a flow line in the strip whose upper boundary carries ``height``."""

    if height >= consts.lam:
        return "escapes_left"
    if height <= -consts.lam:
        return "escapes_right"
    return "hits"
