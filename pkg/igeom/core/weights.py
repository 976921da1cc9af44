"""Angle <-> force-point weight conversions."""

from __future__ import annotations

import math
from typing import Iterable, Tuple

from .constants import DerivedConstants
from .errors import OrderingError

CONTINUATION_THRESHOLD = -2.0

WeightPair = Tuple[float, float]


def conditional_law_weights(
    theta1: float,
    theta2: float,
    a: float,
    b: float,
    consts: DerivedConstants,
) -> Tuple[WeightPair, WeightPair]:
    """Weights of each of two flow lines given the other.

    Returns ``(weights of eta_theta2 given eta_theta1, weights of eta_theta1
    given eta_theta2)``, each as ``(rho_L, rho_R)``, for boundary data -a on
    the negative axis and b on the positive axis.
    """

    if theta1 >= theta2:
        raise OrderingError(f"theta1 must be below theta2, got {theta1} >= {theta2}")
    lam, chi = consts.lam, consts.chi
    cross = (theta2 - theta1) * chi / lam - 2.0
    upper_given_lower = ((a - theta2 * chi) / lam - 1.0, cross)
    lower_given_upper = (cross, (b + theta1 * chi) / lam - 1.0)
    return upper_given_lower, lower_given_upper


def flow_line_weights(a: float, b: float, theta: float, consts: DerivedConstants) -> WeightPair:
    """SLE_kappa(rho_L; rho_R) weights of the angle-theta flow line for data -a | b."""

    return (
        (a - theta * consts.chi) / consts.lam - 1.0,
        (b + theta * consts.chi) / consts.lam - 1.0,
    )


def continuation_threshold_hit(partial_sums: Iterable[float]) -> bool:
    return math.fsum(partial_sums) <= CONTINUATION_THRESHOLD


def max_simple_angle_gap(consts: DerivedConstants) -> float:
    """2 lambda / chi: angle gaps below this keep the flow lines from crossing into each other."""

    if consts.chi == 0.0:
        return math.inf
    return 2.0 * consts.lam / consts.chi


def critical_intersection_angle(consts: DerivedConstants) -> float:
    """pi kappa / (4 - kappa): flow lines with a smaller angle gap can bounce off each other."""

    return max_simple_angle_gap(consts) - math.pi
