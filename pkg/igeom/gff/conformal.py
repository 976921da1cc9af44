"""Schwarz-Christoffel map between the upper half-plane and the square [-1, 1]^2.

``psi(w) = F(w; k) / K(k) - i`` sends 0 to ``-i`` and infinity to ``i`` when the
modulus satisfies ``K'(k) = 2 K(k)``; the corners are the images of
``+-1`` and ``+-1/k``. Boundary points are converted with Jacobi elliptic
functions, so the pull-back is accurate well below the lab tolerance.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate, optimize, special

from igeom.core import DomainError
from logging_config import register_log_translations

from .boundary import BoundaryTrace, StepFunction
from .grid import TriangulatedGrid

logger = logging.getLogger(__name__)

register_log_translations(
    {
        "Square map modulus k=%.12f (K=%.12f)": {
            "ru": "Модуль отображения на квадрат k=%.12f (K=%.12f)",
        },
    }
)

_SIDE_TOLERANCE = 1e-9


@dataclass(frozen=True)
class SquareMap:
    """Conformal map of H onto [-1, 1]^2 and its boundary inverse."""

    m: float
    K: float

    @property
    def k(self) -> float:
        return math.sqrt(self.m)

    @property
    def k_prime(self) -> float:
        return math.sqrt(1.0 - self.m)

    @property
    def K_prime(self) -> float:
        return float(special.ellipk(1.0 - self.m))

    def forward(self, x: float) -> complex:
        """Image of a real point; ``inf`` goes to ``i``."""
        if math.isinf(x):
            return 1j
        if x < 0:
            return -self.forward(-x).conjugate()
        k, m = self.k, self.m
        if x <= 1.0:
            value = complex(special.ellipkinc(math.asin(x), m), 0.0)
        elif x <= 1.0 / k:
            s = math.sqrt((x * x - 1.0) / (self.m_prime * x * x))
            value = complex(self.K, special.ellipkinc(math.asin(min(s, 1.0)), self.m_prime))
        else:
            value = complex(special.ellipkinc(math.asin(1.0 / (k * x)), m), self.K_prime)
        return value / self.K - 1j

    @property
    def m_prime(self) -> float:
        return 1.0 - self.m

    def inverse(self, z: complex) -> float:
        """Real preimage of a point on the square boundary; ``i`` maps to ``inf``."""
        x, y = z.real, z.imag
        if x < -_SIDE_TOLERANCE:
            return -self.inverse(complex(-x, y))
        K = self.K
        if abs(y + 1.0) <= _SIDE_TOLERANCE:
            sn = special.ellipj(x * K, self.m)[0]
            return float(sn)
        if abs(x - 1.0) <= _SIDE_TOLERANCE:
            sn = special.ellipj((y + 1.0) * K, self.m_prime)[0]
            return 1.0 / math.sqrt(1.0 - self.m_prime * sn * sn)
        if abs(y - 1.0) <= _SIDE_TOLERANCE:
            if abs(x) <= _SIDE_TOLERANCE:
                return math.inf
            sn = special.ellipj(x * K, self.m)[0]
            return 1.0 / (self.k * sn)
        raise DomainError(f"{z} is not on the boundary of the square")

    @staticmethod
    def boundary_arg_derivative(z: complex) -> float:
        """``arg phi'`` at a boundary point for the inverse map ``phi`` onto H.

        Corners and the preimage of infinity take the mean of the adjacent sides.
        """
        x, y = z.real, z.imag
        tol = _SIDE_TOLERANCE
        bottom = abs(y + 1.0) <= tol
        top = abs(y - 1.0) <= tol
        right = abs(x - 1.0) <= tol
        left = abs(x + 1.0) <= tol
        if bottom and right:
            return -math.pi / 4
        if bottom and left:
            return math.pi / 4
        if top and right:
            return -3 * math.pi / 4
        if top and left:
            return 3 * math.pi / 4
        if bottom:
            return 0.0
        if right:
            return -math.pi / 2
        if left:
            return math.pi / 2
        if top:
            if abs(x) <= tol:
                return 0.0
            return -math.pi if x > 0 else math.pi
        raise DomainError(f"{z} is not on the boundary of the square")

    def quadrature_forward(self, x: float) -> complex:
        """``psi(x)`` by direct integration of the Schwarz-Christoffel integrand."""
        k = self.k

        def magnitude(t: float) -> float:
            return 1.0 / math.sqrt(abs((1.0 - t * t) * (1.0 - k * k * t * t)))

        a = abs(x)
        # Past each branch point the upper-half-plane branch turns by +i.
        directions = ((0.0, 1.0, 1.0), (1.0, 1.0 / k, 1j), (1.0 / k, math.inf, -1.0))
        total = 0j
        for lo, hi, direction in directions:
            if a <= lo:
                break
            piece = integrate.quad(magnitude, lo, min(a, hi), limit=200, epsabs=1e-13, epsrel=1e-12)[0]
            total += direction * piece
        if x < 0:
            total = -total.conjugate()
        return total / self.K - 1j


@lru_cache(maxsize=1)
def square_map() -> SquareMap:
    """Solve ``K'(m) / K(m) = 2`` for the parameter ``m = k^2``."""

    m = optimize.brentq(
        lambda p: special.ellipk(1.0 - p) / special.ellipk(p) - 2.0,
        1e-6,
        0.5,
        xtol=1e-15,
    )
    K = float(special.ellipk(m))
    logger.debug("Square map modulus k=%.12f (K=%.12f)", math.sqrt(m), K)
    return SquareMap(m=float(m), K=K)


def pullback_boundary_data(
    half_plane_boundary: StepFunction,
    grid: TriangulatedGrid,
    chi: float,
    anchor: SquareMap | None = None,
) -> BoundaryTrace:
    """Boundary data on the square from piecewise-constant data on R.

    Each boundary vertex gets ``h(phi(z)) - chi * arg phi'(z)``. At a jump of
    the step function, or at the image of infinity, the mean of the
    one-sided values is used.
    """

    if grid.box != (-1.0, -1.0, 1.0, 1.0):
        raise DomainError("pull-back is defined for the [-1, 1]^2 grid")
    anchor = anchor or square_map()
    vertices = grid.boundary_indices()
    values = np.empty(vertices.shape[0])
    for idx, (row, col) in enumerate(vertices):
        z = grid.vertex(int(row), int(col))
        s = anchor.inverse(z)
        base = half_plane_boundary.at_infinity() if math.isinf(s) else half_plane_boundary(s)
        values[idx] = base - chi * anchor.boundary_arg_derivative(z)
    return BoundaryTrace(vertices=vertices, values=values)
