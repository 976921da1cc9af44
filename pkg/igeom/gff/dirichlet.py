"""Discrete Dirichlet form of the triangulated grid and the GFF samplers built on it.

The P1 stiffness matrix of the SW-NE triangulation is the 4-neighbour graph
Laplacian, so the zero-boundary GFF has covariance ``2 pi K^{-1}`` with ``K``
restricted to the free vertices.
"""

from __future__ import annotations

import logging
import math
from functools import lru_cache
from typing import Literal, Optional

import numpy as np
from scipy import fft, linalg, sparse

from igeom.core import ParameterDomainError, SeedLike, make_rng
from logging_config import register_log_translations

from .boundary import BoundaryTrace
from .grid import DiscreteField, TriangulatedGrid

logger = logging.getLogger(__name__)

register_log_translations(
    {
        "Factorised Dirichlet form: %d free vertices, bandwidth %d": {
            "ru": "Форма Дирихле разложена: %d свободных вершин, ширина ленты %d",
        },
    }
)

SamplerMethod = Literal["cholesky", "spectral"]
GFF_SCALE = math.sqrt(2.0 * math.pi)

_NEIGHBOURS = ((1, 0), (-1, 0), (0, 1), (0, -1))


class DirichletForm:
    """Graph Laplacian on the vertices selected by ``free_mask``.

    Vertices outside the mask are held fixed; each free vertex keeps diagonal
    weight 4 whatever its neighbours are.
    """

    def __init__(self, grid: TriangulatedGrid, free_mask: Optional[np.ndarray] = None) -> None:
        mask = grid.interior_mask() if free_mask is None else np.asarray(free_mask, dtype=bool)
        if mask.shape != (grid.n, grid.n):
            raise ParameterDomainError("free mask must match the grid shape")
        if mask[0, :].any() or mask[-1, :].any() or mask[:, 0].any() or mask[:, -1].any():
            raise ParameterDomainError("boundary vertices of the grid cannot be free")
        self.grid = grid
        self.free_mask = mask
        self.index = np.full(mask.shape, -1, dtype=int)
        self.free_vertices = np.argwhere(mask)
        self.size = int(self.free_vertices.shape[0])
        if self.size == 0:
            raise ParameterDomainError("free mask selects no vertices")
        self.index[mask] = np.arange(self.size)

        rows, cols, data = [], [], []
        fixed_rows, fixed_cols = [], []
        n = grid.n
        for k, (r, c) in enumerate(self.free_vertices):
            rows.append(k)
            cols.append(k)
            data.append(4.0)
            for dr, dc in _NEIGHBOURS:
                rr, cc = r + dr, c + dc
                j = self.index[rr, cc]
                if j >= 0:
                    rows.append(k)
                    cols.append(j)
                    data.append(-1.0)
                else:
                    fixed_rows.append(k)
                    fixed_cols.append(rr * n + cc)
        self.matrix = sparse.csr_matrix((data, (rows, cols)), shape=(self.size, self.size))
        self.coupling = sparse.csr_matrix(
            (np.ones(len(fixed_rows)), (fixed_rows, fixed_cols)), shape=(self.size, n * n)
        )
        self._banded_factor: Optional[np.ndarray] = None
        self._bandwidth = 0

    @property
    def bandwidth(self) -> int:
        coo = self.matrix.tocoo()
        return int(np.max(coo.col - coo.row)) if coo.nnz else 0

    def banded_factor(self) -> np.ndarray:
        """Upper Cholesky factor of ``K`` in LAPACK banded storage."""
        if self._banded_factor is None:
            u = self.bandwidth
            coo = sparse.triu(self.matrix).tocoo()
            ab = np.zeros((u + 1, self.size))
            ab[u + coo.row - coo.col, coo.col] = coo.data
            self._banded_factor = linalg.cholesky_banded(ab, lower=False)
            self._bandwidth = u
            logger.debug("Factorised Dirichlet form: %d free vertices, bandwidth %d", self.size, u)
        return self._banded_factor

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        factor = self.banded_factor()
        return linalg.cho_solve_banded((factor, False), rhs)

    def sample(self, rng: np.random.Generator, count: int = 1) -> np.ndarray:
        """Draws with covariance ``2 pi K^{-1}``, shape (count, size)."""
        factor = self.banded_factor()
        z = rng.standard_normal((self.size, count))
        # K = U^T U, so U^{-1} z has covariance K^{-1}.
        draws = linalg.solve_banded((0, self._bandwidth), factor, z)
        return GFF_SCALE * draws.T

    def harmonic_fill(self, fixed_values: np.ndarray) -> np.ndarray:
        """Discrete-harmonic values on the free vertices given the (n, n) array of fixed values."""
        rhs = self.coupling @ np.asarray(fixed_values, dtype=float).ravel()
        return self.solve(rhs)

    def dense_covariance(self) -> np.ndarray:
        return 2.0 * math.pi * self.solve(np.eye(self.size))

    def scatter(self, free_values: np.ndarray, base: Optional[np.ndarray] = None) -> np.ndarray:
        out = np.zeros(self.free_mask.shape) if base is None else np.array(base, dtype=float)
        out[self.free_mask] = free_values
        return out


@lru_cache(maxsize=8)
def dirichlet_form(grid: TriangulatedGrid) -> DirichletForm:
    """Cached form with every interior vertex free."""
    return DirichletForm(grid)


def spectral_sample(grid: TriangulatedGrid, rng: np.random.Generator) -> np.ndarray:
    """Interior values from the sine basis diagonalising the Laplacian."""
    m = grid.n - 2
    k = np.arange(1, m + 1)
    mu_axis = 2.0 - 2.0 * np.cos(np.pi * k / (m + 1))
    mu = mu_axis[:, None] + mu_axis[None, :]
    w = rng.standard_normal((m, m))
    return GFF_SCALE * fft.idstn(w / np.sqrt(mu), type=1, norm="ortho")


def sample_zero_boundary_gff(
    grid: TriangulatedGrid,
    seed: SeedLike,
    *,
    method: SamplerMethod = "cholesky",
    chi: float = math.nan,
    heading_offset: float = 0.0,
) -> DiscreteField:
    """Zero-boundary discrete GFF on ``grid``; same grid and seed give the same field."""

    rng = make_rng(seed)
    values = np.zeros((grid.n, grid.n))
    if method == "spectral":
        values[1:-1, 1:-1] = spectral_sample(grid, rng)
    elif method == "cholesky":
        form = dirichlet_form(grid)
        values = form.scatter(form.sample(rng)[0])
    else:
        raise ParameterDomainError(f"unknown GFF sampler {method!r}")
    boundary = BoundaryTrace.constant(grid.boundary_indices(), 0.0)
    return DiscreteField(grid, values, boundary, chi=chi, heading_offset=heading_offset)


def harmonic_extension(grid: TriangulatedGrid, boundary: BoundaryTrace) -> DiscreteField:
    """Discrete-harmonic field matching ``boundary`` on the boundary vertices."""

    if boundary.values.shape[0] != 4 * (grid.n - 1):
        raise ParameterDomainError("boundary trace does not match the grid boundary")
    fixed = boundary.as_grid(grid.n)
    form = dirichlet_form(grid)
    values = form.scatter(form.harmonic_fill(fixed), base=fixed)
    return DiscreteField(grid, values, boundary)


def sample_field(
    grid: TriangulatedGrid,
    boundary: BoundaryTrace,
    seed: SeedLike,
    *,
    chi: float,
    heading_offset: float = 0.0,
    method: SamplerMethod = "cholesky",
) -> DiscreteField:
    """GFF with the given boundary data: zero-boundary sample plus harmonic extension."""

    noise = sample_zero_boundary_gff(grid, seed, method=method)
    mean = harmonic_extension(grid, boundary)
    return DiscreteField(
        grid,
        noise.values + mean.values,
        boundary,
        chi=chi,
        heading_offset=heading_offset,
    )
