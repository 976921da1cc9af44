"""Domain Markov decomposition of the discrete GFF."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import linalg

from igeom.core import ParameterDomainError

from .dirichlet import DirichletForm, dirichlet_form
from .grid import TriangulatedGrid


@dataclass(frozen=True)
class MarkovDecomposition:
    """``h|_W = mean_operator @ h|_outside + independent zero-boundary GFF on W``.

    ``inside`` and ``outside`` are (row, col) index arrays into the grid; the
    outside set is every interior vertex not in the window.
    """

    inside: np.ndarray
    outside: np.ndarray
    mean_operator: np.ndarray
    covariance: np.ndarray

    def conditional_mean(self, values: np.ndarray) -> np.ndarray:
        outside_values = values[self.outside[:, 0], self.outside[:, 1]]
        return self.mean_operator @ outside_values


def _window_mask(grid: TriangulatedGrid, window: np.ndarray) -> np.ndarray:
    window = np.asarray(window, dtype=bool)
    if window.shape != (grid.n, grid.n):
        raise ParameterDomainError("window mask must match the grid shape")
    if not (window & ~grid.interior_mask()).sum() == 0:
        raise ParameterDomainError("window must lie inside the grid interior")
    if not window.any():
        raise ParameterDomainError("window is empty")
    return window


def markov_decomposition(grid: TriangulatedGrid, window: np.ndarray) -> MarkovDecomposition:
    """Harmonic extension into ``window`` plus a zero-boundary field on it."""

    mask = _window_mask(grid, window)
    form = DirichletForm(grid, mask)
    outside_mask = grid.interior_mask() & ~mask
    outside = np.argwhere(outside_mask)
    flat = outside[:, 0] * grid.n + outside[:, 1]
    coupling = form.coupling[:, flat].toarray()
    mean_operator = form.solve(coupling)
    return MarkovDecomposition(
        inside=form.free_vertices,
        outside=outside,
        mean_operator=np.atleast_2d(mean_operator),
        covariance=form.dense_covariance(),
    )


def gaussian_conditioning(grid: TriangulatedGrid, window: np.ndarray) -> MarkovDecomposition:
    """The same decomposition from the full covariance by Gaussian conditioning."""

    mask = _window_mask(grid, window)
    form = dirichlet_form(grid)
    cov = form.dense_covariance()
    inside_idx = form.index[mask]
    outside_idx = form.index[grid.interior_mask() & ~mask]
    cov_oo = cov[np.ix_(outside_idx, outside_idx)]
    cov_io = cov[np.ix_(inside_idx, outside_idx)]
    cov_ii = cov[np.ix_(inside_idx, inside_idx)]
    factor = linalg.cho_factor(cov_oo)
    mean_operator = linalg.cho_solve(factor, cov_io.T).T
    return MarkovDecomposition(
        inside=np.argwhere(mask),
        outside=np.argwhere(grid.interior_mask() & ~mask),
        mean_operator=mean_operator,
        covariance=cov_ii - mean_operator @ cov_io.T,
    )
