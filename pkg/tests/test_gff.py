import math

import numpy as np
import pytest

from igeom.core import DomainError, ParameterDomainError, derive_constants, make_rng
from igeom.gff import (
    GFF_SCALE,
    DirichletForm,
    DiscreteField,
    StepFunction,
    TriangulatedGrid,
    WindingRecord,
    dirichlet_form,
    eval_pl,
    flow_line_heights,
    gaussian_conditioning,
    harmonic_extension,
    locate_triangle,
    markov_decomposition,
    pullback_boundary_data,
    read_field,
    sample_field,
    sample_zero_boundary_gff,
    spectral_sample,
    square_map,
    winding_boundary_value,
)
from igeom.gff.boundary import BoundaryTrace


def _random_field(grid: TriangulatedGrid, seed: int = 0) -> DiscreteField:
    return DiscreteField(grid, make_rng(seed).standard_normal((grid.n, grid.n)))


def test_eval_at_vertex_midpoint_and_centroid(small_grid):
    field = _random_field(small_grid)
    v = field.values
    h = small_grid.spacing
    z00 = small_grid.vertex(2, 3)
    assert eval_pl(field, z00) == pytest.approx(v[2, 3])
    assert eval_pl(field, z00 + h / 2) == pytest.approx(0.5 * (v[2, 3] + v[2, 4]))
    centroid = z00 + complex(2 * h / 3, h / 3)
    assert eval_pl(field, centroid) == pytest.approx((v[2, 3] + v[2, 4] + v[3, 4]) / 3)


def test_eval_is_vectorised(small_grid):
    field = _random_field(small_grid, 1)
    points = np.array([small_grid.vertex(1, 1), small_grid.vertex(4, 5)])
    np.testing.assert_allclose(eval_pl(field, points), [field.values[1, 1], field.values[4, 5]])


def test_eval_outside_box_rejected(small_grid):
    with pytest.raises(DomainError):
        eval_pl(_random_field(small_grid), 1.5 + 0j)


@pytest.mark.parametrize(
    "point, heading, row, upper",
    [
        (-0.5 - 0.5j, 0.0, 0, True),
        (-0.5 - 0.5j, math.pi, 0, False),
        (-0.5 + 0j, 0.0, 1, False),
        (-0.5 + 0j, math.pi, 0, True),
    ],
)
def test_edge_points_take_the_triangle_left_of_travel(point, heading, row, upper):
    pick = locate_triangle(TriangulatedGrid(3), point, heading)
    assert int(pick.row) == row
    assert bool(pick.upper) is upper


def test_interior_points_ignore_the_heading():
    grid = TriangulatedGrid(3)
    plain = locate_triangle(grid, -0.3 - 0.8j)
    steered = locate_triangle(grid, -0.3 - 0.8j, math.pi / 3)
    assert (int(plain.row), int(plain.col), bool(plain.upper)) == (int(steered.row), int(steered.col), bool(steered.upper))


def test_edge_choice_does_not_change_the_value(small_grid):
    field = _random_field(small_grid, 2)
    h = small_grid.spacing
    z00 = small_grid.vertex(2, 3)
    points = np.array([z00 + h / 2, z00 + complex(h / 2, h / 2), z00 + 1j * h / 3, z00])
    for heading in (0.0, 1.0, math.pi, -2.0):
        np.testing.assert_allclose(eval_pl(field, points, heading), eval_pl(field, points), atol=1e-9)


def test_grid_needs_three_vertices():
    with pytest.raises(ParameterDomainError):
        TriangulatedGrid(2)


def test_boundary_indices_cycle(small_grid):
    indices = small_grid.boundary_indices()
    assert indices.shape == (4 * (small_grid.n - 1), 2)
    assert len({tuple(p) for p in indices}) == indices.shape[0]


def test_harmonic_extension_of_constant(small_grid):
    boundary = BoundaryTrace.constant(small_grid.boundary_indices(), 2.5)
    np.testing.assert_allclose(harmonic_extension(small_grid, boundary).values, 2.5)


def test_harmonic_extension_reproduces_affine(small_grid):
    coords = small_grid.coordinates()
    affine = 0.7 * coords.real - 1.3 * coords.imag + 0.2
    vertices = small_grid.boundary_indices()
    boundary = BoundaryTrace(vertices, affine[vertices[:, 0], vertices[:, 1]])
    np.testing.assert_allclose(harmonic_extension(small_grid, boundary).values, affine, atol=1e-10)


def test_harmonic_extension_matches_dense_solve():
    grid = TriangulatedGrid(6)
    vertices = grid.boundary_indices()
    boundary = BoundaryTrace(vertices, make_rng(4).standard_normal(vertices.shape[0]))
    result = harmonic_extension(grid, boundary).values

    interior = np.argwhere(grid.interior_mask())
    index = {tuple(p): k for k, p in enumerate(interior)}
    fixed = boundary.as_grid(grid.n)
    A = np.zeros((len(interior), len(interior)))
    b = np.zeros(len(interior))
    for k, (r, c) in enumerate(interior):
        A[k, k] = 4.0
        for dr, dc in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            nb = (r + dr, c + dc)
            if nb in index:
                A[k, index[nb]] = -1.0
            else:
                b[k] += fixed[nb]
    expected = np.linalg.solve(A, b)
    np.testing.assert_allclose(result[grid.interior_mask()], expected, atol=1e-10)


def test_single_interior_vertex_variance():
    form = DirichletForm(TriangulatedGrid(3))
    assert form.dense_covariance()[0, 0] == pytest.approx(2 * math.pi / 4)


def test_cholesky_sampler_covariance():
    grid = TriangulatedGrid(5)
    form = DirichletForm(grid)
    draws = form.sample(make_rng(11), count=20_000)
    target = form.dense_covariance()
    empirical = np.cov(draws, rowvar=False)
    np.testing.assert_allclose(np.diag(empirical), np.diag(target), rtol=0.08)
    assert np.max(np.abs(empirical - target)) < 0.1


def test_spectral_sampler_covariance():
    grid = TriangulatedGrid(5)
    rng = make_rng(12)
    draws = np.array([spectral_sample(grid, rng).ravel() for _ in range(20_000)])
    target = dirichlet_form(grid).dense_covariance()
    empirical = np.cov(draws, rowvar=False)
    np.testing.assert_allclose(np.diag(empirical), np.diag(target), rtol=0.08)
    assert np.max(np.abs(empirical - target)) < 0.1


@pytest.mark.parametrize("method", ["cholesky", "spectral"])
def test_sampler_is_seed_determined(method, small_grid):
    a = sample_zero_boundary_gff(small_grid, 3, method=method)
    b = sample_zero_boundary_gff(small_grid, 3, method=method)
    c = sample_zero_boundary_gff(small_grid, 4, method=method)
    np.testing.assert_array_equal(a.values, b.values)
    assert not np.array_equal(a.values, c.values)
    assert np.all(a.values[0, :] == 0) and np.all(a.values[:, -1] == 0)


def test_centre_mean_near_zero():
    grid = TriangulatedGrid(5)
    draws = DirichletForm(grid).sample(make_rng(2), count=10_000)
    centre = draws[:, 4]
    assert abs(centre.mean()) <= 3 * centre.std(ddof=1) / math.sqrt(centre.size)


def test_unknown_sampler_rejected(small_grid):
    with pytest.raises(ParameterDomainError):
        sample_zero_boundary_gff(small_grid, 0, method="fourier")


def test_sample_field_keeps_boundary_values(small_grid):
    vertices = small_grid.boundary_indices()
    boundary = BoundaryTrace(vertices, np.linspace(-1, 1, vertices.shape[0]))
    field = sample_field(small_grid, boundary, 5, chi=1.0)
    np.testing.assert_allclose(field.values[vertices[:, 0], vertices[:, 1]], boundary.values)
    assert field.chi == 1.0


def test_markov_decomposition_matches_conditioning():
    grid = TriangulatedGrid(8)
    window = np.zeros((8, 8), dtype=bool)
    window[3:5, 3:5] = True
    direct = markov_decomposition(grid, window)
    conditioned = gaussian_conditioning(grid, window)
    np.testing.assert_allclose(direct.mean_operator, conditioned.mean_operator, atol=1e-8)
    np.testing.assert_allclose(direct.covariance, conditioned.covariance, atol=1e-8)


def test_markov_window_must_be_interior():
    grid = TriangulatedGrid(6)
    window = np.zeros((6, 6), dtype=bool)
    window[0, 2] = True
    with pytest.raises(ParameterDomainError):
        markov_decomposition(grid, window)


def test_winding_examples():
    chi = derive_constants(2.0).chi
    assert winding_boundary_value(0.3, WindingRecord.quarter_turns(1), chi) == pytest.approx(0.3 + math.pi / 2 * chi)
    assert winding_boundary_value(0.3, WindingRecord(0.0), chi) == 0.3


def test_full_loop_adds_four_minus_kappa_lambda():
    c = derive_constants(1.0)
    assert winding_boundary_value(0.0, WindingRecord(2 * math.pi), c.chi) == pytest.approx((4 - c.kappa) * c.lam)


def test_winding_of_square_loop():
    loop = np.array([0, 1, 1 + 1j, 1j, 0, 1], dtype=complex)
    assert WindingRecord.from_polyline(loop).cumulative_turning == pytest.approx(2 * math.pi)


def test_flow_line_heights_straight():
    c = derive_constants(2.0)
    assert flow_line_heights(WindingRecord(), c) == pytest.approx((-c.lam_prime, c.lam_prime))


def test_square_map_anchors():
    psi = square_map()
    assert psi.forward(0.0) == pytest.approx(-1j)
    assert psi.forward(math.inf) == 1j
    assert psi.forward(1.0) == pytest.approx(1 - 1j)
    assert psi.forward(1.0 / psi.k) == pytest.approx(1 + 1j)
    assert psi.forward(-1.0) == pytest.approx(-1 - 1j)
    assert psi.K_prime == pytest.approx(2 * psi.K)


@pytest.mark.parametrize("x", [-7.0, -2.0, -0.6, 0.25, 0.9, 1.7, 3.0, 40.0])
def test_square_map_forward_matches_quadrature(x):
    psi = square_map()
    assert abs(psi.forward(x) - psi.quadrature_forward(x)) < 1e-7


@pytest.mark.parametrize("x", [-7.0, -2.0, -0.6, 0.25, 0.9, 1.7, 3.0, 40.0])
def test_square_map_inverse(x):
    psi = square_map()
    assert psi.inverse(psi.forward(x)) == pytest.approx(x, rel=1e-8)


def test_square_map_inverse_rejects_interior():
    with pytest.raises(DomainError):
        square_map().inverse(0.1 + 0.2j)


def test_pullback_without_winding_is_piecewise_constant():
    grid = TriangulatedGrid(8)
    flat = pullback_boundary_data(StepFunction.constant(0.0), grid, chi=0.0)
    np.testing.assert_array_equal(flat.values, 0.0)

    lam = derive_constants(4.0).lam
    two = pullback_boundary_data(StepFunction.two_sided(-lam, lam), grid, chi=0.0)
    assert two.arc_count == 2
    assert sorted({round(v, 12) for v in two.values}) == pytest.approx([-lam, lam])
    assert two.values[0] == pytest.approx(-lam)


def test_pullback_adds_winding_on_sides():
    grid = TriangulatedGrid(8)
    c = derive_constants(0.5)
    trace = pullback_boundary_data(StepFunction.two_sided(-c.lam, c.lam), grid, chi=c.chi)
    values = trace.as_grid(grid.n)
    assert values[0, 5] == pytest.approx(c.lam)
    assert values[3, 7] == pytest.approx(c.lam + c.chi * math.pi / 2)
    assert values[3, 0] == pytest.approx(-c.lam - c.chi * math.pi / 2)


def test_field_file_rejects_foreign_bytes(tmp_path):
    path = tmp_path / "bogus.igf"
    path.write_bytes(b"XXXX" + bytes(40))
    with pytest.raises(ParameterDomainError):
        read_field(path)


def test_gff_scale():
    assert GFF_SCALE ** 2 == pytest.approx(2 * math.pi)
