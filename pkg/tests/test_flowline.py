import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from igeom.core import (
    DegenerateStartError,
    OrderingError,
    ParameterDomainError,
    derive_constants,
    make_rng,
    max_simple_angle_gap,
)
from igeom.flowline import (
    CONE_ANGLE,
    AngleSchedule,
    TerminationKind,
    area_fraction,
    all_crossings,
    brute_force_crossings,
    count_crossings,
    count_transversal_crossings,
    detect_first_crossing,
    detect_merge,
    directed_hausdorff,
    fan,
    fan_angles,
    light_cone,
    read_paths_csv,
    trace_angle_varying,
    trace_flow_line,
    trace_many,
    transversal_crossings,
    write_paths_csv,
)
from igeom.gff import DiscreteField, TriangulatedGrid


def _flat(n: int = 9) -> DiscreteField:
    return DiscreteField(TriangulatedGrid(n), np.zeros((n, n)), chi=1.0)


def _rough(n: int = 17, seed: int = 0, scale: float = 0.3) -> DiscreteField:
    return DiscreteField(TriangulatedGrid(n), scale * make_rng(seed).standard_normal((n, n)), chi=1.0)


def test_flat_field_gives_horizontal_ray():
    path = trace_flow_line(_flat(), 0j, 0.0, 0.1, 0.5)
    np.testing.assert_allclose(path.points, 0.1 * np.arange(6), atol=1e-12)
    assert path.termination.kind is TerminationKind.MAX_LENGTH
    assert path.length == pytest.approx(0.5)


def test_quarter_turn_gives_vertical_ray():
    path = trace_flow_line(_flat(), 0j, math.pi / 2, 0.1, 0.3)
    np.testing.assert_allclose(path.points, 0.1j * np.arange(4), atol=1e-12)


def test_heading_offset_rotates_the_ray():
    field = _flat().with_chi(1.0, math.pi / 2)
    path = trace_flow_line(field, 0j, 0.0, 0.1, 0.2)
    assert path.tip == pytest.approx(0.2j, abs=1e-12)


def test_ray_stops_near_boundary():
    path = trace_flow_line(_flat(), 0j, 0.0, 0.15, 5.0)
    assert path.termination.kind is TerminationKind.BOUNDARY_HIT
    assert 1.0 - path.tip.real < 0.15


def test_single_angle_schedule_matches_fixed_angle():
    field = _rough()
    fixed = trace_flow_line(field, 0.1 + 0.2j, 0.4, 0.05, 1.0)
    scheduled = trace_angle_varying(field, 0.1 + 0.2j, AngleSchedule.fixed(0.4), 0.05, 1.0)
    np.testing.assert_array_equal(fixed.points, scheduled.points)


def test_two_angle_schedule_turns_a_corner():
    schedule = AngleSchedule((0.0, math.pi / 2), (0.3,))
    path = trace_angle_varying(_flat(), 0j, schedule, 0.1, 0.5)
    assert path.points[3] == pytest.approx(0.3, abs=1e-12)
    assert path.points[5] == pytest.approx(0.3 + 0.2j, abs=1e-12)
    assert path.angles()[0] == 0.0 and path.angles()[-1] == pytest.approx(math.pi / 2)


def test_batch_equals_individual_traces():
    field = _rough(seed=3)
    starts = [0j, 0.2 - 0.1j, -0.3 + 0.4j]
    thetas = [0.0, 0.7, -1.1]
    batch = trace_many(field, starts, thetas, 0.05, 2.0)
    for path, start, theta in zip(batch, starts, thetas):
        alone = trace_flow_line(field, start, theta, 0.05, 2.0)
        np.testing.assert_allclose(path.points, alone.points, rtol=0, atol=1e-12)
        assert path.termination.kind is alone.termination.kind


@pytest.mark.parametrize("chi", [0.0, -1.0, math.nan])
def test_non_positive_chi_rejected(chi):
    field = DiscreteField(TriangulatedGrid(5), np.zeros((5, 5)), chi=chi)
    with pytest.raises(ParameterDomainError):
        trace_flow_line(field, 0j, 0.0, 0.1, 1.0)


def test_boundary_start_must_point_inward():
    with pytest.raises(DegenerateStartError):
        trace_flow_line(_flat(), -1j, -math.pi / 2, 0.1, 1.0)
    path = trace_flow_line(_flat(), -1j, math.pi / 2, 0.1, 0.5)
    assert path.points[1] == pytest.approx(-0.9j, abs=1e-12)


def test_schedule_validation():
    with pytest.raises(ParameterDomainError):
        AngleSchedule((0.0, 1.0), ())
    with pytest.raises(OrderingError):
        AngleSchedule((0.0, 1.0, 2.0), (0.5, 0.5))
    with pytest.raises(OrderingError):
        AngleSchedule((0.0, 1.0), (0.0,))


def test_schedule_spread_limit():
    c = derive_constants(2.0)
    AngleSchedule((0.0, 0.9 * max_simple_angle_gap(c)), (0.1,)).check_simple(c)
    with pytest.raises(ParameterDomainError):
        AngleSchedule((0.0, max_simple_angle_gap(c)), (0.1,)).check_simple(c)


def test_fan_angles_span_the_cone():
    angles = fan_angles(5)
    assert angles[0] == -CONE_ANGLE and angles[-1] == CONE_ANGLE
    assert np.all(np.diff(angles) > 0)
    with pytest.raises(ParameterDomainError):
        fan_angles(1)


def test_single_generation_cone_is_the_outer_pair():
    field = _rough(seed=5)
    cone = light_cone(field, 0j, 1, 0.05, max_len=2.0)
    pair = trace_many(field, [0j, 0j], [CONE_ANGLE, -CONE_ANGLE], 0.05, 2.0)
    assert cone.generation_count == 1
    for got, expected in zip(cone.boundary_paths(), pair):
        np.testing.assert_array_equal(got.points, expected.points)


def test_two_angle_fan_equals_cone_boundary():
    field = _rough(seed=6)
    paths = fan(field, 0j, 2, 0.05, max_len=2.0)
    upper, lower = light_cone(field, 0j, 1, 0.05, max_len=2.0).boundary_paths()
    np.testing.assert_array_equal(paths[0].points, lower.points)
    np.testing.assert_array_equal(paths[1].points, upper.points)


def test_cone_generations_only_grow():
    cone = light_cone(_rough(seed=7), 0j, 3, 0.05, seed_stride=4, max_len=2.0)
    sizes = [len(cone.up_to(g)) for g in range(cone.generation_count)]
    assert sizes == sorted(sizes)
    assert sizes[-1] == len(cone.points)


def test_cone_needs_an_iteration():
    with pytest.raises(ParameterDomainError):
        light_cone(_flat(), 0j, 0, 0.1)


def test_parallel_segments_do_not_cross():
    a = np.array([-1, 1], dtype=complex)
    assert detect_first_crossing(a, a + 0.5j) is None
    assert count_crossings(a, a + 0.5j) == 0


def test_x_shape_crossing():
    a = np.array([-1, 1], dtype=complex)
    b = np.array([0.2 - 1j, 0.2 + 1j])
    crossing = detect_first_crossing(a, b)
    assert crossing.point_on_a == pytest.approx(0.2)
    assert crossing.point_on_b == pytest.approx(0.2)
    assert crossing.s_a == pytest.approx(1.2)
    assert crossing.s_b == pytest.approx(1.0)


def test_first_crossing_is_earliest_along_a():
    a = np.array([-2, 2], dtype=complex)
    b = np.array([1 - 1j, 1 + 1j, -1 + 1j, -1 - 1j])
    assert detect_first_crossing(a, b).point == pytest.approx(-1)
    assert count_crossings(a, b) == 2


def test_touching_is_not_a_crossing():
    a = np.array([-1, 0, 1], dtype=complex)
    b = np.array([-1 + 1j, 0, 1 + 1j])
    assert detect_first_crossing(a, b) is None


points = st.lists(
    st.tuples(st.floats(-1, 1, allow_nan=False), st.floats(-1, 1, allow_nan=False)),
    min_size=2,
    max_size=12,
)


@given(points, points)
@settings(max_examples=100)
def test_crossing_count_matches_brute_force(xs, ys):
    a = np.array([complex(x, y) for x, y in xs])
    b = np.array([complex(x, y) for x, y in ys])
    assert count_crossings(a, b) == len(brute_force_crossings(a, b))


def test_crossing_count_on_long_walks():
    rng = make_rng(9)
    a = np.cumsum(rng.standard_normal(700) + 1j * rng.standard_normal(700)) * 0.05
    b = np.cumsum(rng.standard_normal(60) + 1j * rng.standard_normal(60)) * 0.2
    assert count_crossings(a, b) == len(brute_force_crossings(a, b))


def test_merge_of_identical_paths():
    path = trace_flow_line(_rough(seed=8), 0j, 0.3, 0.05, 1.0)
    assert detect_merge(path, path, 1e-9) == 0.0


def test_distant_paths_never_merge():
    a = np.linspace(0, 1, 11).astype(complex)
    assert detect_merge(a, a + 1j, 0.1) is None


def test_merge_after_approach():
    b = np.linspace(0, 2, 21).astype(complex)
    a = np.concatenate([np.linspace(0, 1, 11) + 0.5j, np.linspace(1.1, 2, 10) + 0.01j])
    assert detect_merge(a, b, 0.05) == pytest.approx(1.0 + math.sqrt(0.2501))
    with pytest.raises(ParameterDomainError):
        detect_merge(a, b, 0.0)


def test_directed_hausdorff():
    a = np.array([0, 1], dtype=complex)
    assert directed_hausdorff(a, a + 0.5j) == pytest.approx(0.5)
    assert directed_hausdorff(np.array([0.5 + 0j]), a) == pytest.approx(0.0)
    assert directed_hausdorff(np.array([0.5 + 0j]), a, b_is_polyline=False) == pytest.approx(0.5)
    assert math.isinf(directed_hausdorff(a, np.empty(0, dtype=complex)))


def test_area_fraction_bounds():
    field = _rough(seed=10)
    paths = fan(field, 0j, 5, 0.05, max_len=2.0)
    fraction = area_fraction(paths, field.grid)
    assert 0.0 < fraction < 1.0
    assert area_fraction([], field.grid) == 0.0
    assert area_fraction(paths[:1], field.grid) <= fraction


def test_paths_csv_groups_by_path(tmp_path):
    paths = fan(_rough(seed=11), 0j, 3, 0.05, max_len=1.0)
    target = write_paths_csv(tmp_path / "fan.csv", paths)
    polylines = read_paths_csv(target)
    assert len(polylines) == 3
    for read_back, path in zip(polylines, paths):
        np.testing.assert_array_equal(read_back, path.points)


def _rk4(field: DiscreteField, start: complex, theta: float, step: float, count: int) -> np.ndarray:
    def velocity(z: complex) -> complex:
        return np.exp(1j * (field(z) / field.chi + theta + field.heading_offset))

    points = [start]
    z = start
    for _ in range(count):
        k1 = velocity(z)
        k2 = velocity(z + step * k1 / 2)
        k3 = velocity(z + step * k2 / 2)
        k4 = velocity(z + step * k3)
        z = z + step * (k1 + 2 * k2 + 2 * k3 + k4) / 6
        points.append(z)
    return np.array(points)


def test_euler_tracks_fine_integrator_on_smooth_field():
    grid = TriangulatedGrid(41)
    field = DiscreteField(grid, np.abs(grid.coordinates()) ** 2, chi=1.0)
    step = 0.025
    path = trace_flow_line(field, 0j, 0.0, step, 0.5)
    assert path.termination.kind is TerminationKind.MAX_LENGTH
    fine = _rk4(field, 0j, 0.0, step / 10, 10 * (len(path.points) - 1))[::10]
    assert np.max(np.abs(path.points - fine)) <= 2 * step


def test_schedule_restarts_at_the_switch():
    field = _rough(seed=12)
    step = 0.05
    schedule = AngleSchedule((0.3, -0.4), (0.25,))
    path = trace_angle_varying(field, 0j, schedule, step, 1.0)
    k = schedule.switch_steps(step)[0]
    assert len(path.points) > k
    restarted = trace_flow_line(field, complex(path.points[k]), -0.4, step, 1.0 - k * step)
    m = min(len(restarted.points), len(path.points) - k)
    np.testing.assert_array_equal(path.points[k : k + m], restarted.points[:m])


def test_merge_needs_more_than_the_last_vertex():
    b = np.array([3, 4], dtype=complex)
    a = np.array([-5j, -3j, 3 - 0.01j])
    assert detect_merge(a, b, 0.1) is None


def test_merge_tail_length():
    b = np.array([3, 4], dtype=complex)
    a = np.array([-5j, 3 - 0.01j, 3.5 - 0.01j])
    assert detect_merge(a, b, 0.1, min_tail=0.25) == pytest.approx(abs(3 + 4.99j))
    assert detect_merge(a, b, 0.1, min_tail=1.0) is None
    with pytest.raises(ParameterDomainError):
        detect_merge(a, b, 0.1, min_tail=-1.0)


def test_grid_scale_touch_is_not_transversal():
    b = np.linspace(0, 10, 11).astype(complex)
    a = np.array([0.5 - 1j, 1.5 + 0.05j, 2.5 - 1j])
    assert len(all_crossings(a, b)) == 2
    assert count_transversal_crossings(a, b, 0.0) == 2
    assert count_transversal_crossings(a, b, 0.1) == 0


def test_wide_recrossing_survives_the_tolerance():
    b = np.linspace(0, 10, 11).astype(complex)
    a = np.array([0.5 - 1j, 1.7 + 1j, 2.9 - 1j])
    kept = transversal_crossings(a, b, 0.1)
    assert [c.index_a for c in kept] == [0, 1]
    assert kept[0].point == pytest.approx(1.1)
    assert count_transversal_crossings(a[:2], b, 0.1) == 1
    with pytest.raises(ParameterDomainError):
        transversal_crossings(a, b, -0.1)
