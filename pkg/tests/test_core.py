import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from igeom.core import (
    ConfigValidationError,
    IGeomError,
    OrderingError,
    ParameterDomainError,
    Report,
    SleParams,
    bessel_dimension,
    boundary_interaction,
    conditional_law_weights,
    continuation_threshold_hit,
    critical_intersection_angle,
    derive_constants,
    dual_constants,
    flow_line_weights,
    is_strictly_decreasing,
    ks_two_sample,
    make_rng,
    max_simple_angle_gap,
    mean_stderr,
    pooled_difference,
    run_seed,
    run_seeds,
    strip_hitting_regime,
    variance_stderr,
)

kappas = st.floats(min_value=1e-3, max_value=16.0, allow_nan=False, allow_infinity=False)


def test_chi_at_four_thirds():
    assert derive_constants(4.0 / 3.0).chi == pytest.approx(math.sqrt(4.0 / 3.0), abs=1e-6)


def test_chi_vanishes_at_four():
    assert derive_constants(4.0).chi == pytest.approx(0.0, abs=1e-15)


def test_kappa_two_constants():
    c = derive_constants(2.0)
    assert c.lam == pytest.approx(math.pi / math.sqrt(2))
    assert c.chi == pytest.approx(math.sqrt(2) / 2)
    assert c.lam_prime == pytest.approx(math.pi * math.sqrt(2) / 4)
    assert c.lam_prime == pytest.approx(c.lam - math.pi / 2 * c.chi)


@pytest.mark.parametrize("kappa", [0.0, -1.0, math.nan, math.inf])
def test_bad_kappa_rejected(kappa):
    with pytest.raises(ParameterDomainError):
        derive_constants(kappa)


@given(kappas)
@settings(max_examples=200)
def test_identities_hold_over_kappa(kappa):
    c = derive_constants(kappa)
    assert c.winding_residual < 1e-12 * max(1.0, c.lam)
    assert c.full_revolution_residual < 1e-12 * max(1.0, c.lam)


@given(kappas)
def test_dual_chi_flips_sign(kappa):
    assert dual_constants(kappa).chi == pytest.approx(-derive_constants(kappa).chi, abs=1e-9)
    assert dual_constants(kappa).kappa == pytest.approx(16.0 / kappa)


def test_bessel_dimension_examples():
    assert bessel_dimension(2.0, 0.0) == pytest.approx(3.0)
    assert bessel_dimension(2.0, -2.0) == pytest.approx(1.0)


@given(kappas)
def test_bessel_dimension_two_at_avoidance_threshold(kappa):
    assert bessel_dimension(kappa, kappa / 2 - 2) == pytest.approx(2.0)


def test_conditional_weights_match_formulas():
    c = derive_constants(2.0)
    a = b = c.lam
    upper, lower = conditional_law_weights(-math.pi / 4, math.pi / 4, a, b, c)
    cross = (math.pi / 2) * c.chi / c.lam - 2
    assert upper == pytest.approx(((a - math.pi / 4 * c.chi) / c.lam - 1, cross))
    assert lower == pytest.approx((cross, (b - math.pi / 4 * c.chi) / c.lam - 1))


def test_cross_weight_zero_at_max_gap():
    c = derive_constants(1.0)
    gap = max_simple_angle_gap(c)
    upper, _ = conditional_law_weights(0.0, gap, 1.0, 1.0, c)
    assert upper[1] == pytest.approx(0.0, abs=1e-12)


def test_conditional_weights_need_ordered_angles():
    c = derive_constants(2.0)
    with pytest.raises(OrderingError):
        conditional_law_weights(0.5, 0.5, 1.0, 1.0, c)


@pytest.mark.parametrize(
    "sums, expected",
    [([-2.0], True), ([-1.99], False), ([], False), ([-1.0, -1.0], True)],
)
def test_continuation_threshold(sums, expected):
    assert continuation_threshold_hit(sums) is expected


def test_flow_line_weights_vanish_for_standard_data():
    c = derive_constants(0.5)
    assert flow_line_weights(c.lam, c.lam, 0.0, c) == pytest.approx((0.0, 0.0))


@given(st.floats(min_value=0.05, max_value=3.9))
def test_critical_angle_closed_form(kappa):
    c = derive_constants(kappa)
    assert critical_intersection_angle(c) == pytest.approx(math.pi * kappa / (4 - kappa), rel=1e-9)


def test_boundary_interaction_regimes():
    assert boundary_interaction(2.0, -1.0) == "avoids"
    assert boundary_interaction(2.0, -1.5) == "hits"
    assert boundary_interaction(2.0, -3.0) == "absorbed"


def test_strip_regimes():
    c = derive_constants(2.0)
    assert strip_hitting_regime(0.0, c) == "hits"
    assert strip_hitting_regime(c.lam, c) == "escapes_left"
    assert strip_hitting_regime(-c.lam, c) == "escapes_right"


def test_sle_params_ordering():
    with pytest.raises(OrderingError):
        SleParams(kappa=2.0, weights_r=(1.0, 1.0), points_r=(2.0, 1.0))
    with pytest.raises(OrderingError):
        SleParams(kappa=2.0, weights_l=(1.0,), points_l=(0.5,))
    with pytest.raises(ParameterDomainError):
        SleParams(kappa=2.0, weights_r=(1.0,), points_r=())


def test_sle_params_dict_form():
    params = SleParams(kappa=2.0, weights_l=(-0.5,), points_l=(0.0,), weights_r=(1.0, 0.5), points_r=(0.0, 1.0))
    again = SleParams.from_dict(json.loads(json.dumps(params.to_dict())))
    assert again == params
    assert [p.side for p in params.force_points] == ["L", "R", "R"]
    assert params.force_points[1].at_tip


def test_run_seed_independent_of_batching():
    whole = [make_rng(s).standard_normal(3) for s in run_seeds(7, 0, 6)]
    tail = [make_rng(s).standard_normal(3) for s in run_seeds(7, 3, 3)]
    for a, b in zip(whole[3:], tail):
        np.testing.assert_array_equal(a, b)
    assert not np.array_equal(make_rng(run_seed(7, 0)).standard_normal(3), make_rng(run_seed(8, 0)).standard_normal(3))


def test_mean_stderr_edges():
    assert mean_stderr([]).count == 0
    assert math.isinf(mean_stderr([1.0]).stderr)
    estimate = mean_stderr([1.0, 2.0, 3.0, math.nan])
    assert estimate.count == 3
    assert estimate.mean == pytest.approx(2.0)
    assert estimate.within(2.0)


def test_variance_stderr_gaussian():
    samples = make_rng(3).standard_normal(20_000)
    var, se = variance_stderr(samples)
    assert abs(var - 1.0) < 4 * se
    assert math.isnan(variance_stderr(samples[:3])[0])


def test_ks_same_distribution_below_critical():
    rng = make_rng(5)
    statistic, critical = ks_two_sample(rng.standard_normal(4000), rng.standard_normal(4000))
    assert statistic < critical


def test_pooled_difference():
    diff, se = pooled_difference(0.5, 100, 0.5, 100)
    assert diff == 0.0
    assert se == pytest.approx(math.sqrt(0.25 * 0.02))
    assert math.isnan(pooled_difference(0.1, 0, 0.2, 10)[0])


def test_strictly_decreasing():
    assert is_strictly_decreasing([3.0, 2.0, 1.0])
    assert not is_strictly_decreasing([3.0, 3.0, 1.0])
    assert is_strictly_decreasing([])


def test_empty_report_has_no_data_flag():
    payload = Report.empty("martingale", {"kappa": 2.0}).to_dict()
    assert payload["pass"] is False
    assert payload["noData"] is True
    assert payload["runs"] == 0


def test_report_replaces_non_finite_numbers():
    report = Report("x", {}, 3, math.nan, math.inf, True, details={"r": np.float64(0.5), "v": [math.nan]})
    payload = report.to_dict()
    assert payload["estimate"] is None and payload["stderr"] is None
    assert payload["details"] == {"r": 0.5, "v": [None]}
    json.dumps(payload)


def test_config_error_carries_path():
    error = ConfigValidationError("parameters.field.kappa", "must be positive")
    assert isinstance(error, IGeomError) and isinstance(error, ValueError)
    assert error.field_path == "parameters.field.kappa"
    assert "must be positive" in str(error)
