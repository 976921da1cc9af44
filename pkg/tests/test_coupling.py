import math

import numpy as np
import pytest

from igeom.core import ParameterDomainError, SleParams, derive_constants
from igeom.coupling import (
    HarmonicProfile,
    evaluate_h_t,
    fitted_coefficient,
    harmonic_profile_value,
    harmonic_step_extension,
    martingale_test,
    poisson_extension,
    stop_at_decrement,
    variance_vs_logCR_test,
)
from igeom.sle import loewner_forward, zero_driver

MIXED = SleParams(kappa=2.0, weights_l=(-0.5,), points_l=(-0.5,), weights_r=(1.0, 0.5), points_r=(0.3, 1.0))


def test_plain_profile_heights():
    profile = HarmonicProfile(SleParams.plain(2.0))
    lam = derive_constants(2.0).lam
    assert profile.values == pytest.approx((-lam, lam))
    assert profile.jumps == pytest.approx((2 * lam,))
    assert harmonic_profile_value(profile, -1.0) == pytest.approx(-lam)
    assert harmonic_profile_value(profile, 0.0, side="L") == pytest.approx(-lam)
    assert harmonic_profile_value(profile, 0.0, side="R") == pytest.approx(lam)
    with pytest.raises(ParameterDomainError):
        harmonic_profile_value(profile, 0.0)


def test_force_point_jump_is_lambda_rho():
    rho = 0.7
    profile = HarmonicProfile(SleParams.single_right(1.0, rho, 0.5))
    lam = profile.consts.lam
    assert profile.jumps[-1] == pytest.approx(lam * rho)
    assert harmonic_profile_value(profile, 2.0) == pytest.approx(lam * (1 + rho))
    assert harmonic_profile_value(profile, 0.5) == pytest.approx(lam * (1 + rho / 2))


def test_threshold_weight_gives_minus_lambda():
    profile = HarmonicProfile(SleParams.single_right(2.0, -2.0, 0.5))
    assert profile.values[-1] == pytest.approx(-profile.consts.lam)


def test_breaks_are_ascending():
    profile = HarmonicProfile(MIXED)
    np.testing.assert_allclose(profile.breaks(), [-0.5, 0.0, 0.3, 1.0])
    assert profile.tip_index == 1


def test_plain_extension_vanishes_on_the_imaginary_axis():
    profile = HarmonicProfile(SleParams.plain(2.0))
    assert profile.extension(1j) == pytest.approx(0.0, abs=1e-12)
    assert profile.extension(0.5 + 2j) > 0.0
    assert profile.extension(-0.5 + 2j) < 0.0


@pytest.mark.parametrize("w", [0.1 + 0.2j, -2 + 1j, 0.5 + 0.05j, 3 + 4j])
def test_closed_form_matches_poisson_quadrature(w):
    profile = HarmonicProfile(MIXED)
    assert profile.extension(w) == pytest.approx(poisson_extension(profile, w), abs=1e-7)


def test_extension_needs_matching_shapes():
    with pytest.raises(ParameterDomainError):
        harmonic_step_extension(np.array([0.0]), np.array([1.0]), 1j)
    with pytest.raises(ParameterDomainError):
        poisson_extension(HarmonicProfile(MIXED), 0.5 + 0j)


def test_zero_driver_observable_closed_form():
    params = SleParams.plain(2.0)
    profile = HarmonicProfile(params)
    driver = zero_driver(0.01, 0.5, kappa=2.0)
    z = 0.4 + 1j
    observed = evaluate_h_t(driver, loewner_forward(driver, z), profile)

    f = np.sqrt(z * z + 4 * observed.times)
    lam, chi = profile.consts.lam, profile.consts.chi
    expected = lam - 2 * lam * np.angle(f) / math.pi - chi * np.angle(z / f)
    np.testing.assert_allclose(observed.h, expected, atol=1e-10)
    assert observed.at(0).log_cr == pytest.approx(math.log(2.0))
    assert not observed.swallowed


def test_zero_capacity_time_is_exact():
    report = martingale_test(SleParams.plain(2.0), 1j, 0.0, 50, 1)
    assert report.passed
    assert report.estimate == 0.0 and report.stderr == 0.0


def test_zero_runs_report_no_data():
    payload = martingale_test(SleParams.plain(2.0), 1j, 0.1, 0, 1).to_dict()
    assert payload["noData"] is True and payload["pass"] is False
    payload = variance_vs_logCR_test(SleParams.plain(2.0), 1j, 0.2, 0, 1).to_dict()
    assert payload["noData"] is True


def test_tracked_point_must_be_in_half_plane():
    with pytest.raises(ParameterDomainError):
        martingale_test(SleParams.plain(2.0), 0.5 + 0j, 0.1, 10, 1)
    with pytest.raises(ParameterDomainError):
        variance_vs_logCR_test(SleParams.plain(2.0), -1j, 0.2, 10, 1)


def test_decrement_floor():
    with pytest.raises(ParameterDomainError):
        variance_vs_logCR_test(SleParams.plain(2.0), 1j, 0.04, 10, 1)


def test_martingale_estimate_ignores_chunking():
    options = dict(dt=0.005)
    whole = martingale_test(SleParams.plain(2.0), 1j, 0.05, 120, 3, chunk=120, **options)
    split = martingale_test(
        SleParams.plain(2.0), 1j, 0.05, 120, 3, chunk=25, mapper=lambda f, xs: list(map(f, xs)), **options
    )
    assert whole.runs == split.runs == 120
    assert whole.estimate == pytest.approx(split.estimate, rel=1e-12, abs=1e-15)
    assert whole.stderr == pytest.approx(split.stderr, rel=1e-12)
    assert whole.details["swallowedOrStopped"] == 0


def test_stop_at_decrement_interpolates():
    h = np.array([[0.0, 1.0, 3.0], [0.0, 5.0, 6.0]])
    log_cr = np.array([[0.0, -0.1, -0.3], [0.0, -0.05, -0.1]])
    out = stop_at_decrement(h, log_cr, 0.2)
    assert out[0] == pytest.approx(2.0)
    assert math.isnan(out[1])


def test_fitted_coefficient():
    assert fitted_coefficient((1.0, 2.0), (2.0, 4.0)) == pytest.approx(2.0)
