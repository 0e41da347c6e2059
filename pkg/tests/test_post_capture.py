import math

import mpmath
import numpy as np
import pytest

from asymptotics.post_capture import (
    equilibrium_level,
    fit_post_capture,
    omega_post,
    omega_post_prime,
    resolve_post_capture,
    slow_amplitude_profile,
    slow_correction_post,
    slow_correction_post_expanded,
    slow_manifold,
    validity_post,
    wkb_post_eval,
)
from core.errors import NotCaptured, OutOfDomain, WindowTooShort
from core.state import EquilibriumVariant, PhaseVariantPost, PostCaptureParams
from pipeline.variants import angular_distance


EPS = 0.01


def synthetic(make_trajectory, params, lo=0.4, hi=1.6, n=40001, **kwargs):
    theta = np.linspace(lo, hi, n)
    phi = np.array([wkb_post_eval(t, EPS, params, **kwargs) for t in theta])
    return make_trajectory(theta, phi, eps=EPS)


def test_slow_manifolds():
    assert slow_manifold(0.0, 1) == 0j
    assert slow_manifold(0.44, 2) == pytest.approx(1.2)
    assert slow_manifold(0.44, 3) == pytest.approx(-1.2)
    assert slow_manifold(5.0, 4) == pytest.approx(2j)
    with pytest.raises(OutOfDomain):
        slow_manifold(-1.5, 2)
    with pytest.raises(OutOfDomain):
        slow_manifold(0.5, 5)


def test_equilibrium_levels():
    assert equilibrium_level(3.0) == pytest.approx(2.0)
    assert equilibrium_level(3.0, EquilibriumVariant.HALF_ROOT) == pytest.approx(1.0)


@pytest.mark.parametrize("theta", [0.0, 0.5, 2.0])
def test_omega_post_derivative(theta):
    expected = mpmath.diff(lambda t: mpmath.mpf(4) / 3 * (1 + t) ** 1.5, theta)
    assert omega_post_prime(theta, 2) == pytest.approx(float(expected), rel=1e-12)
    assert omega_post_prime(theta, 3) == pytest.approx(2 * math.sqrt(1 + theta))
    assert omega_post(theta) == pytest.approx(4 / 3 * (1 + theta) ** 1.5)


def test_exact_frequency_domain():
    with pytest.raises(OutOfDomain):
        omega_post_prime(0.5, 4)
    # the origin is a saddle for -1 < theta < 1
    with pytest.raises(OutOfDomain):
        omega_post_prime(0.0, 1)
    assert omega_post_prime(2.0, 1) == pytest.approx(math.sqrt(3.0))


@pytest.mark.parametrize("theta", [0.1, 0.7, 3.0])
def test_displayed_phase_matches_expanded_form(theta):
    assert slow_correction_post(theta, PhaseVariantPost.THEOREM) == pytest.approx(
        slow_correction_post_expanded(theta), rel=1e-14)


def test_averaged_phase_log_coefficient():
    # -(1/2)(theta + 3 ln(1+theta)): coefficient of ln(1+theta) is -3/2
    theta = np.array([0.2, 0.9])
    values = slow_correction_post(theta, PhaseVariantPost.AVERAGED)
    assert values.shape == (2,)
    assert values[0] == pytest.approx(-0.5 * (0.2 + 3 * math.log(1.2)))


def test_wkb_post_branch_sign():
    params = PostCaptureParams(A00=0.0, phi00=0.0, branch_j=2)
    assert wkb_post_eval(0.44, EPS, params) == pytest.approx(1.2)
    params = PostCaptureParams(A00=0.0, phi00=0.0, branch_j=3)
    assert wkb_post_eval(0.44, EPS, params) == pytest.approx(-1.2)
    with pytest.raises(OutOfDomain):
        wkb_post_eval(-1.0, EPS, params)


@pytest.mark.parametrize("j", [2, 3])
def test_synthetic_fit_recovers_parameters(make_trajectory, j):
    params = PostCaptureParams(A00=0.7, phi00=2.0, branch_j=j)
    traj = synthetic(make_trajectory, params)

    fit = resolve_post_capture(traj, EPS, (0.5, 1.5))
    assert fit.params.branch_j == j
    assert fit.params.A00 == pytest.approx(0.7, abs=1e-6)
    assert angular_distance(fit.params.phi00, 2.0) < 1e-6
    assert fit.equilibrium is EquilibriumVariant.FULL_ROOT
    assert fit.phase is PhaseVariantPost.AVERAGED
    assert set(fit.residuals) == {"full/theorem", "full/averaged", "half/theorem", "half/averaged"}


def test_fit_distinguishes_the_displayed_phase(make_trajectory):
    params = PostCaptureParams(A00=0.5, phi00=4.0, branch_j=2)
    traj = synthetic(make_trajectory, params, cv=PhaseVariantPost.THEOREM)

    fit = resolve_post_capture(traj, EPS, (0.5, 1.5))
    assert fit.phase is PhaseVariantPost.THEOREM
    assert angular_distance(fit.params.phi00, 4.0) < 1e-6
    assert fit_post_capture(traj, EPS, (0.5, 1.5)) == fit.params


def test_uncaptured_window(make_trajectory):
    theta = np.linspace(0.4, 1.6, 4001)
    traj = make_trajectory(theta, np.full(theta.size, 0.01 + 0j), eps=EPS)
    with pytest.raises(NotCaptured):
        resolve_post_capture(traj, EPS, (0.5, 1.5))


def test_window_checks(make_trajectory):
    traj = synthetic(make_trajectory, PostCaptureParams(A00=0.7, phi00=2.0, branch_j=2))
    with pytest.raises(WindowTooShort):
        resolve_post_capture(traj, EPS, (0.5, 0.52))
    with pytest.raises(OutOfDomain):
        resolve_post_capture(traj, EPS, (0.5, 1.9))
    # too close to the layer: eps^(-2/3)(1 + theta) < 10
    with pytest.raises(OutOfDomain):
        resolve_post_capture(traj, 0.2, (0.5, 1.5))


def test_validity_post():
    left, right = validity_post(0.0, 0.001)
    assert left == pytest.approx(100.0)
    assert right == 0.0


def test_slow_amplitude_decays_like_three_quarter_power(make_trajectory):
    params = PostCaptureParams(A00=0.6, phi00=1.0, branch_j=3)
    traj = synthetic(make_trajectory, params)

    centres, values = slow_amplitude_profile(traj, EPS, 3, np.linspace(0.4, 1.6, 5))
    slope, _ = np.polyfit(np.log1p(centres), np.log(values), 1)
    assert slope == pytest.approx(-0.75, abs=0.05)


def test_slow_amplitude_is_measured_not_assumed(make_trajectory):
    theta = np.linspace(0.4, 1.6, 40001)
    m = 1.0 + theta
    # fixed absolute amplitude of Re phi about the slow manifold
    phi = np.sqrt(m) + 0.05 * np.cos(4.0 / 3.0 * m ** 1.5 / EPS) + 0j
    traj = make_trajectory(theta, phi, eps=EPS)

    centres, values = slow_amplitude_profile(traj, EPS, 2, np.linspace(0.4, 1.6, 5))
    np.testing.assert_allclose(values * np.sqrt(1.0 + centres), 0.05, rtol=0.02)


@pytest.mark.slow
def test_slow_amplitude_of_an_integrated_run():
    from harness.experiments import final_branch, simulate

    traj = simulate(EPS, -2.0, 1.6, 0.02 + 0j)
    j = final_branch(traj)
    assert j in (2, 3)

    centres, values = slow_amplitude_profile(traj, EPS, j, np.linspace(0.2, 1.6, 8))
    assert centres.size == 7
    slope, _ = np.polyfit(np.log1p(centres), np.log(values), 1)
    assert slope == pytest.approx(-0.75, abs=0.05)
