import math

import mpmath
import numpy as np
import pytest

from asymptotics.pre_capture import (
    invert_wkb_pre,
    is_valid_pre,
    matched_painleve_data,
    omega_pre,
    slow_correction_pre,
    validity_pre,
    wkb_pre_curve,
    wkb_pre_envelope,
    wkb_pre_eval,
)
from core.errors import OutOfDomain
from core.state import MatchingRule, PhaseVariantPre, PreCaptureParams


PARAMS = PreCaptureParams(alpha10=0.6, phi10=2.0)


@pytest.mark.parametrize("theta", [-1.5, -3.0, -10.0])
def test_omega_derivative(theta):
    omega, root = omega_pre(theta)
    expected = mpmath.diff(lambda t: 0.5 * t * mpmath.sqrt(t * t - 1) + 0.5 * mpmath.acosh(-t), theta)
    assert root == pytest.approx(float(expected), rel=1e-12)
    assert root == pytest.approx(math.sqrt(theta * theta - 1.0))
    assert omega == pytest.approx(float(0.5 * theta * mpmath.sqrt(theta ** 2 - 1) + 0.5 * mpmath.acosh(-theta)))


@pytest.mark.parametrize("theta", [-1.0, -0.5, 2.0])
def test_pre_capture_domain(theta):
    with pytest.raises(OutOfDomain):
        omega_pre(theta)
    with pytest.raises(OutOfDomain):
        wkb_pre_eval(theta, 0.01, PARAMS)


@pytest.mark.parametrize("variant", list(PhaseVariantPre))
def test_envelope_is_modulus_squared(variant):
    for theta in (-1.3, -2.0, -4.2):
        phi = wkb_pre_eval(theta, 0.01, PARAMS, variant)
        assert wkb_pre_envelope(theta, 0.01, PARAMS, variant) == pytest.approx(abs(phi) ** 2, rel=1e-12)


@pytest.mark.parametrize("variant", list(PhaseVariantPre))
def test_inversion_recovers_parameters(variant):
    theta, eps = -2.5, 0.01
    recovered = invert_wkb_pre(theta, wkb_pre_eval(theta, eps, PARAMS, variant), eps, variant)

    assert recovered.alpha10 == pytest.approx(PARAMS.alpha10, rel=1e-12)
    assert abs(math.remainder(recovered.phi10 - PARAMS.phi10, 2 * math.pi)) < 1e-9


def test_averaged_log_coefficient_near_turning_point():
    # d c / d ln(-1 - theta) -> -3/4 as theta -> -1
    d1, d2 = 1e-4, 1e-6
    c1 = slow_correction_pre(-1.0 - d1, PhaseVariantPre.AVERAGED)
    c2 = slow_correction_pre(-1.0 - d2, PhaseVariantPre.AVERAGED)
    assert (c2 - c1) / (math.log(d2) - math.log(d1)) == pytest.approx(-0.75, abs=1e-3)


def test_slow_corrections():
    theta = -3.0
    log_r = math.log(2.0)
    assert slow_correction_pre(theta, PhaseVariantPre.THEOREM) == pytest.approx(2 * theta + 2 * log_r)
    assert slow_correction_pre(theta, PhaseVariantPre.SECTION) == pytest.approx(-(theta + log_r))
    assert slow_correction_pre(theta, PhaseVariantPre.AVERAGED) == pytest.approx(theta + 0.75 * log_r)


def test_validity_margin():
    assert validity_pre(-2.0, 0.001) == pytest.approx(100.0)
    assert is_valid_pre(-2.0, 0.001)
    assert not is_valid_pre(-1.01, 0.01)


def test_matching_rules():
    eps = 0.01
    assert matched_painleve_data(PARAMS, eps, MatchingRule.IDENTITY) == (PARAMS.alpha10, PARAMS.phi10)

    alpha, phi = matched_painleve_data(PARAMS, eps, MatchingRule.AVERAGED)
    a2 = PARAMS.alpha10 ** 2
    expected = -PARAMS.phi10 + a2 * (1 - math.log(2)) + 0.5 * a2 * math.log(eps)
    assert alpha == PARAMS.alpha10
    assert abs(math.remainder(phi - expected, 2 * math.pi)) < 1e-12
    assert 0.0 <= phi < 2 * math.pi


@pytest.mark.slow
def test_averaged_variant_tracks_the_numerics_best():
    from harness.experiments import overlap_error

    errors = overlap_error(eps=0.01)
    assert errors["averaged"] < errors["theorem"]
    assert errors["averaged"] < errors["section"]


def equation_residual(theta, eps, params, variant):
    h = 1e-7
    phi = wkb_pre_curve(theta, eps, params, variant)
    dphi = (wkb_pre_curve(theta + h, eps, params, variant) - wkb_pre_curve(theta - h, eps, params, variant)) / (2 * h)
    return 1j * eps * dphi + (-theta + np.abs(phi) ** 2) * phi - np.conj(phi)


def test_leading_term_residual_scales_as_eps_three_halves():
    theta = np.linspace(-3.0, -2.0, 20001)
    coarse = np.max(np.abs(equation_residual(theta, 0.01, PARAMS, PhaseVariantPre.AVERAGED)))
    fine = np.max(np.abs(equation_residual(theta, 0.005, PARAMS, PhaseVariantPre.AVERAGED)))
    assert coarse / fine == pytest.approx(2.0 ** 1.5, rel=0.15)


@pytest.mark.slow
def test_averaged_overlap_error_shrinks_with_eps():
    from harness.experiments import overlap_error

    coarse, fine = overlap_error(eps=0.01), overlap_error(eps=0.005)
    assert coarse["averaged"] / fine["averaged"] > 1.2
