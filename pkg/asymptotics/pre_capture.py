"""
Pre-capture WKB solution of the primary equation (theta < -1).

Leading term, for the sin - i cos orientation,

    phi ~ sqrt(eps) alpha10 [ r^(1/4) sin s - i r^(-1/4) cos s ],  r = (theta-1)/(theta+1),

with fast phase omega(theta)/eps and a slow correction selected by PhaseVariantPre.
"""
import math

import numpy as np

from config.defaults import VALIDITY_MARGIN
from core.errors import OutOfDomain
from core.state import MatchingRule, PhaseVariantPre, PreCaptureParams, wrap_angle


def _check_domain(theta: float) -> None:
    if not theta < -1.0:
        raise OutOfDomain(f"pre-capture formulas need theta < -1, got {theta}")


def omega_pre(theta: float) -> tuple[float, float]:
    """
    Fast phase omega and its derivative sqrt(theta^2 - 1).

    omega = 1/2 theta sqrt(theta^2-1) - 1/2 ln|theta + sqrt(theta^2-1)|, which
    is written with arccosh for theta far below -1.
    """
    _check_domain(theta)
    root = math.sqrt(theta * theta - 1.0)
    omega = 0.5 * theta * root + 0.5 * math.acosh(-theta)
    return omega, root


def log_ratio(theta: float) -> float:
    """ln|(theta-1)/(theta+1)|."""
    _check_domain(theta)
    return math.log((theta - 1.0) / (theta + 1.0))


def slow_correction_pre(theta: float, variant: PhaseVariantPre) -> float:
    """Coefficient of alpha10^2 in the slow phase."""
    log_r = log_ratio(theta)
    if variant is PhaseVariantPre.THEOREM:
        return 2.0 * theta + 2.0 * log_r
    if variant is PhaseVariantPre.SECTION:
        return -(theta + log_r)
    return theta + 0.75 * log_r


def phase_pre(theta: float, eps: float, p: PreCaptureParams,
              variant: PhaseVariantPre = PhaseVariantPre.AVERAGED) -> float:
    omega, _ = omega_pre(theta)
    return omega / eps + p.phi10 + p.alpha10 ** 2 * slow_correction_pre(theta, variant)


def wkb_pre_eval(theta: float, eps: float, p: PreCaptureParams,
                 variant: PhaseVariantPre = PhaseVariantPre.AVERAGED) -> complex:
    """Leading-order pre-capture amplitude phi(theta)."""
    s = phase_pre(theta, eps, p, variant)
    quarter = ((theta - 1.0) / (theta + 1.0)) ** 0.25
    sign = 1.0 if variant is PhaseVariantPre.THEOREM else -1.0
    scale = math.sqrt(eps) * p.alpha10
    return complex(scale * quarter * math.sin(s), sign * scale * math.cos(s) / quarter)


def wkb_pre_envelope(theta: float, eps: float, p: PreCaptureParams,
                     variant: PhaseVariantPre = PhaseVariantPre.AVERAGED) -> float:
    """|phi|^2 = eps alpha^2 [sqrt(r) sin^2 s + sqrt(1/r) cos^2 s]."""
    s = phase_pre(theta, eps, p, variant)
    r = (theta - 1.0) / (theta + 1.0)
    return eps * p.alpha10 ** 2 * (math.sqrt(r) * math.sin(s) ** 2 + math.cos(s) ** 2 / math.sqrt(r))


def validity_pre(theta: float, eps: float) -> float:
    """eps^(-2/3)(-1 - theta); at least VALIDITY_MARGIN counts as valid."""
    return eps ** (-2.0 / 3.0) * (-1.0 - theta)


def is_valid_pre(theta: float, eps: float) -> bool:
    return validity_pre(theta, eps) >= VALIDITY_MARGIN


def invert_wkb_pre(theta: float, phi: complex, eps: float,
                   variant: PhaseVariantPre = PhaseVariantPre.AVERAGED) -> PreCaptureParams:
    """
    Parameters (alpha10, phi10) whose leading WKB term passes through phi at theta.
    """
    _check_domain(theta)
    phi = complex(phi)
    quarter = ((theta - 1.0) / (theta + 1.0)) ** 0.25
    sign = 1.0 if variant is PhaseVariantPre.THEOREM else -1.0
    sin_part = phi.real / (math.sqrt(eps) * quarter)
    cos_part = sign * phi.imag * quarter / math.sqrt(eps)
    alpha = math.hypot(sin_part, cos_part)
    s = math.atan2(sin_part, cos_part)
    omega, _ = omega_pre(theta)
    phi10 = s - omega / eps - alpha ** 2 * slow_correction_pre(theta, variant)
    return PreCaptureParams(alpha10=alpha, phi10=wrap_angle(phi10))


def matched_painleve_data(p: PreCaptureParams, eps: float,
                          rule: MatchingRule = MatchingRule.IDENTITY) -> tuple[float, float]:
    """
    Layer data (alpha~, phi~) that continue the pre-capture solution.

    IDENTITY takes alpha~ = alpha10 and phi~ = phi10. AVERAGED carries the
    averaged slow phase into the layer variable z = 2^(1/3) eta, which flips
    the sign of the phase and adds a log eps shift:
    phi~ = -phi10 + alpha10^2 (1 - ln 2) + 1/2 alpha10^2 ln eps.
    """
    if rule is MatchingRule.IDENTITY:
        return p.alpha10, p.phi10
    a2 = p.alpha10 ** 2
    phi_t = -p.phi10 + a2 * (1.0 - math.log(2.0)) + 0.5 * a2 * math.log(eps)
    return p.alpha10, wrap_angle(phi_t)


def wkb_pre_curve(theta: np.ndarray, eps: float, p: PreCaptureParams,
                  variant: PhaseVariantPre = PhaseVariantPre.AVERAGED) -> np.ndarray:
    """wkb_pre_eval over an array of theta values."""
    return np.array([wkb_pre_eval(float(t), eps, p, variant) for t in theta])
