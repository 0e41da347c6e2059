"""
Connection formulas between the layer data at -inf and +inf.

    p = sqrt(exp(pi a^2) - 1) exp(i (3/2 a^2 ln 2 - pi/4 - arg Gamma(i a^2/2) - phi))
    rho^2 = 1/pi ln((1 + |p|^2) / (k |Im p|)),  k = 2 (default) or 3
    upsilon = -pi/4 + 7/2 rho^2 ln 2 - arg Gamma(i rho^2) - arg(1 + p^2)

upsilon is the phase of the +inf form in asymptotics.painleve; the phase of
the captured oscillation there is pi - upsilon. Im p > 0 selects branch
j = 2, Im p < 0 branch j = 3; Im p = 0 is the special (decaying) line.
"""
import cmath
import math
from typing import Optional

from asymptotics.pre_capture import matched_painleve_data
from config.defaults import MAX_EXP_ARGUMENT, SPECIAL_PHASE_TOL
from core.errors import ConfigError, NegativeRho2, OutOfDomain, Overflow, SpecialPhase
from core.state import (
    ConnectionResult,
    ConstantVariantPost,
    MatchingRule,
    PreCaptureParams,
    RhoDenominator,
    wrap_angle,
)
from tools.special import arg_gamma_imaginary


LN2 = math.log(2.0)


def _base_phase(alpha: float) -> float:
    a2 = alpha * alpha
    return 1.5 * a2 * LN2 - 0.25 * math.pi - arg_gamma_imaginary(0.5 * a2)


def compute_p(alpha: float, phi: float) -> complex:
    """
    The connection parameter p for layer data (alpha, phi).

    Raises:
        Overflow: pi alpha^2 beyond the exponential range
    """
    if alpha < 0.0:
        raise OutOfDomain(f"alpha must be non-negative, got {alpha}")
    if alpha == 0.0:
        return 0j
    if math.pi * alpha * alpha > MAX_EXP_ARGUMENT:
        raise Overflow(f"exp(pi alpha^2) overflows for alpha = {alpha}")

    modulus = math.sqrt(math.expm1(math.pi * alpha * alpha))
    return modulus * cmath.exp(1j * (_base_phase(alpha) - phi))


def special_phases(alpha: float) -> tuple[float, float]:
    """The two phases (kappa = 0, 1) where Im p = 0, each in [0, 2pi)."""
    base = _base_phase(alpha)
    return wrap_angle(base), wrap_angle(base + math.pi)


def is_special(p: complex) -> bool:
    return abs(p.imag) <= SPECIAL_PHASE_TOL * max(1.0, abs(p))


def rho_upsilon(
    p: complex,
    variant: ConstantVariantPost = ConstantVariantPost.THEOREM_TWO,
    denominator: RhoDenominator = RhoDenominator.TWO,
) -> tuple[float, float]:
    """
    (rho^2, upsilon) at +inf for a generic p.

    Raises:
        SpecialPhase: Im p = 0, the solution decays
        NegativeRho2: the formula gives rho^2 < 0
    """
    if is_special(p):
        raise SpecialPhase(f"Im p = {p.imag:.3g} is on the special line")

    factor = 3.0 if denominator is RhoDenominator.THREE else 2.0
    rho2 = math.log((1.0 + abs(p) ** 2) / (factor * abs(p.imag))) / math.pi
    if rho2 < 0.0:
        raise NegativeRho2(rho2)

    constant = 3.5 * rho2 * (LN2 if variant is ConstantVariantPost.THEOREM_TWO else 1.0)
    upsilon = -0.25 * math.pi + constant - arg_gamma_imaginary(rho2) - cmath.phase(1.0 + p * p)
    return rho2, wrap_angle(upsilon)


def branch_from_p(p: complex) -> int:
    return 2 if p.imag > 0.0 else 3


def matched_post_phase(rho2: float, upsilon: float, eps: Optional[float],
                       rule: MatchingRule = MatchingRule.IDENTITY) -> float:
    """
    phi00 from the +inf layer phase.

    IDENTITY: phi00 = upsilon.
    AVERAGED: phi00 = pi - upsilon - rho^2 (1/2 ln 2 + 1/2 - ln eps). The
    captured oscillation carries the layer phase pi - upsilon, and the rho^2
    term matches it with the averaged post-capture slow phase as theta -> -1.
    """
    if rule is MatchingRule.IDENTITY:
        return upsilon
    if eps is None:
        raise ConfigError("averaged matching needs eps")
    return wrap_angle(math.pi - upsilon - rho2 * (0.5 * LN2 + 0.5 - math.log(eps)))


def capture_params(
    pre: PreCaptureParams,
    variant: ConstantVariantPost = ConstantVariantPost.THEOREM_TWO,
    *,
    denominator: RhoDenominator = RhoDenominator.TWO,
    matching: MatchingRule = MatchingRule.IDENTITY,
    eps: Optional[float] = None,
) -> ConnectionResult:
    """
    Predicted captured parameters (A00, phi00, j) for pre-capture data.

    On the special line the result has special = True and no capture fields.

    Raises:
        NegativeRho2: propagated from rho_upsilon
    """
    if matching is MatchingRule.AVERAGED and eps is None:
        raise ConfigError("averaged matching needs eps")

    alpha_t, phi_t = (matched_painleve_data(pre, eps, matching)
                      if matching is MatchingRule.AVERAGED else (pre.alpha10, pre.phi10))
    p = compute_p(alpha_t, phi_t)
    if is_special(p):
        return ConnectionResult(p=p, special=True)

    rho2, upsilon = rho_upsilon(p, variant, denominator)
    return ConnectionResult(
        p=p,
        special=False,
        rho2=rho2,
        upsilon=upsilon,
        A00=math.sqrt(rho2),
        phi00=matched_post_phase(rho2, upsilon, eps, matching),
        branch_j=branch_from_p(p),
    )
