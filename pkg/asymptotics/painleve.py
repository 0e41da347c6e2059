"""
Resonant layer: the real Painleve-2 equation v'' = z v - 2 v^3.

At z -> -inf, v ~ alpha~ (-z)^(-1/4) sin(2/3 (-z)^(3/2) + 3/4 alpha~^2 ln(-z) + phi~).
At z -> +inf, either v ~ +-sqrt(z/2) -+ (2z)^(-1/4) rho cos(2 sqrt2/3 z^(3/2) - 3/2 rho^2 ln z - upsilon)
(capture) or v decays like Ai(z). With this sign and phase orientation the
fitted (rho, upsilon) are the ones the connection formulas return.

The layer variable relates to the scaled variables by z = 2^(1/3) eta,
x0 = -2^(1/3) v, y0 = 2^(-1/3) v'.
"""
import math
from typing import Optional

import numpy as np
from scipy.special import airy

from asymptotics.fitting import count_periods, fit_log_chirp
from config.defaults import (
    DECAY_THRESHOLD_FACTOR,
    ESCAPE_FACTOR,
    MAX_STEP,
    MIN_FIT_PERIODS,
    MIN_STEP,
    MINUS_FIT_WINDOW,
    PAINLEVE_TOL,
    PLUS_FIT_WINDOW,
    SEED_ABSCISSA_MAX,
)
from core.errors import OutOfDomain, WindowTooShort
from core.state import (
    LayerOutcome,
    MinusInfinityFit,
    PainleveSeed,
    PlusInfinityClass,
    Tolerances,
    Trajectory,
    wrap_angle,
)
from tools.integrator import integrate_adaptive
from utils.log_utils import logger


CUBE_ROOT_TWO = 2.0 ** (1.0 / 3.0)
CAPTURE_FREQUENCY = 2.0 * math.sqrt(2.0) / 3.0
MINUS_LOG_COUPLING = 0.75
PLUS_LOG_COUPLING = -1.5
MIN_FIT_SAMPLES = 16


def default_tolerances() -> Tolerances:
    return Tolerances.uniform(PAINLEVE_TOL, max_step=MAX_STEP, min_step=MIN_STEP)


def painleve_field(z: float, y: np.ndarray) -> np.ndarray:
    v = y[0]
    return np.array([y[1], z * v - 2.0 * v ** 3])


def minus_infinity_phase(z, alpha_t: float, phi_t: float):
    return 2.0 / 3.0 * (-z) ** 1.5 + MINUS_LOG_COUPLING * alpha_t ** 2 * np.log(-z) + phi_t


def seed_at_minus_infinity(seed: PainleveSeed) -> tuple[float, float]:
    """
    (v, v') of the leading -inf asymptotics at seed.z0.
    """
    z, alpha = seed.z0, seed.alpha_t
    if alpha == 0.0:
        return 0.0, 0.0

    theta = minus_infinity_phase(z, alpha, seed.phi_t)
    dtheta = -math.sqrt(-z) - MINUS_LOG_COUPLING * alpha ** 2 / (-z)
    v = alpha * (-z) ** -0.25 * math.sin(theta)
    dv = alpha * (0.25 * (-z) ** -1.25 * math.sin(theta) + (-z) ** -0.25 * math.cos(theta) * dtheta)
    return float(v), float(dv)


def integrate_painleve(seed: PainleveSeed, z_end: float,
                       tol: Optional[Tolerances] = None) -> Trajectory:
    """
    Integrate v'' = z v - 2 v^3 from the seed to z_end.

    Returns:
        Trajectory over z with states (v, v')
    """
    if not z_end > seed.z0:
        raise OutOfDomain(f"z_end = {z_end} must lie beyond z0 = {seed.z0}")

    v0, dv0 = seed_at_minus_infinity(seed)
    logger.info(f"Painleve run: alpha~ = {seed.alpha_t:.6g}, phi~ = {seed.phi_t:.6g}, "
                f"z in [{seed.z0:g}, {z_end:g}]")
    return integrate_adaptive(
        painleve_field,
        [v0, dv0],
        (seed.z0, z_end),
        tol or default_tolerances(),
        equation_id="painleve2",
        independent_var="z",
    )


def integrate_decaying(k: float, z_start: float = 6.0, z_end: float = -40.0,
                       tol: Optional[Tolerances] = None) -> Trajectory:
    """
    Integrate backwards from v = k Ai(z_start), the decaying branch at +inf.

    Backward integration is the stable direction for this solution, so the
    -inf data it produces can be compared with the special-phase line.
    """
    if not z_end < z_start:
        raise OutOfDomain("the decaying solution is integrated towards -inf")

    ai, aip, _, _ = airy(z_start)
    return integrate_adaptive(
        painleve_field,
        [k * ai, k * aip],
        (z_start, z_end),
        tol or default_tolerances(),
        equation_id="painleve2-decaying",
        independent_var="z",
    )


def decaying_amplitude(k: float) -> float:
    """alpha~ of the solution ~ k Ai(z): alpha~^2 = ln(1 + k^2) / pi."""
    return math.sqrt(math.log1p(k * k) / math.pi)


def _window_samples(traj: Trajectory, window: tuple[float, float]) -> tuple[np.ndarray, np.ndarray]:
    if not traj.covers(*window):
        raise OutOfDomain(f"trajectory does not cover the fit window {window}")
    z, states = traj.window(*window)
    order = np.argsort(z)
    return z[order], states[order, 0]


def fit_minus_infinity(traj: Trajectory,
                       fit_window: tuple[float, float] = MINUS_FIT_WINDOW) -> MinusInfinityFit:
    """
    Least-squares fit of the -inf asymptotics on fit_window.

    Raises:
        OutOfDomain: Window reaches above z = -10
        WindowTooShort: Fewer than 8 periods in the window
        FitDiverged: The alternating fit did not converge
    """
    z1, z2 = sorted(fit_window)
    if z2 > SEED_ABSCISSA_MAX:
        raise OutOfDomain(f"-inf fit window must end at or below {SEED_ABSCISSA_MAX}")

    z, v = _window_samples(traj, (z1, z2))
    base = 2.0 / 3.0 * (-z) ** 1.5
    if z.size < MIN_FIT_SAMPLES or count_periods(base) < MIN_FIT_PERIODS:
        raise WindowTooShort(f"window {fit_window} spans {count_periods(base):.1f} periods")

    fit = fit_log_chirp(v, (-z) ** -0.25, base, np.log(-z), MINUS_LOG_COUPLING)
    return MinusInfinityFit(
        alpha_t=fit.amplitude,
        phi_t=fit.phase,
        residual=fit.residual,
        identifiable=fit.identifiable,
    )


def branch_sign(z: np.ndarray, v: np.ndarray) -> int:
    """Sign of mean(v / sqrt(z/2)); ties go to the sample at largest z."""
    mean = float(np.mean(v / np.sqrt(z / 2.0)))
    if mean > 0.0:
        return 1
    if mean < 0.0:
        return -1
    return 1 if v[np.argmax(z)] >= 0.0 else -1


def classify_at_plus_infinity(traj: Trajectory,
                              fit_window: tuple[float, float] = PLUS_FIT_WINDOW) -> PlusInfinityClass:
    """
    Decay if max |v| on the window stays below 0.05 sqrt(z1/2), else capture.

    For capture, (rho, upsilon) come from fitting
    sign v - sqrt(z/2) ~ -(2z)^(-1/4) rho cos(2 sqrt2/3 z^(3/2) - 3/2 rho^2 ln z - upsilon).
    rho is extrapolated to z -> inf from the two halves of the window, and
    upsilon is then refitted with the log-phase term held at that rho.

    Raises:
        OutOfDomain: z1 < 10 or the trajectory misses the window
        WindowTooShort: Fewer than 8 periods in the window
        FitDiverged: The alternating fit did not converge
    """
    z1, z2 = sorted(fit_window)
    if z1 < 10.0:
        raise OutOfDomain(f"+inf fit window must start at z >= 10, got {z1}")

    z, v = _window_samples(traj, (z1, z2))
    threshold = DECAY_THRESHOLD_FACTOR * math.sqrt(z1 / 2.0)
    if float(np.max(np.abs(v))) < threshold:
        return PlusInfinityClass(kind=LayerOutcome.DECAY, residual=float(np.max(np.abs(v))))

    base = CAPTURE_FREQUENCY * z ** 1.5
    if z.size < MIN_FIT_SAMPLES or count_periods(base) < MIN_FIT_PERIODS:
        raise WindowTooShort(f"window {fit_window} spans {count_periods(base):.1f} periods")

    sign = branch_sign(z, v)
    deviation = sign * v - np.sqrt(z / 2.0)
    envelope = (2.0 * z) ** -0.25
    log_z = np.log(z)
    fit = fit_log_chirp(deviation, envelope, base, log_z, PLUS_LOG_COUPLING, offset=True)
    if not fit.identifiable:
        return PlusInfinityClass(kind=LayerOutcome.CAPTURE, sign=sign, rho=0.0, upsilon=0.0,
                                 residual=fit.residual)

    rho = _extrapolated_amplitude(z, deviation, envelope, base, log_z, fit.amplitude)
    phase_fit = fit_log_chirp(deviation, envelope, base, log_z, PLUS_LOG_COUPLING,
                              offset=True, coupled_amplitude=rho)

    # -cos(x - upsilon) = sin(x + 3 pi/2 - upsilon)
    return PlusInfinityClass(
        kind=LayerOutcome.CAPTURE,
        sign=sign,
        rho=rho,
        upsilon=wrap_angle(1.5 * math.pi - phase_fit.phase),
        residual=phase_fit.residual,
    )


def _extrapolated_amplitude(z: np.ndarray, signal: np.ndarray, envelope: np.ndarray,
                            base: np.ndarray, log_z: np.ndarray, whole: float) -> float:
    """
    Fundamental amplitude at z -> inf from fits on the two halves of the window.

    The amplitude at finite z carries a correction of order rho^2 z^(-3/2);
    it is removed by linear extrapolation in the mean of z^(-3/2) over each
    half. Falls back to the whole-window amplitude when a half is too short.
    """
    if count_periods(base) < 2 * MIN_FIT_PERIODS:
        return whole

    middle = 0.5 * (base[0] + base[-1])
    amplitudes, abscissae = [], []
    for mask in (base <= middle, base > middle):
        if int(mask.sum()) < MIN_FIT_SAMPLES:
            return whole
        part = fit_log_chirp(signal[mask], envelope[mask], base[mask], log_z[mask],
                             PLUS_LOG_COUPLING, offset=True)
        if not part.identifiable:
            return whole
        amplitudes.append(part.amplitude)
        abscissae.append(float(np.mean(z[mask] ** -1.5)))

    (near, far), (x_near, x_far) = amplitudes, abscissae
    limit = (far * x_near - near * x_far) / (x_near - x_far)
    logger.debug(f"+inf amplitude: halves {near:.6g}, {far:.6g} -> {limit:.6g}")
    return limit if limit > 0.0 else whole


def escape_abscissa(traj: Trajectory, factor: float = ESCAPE_FACTOR) -> Optional[float]:
    """
    First z > 0 after which |v| >= factor sqrt(z/2) holds on every later sample.

    A forward run on the special-phase line follows the decaying solution
    until the growing mode takes over, so its escape abscissa is larger than
    that of a nearby generic phase. None if the solution never escapes.
    """
    z, states = traj.window(0.0, float(traj.points.max()))
    if z.size == 0:
        return None
    order = np.argsort(z)
    z, v = z[order], states[order, 0]
    holds = np.abs(v) >= factor * np.sqrt(z / 2.0)
    if not holds[-1]:
        return None
    failing = np.flatnonzero(~holds)
    return float(z[0] if failing.size == 0 else z[failing[-1] + 1])


def scaled_from_painleve(z, v, dv):
    """(eta, x0, y0) of the leading layer system for Painleve data (z, v, v')."""
    return (np.asarray(z) / CUBE_ROOT_TWO,
            -CUBE_ROOT_TWO * np.asarray(v),
            np.asarray(dv) / CUBE_ROOT_TWO)


def painleve_from_scaled(eta, x, y):
    """Inverse of scaled_from_painleve."""
    return (CUBE_ROOT_TWO * np.asarray(eta),
            -np.asarray(x) / CUBE_ROOT_TWO,
            CUBE_ROOT_TWO * np.asarray(y))
