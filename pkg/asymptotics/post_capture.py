"""
Captured solutions: slow manifolds U(theta) and the WKB oscillation around them.

    phi ~ (-1)^j [ U(theta) + sqrt(eps) A00 ((1+theta)^(-1/4) cos S + i (1+theta)^(1/4) sin S) ],
    S = Omega/eps + phi00 + A00^2 c(theta),  Omega = 4/3 (1+theta)^(3/2).
"""
import math
from typing import Optional

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.signal import hilbert
from scipy.stats import circmean, circstd

from config.defaults import (
    CAPTURE_FACTOR,
    MIN_FIT_PERIODS,
    UNIDENTIFIABLE_AMPLITUDE,
    VALIDITY_MARGIN,
    VALIDITY_RIGHT_MAX,
)
from core.errors import NotCaptured, OutOfDomain, WindowTooShort
from core.state import (
    EquilibriumVariant,
    PhaseVariantPost,
    PostCaptureFit,
    PostCaptureParams,
    Trajectory,
    TWO_PI,
)
from utils.log_utils import logger


MIN_FIT_SAMPLES = 16


def slow_manifold(theta: float, j: int) -> complex:
    """
    Leading slow equilibria: 0 (j=1), +-sqrt(1+theta) (j=2,3), +-i sqrt(theta-1) (j=4,5).

    Raises:
        OutOfDomain: the family does not exist at theta
    """
    if j == 1:
        return 0j
    if j in (2, 3):
        if theta < -1.0:
            raise OutOfDomain(f"families 2, 3 need theta >= -1, got {theta}")
        root = math.sqrt(1.0 + theta)
        return complex(root if j == 2 else -root, 0.0)
    if j in (4, 5):
        if theta < 1.0:
            raise OutOfDomain(f"families 4, 5 need theta >= 1, got {theta}")
        root = math.sqrt(theta - 1.0)
        return complex(0.0, root if j == 4 else -root)
    raise OutOfDomain(f"unknown family {j}")


def equilibrium_level(theta: float, variant: EquilibriumVariant = EquilibriumVariant.FULL_ROOT) -> float:
    """Distance of the captured branch from the origin."""
    root = math.sqrt(1.0 + theta)
    return root if variant is EquilibriumVariant.FULL_ROOT else 0.5 * root


def omega_post(theta: float) -> float:
    """Omega = 4/3 (1+theta)^(3/2)."""
    if theta < -1.0:
        raise OutOfDomain(f"omega_post needs theta >= -1, got {theta}")
    return 4.0 / 3.0 * (1.0 + theta) ** 1.5


def omega_post_prime(theta: float, j: int = 2) -> float:
    """
    Exact frequency sqrt((-theta + 2|U|^2)^2 - |U^2 - 1|^2) about family j in {1, 2, 3}.

    For j = 2, 3 this is 2 sqrt(1+theta).

    Raises:
        OutOfDomain: j outside {1, 2, 3} or U is a saddle at theta
    """
    if j not in (1, 2, 3):
        raise OutOfDomain("exact frequency only for families 1, 2, 3")
    u = slow_manifold(theta, j)
    radicand = (-theta + 2.0 * abs(u) ** 2) ** 2 - abs(u * u - 1.0) ** 2
    if radicand < 0.0:
        raise OutOfDomain(f"family {j} is a saddle at theta = {theta}")
    return math.sqrt(radicand)


def slow_correction_post(theta, variant: PhaseVariantPost = PhaseVariantPost.AVERAGED):
    """Coefficient of A00^2 in S. Accepts scalars or arrays with theta > -1."""
    theta = np.asarray(theta, dtype=float)
    m = 1.0 + theta
    if variant is PhaseVariantPost.THEOREM:
        value = (2.5 * theta + 0.75 * theta ** 2
                 + (112.0 - 8.0 * theta) * np.sqrt(m) / 6.0 + 1.5 * np.log(m))
    else:
        value = -0.5 * (theta + 3.0 * np.log(m))
    return value if value.ndim else float(value)


def slow_correction_post_expanded(theta: float) -> float:
    """The displayed slow phase written as 1/2 (5 theta + 3/2 theta^2 + 1/3 (112 - 8 theta) sqrt(1+theta) + 3 ln(1+theta))."""
    m = 1.0 + theta
    return 0.5 * (5.0 * theta + 1.5 * theta ** 2 + (112.0 - 8.0 * theta) * math.sqrt(m) / 3.0 + 3.0 * math.log(m))


def wkb_post_eval(
    theta: float,
    eps: float,
    p: PostCaptureParams,
    ev: EquilibriumVariant = EquilibriumVariant.FULL_ROOT,
    cv: PhaseVariantPost = PhaseVariantPost.AVERAGED,
) -> complex:
    """
    Leading-order captured solution.

    Raises:
        OutOfDomain: theta <= -1
    """
    if not theta > -1.0:
        raise OutOfDomain(f"captured solution needs theta > -1, got {theta}")
    m = 1.0 + theta
    s = omega_post(theta) / eps + p.phi00 + p.A00 ** 2 * slow_correction_post(theta, cv)
    oscillation = math.sqrt(eps) * p.A00 * complex(m ** -0.25 * math.cos(s), m ** 0.25 * math.sin(s))
    return (-1) ** p.branch_j * (equilibrium_level(theta, ev) + oscillation)


def validity_post(theta: float, eps: float) -> tuple[float, float]:
    """(eps^(-2/3)(1+theta), eps^(4/5) theta): valid when left >= 10 and right <= 0.1."""
    return eps ** (-2.0 / 3.0) * (1.0 + theta), eps ** 0.8 * theta


def _check_window(theta1: float, theta2: float, eps: float) -> None:
    left, _ = validity_post(theta1, eps)
    _, right = validity_post(theta2, eps)
    if left < VALIDITY_MARGIN or right > VALIDITY_RIGHT_MAX:
        raise OutOfDomain(
            f"window [{theta1}, {theta2}] leaves the post-capture validity domain at eps = {eps}"
        )


def _oscillation_coordinates(theta: np.ndarray, phi: np.ndarray, eps: float, j: int,
                             ev: EquilibriumVariant) -> np.ndarray:
    """a + ib with a = Re w m^(1/4)/sqrt(eps), b = Im w m^(-1/4)/sqrt(eps), w = (-1)^j phi - U."""
    m = 1.0 + theta
    level = np.sqrt(m) if ev is EquilibriumVariant.FULL_ROOT else 0.5 * np.sqrt(m)
    w = (-1) ** j * phi - level
    return (w.real * m ** 0.25 + 1j * w.imag * m ** -0.25) / math.sqrt(eps)


def resolve_post_capture(
    traj: Trajectory,
    eps: float,
    window: tuple[float, float],
    *,
    equilibria: Optional[list[EquilibriumVariant]] = None,
    phases: Optional[list[PhaseVariantPost]] = None,
) -> PostCaptureFit:
    """
    Fit (A00, phi00, j) for every equilibrium/phase variant pair and keep the best.

    Per sample the oscillation coordinates a + ib = A e^{iS} are formed; A00 is
    the mean of A and phi00 the circular mean of S - Omega/eps - A00^2 c(theta).
    The residual of a pair is the spread of A relative to A00 plus the circular
    standard deviation of the phase.

    Raises:
        OutOfDomain: window outside the trajectory or the validity domain
        NotCaptured: |phi|^2 < 0.5 (1+theta) somewhere in the window
        WindowTooShort: fewer than 8 fast periods or too few samples
    """
    theta1, theta2 = sorted(window)
    if not traj.covers(theta1, theta2):
        raise OutOfDomain(f"trajectory does not cover the window {window}")
    _check_window(theta1, theta2, eps)

    theta, states = traj.window(theta1, theta2)
    order = np.argsort(theta)
    theta, states = theta[order], states[order]
    phi = states[:, 0] + 1j * states[:, 1]

    if np.any(np.abs(phi) ** 2 < CAPTURE_FACTOR * (1.0 + theta)):
        raise NotCaptured(f"trajectory is not captured on [{theta1}, {theta2}]")

    periods = (omega_post(theta2) - omega_post(theta1)) / (TWO_PI * eps)
    if periods < MIN_FIT_PERIODS or theta.size < MIN_FIT_SAMPLES:
        raise WindowTooShort(f"window spans {periods:.1f} fast periods")

    j = 2 if float(np.mean(phi.real)) > 0.0 else 3
    fast = 4.0 / 3.0 * (1.0 + theta) ** 1.5 / eps

    candidates = []
    for ev in equilibria or list(EquilibriumVariant):
        coords = _oscillation_coordinates(theta, phi, eps, j, ev)
        amplitude = np.abs(coords)
        a00 = float(np.mean(amplitude))
        identifiable = a00 >= UNIDENTIFIABLE_AMPLITUDE
        for cv in phases or list(PhaseVariantPost):
            if identifiable:
                slow = np.angle(coords) - fast - a00 ** 2 * slow_correction_post(theta, cv)
                phi00 = float(circmean(slow, high=TWO_PI, low=0.0))
                spread = float(np.nan_to_num(circstd(slow, high=TWO_PI, low=0.0)))
                residual = float(np.std(amplitude)) / a00 + spread
            else:
                phi00, residual = 0.0, float(np.std(amplitude))
            candidates.append((residual, ev, cv, a00, phi00, identifiable))

    residuals = {f"{ev.value}/{cv.value}": res for res, ev, cv, *_ in candidates}
    best = min(candidates, key=lambda c: c[0])
    residual, ev, cv, a00, phi00, identifiable = best
    logger.info(f"post-capture fit: j = {j}, A00 = {a00:.6g}, phi00 = {phi00:.6g} "
                f"({ev.value}/{cv.value}, residual {residual:.3g})")

    return PostCaptureFit(
        params=PostCaptureParams(A00=a00, phi00=phi00, branch_j=j),
        equilibrium=ev,
        phase=cv,
        residuals=residuals,
        identifiable=identifiable,
    )


def fit_post_capture(traj: Trajectory, eps: float, window: tuple[float, float]) -> PostCaptureParams:
    """Best-fit captured parameters (see resolve_post_capture)."""
    return resolve_post_capture(traj, eps, window).params


def slow_amplitude_profile(traj: Trajectory, eps: float, branch_j: int,
                           edges: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """
    Slow amplitude A0(theta) of the oscillation in bins given by edges.

    In each bin Re w = (-1)^j Re phi - sqrt(1+theta) is resampled uniformly
    and its Hilbert envelope taken; A0 is the median of that envelope over
    the slow level sqrt(1+theta), away from the bin edges. For a captured
    solution A0 ~ (1+theta)^(-3/4).
    """
    centres, values = [], []
    for lo, hi in zip(edges[:-1], edges[1:]):
        theta, states = traj.window(lo, hi)
        if theta.size < MIN_FIT_SAMPLES:
            continue
        order = np.argsort(theta)
        theta = theta[order]
        w = (-1) ** branch_j * states[order, 0] - np.sqrt(1.0 + theta)

        # at least 32 samples per local fast period
        period = math.pi * eps / math.sqrt(1.0 + float(theta[0]))
        n = max(4 * theta.size, int(32.0 * (theta[-1] - theta[0]) / period))
        grid = np.linspace(theta[0], theta[-1], n)
        signal = CubicSpline(theta, w)(grid)
        envelope = np.abs(hilbert(signal - np.mean(signal)))

        inner = slice(n // 10, n - n // 10)
        centres.append(0.5 * (lo + hi))
        values.append(float(np.median(envelope[inner] / np.sqrt(1.0 + grid[inner]))))
    return np.asarray(centres), np.asarray(values)
