import math
from typing import Any, Dict, Optional

import numpy as np
from scipy.integrate import cumulative_trapezoid

from config.defaults import CAPTURE_FACTOR, CAPTURE_WINDOW
from core.errors import SpanTooShort
from core.state import ScatteringState, Trajectory
from utils.log_utils import logger


def _period_mean(theta: np.ndarray, phi2: np.ndarray, eps: float, window: float) -> np.ndarray:
    """|phi|^2 averaged over one local fast period pi eps / sqrt(1 + theta), clipped to the samples."""
    half = np.minimum(0.5 * math.pi * eps / np.sqrt(1.0 + theta), 0.5 * window)
    integral = cumulative_trapezoid(phi2, theta, initial=0.0)
    lo = np.maximum(theta - half, theta[0])
    hi = np.minimum(theta + half, theta[-1])
    width = hi - lo
    averaged = (np.interp(hi, theta, integral) - np.interp(lo, theta, integral)) / np.where(width > 0.0, width, 1.0)
    return np.where(width > 0.0, averaged, phi2)


def detect_capture(traj: Trajectory, factor: float = CAPTURE_FACTOR,
                   window: float = CAPTURE_WINDOW) -> Optional[float]:
    """
    First theta from which |phi|^2 >= factor (1 + theta) holds continuously.

    Capture is reported only when the criterion holds on every sample of the
    trailing window [theta1 - window, theta1] with theta1 >= 0. Samples at
    theta <= -1 satisfy the criterion trivially and are not counted. When the
    trajectory carries eps, |phi|^2 is first averaged over the local period
    of the captured oscillation.

    Returns:
        theta_capture, or None when the trajectory is not captured

    Raises:
        SpanTooShort: the trajectory ends before theta = -0.5
    """
    theta = traj.points
    theta1 = float(theta.max())
    if theta1 < -0.5:
        raise SpanTooShort(f"trajectory ends at theta = {theta1}, before -0.5")
    if theta1 < 0.0:
        return None

    order = np.argsort(theta)
    theta = theta[order]
    phi2 = traj.states[order, 0] ** 2 + traj.states[order, 1] ** 2

    active = theta > -1.0
    theta, phi2 = theta[active], phi2[active]
    if traj.eps is not None and theta.size > 1:
        phi2 = _period_mean(theta, phi2, traj.eps, window)
    holds = phi2 >= factor * (1.0 + theta)

    failing = np.flatnonzero(~holds)
    if failing.size == 0:
        start = 0
    elif failing[-1] + 1 < theta.size:
        start = failing[-1] + 1
    else:
        return None

    theta_capture = float(theta[start])
    if theta_capture > theta1 - window:
        return None
    return theta_capture


def capture_node(state: ScatteringState) -> Dict[str, Any]:
    """Run capture detection and choose the next step."""
    logger.info("=" * 60)
    logger.info("Capture Node")
    logger.info("=" * 60)

    theta_capture = detect_capture(state["trajectory"])

    if theta_capture is None:
        logger.info("No capture detected")
        entry = "Capture not detected"
        next_action = "connect"
    else:
        logger.info(f"Captured at theta = {theta_capture:.6g}")
        entry = f"Captured at theta = {theta_capture:.6g}"
        next_action = "fit"

    return {
        "theta_capture": theta_capture,
        "decision_log": state.get("decision_log", []) + [entry],
        "next_action": next_action,
    }
