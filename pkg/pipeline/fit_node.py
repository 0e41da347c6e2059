from typing import Any, Dict

from asymptotics.post_capture import resolve_post_capture
from core.errors import NotCaptured, OutOfDomain, WindowTooShort
from core.state import ScatteringState
from utils.log_utils import logger


def fit_window(state: ScatteringState) -> tuple[float, float]:
    """The configured fit window clipped to [theta_capture, theta1]."""
    cfg = state["config"]
    lo, hi = sorted(cfg.fit_window)
    theta_capture = state.get("theta_capture")
    if theta_capture is not None:
        lo = max(lo, theta_capture)
    return lo, min(hi, cfg.theta1)


def _skipped(state: ScatteringState, reason: str) -> Dict[str, Any]:
    logger.info(f"Fit skipped: {reason}")
    return {
        "measured": None,
        "decision_log": state.get("decision_log", []) + [f"Fit skipped: {reason}"],
        "next_action": "connect",
    }


def fit_node(state: ScatteringState) -> Dict[str, Any]:
    """Fit the captured parameters on the fit window."""
    logger.info("=" * 60)
    logger.info("Fit Node")
    logger.info("=" * 60)

    cfg = state["config"]
    window = fit_window(state)
    if window[0] >= window[1]:
        return _skipped(state, f"fit window {cfg.fit_window} lies outside the captured run")
    if window != tuple(sorted(cfg.fit_window)):
        logger.info(f"Fit window clipped to [{window[0]:.6g}, {window[1]:.6g}]")

    try:
        measured = resolve_post_capture(state["trajectory"], cfg.eps, window)
    except (NotCaptured, OutOfDomain, WindowTooShort) as e:
        return _skipped(state, f"{type(e).__name__}: {e}")

    params = measured.params
    return {
        "measured": measured,
        "decision_log": state.get("decision_log", []) + [
            f"Fitted j = {params.branch_j}, A00 = {params.A00:.6g}, phi00 = {params.phi00:.6g} "
            f"with {measured.equilibrium.value}/{measured.phase.value} on [{window[0]:.6g}, {window[1]:.6g}]"
        ],
        "next_action": "connect",
    }
