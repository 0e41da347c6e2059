from typing import Any, Dict

from asymptotics.pre_capture import invert_wkb_pre, is_valid_pre, validity_pre, wkb_pre_eval
from config.defaults import VALIDITY_MARGIN
from core.errors import OutOfDomain
from core.state import PreCaptureParams, ScatteringState
from utils.log_utils import logger


def seed_node(state: ScatteringState) -> Dict[str, Any]:
    """
    Build phi(theta0) for the run.

    Given pre-capture parameters, the initial value is the leading WKB term,
    which is only trusted well inside its validity domain. Given a raw value,
    the parameters are recovered by inverting the WKB term when theta0 allows.

    Args:
        state: Current pipeline state

    Returns:
        State updates with initial_phi and pre
    """
    logger.info("=" * 60)
    logger.info("Seed Node")
    logger.info("=" * 60)

    cfg = state["config"]
    log = list(state.get("decision_log", []))

    if isinstance(cfg.initial, PreCaptureParams):
        margin = validity_pre(cfg.theta0, cfg.eps)
        if margin < VALIDITY_MARGIN:
            raise OutOfDomain(
                f"theta0 = {cfg.theta0} has pre-capture margin {margin:.3g} < {VALIDITY_MARGIN}"
            )
        pre = cfg.initial
        phi0 = wkb_pre_eval(cfg.theta0, cfg.eps, pre, cfg.pre_variant)
        log.append(f"Seeded from WKB ({cfg.pre_variant.value}): alpha10 = {pre.alpha10:.6g}, "
                   f"phi10 = {pre.phi10:.6g}")
    else:
        phi0 = complex(cfg.initial)
        pre = None
        if cfg.theta0 < -1.0 and is_valid_pre(cfg.theta0, cfg.eps) and phi0 != 0:
            pre = invert_wkb_pre(cfg.theta0, phi0, cfg.eps, cfg.pre_variant)
            log.append(f"Recovered pre-capture data: alpha10 = {pre.alpha10:.6g}, phi10 = {pre.phi10:.6g}")
        else:
            log.append("Raw initial value outside the pre-capture domain; no prediction")

    logger.info(f"phi(theta0 = {cfg.theta0}) = {phi0:.6g}")

    return {
        "initial_phi": phi0,
        "pre": pre,
        "decision_log": log,
        "next_action": "integrate",
    }
