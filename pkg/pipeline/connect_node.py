from typing import Any, Dict

from core.state import ConnectionResult, ScatteringState
from pipeline.variants import predict_all
from utils.log_utils import logger


def connect_node(state: ScatteringState) -> Dict[str, Any]:
    """Predict the captured parameters under every connection variant."""
    logger.info("=" * 60)
    logger.info("Connect Node")
    logger.info("=" * 60)

    pre = state.get("pre")
    if pre is None:
        return {
            "predictions": {},
            "decision_log": state.get("decision_log", []) + ["No pre-capture data; predictions skipped"],
            "next_action": "report",
        }

    cfg = state["config"]
    predictions = predict_all(pre, cfg.eps)

    default = predictions.get(cfg.connection.label)
    if isinstance(default, ConnectionResult) and not default.special:
        entry = (f"Predicted ({cfg.connection.label}): j = {default.branch_j}, "
                 f"A00 = {default.A00:.6g}, phi00 = {default.phi00:.6g}")
    elif isinstance(default, ConnectionResult):
        entry = f"Predicted ({cfg.connection.label}): special phase, decay"
    else:
        entry = f"Prediction failed ({cfg.connection.label}): {default}"
    logger.info(entry)

    return {
        "predictions": predictions,
        "decision_log": state.get("decision_log", []) + [entry],
        "next_action": "report",
    }
