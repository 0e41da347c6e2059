import math
from typing import Any, Dict

from core.state import ConnectionResult, ScatteringReport, ScatteringState
from pipeline.variants import score_prediction
from utils.log_utils import logger


def report_node(state: ScatteringState) -> Dict[str, Any]:
    """
    Assemble the ScatteringReport.

    The reported prediction is the configured connection variant. Every other
    variant is scored against the fit and the best one is named in
    variant_resolution.
    """
    logger.info("=" * 60)
    logger.info("Report Node")
    logger.info("=" * 60)

    cfg = state["config"]
    fit = state.get("measured")
    predictions = state.get("predictions", {})

    predicted = predictions.get(cfg.connection.label)
    if not isinstance(predicted, ConnectionResult):
        predicted = None

    residuals: Dict[str, float] = {}
    resolution: Dict[str, Any] = {"pre_variant": cfg.pre_variant.value,
                                  "connection": cfg.connection.label}

    if fit is not None:
        residuals.update({f"fit/{label}": value for label, value in fit.residuals.items()})
        resolution["equilibrium"] = fit.equilibrium.value
        resolution["post_phase"] = fit.phase.value

        scores = {}
        for label, result in predictions.items():
            if not isinstance(result, ConnectionResult):
                continue
            score = score_prediction(result, fit.params)
            for key, value in score.items():
                if math.isfinite(value):
                    residuals[f"{label}/{key}"] = value
            scores[label] = score["score"]

        finite = {label: s for label, s in scores.items() if math.isfinite(s)}
        resolution["best_connection"] = min(finite, key=finite.get) if finite else None
        logger.info(f"Best connection variant: {resolution['best_connection']}")

    log = state.get("decision_log", []) + ["Report assembled"]
    report = ScatteringReport(
        eps=cfg.eps,
        pre=state.get("pre"),
        predicted=predicted,
        measured=fit.params if fit is not None else None,
        theta_capture=state.get("theta_capture"),
        variant_resolution=resolution,
        residuals=residuals,
        decision_log=log,
    )

    return {
        "report": report,
        "decision_log": log,
        "next_action": "end",
    }
