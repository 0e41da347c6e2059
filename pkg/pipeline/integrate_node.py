from typing import Any, Dict

from core.model import primary_field
from core.state import ScatteringState
from tools.integrator import integrate_adaptive
from utils.log_utils import logger


def integrate_node(state: ScatteringState) -> Dict[str, Any]:
    """Integrate the primary equation over [theta0, theta1]."""
    logger.info("=" * 60)
    logger.info("Integrate Node")
    logger.info("=" * 60)

    cfg = state["config"]
    phi0 = state["initial_phi"]

    trajectory = integrate_adaptive(
        primary_field(cfg.eps),
        [phi0.real, phi0.imag],
        (cfg.theta0, cfg.theta1),
        cfg.tolerances,
        equation_id="primary",
        independent_var="theta",
        eps=cfg.eps,
    )

    logger.info(f"{trajectory.size} samples over [{cfg.theta0}, {cfg.theta1}]")

    return {
        "trajectory": trajectory,
        "decision_log": state.get("decision_log", []) + [
            f"Integrated eps = {cfg.eps:g} over [{cfg.theta0:g}, {cfg.theta1:g}]: {trajectory.size} steps"
        ],
        "next_action": "capture",
    }
