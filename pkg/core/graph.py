import os
from typing import Any, Dict

from dotenv import load_dotenv
from langgraph.graph import END, StateGraph
from langsmith import traceable

from core.state import ScatteringReport, ScatteringState, create_initial_state
from pipeline.capture_node import capture_node
from pipeline.connect_node import connect_node
from pipeline.fit_node import fit_node
from pipeline.integrate_node import integrate_node
from pipeline.report_node import report_node
from pipeline.seed_node import seed_node
from utils.log_utils import logger

load_dotenv()

langsmith_api_key = os.getenv("LANGCHAIN_API_KEY")
if langsmith_api_key:
    os.environ["LANGCHAIN_TRACING_V2"] = "true"
    os.environ.setdefault("LANGCHAIN_PROJECT", os.getenv("LANGCHAIN_PROJECT", "captureLab"))
else:
    os.environ.setdefault("LANGCHAIN_TRACING_V2", "false")


def route_after_capture(state: ScatteringState) -> str:
    """
    Captured runs go to the fit, the rest straight to the predictions.
    """
    next_action = state.get("next_action", "connect")
    logger.info(f"Routing after capture: {next_action}")
    return "fit" if next_action == "fit" else "connect"


def build_scattering_graph():
    """
    Build and compile the scattering pipeline.

    Graph Structure:
    START → seed → integrate → capture → [captured → fit] → connect → report → END

    Returns:
        Compiled LangGraph workflow
    """
    workflow = StateGraph(ScatteringState)

    workflow.add_node("seed", seed_node)
    workflow.add_node("integrate", integrate_node)
    workflow.add_node("capture", capture_node)
    workflow.add_node("fit", fit_node)
    workflow.add_node("connect", connect_node)
    workflow.add_node("report", report_node)

    workflow.set_entry_point("seed")
    workflow.add_edge("seed", "integrate")
    workflow.add_edge("integrate", "capture")

    workflow.add_conditional_edges(
        "capture",
        route_after_capture,
        {
            "fit": "fit",
            "connect": "connect",
        }
    )
    workflow.add_edge("fit", "connect")
    workflow.add_edge("connect", "report")
    workflow.add_edge("report", END)

    return workflow.compile()


@traceable(name="run_scattering")
def run_scattering(cfg: Any) -> ScatteringReport:
    """
    Integrate one configuration end to end and compare prediction with fit.

    Args:
        cfg: config.settings.RunConfig

    Returns:
        ScatteringReport; measured fields are None when the run is not captured
    """
    graph = build_scattering_graph()
    final_state: Dict[str, Any] = graph.invoke(create_initial_state(cfg))
    return final_state["report"]
