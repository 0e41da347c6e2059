import json
import math
from typing import Any, Dict, List, Optional, Union

from asymptotics.connection import capture_params
from config.settings import ConnectionVariant
from core.errors import CaptureLabError
from core.state import (
    ConnectionResult,
    ConstantVariantPost,
    MatchingRule,
    PostCaptureParams,
    PreCaptureParams,
    RhoDenominator,
)
from harness.io import write_json
from utils.log_utils import logger


BRANCH_MISMATCH_PENALTY = math.pi


def get_connection_variants(with_matching: bool = True) -> List[ConnectionVariant]:
    """
    Every combination of the flagged connection-formula variants.

    Args:
        with_matching: Include the averaged matching rule (needs eps)

    Returns:
        Variants in a fixed order, the default formula first
    """
    matchings = [MatchingRule.IDENTITY, MatchingRule.AVERAGED] if with_matching else [MatchingRule.IDENTITY]
    return [
        ConnectionVariant(constant=constant, denominator=denominator, matching=matching)
        for matching in matchings
        for denominator in (RhoDenominator.THREE, RhoDenominator.TWO)
        for constant in (ConstantVariantPost.THEOREM_TWO, ConstantVariantPost.THEOREM_ONE)
    ]


def predict_all(pre: PreCaptureParams, eps: Optional[float]) -> Dict[str, Union[ConnectionResult, str]]:
    """
    capture_params under every variant; failures are kept as their error text.
    """
    predictions: Dict[str, Union[ConnectionResult, str]] = {}
    for variant in get_connection_variants(with_matching=eps is not None):
        try:
            predictions[variant.label] = capture_params(
                pre,
                variant.constant,
                denominator=variant.denominator,
                matching=variant.matching,
                eps=eps,
            )
        except CaptureLabError as e:
            predictions[variant.label] = f"{type(e).__name__}: {e}"
    return predictions


def angular_distance(a: float, b: float) -> float:
    return abs(math.remainder(a - b, 2.0 * math.pi))


def score_prediction(predicted: ConnectionResult, measured: PostCaptureParams) -> Dict[str, float]:
    """
    Compare a prediction with a fit.

    Returns:
        A00 relative error, phi00 angular error, branch match (1 or 0) and a
        combined score where a wrong branch costs pi
    """
    if predicted.special:
        return {"A00_rel": math.inf, "phi00_err": math.pi, "branch_match": 0.0, "score": math.inf}

    a00_rel = abs(measured.A00 - predicted.A00) / predicted.A00 if predicted.A00 > 0 else math.inf
    phi_err = angular_distance(measured.phi00, predicted.phi00)
    match = 1.0 if measured.branch_j == predicted.branch_j else 0.0
    score = a00_rel + phi_err + (0.0 if match else BRANCH_MISMATCH_PENALTY)
    return {"A00_rel": a00_rel, "phi00_err": phi_err, "branch_match": match, "score": score}


class VariantTracker:
    """
    Collects per-run scores of competing variants and resolves a winner.

    Lower scores are better. A category is resolved consistently when the same
    variant wins every recorded run.
    """

    def __init__(self):
        self.run_history: List[Dict[str, Any]] = []
        self.variant_stats: Dict[str, Dict[str, Dict[str, Any]]] = {}

    def record_run(self, category: str, run_id: str, scores: Dict[str, float]):
        finite = {label: s for label, s in scores.items() if math.isfinite(s)}
        winner = min(finite, key=finite.get) if finite else None

        self.run_history.append({
            "category": category,
            "run": run_id,
            "scores": dict(scores),
            "winner": winner,
        })

        stats = self.variant_stats.setdefault(category, {})
        for label, score in scores.items():
            entry = stats.setdefault(label, {"runs": 0, "wins": 0, "total_score": 0.0, "failures": 0})
            entry["runs"] += 1
            if math.isfinite(score):
                entry["total_score"] += score
            else:
                entry["failures"] += 1
            if label == winner:
                entry["wins"] += 1

        logger.info(f"{category} run {run_id}: winner {winner}")

    def resolve(self, category: str) -> Dict[str, Any]:
        stats = self.variant_stats.get(category, {})
        runs = [r for r in self.run_history if r["category"] == category]
        if not runs:
            return {"winner": None, "consistent": False, "runs": 0, "mean_scores": {}}

        mean_scores = {
            label: (entry["total_score"] / (entry["runs"] - entry["failures"])
                    if entry["failures"] == 0 else math.inf)
            for label, entry in stats.items()
        }
        winner = min(mean_scores, key=mean_scores.get)
        consistent = all(r["winner"] == winner for r in runs)
        return {
            "winner": winner,
            "consistent": consistent,
            "runs": len(runs),
            "mean_scores": {k: (round(v, 6) if math.isfinite(v) else None) for k, v in mean_scores.items()},
        }

    def resolve_all(self) -> Dict[str, Dict[str, Any]]:
        return {category: self.resolve(category) for category in self.variant_stats}

    def export_data(self, filename: str) -> str:
        return write_json({
            "run_history": self.run_history,
            "resolution": self.resolve_all(),
        }, filename)

    def load_data(self, filename: str):
        with open(filename, "r") as f:
            data = json.load(f)

        self.run_history = []
        self.variant_stats = {}
        for run in data.get("run_history", []):
            scores = {k: (math.inf if v is None else v) for k, v in run["scores"].items()}
            self.record_run(run["category"], run["run"], scores)
