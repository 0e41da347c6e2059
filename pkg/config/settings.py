import os
from typing import Union

from pydantic import BaseModel, ConfigDict, Field, model_validator

from config.defaults import EPS_ODE_TOL, MAX_STEP, MIN_STEP, POST_FIT_WINDOW
from core.state import (
    ConstantVariantPost,
    MatchingRule,
    PhaseVariantPre,
    PreCaptureParams,
    RhoDenominator,
    Tolerances,
)


def default_ode_tolerances() -> Tolerances:
    return Tolerances.uniform(EPS_ODE_TOL, max_step=MAX_STEP, min_step=MIN_STEP)


class ConnectionVariant(BaseModel):
    """One combination of the flagged connection-formula variants."""

    model_config = ConfigDict(frozen=True)

    constant: ConstantVariantPost = ConstantVariantPost.THEOREM_TWO
    denominator: RhoDenominator = RhoDenominator.TWO
    matching: MatchingRule = MatchingRule.AVERAGED

    @property
    def label(self) -> str:
        return f"{self.constant.value}/{self.denominator.value}/{self.matching.value}"


class RunConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    eps: float = Field(gt=0.0, description="Small parameter")
    theta0: float = Field(description="Initial slow time")
    theta1: float = Field(description="Final slow time")
    initial: Union[PreCaptureParams, complex] = Field(description="phi(theta0) or pre-capture parameters")
    tolerances: Tolerances = Field(default_factory=default_ode_tolerances)
    pre_variant: PhaseVariantPre = PhaseVariantPre.AVERAGED
    connection: ConnectionVariant = Field(default_factory=ConnectionVariant)
    fit_window: tuple[float, float] = POST_FIT_WINDOW

    @model_validator(mode="after")
    def _check_span(self) -> "RunConfig":
        if not self.theta0 < self.theta1:
            raise ValueError("theta0 must be smaller than theta1")
        return self


def worker_count() -> int:
    """Process pool size for sweeps, from CAPTURE_WORKERS (default: CPU count)."""
    value = os.getenv("CAPTURE_WORKERS")
    if value:
        return max(1, int(value))
    return max(1, os.cpu_count() or 1)
