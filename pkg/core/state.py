import math
from enum import StrEnum
from typing import Any, Dict, List, Optional, TypedDict

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


TWO_PI = 2.0 * math.pi


def wrap_angle(value: float) -> float:
    """Reduce an angle to [0, 2*pi)."""
    wrapped = math.fmod(float(value), TWO_PI)
    if wrapped < 0.0:
        wrapped += TWO_PI
    if wrapped >= TWO_PI:
        wrapped = 0.0
    return wrapped


# ---------------------------------------------------------------------------
# Variant flags: the displayed formulas disagree, numerics arbitrate
# ---------------------------------------------------------------------------

class PhaseVariantPre(StrEnum):
    THEOREM = "theorem"      # +a^2(2 theta + 2 ln|r|), sin + i cos
    SECTION = "section"      # -a^2(theta + ln|r|),     sin - i cos
    AVERAGED = "averaged"    # +a^2(theta + 3/4 ln|r|), sin - i cos


class PhaseVariantPost(StrEnum):
    THEOREM = "theorem"      # displayed S correction
    AVERAGED = "averaged"    # -(A^2/2)(theta + 3 ln(1+theta))


class EquilibriumVariant(StrEnum):
    FULL_ROOT = "full"
    HALF_ROOT = "half"


class ConstantVariantPost(StrEnum):
    THEOREM_ONE = "theorem1"  # 7/2 A^2
    THEOREM_TWO = "theorem2"  # 7/2 rho^2 ln 2


class RhoDenominator(StrEnum):
    THREE = "three"           # (1+|p|^2)/(3|Im p|), as displayed
    TWO = "two"               # (1+|p|^2)/(2|Im p|), never below one


class MatchingRule(StrEnum):
    IDENTITY = "identity"     # alpha~ = alpha10, phi~ = phi10, phi00 = upsilon
    AVERAGED = "averaged"     # log-phase shifts of the averaged variants


class EquilibriumKind(StrEnum):
    CENTER = "center"
    SADDLE = "saddle"


class LayerOutcome(StrEnum):
    CAPTURE = "capture"
    DECAY = "decay"


# ---------------------------------------------------------------------------
# Numerics
# ---------------------------------------------------------------------------

class Tolerances(BaseModel):
    model_config = ConfigDict(frozen=True)

    abs_tol: float = Field(gt=0.0, description="Absolute error tolerance")
    rel_tol: float = Field(gt=0.0, description="Relative error tolerance")
    max_step: float = Field(gt=0.0, description="Largest step the integrator may take")
    min_step: float = Field(gt=0.0, description="Smallest step before StepUnderflow")

    @model_validator(mode="after")
    def _check_step_bounds(self) -> "Tolerances":
        if not self.min_step < self.max_step:
            raise ValueError("min_step must be smaller than max_step")
        return self

    @classmethod
    def uniform(cls, tol: float, max_step: float = 0.05, min_step: float = 1e-14) -> "Tolerances":
        return cls(abs_tol=tol, rel_tol=tol, max_step=max_step, min_step=min_step)


class Trajectory(BaseModel):
    """
    Monotone sampling of a numeric solution.

    `points` holds the independent variable, `states` one row per point. The
    arrays are made read-only on construction.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    equation_id: str
    independent_var: str
    points: np.ndarray
    states: np.ndarray
    tolerances: Tolerances
    eps: Optional[float] = None

    @field_validator("independent_var")
    @classmethod
    def _check_var(cls, value: str) -> str:
        if value not in ("theta", "z", "eta", "t"):
            raise ValueError(f"unknown independent variable: {value}")
        return value

    @model_validator(mode="after")
    def _check_samples(self) -> "Trajectory":
        points = np.asarray(self.points, dtype=float)
        states = np.asarray(self.states, dtype=float)
        if points.ndim != 1 or points.size < 2:
            raise ValueError("a trajectory needs at least 2 samples")
        if states.ndim != 2 or states.shape[0] != points.size:
            raise ValueError("states must have one row per point")
        steps = np.diff(points)
        if not (np.all(steps > 0) or np.all(steps < 0)):
            raise ValueError("points must be strictly monotone")
        if not (np.all(np.isfinite(points)) and np.all(np.isfinite(states))):
            raise ValueError("trajectory contains non-finite values")
        points.flags.writeable = False
        states.flags.writeable = False
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "states", states)
        return self

    @property
    def size(self) -> int:
        return int(self.points.size)

    def as_complex(self) -> np.ndarray:
        """First two state components as re + i*im."""
        return self.states[:, 0] + 1j * self.states[:, 1]

    def window(self, lower: float, upper: float) -> tuple[np.ndarray, np.ndarray]:
        lo, hi = min(lower, upper), max(lower, upper)
        mask = (self.points >= lo) & (self.points <= hi)
        return self.points[mask], self.states[mask]

    def covers(self, lower: float, upper: float) -> bool:
        lo, hi = min(lower, upper), max(lower, upper)
        return float(self.points.min()) <= lo and float(self.points.max()) >= hi


# ---------------------------------------------------------------------------
# Model
# ---------------------------------------------------------------------------

class Equilibrium(BaseModel):
    model_config = ConfigDict(frozen=True)

    location: complex
    kind: EquilibriumKind
    family: int = Field(ge=1, le=5)


class ScaledState(BaseModel):
    model_config = ConfigDict(frozen=True)

    eta: float = Field(allow_inf_nan=False)
    x: float = Field(allow_inf_nan=False)
    y: float = Field(allow_inf_nan=False)


# ---------------------------------------------------------------------------
# Asymptotic parameters
# ---------------------------------------------------------------------------

class PreCaptureParams(BaseModel):
    model_config = ConfigDict(frozen=True)

    alpha10: float = Field(ge=0.0, allow_inf_nan=False, description="Pre-capture amplitude")
    phi10: float = Field(allow_inf_nan=False, description="Pre-capture phase, radians mod 2pi")

    @field_validator("phi10")
    @classmethod
    def _wrap(cls, value: float) -> float:
        return wrap_angle(value)


class PostCaptureParams(BaseModel):
    model_config = ConfigDict(frozen=True)

    A00: float = Field(ge=0.0, allow_inf_nan=False, description="Captured oscillation amplitude")
    phi00: float = Field(allow_inf_nan=False, description="Captured phase, radians mod 2pi")
    branch_j: int = Field(description="Branch of the slow manifold, 2 or 3")

    @field_validator("phi00")
    @classmethod
    def _wrap(cls, value: float) -> float:
        return wrap_angle(value)

    @field_validator("branch_j")
    @classmethod
    def _check_branch(cls, value: int) -> int:
        if value not in (2, 3):
            raise ValueError("branch_j must be 2 or 3")
        return value


class PainleveSeed(BaseModel):
    model_config = ConfigDict(frozen=True)

    alpha_t: float = Field(ge=0.0, allow_inf_nan=False, description="Amplitude at minus infinity")
    phi_t: float = Field(allow_inf_nan=False, description="Phase at minus infinity")
    z0: float = Field(default=-40.0, le=-10.0, description="Seeding abscissa")


class PlusInfinityClass(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: LayerOutcome
    sign: Optional[int] = None
    rho: Optional[float] = None
    upsilon: Optional[float] = None
    residual: float = 0.0

    @model_validator(mode="after")
    def _check_branch_fields(self) -> "PlusInfinityClass":
        if self.kind is LayerOutcome.CAPTURE:
            if self.sign not in (-1, 1) or self.rho is None or not math.isfinite(self.rho):
                raise ValueError("capture needs a sign and a finite rho")
        elif self.rho is not None or self.upsilon is not None:
            raise ValueError("decay carries no rho/upsilon")
        return self


class MinusInfinityFit(BaseModel):
    model_config = ConfigDict(frozen=True)

    alpha_t: float
    phi_t: float
    residual: float
    identifiable: bool = True


class ConnectionResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    p: complex
    special: bool
    rho2: Optional[float] = None
    upsilon: Optional[float] = None
    A00: Optional[float] = None
    phi00: Optional[float] = None
    branch_j: Optional[int] = None

    @model_validator(mode="after")
    def _check_special(self) -> "ConnectionResult":
        fields = (self.rho2, self.upsilon, self.A00, self.phi00, self.branch_j)
        if self.special and any(f is not None for f in fields):
            raise ValueError("a special result carries no capture parameters")
        if not self.special and any(f is None for f in fields):
            raise ValueError("a generic result needs all capture parameters")
        return self


class PostCaptureFit(BaseModel):
    """Winner of the post-capture fit plus the residual of every variant pair."""

    model_config = ConfigDict(frozen=True)

    params: PostCaptureParams
    equilibrium: EquilibriumVariant
    phase: PhaseVariantPost
    residuals: Dict[str, float]
    identifiable: bool = True


# ---------------------------------------------------------------------------
# Pipeline
# ---------------------------------------------------------------------------

class ScatteringReport(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    eps: float
    pre: Optional[PreCaptureParams] = None
    predicted: Optional[ConnectionResult] = None
    measured: Optional[PostCaptureParams] = None
    theta_capture: Optional[float] = None
    variant_resolution: Dict[str, Any] = Field(default_factory=dict)
    residuals: Dict[str, float] = Field(default_factory=dict)
    decision_log: List[str] = Field(default_factory=list)

    @model_validator(mode="after")
    def _check_measured(self) -> "ScatteringReport":
        if self.measured is not None and self.theta_capture is None:
            raise ValueError("a measured fit needs theta_capture")
        if not all(math.isfinite(v) for v in self.residuals.values()):
            raise ValueError("residuals must be finite")
        return self

    def to_json_dict(self) -> Dict[str, Any]:
        pre, pred, meas = self.pre, self.predicted, self.measured
        return {
            "eps": self.eps,
            "alpha10": pre.alpha10 if pre else None,
            "phi10": pre.phi10 if pre else None,
            "p_re": pred.p.real if pred else None,
            "p_im": pred.p.imag if pred else None,
            "special": pred.special if pred else None,
            "rho2": pred.rho2 if pred else None,
            "upsilon": pred.upsilon if pred else None,
            "A00_pred": pred.A00 if pred else None,
            "phi00_pred": pred.phi00 if pred else None,
            "j_pred": pred.branch_j if pred else None,
            "theta_capture": self.theta_capture,
            "A00_meas": meas.A00 if meas else None,
            "phi00_meas": meas.phi00 if meas else None,
            "j_meas": meas.branch_j if meas else None,
            "variant_resolution": self.variant_resolution,
            "residuals": self.residuals,
        }


class ScatteringState(TypedDict):
    # input
    config: Any  # config.settings.RunConfig

    # seeding
    initial_phi: complex
    pre: Optional[PreCaptureParams]

    # integration and capture
    trajectory: Optional[Trajectory]
    theta_capture: Optional[float]

    # fits and predictions
    measured: Optional[PostCaptureFit]
    predictions: Dict[str, Any]

    # output
    report: Optional[ScatteringReport]

    # audit trail
    decision_log: List[str]

    # control flow
    next_action: str


def create_initial_state(config: Any) -> ScatteringState:
    """
    Create the initial pipeline state for one scattering run.
    """
    return ScatteringState(
        config=config,
        initial_phi=0j,
        pre=None,
        trajectory=None,
        theta_capture=None,
        measured=None,
        predictions={},
        report=None,
        decision_log=[],
        next_action="seed",
    )
