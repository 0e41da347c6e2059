class CaptureLabError(Exception):
    """Base class for every error raised by the lab."""

    exit_code = 1


class ValidationError(CaptureLabError):
    """A precondition failed; the inputs are outside what an operation accepts."""

    exit_code = 2


class NumericFailure(CaptureLabError):
    """The numerics failed on valid inputs."""

    exit_code = 3


class OutOfDomain(ValidationError):
    pass


class AtBifurcation(ValidationError):
    pass


class WindowTooShort(ValidationError):
    pass


class SpanTooShort(ValidationError):
    pass


class PoleAtNonPositiveInteger(ValidationError):
    pass


class SpecialPhase(ValidationError):
    """Im p vanishes: the layer solution decays and (rho, upsilon) do not exist."""


class NegativeRho2(ValidationError):
    """The rho^2 formula left its regime. Reported, never clamped."""

    def __init__(self, rho2: float):
        super().__init__(f"rho^2 = {rho2:.6g} < 0")
        self.rho2 = rho2


class NotCaptured(ValidationError):
    pass


class ConfigError(ValidationError):
    pass


class StepUnderflow(NumericFailure):
    pass


class NonFiniteState(NumericFailure):
    pass


class FitDiverged(NumericFailure):
    pass


class Overflow(NumericFailure):
    pass
