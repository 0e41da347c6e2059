import math
from typing import Optional

import numpy as np
from pydantic import BaseModel

from config.defaults import FIT_MAX_ITER, FIT_TOL, UNIDENTIFIABLE_AMPLITUDE
from core.errors import FitDiverged
from core.state import wrap_angle
from utils.log_utils import logger


class ChirpFit(BaseModel):
    amplitude: float
    phase: float
    residual: float
    iterations: int
    identifiable: bool = True


def count_periods(base_phase: np.ndarray) -> float:
    return float(abs(base_phase[-1] - base_phase[0]) / (2.0 * math.pi))


def fit_log_chirp(
    signal: np.ndarray,
    envelope: np.ndarray,
    base_phase: np.ndarray,
    log_term: np.ndarray,
    coupling: float,
    *,
    offset: bool = False,
    coupled_amplitude: Optional[float] = None,
    tol: float = FIT_TOL,
    max_iter: int = FIT_MAX_ITER,
) -> ChirpFit:
    """
    Fit signal ~ envelope * A sin(base_phase + coupling A^2 log_term + phase).

    The amplitude sits inside the phase, so the fit alternates: for a fixed A
    the model is linear in (A cos phase, A sin phase) and is solved by least
    squares; the new A then updates the log-phase term. Stops when both
    parameters move by less than tol.

    Args:
        signal: Samples to fit
        envelope: Known amplitude profile, same shape as signal
        base_phase: Known fast phase
        log_term: Function multiplying coupling * A^2 in the phase
        coupling: Coefficient of A^2 log_term
        offset: Also fit a constant in the envelope-scaled signal
        coupled_amplitude: Hold the A of the log-phase term at this value;
            only the phase and the reported amplitude are then fitted
        tol: Convergence threshold on amplitude and phase
        max_iter: Iteration cap

    Returns:
        ChirpFit with amplitude >= 0, phase in [0, 2pi) and the RMS residual
        of the envelope-scaled signal

    Raises:
        FitDiverged: No convergence within max_iter iterations
    """
    scaled = np.asarray(signal, dtype=float) / np.asarray(envelope, dtype=float)
    if not np.all(np.isfinite(scaled)):
        raise FitDiverged("non-finite samples in fit window")

    centred = scaled - scaled.mean() if offset else scaled
    amplitude = math.sqrt(2.0 * float(np.mean(centred ** 2)))
    if amplitude < UNIDENTIFIABLE_AMPLITUDE:
        return ChirpFit(amplitude=0.0, phase=0.0, residual=float(np.sqrt(np.mean(scaled ** 2))),
                        iterations=0, identifiable=False)

    phase = 0.0
    for iteration in range(1, max_iter + 1):
        coupled = amplitude if coupled_amplitude is None else coupled_amplitude
        theta = base_phase + coupling * coupled ** 2 * log_term
        columns = [np.sin(theta), np.cos(theta)]
        if offset:
            columns.append(np.ones_like(theta))
        design = np.column_stack(columns)
        coeffs, *_ = np.linalg.lstsq(design, scaled, rcond=None)

        new_amplitude = math.hypot(coeffs[0], coeffs[1])
        new_phase = math.atan2(coeffs[1], coeffs[0])
        if not math.isfinite(new_amplitude):
            raise FitDiverged("amplitude left the finite range")

        phase_step = abs(math.remainder(new_phase - phase, 2.0 * math.pi))
        amplitude_step = abs(new_amplitude - amplitude)
        amplitude, phase = new_amplitude, new_phase

        if amplitude_step < tol and (iteration > 1 and phase_step < tol):
            residual = float(np.sqrt(np.mean((design @ coeffs - scaled) ** 2)))
            logger.debug(f"log-chirp fit converged in {iteration} iterations, A = {amplitude:.6g}")
            return ChirpFit(amplitude=amplitude, phase=wrap_angle(phase),
                            residual=residual, iterations=iteration)

    raise FitDiverged(f"log-chirp fit did not converge in {max_iter} iterations")
