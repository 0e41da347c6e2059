from typing import Callable, Optional

import numpy as np

from config.defaults import (
    MAX_STEPS,
    STEP_ALPHA,
    STEP_BETA,
    STEP_MAX_FACTOR,
    STEP_MIN_FACTOR,
    STEP_SAFETY,
)
from core.errors import NonFiniteState, SpanTooShort, StepUnderflow
from core.state import Tolerances, Trajectory
from utils.log_utils import logger


VectorField = Callable[[float, np.ndarray], np.ndarray]


# Dormand-Prince 5(4) tableau
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    np.array([]),
    np.array([1 / 5]),
    np.array([3 / 40, 9 / 40]),
    np.array([44 / 45, -56 / 15, 32 / 9]),
    np.array([19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]),
    np.array([9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]),
    np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84]),
]
# difference between the 5th and embedded 4th order weights (FSAL stage last)
_E = np.array([71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40])

_ORDER = 5


def _error_norm(error: np.ndarray, y_old: np.ndarray, y_new: np.ndarray, tol: Tolerances) -> float:
    scale = tol.abs_tol + tol.rel_tol * np.maximum(np.abs(y_old), np.abs(y_new))
    return float(np.sqrt(np.mean((error / scale) ** 2)))


def _initial_step(rhs: VectorField, t0: float, y0: np.ndarray, f0: np.ndarray,
                  direction: float, tol: Tolerances) -> float:
    """Hairer-Norsett-Wanner starting step."""
    scale = tol.abs_tol + tol.rel_tol * np.abs(y0)
    d0 = float(np.sqrt(np.mean((y0 / scale) ** 2)))
    d1 = float(np.sqrt(np.mean((f0 / scale) ** 2)))
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    h0 = min(h0, tol.max_step)

    f1 = rhs(t0 + direction * h0, y0 + direction * h0 * f0)
    d2 = float(np.sqrt(np.mean(((f1 - f0) / scale) ** 2))) / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** (1.0 / _ORDER)

    return min(100 * h0, h1, tol.max_step)


def _dopri_step(rhs: VectorField, t: float, y: np.ndarray, f: np.ndarray,
                h: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """One Dormand-Prince step; returns (y_new, f_new, error estimate)."""
    k = np.empty((7, y.size))
    k[0] = f
    for i in range(1, 6):
        k[i] = rhs(t + _C[i] * h, y + h * (_A[i] @ k[:i]))
    y_new = y + h * (_A[6] @ k[:6])
    k[6] = rhs(t + h, y_new)
    error = h * (_E @ k)
    return y_new, k[6], error


def integrate_adaptive(
    rhs: VectorField,
    y0,
    span: tuple[float, float],
    tol: Tolerances,
    *,
    equation_id: str = "generic",
    independent_var: str = "t",
    eps: Optional[float] = None,
    max_steps: int = MAX_STEPS,
) -> Trajectory:
    """
    Integrate y' = rhs(t, y) over span with Dormand-Prince 5(4) and PI step control.

    Every accepted step is recorded. The span may run in either direction.

    Args:
        rhs: Vector field on real state vectors
        y0: Initial state
        span: (t0, t1) with t0 != t1
        tol: Error tolerances and step bounds
        equation_id: Tag stored on the trajectory
        independent_var: Name of t stored on the trajectory
        eps: Small parameter stored on the trajectory, if any
        max_steps: Hard cap on accepted plus rejected steps

    Returns:
        Trajectory of all accepted steps, endpoints included

    Raises:
        StepUnderflow: The controller asked for a step below tol.min_step
        NonFiniteState: The solution left the finite range
        SpanTooShort: span[0] == span[1]
    """
    t0, t1 = float(span[0]), float(span[1])
    if t0 == t1:
        raise SpanTooShort("integration span is empty")

    y = np.array(y0, dtype=float).reshape(-1)
    if not np.all(np.isfinite(y)):
        raise NonFiniteState("initial state is not finite")

    direction = 1.0 if t1 > t0 else -1.0
    t = t0
    f = np.asarray(rhs(t, y), dtype=float)

    h = _initial_step(rhs, t0, y, f, direction, tol)
    previous_error = 1e-4

    points = [t]
    states = [y.copy()]
    rejected = 0

    for _ in range(max_steps):
        remaining = abs(t1 - t)
        if remaining <= 1e-14 * max(1.0, abs(t1)):
            break

        last_step = h >= remaining
        if last_step:
            h = remaining

        y_new, f_new, error = _dopri_step(rhs, t, y, f, direction * h)
        finite = np.all(np.isfinite(y_new)) and np.all(np.isfinite(error))
        err = _error_norm(error, y, y_new, tol) if finite else np.inf

        if err <= 1.0:
            t = t1 if last_step else t + direction * h
            y, f = y_new, f_new
            points.append(t)
            states.append(y.copy())

            err = max(err, 1e-10)
            factor = STEP_SAFETY * err ** (-STEP_ALPHA) * previous_error ** STEP_BETA
            factor = min(STEP_MAX_FACTOR, max(STEP_MIN_FACTOR, factor))
            if rejected:
                factor = min(factor, 1.0)
            h = min(h * factor, tol.max_step)
            previous_error = err
            rejected = 0
            continue

        rejected += 1
        if finite:
            h *= max(STEP_MIN_FACTOR, STEP_SAFETY * err ** (-1.0 / _ORDER))
        else:
            h *= STEP_MIN_FACTOR
        if h < tol.min_step:
            if not finite:
                raise NonFiniteState(f"solution blew up near {independent_var} = {t:.6g}")
            raise StepUnderflow(f"step {h:.3g} below min_step at {independent_var} = {t:.6g}")
    else:
        raise StepUnderflow(f"step limit of {max_steps} reached at {independent_var} = {t:.6g}")

    logger.debug(f"{equation_id}: {len(points)} accepted steps over [{t0:.6g}, {t1:.6g}]")

    return Trajectory(
        equation_id=equation_id,
        independent_var=independent_var,
        points=np.asarray(points),
        states=np.asarray(states),
        tolerances=tol,
        eps=eps,
    )
