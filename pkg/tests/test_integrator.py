import math

import numpy as np
import pytest

from core.errors import NonFiniteState, SpanTooShort, StepUnderflow
from core.state import Tolerances
from tools.integrator import integrate_adaptive


def oscillator(t, y):
    return np.array([y[1], -y[0]])


def test_harmonic_oscillator_matches_closed_form():
    tol = Tolerances.uniform(1e-10)
    traj = integrate_adaptive(oscillator, [1.0, 0.0], (0.0, 6.0 * math.pi), tol)

    np.testing.assert_allclose(traj.states[:, 0], np.cos(traj.points), atol=1e-7)
    np.testing.assert_allclose(traj.states[:, 1], -np.sin(traj.points), atol=1e-7)


def test_endpoints_are_hit_exactly():
    traj = integrate_adaptive(oscillator, [1.0, 0.0], (0.0, 1.2345), Tolerances.uniform(1e-8))
    assert traj.points[0] == 0.0
    assert traj.points[-1] == 1.2345


def test_backward_integration():
    tol = Tolerances.uniform(1e-10)
    traj = integrate_adaptive(lambda t, y: -y, [1.0], (2.0, 0.0), tol)

    assert np.all(np.diff(traj.points) < 0)
    assert traj.states[-1, 0] == pytest.approx(math.exp(2.0), rel=1e-8)


def test_max_step_is_respected():
    tol = Tolerances.uniform(1e-6, max_step=0.01)
    traj = integrate_adaptive(lambda t, y: np.zeros_like(y), [1.0], (0.0, 1.0), tol)
    assert np.max(np.diff(traj.points)) <= 0.01 + 1e-15


def test_blow_up_is_reported():
    with pytest.raises((StepUnderflow, NonFiniteState)):
        integrate_adaptive(lambda t, y: y * y, [1.0], (0.0, 2.0), Tolerances.uniform(1e-8))


def test_empty_span_is_rejected():
    with pytest.raises(SpanTooShort):
        integrate_adaptive(oscillator, [1.0, 0.0], (1.0, 1.0), Tolerances.uniform(1e-8))


def test_trajectory_is_read_only():
    traj = integrate_adaptive(oscillator, [1.0, 0.0], (0.0, 1.0), Tolerances.uniform(1e-8))
    with pytest.raises(ValueError):
        traj.states[0, 0] = 2.0


def test_fixed_step_error_has_fifth_order():
    errors = []
    for h in (0.2, 0.1):
        # loose tolerance so every step is capped at max_step
        traj = integrate_adaptive(oscillator, [1.0, 0.0], (0.0, 10.0), Tolerances.uniform(1e-3, max_step=h))
        errors.append(abs(traj.states[-1, 0] - math.cos(10.0)))

    assert 16.0 <= errors[0] / errors[1] <= 64.0


def test_forward_then_backward_returns_to_the_start():
    def pendulum(t, y):
        return np.array([y[1], -math.sin(y[0])])

    tol = Tolerances.uniform(1e-11)
    forward = integrate_adaptive(pendulum, [1.0, 0.3], (0.0, 10.0), tol)
    backward = integrate_adaptive(pendulum, forward.states[-1], (10.0, 0.0), tol)

    np.testing.assert_allclose(backward.states[-1], [1.0, 0.3], atol=1e-8)
