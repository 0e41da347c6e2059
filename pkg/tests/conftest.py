import numpy as np
import pytest

from core.state import Tolerances, Trajectory


@pytest.fixture
def tolerances():
    return Tolerances.uniform(1e-9)


@pytest.fixture
def make_trajectory(tolerances):
    """Trajectory from sampled points and complex (or two-column real) values."""

    def build(points, values, *, independent_var="theta", eps=None):
        points = np.asarray(points, dtype=float)
        values = np.asarray(values)
        if np.iscomplexobj(values):
            states = np.column_stack([values.real, values.imag])
        else:
            states = np.column_stack([values, np.zeros_like(values)]) if values.ndim == 1 else values
        return Trajectory(
            equation_id="synthetic",
            independent_var=independent_var,
            points=points,
            states=states,
            tolerances=tolerances,
            eps=eps,
        )

    return build
