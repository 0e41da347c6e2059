import math

import mpmath
import numpy as np
import pytest

from asymptotics.painleve import CUBE_ROOT_TWO, painleve_field, scaled_from_painleve
from core.errors import AtBifurcation
from core.model import (
    classify_critical_point,
    equilibria,
    frozen_field,
    frozen_rhs,
    hamiltonian,
    hamiltonian_gradient,
    hamiltonian_hessian,
    inverse_scale_transform,
    perturbed_painleve_field,
    perturbed_painleve_rhs,
    primary_field,
    primary_rhs,
    scale_transform,
)
from core.state import EquilibriumKind, ScaledState


def test_complex_and_real_forms_agree():
    field = primary_field(0.03)
    for theta, phi in [(-2.0, 0.3 - 0.1j), (0.5, 1.2 + 0.4j), (1.7, -0.2 + 0.9j)]:
        expected = primary_rhs(theta, phi, 0.03)
        np.testing.assert_allclose(field(theta, np.array([phi.real, phi.imag])),
                                   [expected.real, expected.imag], rtol=1e-14)


def test_frozen_rhs_is_primary_at_fixed_time():
    assert frozen_rhs(0.7, 0.2 + 0.5j, 0.1) == primary_rhs(0.7, 0.2 + 0.5j, 0.1)


@pytest.mark.parametrize("T", [-2.0, 0.0, 2.0])
def test_gradient_and_hessian_match_mpmath(T):
    def H(a, b):
        m = a * a + b * b
        return -0.5 * m * m + T * m + a * a - b * b

    a, b = 0.37, -0.81
    grad = hamiltonian_gradient(T, complex(a, b))
    hess = hamiltonian_hessian(T, complex(a, b))

    assert grad[0] == pytest.approx(float(mpmath.diff(lambda s: H(s, b), a)), abs=1e-12)
    assert grad[1] == pytest.approx(float(mpmath.diff(lambda s: H(a, s), b)), abs=1e-12)
    assert hess[0, 0] == pytest.approx(float(mpmath.diff(H, (a, b), (2, 0))), abs=1e-10)
    assert hess[1, 1] == pytest.approx(float(mpmath.diff(H, (a, b), (0, 2))), abs=1e-10)
    assert hess[0, 1] == pytest.approx(float(mpmath.diff(H, (a, b), (1, 1))), abs=1e-10)
    assert hamiltonian(T, complex(a, b)) == pytest.approx(H(a, b), abs=1e-15)


def test_frozen_flow_is_hamiltonian():
    T, eps = 0.4, 0.2
    phi = 0.6 - 0.3j
    grad = hamiltonian_gradient(T, phi)
    flow = frozen_field(T, eps)(0.0, np.array([phi.real, phi.imag]))
    np.testing.assert_allclose(flow, [grad[1] / (2 * eps), -grad[0] / (2 * eps)], rtol=1e-13)


def test_hamiltonian_accepts_arrays():
    phi = np.array([0.1 + 0.2j, 1.0, -0.5j])
    values = hamiltonian(0.5, phi)
    np.testing.assert_allclose(values, [hamiltonian(0.5, complex(p)) for p in phi])


@pytest.mark.parametrize("T, centers, saddles", [(-2.0, 1, 0), (0.0, 2, 1), (2.0, 3, 2)])
def test_equilibrium_census(T, centers, saddles):
    points = equilibria(T)
    assert sum(e.kind is EquilibriumKind.CENTER for e in points) == centers
    assert sum(e.kind is EquilibriumKind.SADDLE for e in points) == saddles
    for e in points:
        np.testing.assert_allclose(hamiltonian_gradient(T, e.location), 0.0, atol=1e-14)


def test_captured_branches_are_centers():
    for e in equilibria(0.5):
        if e.family in (2, 3):
            assert e.kind is EquilibriumKind.CENTER
            assert abs(e.location) == pytest.approx(math.sqrt(1.5))
    assert classify_critical_point(0.5, 0j) is EquilibriumKind.SADDLE


@pytest.mark.parametrize("T", [-1.0, 1.0, -1.0 + 1e-10])
def test_bifurcation_points_are_rejected(T):
    with pytest.raises(AtBifurcation):
        equilibria(T)


def test_scale_transform_round_trip():
    for theta, phi, eps in [(-1.05, 0.03 - 0.01j, 0.01), (-0.9, 0.2 + 0.05j, 0.005)]:
        back_theta, back_phi = inverse_scale_transform(scale_transform(theta, phi, eps), eps)
        assert abs(back_theta - theta) <= 1e-14
        assert abs(back_phi - phi) <= 1e-14


def test_scaled_system_is_the_primary_equation_in_layer_variables():
    eps = 0.004
    e13, e23 = eps ** (1 / 3), eps ** (2 / 3)
    theta, phi = -1.02, 0.05 + 0.01j
    state = scale_transform(theta, phi, eps)

    dphi = primary_rhs(theta, phi, eps)
    dx, dy = perturbed_painleve_rhs(state, eps)
    assert dx == pytest.approx(dphi.real * e23 / e13, rel=1e-12)
    assert dy == pytest.approx(dphi.imag, rel=1e-12)

    field = perturbed_painleve_field(eps)(state.eta, np.array([state.x, state.y]))
    np.testing.assert_allclose(field, [dx, dy], rtol=1e-14)


def test_layer_limit_is_painleve_two():
    field = perturbed_painleve_field(1e-30)
    for z, v, dv in [(-3.0, 0.4, -0.2), (1.5, -0.7, 0.3)]:
        eta, x, y = scaled_from_painleve(z, v, dv)
        dx, dy = field(float(eta), np.array([float(x), float(y)]))
        dv_dz, d2v_dz2 = painleve_field(z, np.array([v, dv]))
        # x = -2^(1/3) v, y = 2^(-1/3) v', d/deta = 2^(1/3) d/dz
        assert dx == pytest.approx(-CUBE_ROOT_TWO * CUBE_ROOT_TWO * dv_dz, rel=1e-12)
        assert dy == pytest.approx(d2v_dz2, rel=1e-12)
