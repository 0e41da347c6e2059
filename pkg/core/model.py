import math

import numpy as np

from config.defaults import BIFURCATION_GUARD
from core.errors import AtBifurcation
from core.state import Equilibrium, EquilibriumKind, ScaledState


def primary_rhs(theta: float, phi: complex, eps: float) -> complex:
    """
    Right-hand side of i eps phi' + (-theta + |phi|^2) phi - phi* = 0.

    Returns (-i/eps) [phi* - (-theta + |phi|^2) phi].
    """
    phi = complex(phi)
    return (-1j / eps) * (phi.conjugate() - (-theta + abs(phi) ** 2) * phi)


def frozen_rhs(T: float, phi: complex, eps: float) -> complex:
    """The primary equation with theta frozen at T."""
    return primary_rhs(T, phi, eps)


def _real_field(theta: float, y: np.ndarray, eps: float) -> np.ndarray:
    re, im = y[0], y[1]
    q = -theta + re * re + im * im
    return np.array([-im * (1.0 + q) / eps, -re * (1.0 - q) / eps])


def primary_field(eps: float):
    """Vector field of the primary equation on (re, im), independent variable theta."""

    def field(theta: float, y: np.ndarray) -> np.ndarray:
        return _real_field(theta, y, eps)

    return field


def frozen_field(T: float, eps: float):
    """Vector field of the frozen equation on (re, im), independent variable t."""

    def field(t: float, y: np.ndarray) -> np.ndarray:
        return _real_field(T, y, eps)

    return field


def hamiltonian(T: float, phi):
    """H = -1/2 |phi|^4 + T |phi|^2 + 1/2 (phi*^2 + phi^2). Accepts a scalar or an array of phi."""
    re, im = np.real(phi), np.imag(phi)
    modulus2 = re ** 2 + im ** 2
    value = -0.5 * modulus2 ** 2 + T * modulus2 + (re ** 2 - im ** 2)
    return value if np.ndim(value) else float(value)


def hamiltonian_gradient(T: float, phi: complex) -> np.ndarray:
    """(dH/da, dH/db) at phi = a + ib."""
    a, b = complex(phi).real, complex(phi).imag
    modulus2 = a * a + b * b
    return np.array([
        -2.0 * modulus2 * a + 2.0 * (T + 1.0) * a,
        -2.0 * modulus2 * b + 2.0 * (T - 1.0) * b,
    ])


def hamiltonian_hessian(T: float, phi: complex) -> np.ndarray:
    a, b = complex(phi).real, complex(phi).imag
    modulus2 = a * a + b * b
    h_aa = -2.0 * modulus2 - 4.0 * a * a + 2.0 * (T + 1.0)
    h_bb = -2.0 * modulus2 - 4.0 * b * b + 2.0 * (T - 1.0)
    h_ab = -4.0 * a * b
    return np.array([[h_aa, h_ab], [h_ab, h_bb]])


def classify_critical_point(T: float, phi: complex) -> EquilibriumKind:
    """Center if the Hessian of H is definite, saddle if it is indefinite."""
    eigenvalues = np.linalg.eigvalsh(hamiltonian_hessian(T, phi))
    if eigenvalues[0] * eigenvalues[1] > 0.0:
        return EquilibriumKind.CENTER
    return EquilibriumKind.SADDLE


def equilibria(T: float) -> list[Equilibrium]:
    """
    All critical points of H at frozen time T.

    Origin (family 1) always; +-sqrt(1+T) (families 2, 3) for T > -1;
    +-i sqrt(T-1) (families 4, 5) for T > 1.

    Raises:
        AtBifurcation: T within the guard band of -1 or +1
    """
    if abs(T + 1.0) < BIFURCATION_GUARD or abs(T - 1.0) < BIFURCATION_GUARD:
        raise AtBifurcation(f"T = {T} is at a pitchfork point")

    locations: list[tuple[complex, int]] = [(0j, 1)]
    if T > -1.0:
        root = math.sqrt(1.0 + T)
        locations += [(complex(root, 0.0), 2), (complex(-root, 0.0), 3)]
    if T > 1.0:
        root = math.sqrt(T - 1.0)
        locations += [(complex(0.0, root), 4), (complex(0.0, -root), 5)]

    return [
        Equilibrium(location=loc, kind=classify_critical_point(T, loc), family=family)
        for loc, family in locations
    ]


def perturbed_painleve_rhs(state: ScaledState, eps: float) -> tuple[float, float]:
    """
    Scaled layer system (dx/deta, dy/deta).

    x' = -2y + eps^(2/3)(eta - x^2) y - eps^(4/3) y^3
    y' = -(eta - x^2) x + eps^(2/3) y^2 x
    """
    eta, x, y = state.eta, state.x, state.y
    e23 = eps ** (2.0 / 3.0)
    dx = -2.0 * y + e23 * (eta - x * x) * y - e23 * e23 * y ** 3
    dy = -(eta - x * x) * x + e23 * y * y * x
    return dx, dy


def perturbed_painleve_field(eps: float):
    """Vector field of the scaled layer system on (x, y), independent variable eta."""
    e23 = eps ** (2.0 / 3.0)

    def field(eta: float, v: np.ndarray) -> np.ndarray:
        x, y = v[0], v[1]
        return np.array([
            -2.0 * y + e23 * (eta - x * x) * y - e23 * e23 * y ** 3,
            -(eta - x * x) * x + e23 * y * y * x,
        ])

    return field


def scale_transform(theta: float, phi: complex, eps: float) -> ScaledState:
    """theta + 1 = eps^(2/3) eta, phi = eps^(1/3) x + i eps^(2/3) y."""
    phi = complex(phi)
    e13 = eps ** (1.0 / 3.0)
    e23 = eps ** (2.0 / 3.0)
    return ScaledState(eta=(theta + 1.0) / e23, x=phi.real / e13, y=phi.imag / e23)


def inverse_scale_transform(state: ScaledState, eps: float) -> tuple[float, complex]:
    e13 = eps ** (1.0 / 3.0)
    e23 = eps ** (2.0 / 3.0)
    return state.eta * e23 - 1.0, complex(state.x * e13, state.y * e23)
