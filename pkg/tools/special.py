import cmath
import math
from fractions import Fraction

from core.errors import PoleAtNonPositiveInteger


# B_{2k} / (2k (2k - 1)) for k = 1..8
_STIRLING = tuple(
    float(Fraction(b) / (2 * k * (2 * k - 1)))
    for k, b in enumerate(
        (
            Fraction(1, 6),
            Fraction(-1, 30),
            Fraction(1, 42),
            Fraction(-1, 30),
            Fraction(5, 66),
            Fraction(-691, 2730),
            Fraction(7, 6),
            Fraction(-3617, 510),
        ),
        start=1,
    )
)

# Re w at which the truncated Stirling series is accurate to roundoff
_SHIFT_TO = 15.0
_HALF_LOG_TWO_PI = 0.5 * math.log(2.0 * math.pi)


def log_gamma_complex(z: complex) -> complex:
    """
    Principal branch of log Gamma(z).

    Shifts z upward with Gamma(z) = Gamma(z + n) / (z (z+1) ... (z+n-1)) until
    Re(z + n) >= 15, then sums the Stirling series. Logs of the shift factors
    are added one at a time, which keeps the imaginary part continuous off the
    negative real axis.

    Raises:
        PoleAtNonPositiveInteger: z is 0, -1, -2, ...
    """
    z = complex(z)
    if z.imag == 0.0 and z.real <= 0.0 and z.real == math.floor(z.real):
        raise PoleAtNonPositiveInteger(f"Gamma has a pole at {z.real:g}")

    shift = max(0, math.ceil(_SHIFT_TO - z.real))
    correction = 0j
    for k in range(shift):
        correction += cmath.log(z + k)
    w = z + shift

    inv = 1.0 / w
    inv2 = inv * inv
    series = 0j
    power = inv
    for coeff in _STIRLING:
        series += coeff * power
        power *= inv2

    return (w - 0.5) * cmath.log(w) - w + _HALF_LOG_TWO_PI + series - correction


def arg_gamma(z: complex) -> float:
    """Continuous argument of Gamma(z), the imaginary part of log_gamma_complex."""
    return log_gamma_complex(z).imag


def arg_gamma_imaginary(x: float) -> float:
    """
    arg Gamma(i x) for real x, with the limit -pi/2 as x -> 0+.

    Gamma(ix) ~ -i/x near the origin, which fixes the limit.
    """
    if x == 0.0:
        return -0.5 * math.pi
    return arg_gamma(complex(0.0, x))
