"""
Complex dilogarithm.

Li2(z) on the principal branch, with its cut along the real interval (1, inf).
Near the origin (|z| <= 1/2) the defining power series is summed directly.
Elsewhere the inversion and reflection formulas move the argument into
|z| <= 1, Re z <= 1/2, where the Bernoulli series in u = -log(1 - z)
converges quickly (|u| < 2 there, the radius being 2*pi).
"""

import cmath
import logging
import math
from functools import lru_cache
from typing import Tuple, Union

from scipy.special import bernoulli

from sign_changes.errors import DomainError

logger = logging.getLogger(__name__)

PI_SQUARED_OVER_6 = math.pi ** 2 / 6

_SERIES_EPS = 1e-17
_POWER_SERIES_RADIUS = 0.5
_BERNOULLI_ORDER = 40

Number = Union[complex, float, int]


@lru_cache(maxsize=1)
def _bernoulli_coefficients() -> Tuple[float, ...]:
    """B_k / (k+1)! for k = 0.._BERNOULLI_ORDER (B_1 = -1/2)."""
    numbers = bernoulli(_BERNOULLI_ORDER)
    return tuple(float(numbers[k]) / math.factorial(k + 1) for k in range(_BERNOULLI_ORDER + 1))


def _as_complex(z: Number) -> complex:
    value = complex(z)
    if not (math.isfinite(value.real) and math.isfinite(value.imag)):
        raise DomainError(f"dilog needs a finite argument, got {z!r}")
    return value


def _power_series(z: complex) -> complex:
    total = 0j
    power = z
    k = 1
    while True:
        term = power / (k * k)
        total += term
        if abs(term) <= _SERIES_EPS * abs(total):
            return total
        k += 1
        power *= z


def _bernoulli_series(z: complex) -> complex:
    u = -cmath.log(1 - z)
    total = 0j
    power = u
    for coefficient in _bernoulli_coefficients():
        if coefficient:
            term = coefficient * power
            total += term
            if abs(term) <= _SERIES_EPS * abs(total):
                break
        power *= u
    return total


def _left_half_disk(z: complex) -> complex:
    """Li2 for |z| <= 1, z != 1."""
    if abs(z) <= _POWER_SERIES_RADIUS:
        return _power_series(z)
    if z.real > 0.5:
        # reflection: |1 - z| <= 1 and Re(1 - z) < 1/2
        w = 1 - z
        return PI_SQUARED_OVER_6 - cmath.log(z) * cmath.log(w) - _left_half_disk(w)
    return _bernoulli_series(z)


def dilog(z: Number) -> complex:
    """
    Complex dilogarithm Li2(z) = sum_{k>=1} z^k / k^2, analytically continued.

    Real z > 1 lies on the cut; there the value returned is the limit from the
    upper half-plane (imaginary part +pi*log z).

    Raises:
        DomainError: z is NaN or infinite.
    """
    z = _as_complex(z)
    if z == 0:
        return 0j
    if z == 1:
        return complex(PI_SQUARED_OVER_6)
    if abs(z) > 1:
        # inversion: Li2(z) + Li2(1/z) = -pi^2/6 - log(-z)^2 / 2
        if z.imag == 0 and z.real > 1:
            log_minus_z = complex(math.log(z.real), -math.pi)
        else:
            log_minus_z = cmath.log(-z)
        return -PI_SQUARED_OVER_6 - 0.5 * log_minus_z * log_minus_z - _left_half_disk(1 / z)
    return _left_half_disk(z)


def dilog_real_part_pair(z: Number) -> float:
    """
    Li2(z) + Li2(conj z), which equals 2 Re Li2(z) off the cut.

    Raises:
        DomainError: z is real and greater than one, or not finite.
    """
    z = _as_complex(z)
    if z.imag == 0 and z.real > 1:
        raise DomainError(f"Li2(z) + Li2(conj z) is undefined on the cut (1, inf), got {z!r}")
    return 2.0 * dilog(z).real
