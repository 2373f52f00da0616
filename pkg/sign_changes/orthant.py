"""
Gaussian orthant probabilities in closed form and by one-dimensional quadrature.

Covers the bivariate and trivariate arcsine formulas, Cheng's integral I(h, x)
through dilogarithms, the four-point probabilities f(a, b) and g(a, b) built on
it, the two-parameter integral J(h, k, x) of the five-point appendix terms, and
the inclusion-exclusion assembly of the five-point positive orthant.

All functions are pure; quadrature state is local to each call.
"""

import logging
import math
from dataclasses import dataclass
from itertools import combinations
from typing import Callable, Optional, Sequence, Tuple

from scipy.integrate import quad

from sign_changes.domain import RhoLike, SignPattern, check_rho
from sign_changes.errors import ConvergenceError, DomainError
from sign_changes.specfun import dilog, dilog_real_part_pair

logger = logging.getLogger(__name__)

PI = math.pi
SQRT3_OVER_2 = math.sqrt(3.0) / 2.0


@dataclass
class QuadratureConfig:
    """Settings for the adaptive Gauss-Kronrod integrations."""
    abs_tol: float = 1e-12
    rel_tol: float = 1e-12
    max_subdivisions: int = 2000
    # above this upper limit, integrate in theta with t = sin(theta)
    sine_substitution_above: float = 0.9


DEFAULT_QUADRATURE = QuadratureConfig()


@dataclass(frozen=True)
class ChengArgs:
    """
    Arguments of I(h, x).

    The dilogarithm form holds for 0 < x < h^2 < 1. I depends on h only through
    h^2 and is even in x, so |x| < h^2 < 1 is accepted; x = 0 is the trivial
    lower limit and is admitted for any |h| < 1.
    """
    h: float
    x: float

    def __post_init__(self):
        h, x = float(self.h), float(self.x)
        if not (math.isfinite(h) and math.isfinite(x)):
            raise DomainError(f"I(h, x) needs finite arguments, got h={h!r}, x={x!r}")
        if abs(h) >= 1.0:
            raise DomainError(f"I(h, x) needs |h| < 1, got h={h!r}")
        if x != 0.0 and abs(x) >= h * h:
            raise DomainError(f"I(h, x) needs |x| < h^2, got h={h!r}, x={x!r}")


@dataclass(frozen=True)
class JArgs:
    """
    Arguments of J(h, k, x).

    The arcsine argument of the integrand stays within [0, 1] exactly when
    |x| <= |h k|. The special-case symbols ell and m are derived from k on
    every access.
    """
    h: float
    k: float
    x: float

    def __post_init__(self):
        h, k, x = float(self.h), float(self.k), float(self.x)
        if not all(math.isfinite(v) for v in (h, k, x)):
            raise DomainError(f"J(h, k, x) needs finite arguments, got {(h, k, x)!r}")
        if abs(h) >= 1.0 or abs(k) >= 1.0:
            raise DomainError(f"J(h, k, x) needs |h|, |k| < 1, got h={h!r}, k={k!r}")
        if abs(x) > abs(h * k):
            raise DomainError(f"J(h, k, x) needs |x| <= |h k|, got {(h, k, x)!r}")

    @property
    def ell(self) -> float:
        return math.sqrt(1.0 - self.k * self.k)

    @property
    def m(self) -> float:
        ell = self.ell
        return (1.0 + ell - math.sqrt(1.0 + 3.0 * ell) * math.sqrt(1.0 - ell)) / (2.0 * ell)


@dataclass(frozen=True)
class FourDimFactor:
    """Parameters (a, b) of the four-point matrices R+ and R-."""
    a: float
    b: float

    def __post_init__(self):
        a, b = float(self.a), float(self.b)
        if not (math.isfinite(a) and math.isfinite(b)) or abs(a) >= 1.0 or abs(b) >= 1.0:
            raise DomainError(f"f/g need |a| < 1 and |b| < 1, got a={a!r}, b={b!r}")


def _check_correlation(r: float, name: str = "r") -> float:
    r = float(r)
    if not math.isfinite(r) or abs(r) >= 1.0:
        raise DomainError(f"correlation {name} must satisfy |{name}| < 1, got {r!r}")
    return r


def orthant2(r: RhoLike) -> float:
    """P{X1 > 0, X2 > 0} for a standard bivariate normal with correlation r."""
    r = check_rho(r)
    return 0.25 + math.asin(r) / (2.0 * PI)


def orthant3(r12: float, r13: float, r23: float) -> float:
    """P{X1 > 0, X2 > 0, X3 > 0} for unit variances and the given correlations."""
    r12 = _check_correlation(r12, "r12")
    r13 = _check_correlation(r13, "r13")
    r23 = _check_correlation(r23, "r23")
    det = 1.0 - r12 * r12 - r13 * r13 - r23 * r23 + 2.0 * r12 * r13 * r23
    if det <= 0.0:
        raise DomainError(f"correlations {(r12, r13, r23)!r} do not form a positive definite matrix")
    return 0.125 + (math.asin(r12) + math.asin(r13) + math.asin(r23)) / (4.0 * PI)


# ---------------------------------------------------------------------------
# Quadrature
# ---------------------------------------------------------------------------

def _integrate(
    integrand: Callable[[float], float],
    upper: float,
    config: QuadratureConfig,
    label: str,
) -> float:
    """Integrate integrand(t) / sqrt(1 - t^2) over (0, upper), 0 <= upper < 1."""
    if upper == 0.0:
        return 0.0
    if upper > config.sine_substitution_above:
        # t = sin(theta) absorbs the 1/sqrt(1 - t^2) factor
        func = lambda theta: integrand(math.sin(theta))  # noqa: E731
        limit = math.asin(upper)
    else:
        func = lambda t: integrand(t) / math.sqrt(1.0 - t * t)  # noqa: E731
        limit = upper

    outcome = quad(
        func, 0.0, limit,
        epsabs=config.abs_tol, epsrel=config.rel_tol,
        limit=config.max_subdivisions, full_output=1,
    )
    value, error, info = outcome[0], outcome[1], outcome[2]
    logger.debug("%s: value=%.17g error=%.3g intervals=%d", label, value, error, info["last"])
    if len(outcome) > 3:
        raise ConvergenceError(
            f"{label} did not converge (error estimate {error:.3g})",
            value=value, error=error, detail=str(outcome[3]),
        )
    return value


def _asin_clipped(y: float) -> float:
    return math.asin(min(y, 1.0))


def cheng_I_quadrature(h: float, x: float, config: Optional[QuadratureConfig] = None) -> float:
    """I(h, x) by adaptive quadrature of its defining integral."""
    args = ChengArgs(h, x)
    h2 = args.h * args.h
    one_minus = 1.0 - h2

    def integrand(t: float) -> float:
        return _asin_clipped(one_minus * t / (h2 - t * t))

    return _integrate(integrand, abs(args.x), config or DEFAULT_QUADRATURE, f"I({h!r}, {x!r})")


def cheng_I(h: float, x: float) -> float:
    """
    Cheng's integral

        I(h, x) = int_0^x arcsin((1 - h^2) t / (h^2 - t^2)) / sqrt(1 - t^2) dt

    in closed form through dilogarithms. With w = x / (h^2 + sqrt(h^4 - x^2)),
    c = x + i sqrt(1 - x^2) and d = (|h| + i sqrt(1 - h^2))^2 (both of unit
    modulus):

        I = -asin(x)^2 / 2 + Li2(-w^2) / 2 + 2 Re Li2(c w) - Re Li2(d w^2)

    Negative x is handled by evenness of I in x.
    """
    args = ChengArgs(h, x)
    x = abs(args.x)
    if x == 0.0:
        return 0.0
    h2 = args.h * args.h
    w = x / (h2 + math.sqrt(h2 * h2 - x * x))
    c = complex(x, math.sqrt(1.0 - x * x))
    d = complex(abs(args.h), math.sqrt(1.0 - h2)) ** 2

    total = -0.5 * math.asin(x) ** 2
    total += 0.5 * dilog(-w * w).real
    total += dilog_real_part_pair(c * w)
    total -= 0.5 * dilog_real_part_pair(d * (w * w))
    return total


def quadrature_J(h: float, k: float, x: float, config: Optional[QuadratureConfig] = None) -> float:
    """
    J(h, k, x) = int_0^x arcsin(sqrt(1-h^2) sqrt(1-k^2) t / (sqrt(h^2-t^2) sqrt(k^2-t^2)))
                 / sqrt(1 - t^2) dt

    by adaptive quadrature. J(h, h, x) = I(h, x).

    Raises:
        DomainError: arguments outside the region where the arcsine is defined.
        ConvergenceError: the quadrature missed its error target.
    """
    args = JArgs(h, k, x)
    h2, k2 = args.h * args.h, args.k * args.k
    scale = math.sqrt(1.0 - h2) * math.sqrt(1.0 - k2)

    def integrand(t: float) -> float:
        t2 = t * t
        return _asin_clipped(scale * t / (math.sqrt(h2 - t2) * math.sqrt(k2 - t2)))

    return _integrate(integrand, abs(args.x), config or DEFAULT_QUADRATURE, f"J({h!r}, {k!r}, {x!r})")


def special_J_argument(k: float) -> float:
    """The upper limit sqrt((1 - sqrt(1 - k^2)) / 2) of the closed-form case."""
    return math.sqrt((1.0 - math.sqrt(1.0 - k * k)) / 2.0)


def special_J_closed(k: float) -> float:
    """
    J(sqrt(3)/2, k, sqrt((1 - sqrt(1 - k^2)) / 2)) in closed form, 0 < k < 1.
    """
    k = float(k)
    if not (0.0 < k < 1.0):
        raise DomainError(f"the closed form of J needs 0 < k < 1, got {k!r}")
    args = JArgs(SQRT3_OVER_2, k, special_J_argument(k))
    ell, m = args.ell, args.m
    asin_ell = math.asin(ell)
    z = complex(ell, k)

    total = PI * PI / 8.0
    total -= PI / 6.0 * asin_ell
    total += asin_ell * asin_ell / 6.0
    total -= PI / 2.0 * math.asin(math.sqrt((1.0 - ell) / 2.0))
    total -= dilog(-m * m).real / 3.0
    total -= 2.0 / 3.0 * dilog_real_part_pair(z * m)
    total += 1.0 / 3.0 * dilog_real_part_pair(z * (m * m))
    return total


# ---------------------------------------------------------------------------
# Four-point probabilities
# ---------------------------------------------------------------------------

def _four_point_core(factor: FourDimFactor) -> float:
    a, b = factor.a, factor.b
    return math.asin(a) ** 2 + cheng_I(a, a * a * b)


def f4(a: float, b: float) -> float:
    """
    f(a, b): the positive orthant of

        R+ = [[1, a, ab, a^2 b], [a, 1, b, ab], [ab, b, 1, a], [a^2 b, ab, a, 1]]
    """
    factor = FourDimFactor(a, b)
    a, b = factor.a, factor.b
    linear = 2.0 * math.asin(a) + math.asin(b) + 2.0 * math.asin(a * b) + math.asin(a * a * b)
    return 1.0 / 16.0 + linear / (8.0 * PI) + _four_point_core(factor) / (4.0 * PI * PI)


def g4(a: float, b: float) -> float:
    """g(a, b): the positive orthant of R-, which is R+ with the first row and column negated."""
    factor = FourDimFactor(a, b)
    a, b = factor.a, factor.b
    linear = math.asin(b) - math.asin(a * a * b)
    return 1.0 / 16.0 + linear / (8.0 * PI) - _four_point_core(factor) / (4.0 * PI * PI)


# pattern -> (form, sign of a, sign of b), with a = sign_a * rho and b = sign_b * rho
_FOUR_POINT_CLASSES = (
    (("1111", "0000"), ("f", 1, 1)),
    (("1000", "0111", "0001", "1110"), ("g", 1, 1)),
    (("0100", "1011", "0010", "1101"), ("g", 1, -1)),
    (("1100", "0011"), ("f", 1, -1)),
    (("0110", "1001"), ("f", -1, 1)),
    (("1010", "0101"), ("f", -1, -1)),
)
FOUR_POINT_FORMS = {
    pattern: form for patterns, form in _FOUR_POINT_CLASSES for pattern in patterns
}


def orthant_closed(pattern, r: RhoLike) -> float:
    """
    Closed-form p_e for the AR(1) segment of length 1 to 4.

    Flipping the sign of X_i turns the pattern orthant into the positive orthant
    of the sign-flipped covariance; for four points the flipped matrices are of
    the R+ or R- type with a, b = +-rho.
    """
    e = SignPattern.coerce(pattern)
    rho = check_rho(r)
    n = len(e)
    s = e.signs
    if n == 1:
        return 0.5
    if n == 2:
        return orthant2(s[0] * s[1] * rho)
    if n == 3:
        return orthant3(s[0] * s[1] * rho, s[0] * s[2] * rho * rho, s[1] * s[2] * rho)
    if n == 4:
        form, sign_a, sign_b = FOUR_POINT_FORMS[str(e)]
        func = f4 if form == "f" else g4
        return func(sign_a * rho, sign_b * rho)
    raise DomainError(f"closed forms cover segments of length <= 4, got {n}")


# ---------------------------------------------------------------------------
# Five-point appendix terms
# ---------------------------------------------------------------------------

def outlier_orthant(r: RhoLike, config: Optional[QuadratureConfig] = None) -> float:
    """
    P{X1 > 0, X2 > 0, X3 > 0, X5 > 0} (equal to the {1, 3, 4, 5} term).

    For negative rho the J term enters with the sign of rho: negating the
    middle variable maps the -rho matrix onto the +rho one, which gives
    q(-rho) = p3(rho^2, rho^4, rho^2) - q(rho).
    """
    rho = check_rho(r)
    a1, a2, a3, a4 = (math.asin(rho ** p) for p in (1, 2, 3, 4))
    j = quadrature_J(abs(rho), rho * rho, rho ** 4, config)
    j = math.copysign(j, rho)
    linear = 2.0 * a1 + 2.0 * a2 + a3 + a4
    return 1.0 / 16.0 + linear / (8.0 * PI) + (a1 * a2 + j) / (4.0 * PI * PI)


def q_pattern_4of5(
    indices: Sequence[int],
    r: RhoLike,
    config: Optional[QuadratureConfig] = None,
) -> float:
    """P{X_i > 0 for the four chosen time points} under the five-point AR(1) matrix."""
    chosen = tuple(sorted(int(i) for i in indices))
    if len(chosen) != 4 or len(set(chosen)) != 4 or not all(1 <= i <= 5 for i in chosen):
        raise DomainError(f"need four distinct time points in 1..5, got {indices!r}")
    rho = check_rho(r)
    missing = ({1, 2, 3, 4, 5} - set(chosen)).pop()
    if missing in (1, 5):
        return f4(rho, rho)
    if missing == 3:
        return f4(rho, rho * rho)
    return outlier_orthant(rho, config)


def p11111(r: RhoLike, config: Optional[QuadratureConfig] = None) -> float:
    """
    P{X1 > 0, ..., X5 > 0} by inclusion-exclusion:

        q_12345 = (1 - sum q_i + sum q_ij - sum q_ijk + sum q_ijkl) / 2
    """
    rho = check_rho(r)
    times = range(1, 6)
    singles = 5 * 0.5
    pairs = sum(orthant2(rho ** (j - i)) for i, j in combinations(times, 2))
    triples = sum(
        orthant3(rho ** (j - i), rho ** (k - i), rho ** (k - j))
        for i, j, k in combinations(times, 3)
    )
    quadruples = sum(q_pattern_4of5(chosen, rho, config) for chosen in combinations(times, 4))
    return 0.5 * (1.0 - singles + pairs - triples + quadruples)


def four_point_constants(r: RhoLike) -> Tuple[float, float, float, float, float, float]:
    """f(r,r), g(r,r), f(r,-r), g(r,-r), f(-r,r), f(-r,-r)."""
    rho = check_rho(r)
    return (
        f4(rho, rho), g4(rho, rho), f4(rho, -rho),
        g4(rho, -rho), f4(-rho, rho), f4(-rho, -rho),
    )
