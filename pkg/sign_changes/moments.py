"""
Mean and variance of S_n, the number of sign changes in an AR(1) segment.

Exact forms cover n <= 4. For larger n the moments are assembled from all 2^n
sign-pattern probabilities, estimated by the QMC orthant engine.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from sign_changes.domain import (
    EstimateStatus, Method, ProbEstimate, RhoLike, SignPattern, check_rho,
)
from sign_changes.errors import DomainError
from sign_changes.mvn import QMCConfig, SeedLike, ar1_matrix, orthant_qmc, seed_sequence
from sign_changes.orthant import f4, g4, orthant_closed

logger = logging.getLogger(__name__)

MAX_NUMERIC_N = 10
CLOSED_FORM_MAX_N = 4
DEFAULT_NUMERIC_TOL = 1e-8


@dataclass
class MomentReport:
    """E(S_n), E(S_n^2) and V(S_n) with the method and error behind each."""
    n: int
    rho: float
    mean: float
    second_moment: float
    variance: float
    methods: Dict[str, Method] = field(default_factory=dict)
    errors: Dict[str, float] = field(default_factory=dict)
    status: EstimateStatus = EstimateStatus.CONVERGED
    evaluations: int = 0

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "rho": self.rho,
            "mean": self.mean,
            "second_moment": self.second_moment,
            "variance": self.variance,
            "methods": {k: v.value for k, v in self.methods.items()},
            "errors": dict(self.errors),
            "status": self.status.value,
            "evaluations": self.evaluations,
        }

    def summary(self) -> str:
        lines = [f"S_{self.n} at rho={self.rho:.17g} ({self.status.value})"]
        for name in ("mean", "second_moment", "variance"):
            method = self.methods.get(name, Method.CLOSED_FORM).value
            lines.append(
                f"  {name:<14} {getattr(self, name):.17g}  +/- {self.errors.get(name, 0.0):.3g}  [{method}]"
            )
        return "\n".join(lines)


def _check_n(n: int, low: int = 2) -> int:
    if int(n) != n or n < low:
        raise DomainError(f"segment length must be an integer >= {low}, got {n!r}")
    return int(n)


def mean_sign_changes(n: int, r: RhoLike) -> float:
    """E(S_n) = (n - 1) arccos(rho) / pi."""
    n = _check_n(n)
    return (n - 1) * math.acos(check_rho(r)) / math.pi


def variance_exact(n: int, r: RhoLike) -> float:
    """V(S_n) in closed form for n = 2, 3, 4."""
    n = _check_n(n)
    rho = check_rho(r)
    s = math.asin(rho)
    if n == 2:
        return 0.25 - s * s / (math.pi ** 2)
    if n == 3:
        return 0.5 - 4.0 * s * s / (math.pi ** 2) + math.asin(rho * rho) / math.pi
    if n == 4:
        half_mean = 0.5 - s / math.pi
        return (
            4.0 * g4(rho, rho)
            + 2.0 * f4(rho, -rho)
            + 16.0 * g4(rho, -rho)
            + 8.0 * f4(-rho, rho)
            + 18.0 * f4(-rho, -rho)
            - 9.0 * half_mean * half_mean
        )
    raise DomainError(f"closed-form variance covers n in 2..4, got {n}; use variance_numeric")


def pattern_probability(
    e,
    r: RhoLike,
    tol: float = 1e-10,
    seed: SeedLike = 0,
    config: Optional[QMCConfig] = None,
) -> ProbEstimate:
    """p_e under the AR(1) matrix: closed forms up to four bits, QMC beyond."""
    pattern = SignPattern.coerce(e)
    rho = check_rho(r)
    if len(pattern) <= CLOSED_FORM_MAX_N:
        return ProbEstimate(orthant_closed(pattern, rho), 0.0, Method.CLOSED_FORM)
    return orthant_qmc(ar1_matrix(rho, len(pattern)), pattern, tol=tol, seed=seed, config=config)


def _pattern_estimates(
    n: int,
    rho: float,
    tol: float,
    seed: SeedLike,
    config: Optional[QMCConfig],
) -> List[Tuple[SignPattern, ProbEstimate, int]]:
    """(pattern, estimate, weight) covering every n-bit pattern."""
    if n <= CLOSED_FORM_MAX_N:
        return [
            (p, pattern_probability(p, rho), 1) for p in SignPattern.all_patterns(n)
        ]
    # p_e = p_complement(e): estimate the half with a leading 0 and count it twice
    half = [p for p in SignPattern.all_patterns(n) if p.bits[0] == 0]
    children = seed_sequence(seed).spawn(len(half))
    matrix = ar1_matrix(rho, n)
    return [
        (p, orthant_qmc(matrix, p, tol=tol, seed=child, config=config), 2)
        for p, child in zip(half, children)
    ]


def variance_numeric(
    n: int,
    r: RhoLike,
    tol: float = DEFAULT_NUMERIC_TOL,
    seed: SeedLike = 0,
    config: Optional[QMCConfig] = None,
) -> MomentReport:
    """
    Moments of S_n assembled from the 2^n pattern probabilities, 2 <= n <= 10.

    E(S_n) = sum changes(e) p_e and E(S_n^2) = sum changes(e)^2 p_e. Errors
    propagate linearly from the pattern estimates.
    """
    n = _check_n(n)
    if n > MAX_NUMERIC_N:
        raise DomainError(f"variance_numeric supports n <= {MAX_NUMERIC_N}, got {n}")
    rho = check_rho(r)

    mean = second = 0.0
    mean_err = second_err = 0.0
    evaluations = 0
    status = EstimateStatus.CONVERGED
    for pattern, estimate, weight in _pattern_estimates(n, rho, tol, seed, config):
        k = pattern.changes
        mean += weight * k * estimate.value
        second += weight * k * k * estimate.value
        mean_err += weight * k * estimate.error
        second_err += weight * k * k * estimate.error
        evaluations += estimate.evaluations
        if not estimate.converged:
            status = EstimateStatus.NOT_CONVERGED

    method = Method.CLOSED_FORM if n <= CLOSED_FORM_MAX_N else Method.QMC
    variance = second - mean * mean
    if status != EstimateStatus.CONVERGED:
        logger.warning("moments of S_%d at rho=%g rest on non-converged pattern estimates", n, rho)
    return MomentReport(
        n=n,
        rho=rho,
        mean=mean,
        second_moment=second,
        variance=variance,
        methods={"mean": method, "second_moment": method, "variance": method},
        errors={
            "mean": mean_err,
            "second_moment": second_err,
            "variance": second_err + 2.0 * abs(mean) * mean_err,
        },
        status=status,
        evaluations=evaluations,
    )


def changes_distribution(
    n: int,
    r: RhoLike,
    tol: float = DEFAULT_NUMERIC_TOL,
    seed: SeedLike = 0,
    config: Optional[QMCConfig] = None,
) -> Tuple[np.ndarray, np.ndarray]:
    """P{S_n = k} for k = 0..n-1 and the matching error bounds."""
    n = _check_n(n)
    if n > MAX_NUMERIC_N:
        raise DomainError(f"changes_distribution supports n <= {MAX_NUMERIC_N}, got {n}")
    rho = check_rho(r)
    probabilities = np.zeros(n)
    errors = np.zeros(n)
    for pattern, estimate, weight in _pattern_estimates(n, rho, tol, seed, config):
        probabilities[pattern.changes] += weight * estimate.value
        errors[pattern.changes] += weight * estimate.error
    return probabilities, errors
