"""
Multivariate normal orthant probabilities by randomized quasi-Monte Carlo.

The orthant integral is rewritten by separation of variables: with the lower
Cholesky factor L of the sign-flipped correlation matrix, each coordinate is
drawn from its conditional truncated normal and the integrand becomes a product
of one-dimensional normal CDFs. The last two coordinates are integrated
together through the bivariate normal CDF, which leaves an (n-2)-cube. Each
cube axis goes through the change of variables w = t^2 (3 - 2t): its Jacobian
vanishes on the faces, where the inverse normal CDF would otherwise make the
integrand's derivatives unbounded.

The cube is sampled with independently scrambled Sobol' sequences. The spread
across scramblings gives the error estimate (three standard errors), and every
sequence is extended by doubling until the estimate meets the tolerance or the
evaluation budget runs out.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Tuple, Union

import numpy as np
from scipy.special import log_ndtr, ndtr, ndtri, owens_t
from scipy.stats import qmc

from sign_changes.domain import EstimateStatus, Method, ProbEstimate, RhoLike, SignPattern, check_rho
from sign_changes.errors import DomainError

logger = logging.getLogger(__name__)

MAX_DIMENSION = 13

_TINY = np.finfo(float).tiny
_EPS = np.finfo(float).eps
_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)

SeedLike = Union[int, np.random.SeedSequence, None]


def seed_sequence(seed: SeedLike) -> np.random.SeedSequence:
    """
    A fresh SeedSequence for seed. A SeedSequence argument is copied, so
    spawns already taken from the caller's object do not shift the streams.
    """
    if isinstance(seed, np.random.SeedSequence):
        return np.random.SeedSequence(seed.entropy, spawn_key=seed.spawn_key, pool_size=seed.pool_size)
    return np.random.SeedSequence(seed)


def _is_power_of_two(value: int) -> bool:
    return value >= 1 and value & (value - 1) == 0


@dataclass
class QMCConfig:
    """
    Settings for the scrambled Sobol' orthant integrator.

    initial_points and chunk_size must be powers of two so that every draw
    keeps the balance properties of the sequence.
    """
    tol: float = 1e-10
    randomizations: int = 16
    initial_points: int = 2 ** 10
    max_evaluations: int = 2 ** 26
    chunk_size: int = 2 ** 15
    workers: int = 1
    reorder: bool = True

    def __post_init__(self):
        if self.tol <= 0:
            raise DomainError(f"tol must be positive, got {self.tol}")
        if self.randomizations < 2:
            raise DomainError("at least two randomizations are needed for an error estimate")
        if self.max_evaluations < 1:
            raise DomainError("the evaluation budget must be positive")
        if not (_is_power_of_two(self.initial_points) and _is_power_of_two(self.chunk_size)):
            raise DomainError(
                "initial_points and chunk_size must be powers of two, "
                f"got {self.initial_points} and {self.chunk_size}"
            )
        if self.workers < 1:
            raise DomainError(f"workers must be >= 1, got {self.workers}")


@dataclass(eq=False)
class CorrelationMatrix:
    """
    A symmetric, unit-diagonal, positive definite correlation matrix.

    The lower Cholesky factor is computed on construction; failure to factor
    means the matrix is not positive definite.
    """
    values: np.ndarray
    cholesky: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.ndim != 2 or values.shape[0] != values.shape[1] or values.shape[0] < 1:
            raise DomainError(f"correlation matrix must be square and non-empty, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise DomainError("correlation matrix has non-finite entries")
        if not np.allclose(values, values.T, rtol=0.0, atol=1e-14):
            raise DomainError("correlation matrix must be symmetric")
        if not np.allclose(np.diag(values), 1.0, rtol=0.0, atol=1e-14):
            raise DomainError("correlation matrix must have a unit diagonal")
        try:
            chol = np.linalg.cholesky(values)
        except np.linalg.LinAlgError as exc:
            raise DomainError("correlation matrix is not positive definite") from exc
        self.values = values
        self.cholesky = chol

    @property
    def dimension(self) -> int:
        return self.values.shape[0]


def ar1_matrix(r: RhoLike, n: int) -> CorrelationMatrix:
    """The n x n AR(1) correlation matrix with entries rho^|j-i|."""
    rho = check_rho(r)
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    lags = np.abs(np.subtract.outer(np.arange(n), np.arange(n)))
    return CorrelationMatrix(np.power(rho, lags))


def pattern_correlation(m: CorrelationMatrix, signs) -> np.ndarray:
    """
    Correlation of Z_i = -s_i X_i, s_i = +1 for bit 1 and -1 for bit 0.

    The pattern orthant of X is the negative orthant {Z < 0}.
    """
    pattern = SignPattern.coerce(signs)
    if len(pattern) != m.dimension:
        raise DomainError(
            f"pattern has {len(pattern)} bits but the matrix has dimension {m.dimension}"
        )
    s = np.array(pattern.signs)
    return np.outer(s, s) * m.values


def _truncated_mean(b: float) -> float:
    """E[Y | Y < b] for standard normal Y."""
    return -math.exp(-0.5 * b * b - _LOG_SQRT_2PI - float(log_ndtr(b)))


def _prioritized_cholesky(cov: np.ndarray) -> Tuple[np.ndarray, List[int]]:
    """
    Cholesky factor with Genz-Bretz variable ordering for upper limits 0.

    At each step the variable with the smallest conditional probability of
    lying below its limit goes next; its truncated mean conditions the rest.
    """
    n = cov.shape[0]
    c = cov.copy()
    L = np.zeros((n, n))
    y = np.zeros(n)
    order = list(range(n))
    for k in range(n):
        best, best_prob, best_sd, best_b = k, math.inf, 0.0, 0.0
        for i in range(k, n):
            var = c[i, i] - L[i, :k] @ L[i, :k]
            if var <= 0.0:
                raise DomainError("correlation matrix is not positive definite")
            sd = math.sqrt(var)
            b = -(L[i, :k] @ y[:k]) / sd
            prob = float(ndtr(b))
            if prob < best_prob:
                best, best_prob, best_sd, best_b = i, prob, sd, b
        if best != k:
            c[[k, best], :] = c[[best, k], :]
            c[:, [k, best]] = c[:, [best, k]]
            L[[k, best], :k] = L[[best, k], :k]
            order[k], order[best] = order[best], order[k]
        L[k, k] = best_sd
        for i in range(k + 1, n):
            L[i, k] = (c[i, k] - L[i, :k] @ L[k, :k]) / best_sd
        y[k] = _truncated_mean(best_b)
    return L, order


def _bivariate_lower(h: np.ndarray, k: np.ndarray, r: float) -> np.ndarray:
    """
    P{U < h, V < k} for standard normals with correlation r, via Owen's T:

        Phi2 = Phi(h)/2 + Phi(k)/2 - T(h, a_h) - T(k, a_k) - [h, k of opposite sign]/2

    with a_h = (k - r h) / (h sqrt(1 - r^2)) and a_k symmetric. A zero limit
    counts as positive: T(0+, a_h) = sign(k) / 4.
    """
    s = math.sqrt((1.0 - r) * (1.0 + r))
    h_zero = h == 0.0
    k_zero = k == 0.0
    safe_h = np.where(h_zero, 1.0, h)
    safe_k = np.where(k_zero, 1.0, k)
    t_h = np.where(h_zero, np.copysign(0.25, k), owens_t(h, (k - r * h) / (safe_h * s)))
    t_k = np.where(k_zero, np.copysign(0.25, h), owens_t(k, (h - r * k) / (safe_k * s)))
    value = 0.5 * ndtr(h) + 0.5 * ndtr(k) - t_h - t_k
    value -= np.where((h < 0.0) != (k < 0.0), 0.5, 0.0)
    both_zero = h_zero & k_zero
    value = np.where(both_zero, 0.25 + math.asin(r) / (2.0 * math.pi), value)
    return np.clip(value, 0.0, 1.0)


def _integrand(L: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Separation-of-variables integrand at cube points w of shape (N, n-2), n >= 3."""
    n = L.shape[0]
    count = w.shape[0]
    e = np.full(count, 0.5)
    value = e.copy()
    y = np.empty((count, n - 2))
    for i in range(n - 2):
        y[:, i] = ndtri(np.clip(w[:, i] * e, _TINY, 1.0 - _EPS))
        if i + 1 < n - 2:
            e = ndtr(-(y[:, : i + 1] @ L[i + 1, : i + 1]) / L[i + 1, i + 1])
            value *= e
    # the last pair, jointly: Z_{n-2} < 0 and Z_{n-1} < 0 given y
    scale = math.hypot(L[n - 1, n - 2], L[n - 1, n - 1])
    h = -(y @ L[n - 2, : n - 2]) / L[n - 2, n - 2]
    k = -(y @ L[n - 1, : n - 2]) / scale
    return value * _bivariate_lower(h, k, L[n - 1, n - 2] / scale)


def _smoothed_integrand(L: np.ndarray, t: np.ndarray) -> np.ndarray:
    """The integrand after w = t^2 (3 - 2t) on every axis, Jacobian included."""
    w = t * t * (3.0 - 2.0 * t)
    jacobian = np.prod(6.0 * t * (1.0 - t), axis=1)
    return _integrand(L, w) * jacobian


class _ScrambledSampler:
    """Running sums of the integrand over one scrambled Sobol' sequence."""

    def __init__(self, L: np.ndarray, seed: np.random.SeedSequence, chunk_size: int):
        self.L = L
        self.chunk_size = chunk_size
        self.engine = qmc.Sobol(d=L.shape[0] - 2, scramble=True, seed=np.random.default_rng(seed))

    def extend(self, count: int) -> float:
        """Sum over the next `count` points; count is a power of two."""
        total = 0.0
        remaining = count
        while remaining > 0:
            size = min(self.chunk_size, remaining)
            total += float(np.sum(_smoothed_integrand(self.L, self.engine.random(size))))
            remaining -= size
        return total


def orthant_qmc(
    m: CorrelationMatrix,
    signs,
    tol: Optional[float] = None,
    seed: SeedLike = 0,
    config: Optional[QMCConfig] = None,
) -> ProbEstimate:
    """
    P{(-1)^e_i X_i < 0 for all i} for X ~ N(0, m).

    Args:
        m: correlation matrix of X.
        signs: the sign pattern e, as a SignPattern or a bit string.
        tol: absolute error target; overrides config.tol.
        seed: seed for the scramblings.
        config: integration settings.

    Returns:
        ProbEstimate with method QMC. If the budget runs out before the error
        target is met the status is NOT_CONVERGED and the achieved estimate
        and error are returned.
    """
    config = config or QMCConfig()
    tol = config.tol if tol is None else float(tol)
    if not tol > 0:
        raise DomainError(f"tol must be positive, got {tol}")
    pattern = SignPattern.coerce(signs)
    cov = pattern_correlation(m, pattern)
    n = m.dimension
    if n > MAX_DIMENSION:
        raise DomainError(f"dimension {n} exceeds the supported maximum {MAX_DIMENSION}")

    if not np.any(np.tril(cov, -1)):
        # independent coordinates
        return ProbEstimate(0.5 ** n, 0.0, Method.QMC, 0, metadata={"dimension": n})
    if n == 2:
        value = 0.25 + math.asin(cov[1, 0]) / (2.0 * math.pi)
        return ProbEstimate(value, 0.0, Method.QMC, 0, metadata={"dimension": 2})

    if config.reorder:
        L, order = _prioritized_cholesky(cov)
    else:
        L, order = np.linalg.cholesky(cov), list(range(n))

    samplers = [
        _ScrambledSampler(L, child, config.chunk_size)
        for child in seed_sequence(seed).spawn(config.randomizations)
    ]
    sums = np.zeros(config.randomizations)

    done = 0
    points = config.initial_points
    evaluations = 0
    value, error = 0.0, math.inf
    with ThreadPoolExecutor(max_workers=config.workers) as pool:
        while True:
            count = points - done
            # map() returns in sampler order, so the reduction does not depend on workers
            increments = pool.map(lambda sampler: sampler.extend(count), samplers)
            sums += np.fromiter(increments, dtype=float, count=config.randomizations)
            evaluations += count * config.randomizations
            done = points

            estimates = sums / done
            value = float(np.mean(estimates))
            error = 3.0 * float(np.std(estimates, ddof=1)) / math.sqrt(config.randomizations)
            logger.debug(
                "orthant %s: points=%d value=%.17g error=%.3g", pattern, done, value, error
            )
            if error <= tol:
                status = EstimateStatus.CONVERGED
                break
            # the next round doubles every sequence
            if evaluations + done * config.randomizations > config.max_evaluations:
                status = EstimateStatus.NOT_CONVERGED
                logger.warning(
                    "orthant %s did not reach tol=%.3g within %d evaluations (error %.3g)",
                    pattern, tol, evaluations, error,
                )
                break
            points = 2 * done

    return ProbEstimate(
        value=value,
        error=error,
        method=Method.QMC,
        evaluations=evaluations,
        status=status,
        metadata={
            "dimension": n,
            "points_per_sequence": done,
            "randomizations": config.randomizations,
            "order": order,
        },
    )


def total_probability(
    m: CorrelationMatrix,
    tol: Optional[float] = None,
    seed: SeedLike = 0,
    config: Optional[QMCConfig] = None,
) -> Tuple[float, float]:
    """Sum of orthant_qmc over all 2^n sign patterns, with the summed error."""
    children = seed_sequence(seed).spawn(2 ** m.dimension)
    value, error = 0.0, 0.0
    for pattern, child in zip(SignPattern.all_patterns(m.dimension), children):
        estimate = orthant_qmc(m, pattern, tol=tol, seed=child, config=config)
        value += estimate.value
        error += estimate.error
    return value, error
