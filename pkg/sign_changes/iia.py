"""
Independent interval approximation (IIA) for the second moment of S_n.

Treating the gaps between sign changes as independent yields the recursion

    c_n = arccos(rho) / (6 pi) (n-1) n (n+1)
          - pi / arccos(rho) * sum_{k=2}^{n-1} [1/2 - arcsin(rho^(n-k+1)) / pi] c_k

with c_1 = 0, as the model estimate of E(S_n^2). It reproduces V(S_2) and
V(S_3) exactly and departs from V(S_4). The symmetrized variant evaluates
everything at |rho|.
"""

import logging
import math
from dataclasses import dataclass
from typing import Iterable, Tuple

import numpy as np
from scipy.optimize import minimize_scalar

from sign_changes.domain import RhoLike, check_rho
from sign_changes.errors import DomainError
from sign_changes.moments import variance_exact

logger = logging.getLogger(__name__)

SEARCH_LIMIT = 0.999
DEFAULT_GRID_STEP = 1e-3
DEFAULT_RHO_TOL = 1e-4


@dataclass(frozen=True)
class IIASequence:
    """c_1..c_n; values[k - 1] holds c_k."""
    rho: float
    values: Tuple[float, ...]
    symmetrized: bool = False

    @property
    def n(self) -> int:
        return len(self.values)

    def c(self, k: int) -> float:
        if not 1 <= k <= self.n:
            raise DomainError(f"c_k is defined for 1 <= k <= {self.n}, got {k}")
        return self.values[k - 1]


def _effective_rho(r: RhoLike, symmetrized: bool) -> float:
    rho = check_rho(r)
    return abs(rho) if symmetrized else rho


def iia_second_moment(n: int, r: RhoLike, symmetrized: bool = False) -> IIASequence:
    if int(n) != n or n < 1:
        raise DomainError(f"n must be a positive integer, got {n!r}")
    n = int(n)
    rho = check_rho(r)
    rho_eff = _effective_rho(rho, symmetrized)
    angle = math.acos(rho_eff)
    # weights[j] = 1/2 - arcsin(rho^j) / pi
    weights = [0.5 - math.asin(rho_eff ** j) / math.pi for j in range(n + 1)]

    c = [0.0] * (n + 1)
    for m in range(2, n + 1):
        tail = sum(weights[m - k + 1] * c[k] for k in range(2, m))
        c[m] = angle / (6.0 * math.pi) * (m - 1) * m * (m + 1) - math.pi / angle * tail
    return IIASequence(rho=rho, values=tuple(c[1:]), symmetrized=symmetrized)


def iia_variance(n: int, r: RhoLike, symmetrized: bool = False) -> float:
    """Model variance c_n - E(S_n)^2."""
    sequence = iia_second_moment(n, r, symmetrized)
    mean = (sequence.n - 1) * math.acos(_effective_rho(r, symmetrized)) / math.pi
    return sequence.c(sequence.n) - mean * mean


def model_curve(rhos: Iterable[float], symmetrized: bool = False, n: int = 4) -> np.ndarray:
    return np.array([iia_variance(n, r, symmetrized) for r in rhos])


@dataclass
class SeparationResult:
    rho_star: float
    separation: float
    side: str
    grid_step: float
    refined: bool
    symmetrized: bool = False

    def to_dict(self) -> dict:
        return {
            "rho_star": self.rho_star,
            "separation": self.separation,
            "side": self.side,
            "grid_step": self.grid_step,
            "refined": self.refined,
            "symmetrized": self.symmetrized,
        }


def separation(r: float, symmetrized: bool = False) -> float:
    """|IIA model variance - exact variance| for n = 4."""
    return abs(iia_variance(4, r, symmetrized) - variance_exact(4, r))


def separation_search(
    n: int = 4,
    side: str = "positive",
    grid_step: float = DEFAULT_GRID_STEP,
    symmetrized: bool = False,
    rho_tol: float = DEFAULT_RHO_TOL,
) -> SeparationResult:
    """
    Locate the largest gap between model and exact V(S_4) on one side of zero.

    A grid scan over (0, 0.999] or [-0.999, 0) is refined by golden-section
    search bracketed by the best grid point and its neighbours. A maximum on
    the grid edge is returned unrefined.
    """
    if n != 4:
        raise DomainError(f"exact variance beyond closed agreement exists only for n = 4, got {n}")
    if side not in ("positive", "negative"):
        raise DomainError(f"side must be 'positive' or 'negative', got {side!r}")
    if not 0 < grid_step <= 1e-3:
        raise DomainError(f"grid_step must lie in (0, 1e-3], got {grid_step}")

    sign = 1.0 if side == "positive" else -1.0
    count = int(math.floor(SEARCH_LIMIT / grid_step + 1e-9))
    grid = sign * grid_step * np.arange(1, count + 1)
    values = np.array([separation(r, symmetrized) for r in grid])
    best = int(np.argmax(values))
    rho_star, gap = float(grid[best]), float(values[best])
    logger.debug("grid maximum on %s side: rho=%.6f separation=%.6g", side, rho_star, gap)

    if best == 0 or best == len(grid) - 1:
        return SeparationResult(rho_star, gap, side, grid_step, False, symmetrized)

    bracket = (float(grid[best - 1]), rho_star, float(grid[best + 1]))
    try:
        found = minimize_scalar(
            lambda r: -separation(r, symmetrized),
            bracket=bracket,
            method="golden",
            options={"xtol": rho_tol},
        )
    except ValueError as exc:
        logger.debug("golden-section refinement skipped: %s", exc)
        return SeparationResult(rho_star, gap, side, grid_step, False, symmetrized)

    lo, hi = min(bracket[0], bracket[2]), max(bracket[0], bracket[2])
    if lo <= found.x <= hi and -found.fun >= gap:
        rho_star, gap = float(found.x), float(-found.fun)
    return SeparationResult(rho_star, gap, side, grid_step, True, symmetrized)
