"""
Monte Carlo simulation of sign changes in stationary AR(1) segments.

Paths start from the stationary law X_1 ~ N(0, 1) and follow
X_t = rho X_{t-1} + sqrt(1 - rho^2) eps_t. A sign change at i is counted when
X_i X_{i+1} < 0 strictly, so an exact zero never counts.

Paths are simulated in fixed-size blocks. Block b draws from its own stream,
spawned as child b of SeedSequence(seed), so the result is the same for any
number of workers.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from sign_changes.domain import check_rho
from sign_changes.errors import DomainError

logger = logging.getLogger(__name__)


@dataclass
class SimConfig:
    """Segment length, correlation, path count and seed of a simulation run."""
    n: int
    rho: float
    paths: int
    seed: int = 0
    block_size: int = 2 ** 16
    workers: int = 1

    def __post_init__(self):
        self.rho = check_rho(self.rho)
        if int(self.n) != self.n or self.n < 2:
            raise DomainError(f"n must be an integer >= 2, got {self.n!r}")
        if int(self.paths) != self.paths or self.paths < 1:
            raise DomainError(f"paths must be a positive integer, got {self.paths!r}")
        if self.block_size < 1 or self.workers < 1:
            raise DomainError("block_size and workers must be positive")
        self.n = int(self.n)
        self.paths = int(self.paths)


@dataclass
class SimResult:
    """Sample moments of S_n and the histogram of counts 0..n-1."""
    config: SimConfig
    histogram: np.ndarray
    mean_hat: float
    var_hat: float
    se_mean: float
    se_var: float
    metadata: dict = field(default_factory=dict)

    def distribution(self) -> np.ndarray:
        """Relative frequencies of S_n = 0..n-1."""
        return self.histogram / self.histogram.sum()

    def to_dict(self) -> dict:
        return {
            "n": self.config.n,
            "rho": self.config.rho,
            "paths": self.config.paths,
            "seed": self.config.seed,
            "mean_hat": self.mean_hat,
            "var_hat": self.var_hat,
            "se_mean": self.se_mean,
            "se_var": self.se_var,
            "histogram": self.histogram.tolist(),
        }

    def summary(self) -> str:
        cfg = self.config
        return "\n".join([
            f"n={cfg.n} rho={cfg.rho:.17g} paths={cfg.paths} seed={cfg.seed}",
            f"mean     {self.mean_hat:.17g}  se {self.se_mean:.3g}",
            f"variance {self.var_hat:.17g}  se {self.se_var:.3g}",
            "histogram " + " ".join(str(int(h)) for h in self.histogram),
        ])


def _simulate_block(n: int, rho: float, size: int, seed: np.random.SeedSequence) -> np.ndarray:
    rng = np.random.default_rng(seed)
    innovation_scale = math.sqrt(1.0 - rho * rho)
    x = rng.standard_normal(size)
    changes = np.zeros(size, dtype=np.int64)
    for _ in range(n - 1):
        nxt = rho * x + innovation_scale * rng.standard_normal(size)
        changes += (x * nxt < 0.0)
        x = nxt
    return np.bincount(changes, minlength=n)


def _histogram_moments(histogram: np.ndarray):
    total = int(histogram.sum())
    k = np.arange(len(histogram), dtype=float)
    weights = histogram / total
    mean = float(k @ weights)
    centred = k - mean
    m2 = float((centred ** 2) @ weights)
    m4 = float((centred ** 4) @ weights)
    var = m2 * total / (total - 1) if total > 1 else 0.0
    se_mean = math.sqrt(var / total)
    se_var = math.sqrt(max(m4 - m2 * m2, 0.0) / total)
    return mean, var, se_mean, se_var


def simulate(cfg: SimConfig) -> SimResult:
    """Simulate cfg.paths independent segments and summarise S_n."""
    n_blocks = -(-cfg.paths // cfg.block_size)
    sizes = [cfg.block_size] * (n_blocks - 1) + [cfg.paths - cfg.block_size * (n_blocks - 1)]
    children = np.random.SeedSequence(cfg.seed).spawn(n_blocks)

    histogram = np.zeros(cfg.n, dtype=np.int64)
    with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
        blocks = pool.map(
            lambda args: _simulate_block(cfg.n, cfg.rho, *args), zip(sizes, children)
        )
        for block in blocks:
            histogram += block
    logger.debug("simulated %d paths in %d blocks", cfg.paths, n_blocks)

    mean, var, se_mean, se_var = _histogram_moments(histogram)
    return SimResult(
        config=cfg,
        histogram=histogram,
        mean_hat=mean,
        var_hat=var,
        se_mean=se_mean,
        se_var=se_var,
        metadata={"blocks": n_blocks},
    )
