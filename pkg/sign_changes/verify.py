"""
Verification suite: golden constants, identities and oracle cross-checks.

Each check is a small object with a name, a group and run(). The registry runs
them in registration order and collects a report; the CLI exits non-zero when
any check fails.
"""

import logging
import math
import time
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Dict, List, Optional

import numpy as np

from sign_changes.domain import ProbEstimate, SignPattern
from sign_changes.errors import SignChangeError
from sign_changes.iia import iia_second_moment, iia_variance, separation_search
from sign_changes.mc import SimConfig, simulate
from sign_changes.moments import mean_sign_changes, pattern_probability, variance_exact
from sign_changes.mvn import ar1_matrix, orthant_qmc
from sign_changes.orthant import (
    SQRT3_OVER_2, cheng_I, cheng_I_quadrature, f4, g4,
    outlier_orthant, p11111, q_pattern_4of5, quadrature_J, special_J_argument,
    special_J_closed,
)

logger = logging.getLogger(__name__)

# Published values at rho = 1/2.
GOLDEN_CONSTANTS: Dict[str, float] = {
    "f(1/2,1/2)": 0.1576625817544825416159596,
    "g(1/2,1/2)": 0.0707784073926423526601112,
    "f(1/2,-1/2)": 0.0658073315415406956707081,
    "g(1/2,-1/2)": 0.0390850126446677433865542,
    "f(-1/2,1/2)": 0.0341139367935660863971512,
    "f(-1/2,-1/2)": 0.0226893098357904842228499,
    "V(S_4)": 0.7214075663610921033552384,
    "q_1245": 0.1337768212694702494423619,
    "q_1235": 0.1354451520661386999235683,
}

_GOLDEN_EVALUATORS: Dict[str, Callable[[], float]] = {
    "f(1/2,1/2)": lambda: f4(0.5, 0.5),
    "g(1/2,1/2)": lambda: g4(0.5, 0.5),
    "f(1/2,-1/2)": lambda: f4(0.5, -0.5),
    "g(1/2,-1/2)": lambda: g4(0.5, -0.5),
    "f(-1/2,1/2)": lambda: f4(-0.5, 0.5),
    "f(-1/2,-1/2)": lambda: f4(-0.5, -0.5),
    "V(S_4)": lambda: variance_exact(4, 0.5),
    "q_1245": lambda: q_pattern_4of5((1, 2, 4, 5), 0.5),
    "q_1235": lambda: outlier_orthant(0.5),
}

# Float evaluation cannot beat this, whatever tolerance is requested.
GOLDEN_FLOOR = 1e-12
APPENDIX_TOL = 1e-10
CROSS_FORM_TOL = 1e-10
ORACLE_FLOOR = 1e-9

RHO_GRID = np.linspace(-0.99, 0.99, 199)


class CheckStatus(Enum):
    PASSED = "passed"
    FAILED = "failed"
    ERROR = "error"


@dataclass
class CheckResult:
    """Outcome of one check."""
    name: str
    group: str
    status: CheckStatus
    deviation: float = 0.0
    tolerance: float = 0.0
    message: str = ""
    duration: float = 0.0

    @property
    def passed(self) -> bool:
        return self.status == CheckStatus.PASSED

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "group": self.group,
            "status": self.status.value,
            "deviation": self.deviation,
            "tolerance": self.tolerance,
            "message": self.message,
            "duration": round(self.duration, 4),
        }


@dataclass
class VerifyContext:
    """Settings shared by all checks in a run."""
    tol: float = 1e-12
    fast: bool = False
    seed: int = 0

    @property
    def golden_tol(self) -> float:
        return max(self.tol, GOLDEN_FLOOR)

    @property
    def qmc_tol(self) -> float:
        return 1e-8 if self.fast else 1e-10

    @property
    def mc_paths(self) -> int:
        return 10 ** 5 if self.fast else 10 ** 7


class Check(ABC):
    """A named verification step."""

    @property
    @abstractmethod
    def name(self) -> str:
        pass

    @property
    @abstractmethod
    def group(self) -> str:
        pass

    @abstractmethod
    def evaluate(self, ctx: VerifyContext) -> CheckResult:
        """Compute the deviation and compare it to the tolerance."""
        pass

    def run(self, ctx: VerifyContext) -> CheckResult:
        started = time.perf_counter()
        try:
            result = self.evaluate(ctx)
        except SignChangeError as exc:
            result = CheckResult(self.name, self.group, CheckStatus.ERROR, message=str(exc))
        result.duration = time.perf_counter() - started
        logger.debug("check %s: %s (%.2fs)", self.name, result.status.value, result.duration)
        return result

    def _compare(self, deviation: float, tolerance: float, message: str = "") -> CheckResult:
        ok = math.isfinite(deviation) and deviation <= tolerance
        return CheckResult(
            self.name, self.group,
            CheckStatus.PASSED if ok else CheckStatus.FAILED,
            deviation=deviation, tolerance=tolerance, message=message,
        )


class GoldenConstantCheck(Check):
    """A computed value against a published constant."""

    def __init__(self, label: str, expected: float, compute: Callable[[], float], appendix: bool = False):
        self.label = label
        self.expected = expected
        self.compute = compute
        self.appendix = appendix

    @property
    def name(self) -> str:
        return f"golden {self.label}"

    @property
    def group(self) -> str:
        return "appendix" if self.appendix else "golden"

    def evaluate(self, ctx: VerifyContext) -> CheckResult:
        value = self.compute()
        tolerance = APPENDIX_TOL if self.appendix else ctx.golden_tol
        return self._compare(
            abs(value - self.expected), tolerance,
            f"computed {value:.17g}, expected {self.expected:.17g}",
        )


class IdentityCheck(Check):
    """A quantity that should vanish; deviation() returns its size."""

    def __init__(self, name: str, deviation: Callable[[VerifyContext], float], tolerance: float):
        self._name = name
        self.deviation = deviation
        self.tolerance = tolerance

    @property
    def name(self) -> str:
        return self._name

    @property
    def group(self) -> str:
        return "identity"

    def evaluate(self, ctx: VerifyContext) -> CheckResult:
        return self._compare(self.deviation(ctx), self.tolerance)


class OracleCheck(Check):
    """
    A closed form against a stochastic estimate.

    evaluate_pair returns (reference, estimate, allowed deviation). A
    ProbEstimate that did not converge fails whatever its deviation.
    """

    def __init__(self, name: str, evaluate_pair: Callable[[VerifyContext], tuple]):
        self._name = name
        self.evaluate_pair = evaluate_pair

    @property
    def name(self) -> str:
        return self._name

    @property
    def group(self) -> str:
        return "oracle"

    def evaluate(self, ctx: VerifyContext) -> CheckResult:
        reference, estimate, allowed = self.evaluate_pair(ctx)
        if isinstance(estimate, ProbEstimate):
            if not estimate.converged:
                return CheckResult(
                    self.name, self.group, CheckStatus.FAILED,
                    deviation=abs(reference - estimate.value), tolerance=allowed,
                    message=f"estimate did not converge (error {estimate.error:.3g})",
                )
            estimate = estimate.value
        return self._compare(
            abs(reference - estimate), allowed,
            f"reference {reference:.17g}, estimate {estimate:.17g}",
        )


@dataclass
class VerificationReport:
    results: List[CheckResult] = field(default_factory=list)
    total_time: float = 0.0

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    @property
    def first_failure(self) -> Optional[CheckResult]:
        return next((r for r in self.results if not r.passed), None)

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "results": [r.to_dict() for r in self.results],
            "total_time": round(self.total_time, 4),
        }

    def summary(self) -> str:
        lines = []
        for r in self.results:
            lines.append(
                f"{r.status.value.upper():<7} {r.name:<44} dev={r.deviation:.3g} tol={r.tolerance:.3g}"
            )
        passed = sum(1 for r in self.results if r.passed)
        lines.append(f"{passed}/{len(self.results)} checks passed in {self.total_time:.1f}s")
        failure = self.first_failure
        if failure:
            detail = f": {failure.message}" if failure.message else ""
            lines.append(f"First failure: {failure.name}{detail}")
        return "\n".join(lines)


# ---------------------------------------------------------------------------
# Identity and oracle computations
# ---------------------------------------------------------------------------

def _sum_to_one(ctx: VerifyContext) -> float:
    worst = 0.0
    for r in RHO_GRID:
        total = (
            2 * f4(r, r) + 4 * g4(r, r) + 2 * f4(r, -r)
            + 4 * g4(r, -r) + 2 * f4(-r, r) + 2 * f4(-r, -r)
        )
        worst = max(worst, abs(total - 1.0))
    return worst


def _iia_exact(n: int) -> Callable[[VerifyContext], float]:
    def deviation(ctx: VerifyContext) -> float:
        return max(abs(iia_variance(n, r) - variance_exact(n, r)) for r in RHO_GRID)
    return deviation


def _rice_mean(ctx: VerifyContext) -> float:
    worst = 0.0
    rhos = RHO_GRID[::10] if ctx.fast else RHO_GRID
    for n in (2, 3, 4):
        for r in rhos:
            assembled = sum(
                p.changes * pattern_probability(p, r).value for p in SignPattern.all_patterns(n)
            )
            worst = max(worst, abs(assembled - mean_sign_changes(n, r)))
    return worst


def _binomial_degeneration(ctx: VerifyContext) -> float:
    worst = 0.0
    for n in range(2, 11):
        worst = max(worst, abs(mean_sign_changes(n, 0.0) - (n - 1) / 2))
        worst = max(worst, abs(iia_second_moment(n, 0.0).c(n) - ((n - 1) / 4 + ((n - 1) / 2) ** 2)))
        if n <= 4:
            worst = max(worst, abs(variance_exact(n, 0.0) - (n - 1) / 4))
    return worst


def _cheng_grid(ctx: VerifyContext) -> float:
    size = 3 if ctx.fast else 10
    worst = 0.0
    for h in np.linspace(0.1, 0.95, size):
        for frac in np.linspace(0.05, 0.95, size):
            x = frac * h * h
            worst = max(worst, abs(cheng_I(h, x) - cheng_I_quadrature(h, x)))
    return worst


def _j_reduces_to_i(ctx: VerifyContext) -> float:
    worst = 0.0
    for h, frac in ((0.3, 0.5), (0.5, 0.5), (0.8, 0.3), (0.9, 0.9)):
        x = frac * h * h
        worst = max(worst, abs(quadrature_J(h, h, x) - cheng_I(h, x)))
    return worst


def _special_j(ctx: VerifyContext) -> float:
    worst = 0.0
    for k in np.arange(1, 10) / 10.0:
        worst = max(
            worst,
            abs(special_J_closed(k) - quadrature_J(SQRT3_OVER_2, k, special_J_argument(k))),
        )
    return worst


def _separation(side: str, rho_target: float, sep_target: float, sep_band: float) -> Callable[[VerifyContext], float]:
    def deviation(ctx: VerifyContext) -> float:
        result = separation_search(4, side)
        # normalised so that 1.0 marks the edge of the accepted band
        return max(
            abs(result.rho_star - rho_target) / 0.01,
            abs(result.separation - sep_target) / sep_band,
        )
    return deviation


def _qmc_vs_closed(pattern: str, rho: float) -> Callable[[VerifyContext], tuple]:
    def evaluate_pair(ctx: VerifyContext) -> tuple:
        closed = pattern_probability(pattern, rho).value
        estimate = orthant_qmc(ar1_matrix(rho, len(pattern)), pattern, tol=ctx.qmc_tol, seed=ctx.seed)
        return closed, estimate, max(ORACLE_FLOOR, 3.0 * estimate.error)
    return evaluate_pair


def _p11111_vs_qmc(rho: float) -> Callable[[VerifyContext], tuple]:
    def evaluate_pair(ctx: VerifyContext) -> tuple:
        closed = p11111(rho)
        estimate = orthant_qmc(ar1_matrix(rho, 5), "11111", tol=ctx.qmc_tol, seed=ctx.seed)
        return closed, estimate, max(ORACLE_FLOOR, 3.0 * estimate.error)
    return evaluate_pair


def _mc_moment(rho: float, moment: str) -> Callable[[VerifyContext], tuple]:
    def evaluate_pair(ctx: VerifyContext) -> tuple:
        result = simulate(SimConfig(n=4, rho=rho, paths=ctx.mc_paths, seed=ctx.seed))
        if moment == "mean":
            return mean_sign_changes(4, rho), result.mean_hat, 4.0 * result.se_mean
        return variance_exact(4, rho), result.var_hat, 4.0 * result.se_var
    return evaluate_pair


class CheckRegistry:
    """Ordered collection of checks."""

    def __init__(self):
        self._checks: Dict[str, Check] = {}

    def register(self, check: Check) -> None:
        self._checks[check.name] = check

    def get(self, name: str) -> Optional[Check]:
        return self._checks.get(name)

    def list_checks(self) -> List[str]:
        return list(self._checks.keys())

    def run(self, ctx: VerifyContext) -> VerificationReport:
        started = time.perf_counter()
        report = VerificationReport()
        for check in self._checks.values():
            report.results.append(check.run(ctx))
        report.total_time = time.perf_counter() - started
        return report

    @classmethod
    def default_registry(cls, golden: Optional[Dict[str, float]] = None) -> "CheckRegistry":
        """
        All checks. `golden` overrides individual published values, which lets
        tests confirm that a wrong constant is caught.
        """
        constants = dict(GOLDEN_CONSTANTS)
        constants.update(golden or {})
        registry = cls()
        for label, compute in _GOLDEN_EVALUATORS.items():
            registry.register(GoldenConstantCheck(
                label, constants[label], compute, appendix=label.startswith("q_"),
            ))

        registry.register(IdentityCheck("sum-to-one of the 4-point patterns", _sum_to_one, GOLDEN_FLOOR))
        registry.register(IdentityCheck("IIA equals exact variance, n=2", _iia_exact(2), 1e-14))
        registry.register(IdentityCheck("IIA equals exact variance, n=3", _iia_exact(3), 1e-14))
        registry.register(IdentityCheck("Rice mean from pattern sums", _rice_mean, GOLDEN_FLOOR))
        registry.register(IdentityCheck("binomial degeneration at rho=0", _binomial_degeneration, 1e-13))
        registry.register(IdentityCheck("I dilogarithm form vs quadrature", _cheng_grid, CROSS_FORM_TOL))
        registry.register(IdentityCheck("J(h,h,x) equals I(h,x)", _j_reduces_to_i, CROSS_FORM_TOL))
        registry.register(IdentityCheck("J closed form at h=sqrt(3)/2", _special_j, CROSS_FORM_TOL))
        registry.register(IdentityCheck("separation maximum, positive side", _separation("positive", 0.763, 0.002, 0.001), 1.0))
        registry.register(IdentityCheck("separation maximum, negative side", _separation("negative", -0.897, 0.036, 0.004), 1.0))

        for rho in (0.5, -0.5):
            for pattern in ("1111", "1000", "0110", "1010"):
                registry.register(OracleCheck(f"QMC vs closed p_{pattern} at rho={rho:g}", _qmc_vs_closed(pattern, rho)))
        registry.register(OracleCheck("QMC vs inclusion-exclusion p_11111 at rho=0.5", _p11111_vs_qmc(0.5)))
        for rho in (0.5, -0.5):
            registry.register(OracleCheck(f"MC mean of S_4 at rho={rho:g}", _mc_moment(rho, "mean")))
            registry.register(OracleCheck(f"MC variance of S_4 at rho={rho:g}", _mc_moment(rho, "variance")))
        return registry


def run_verification(
    tol: float = 1e-12,
    fast: bool = False,
    seed: int = 0,
    golden: Optional[Dict[str, float]] = None,
) -> VerificationReport:
    """Run every check in the default registry."""
    ctx = VerifyContext(tol=tol, fast=fast, seed=seed)
    report = CheckRegistry.default_registry(golden).run(ctx)
    logger.info("verification %s", "passed" if report.passed else "failed")
    return report
