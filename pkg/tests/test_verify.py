"""Tests for sign_changes.verify module."""

import pytest

from sign_changes.domain import EstimateStatus, Method, ProbEstimate
from sign_changes.errors import DomainError
from sign_changes.verify import (
    GOLDEN_CONSTANTS, ORACLE_FLOOR, CheckRegistry, CheckResult, CheckStatus,
    IdentityCheck, OracleCheck, VerificationReport, VerifyContext, run_verification,
)


@pytest.fixture(scope="module")
def fast_report():
    return run_verification(fast=True, seed=1)


class TestVerifyContext:
    def test_golden_floor(self):
        assert VerifyContext(tol=1e-15).golden_tol == 1e-12
        assert VerifyContext(tol=1e-9).golden_tol == 1e-9

    def test_budgets(self):
        assert VerifyContext(fast=True).mc_paths < VerifyContext().mc_paths
        assert VerifyContext(fast=True).qmc_tol > VerifyContext().qmc_tol


class TestCheckRegistry:
    @pytest.fixture
    def registry(self):
        return CheckRegistry.default_registry()

    def test_golden_checks_registered(self, registry):
        names = registry.list_checks()
        for label in GOLDEN_CONSTANTS:
            assert f"golden {label}" in names

    def test_golden_constants_pass_at_tight_tol(self, registry):
        ctx = VerifyContext(tol=1e-15)
        for label in GOLDEN_CONSTANTS:
            result = registry.get(f"golden {label}").run(ctx)
            assert result.passed, result.message

    def test_corrupted_constant_fails(self):
        registry = CheckRegistry.default_registry(golden={"f(1/2,1/2)": 0.1576625817})
        result = registry.get("golden f(1/2,1/2)").run(VerifyContext())
        assert result.status == CheckStatus.FAILED
        assert result.deviation > 1e-12

    def test_errors_are_captured(self):
        def broken(ctx):
            raise DomainError("bad input")

        result = IdentityCheck("broken", broken, 1.0).run(VerifyContext())
        assert result.status == CheckStatus.ERROR
        assert "bad input" in result.message

    def test_unknown_check(self, registry):
        assert registry.get("no such check") is None


class TestOracleCheck:
    def test_non_converged_estimate_fails(self):
        stalled = ProbEstimate(0.25, 1e-9, Method.QMC, 2 ** 26, EstimateStatus.NOT_CONVERGED)
        check = OracleCheck("stalled", lambda ctx: (0.25, stalled, 1.0))
        result = check.run(VerifyContext())
        assert result.status == CheckStatus.FAILED
        assert "did not converge" in result.message

    def test_converged_estimate_compared(self):
        estimate = ProbEstimate(0.25 + 5e-10, 1e-11, Method.QMC, 2 ** 20)
        check = OracleCheck("close", lambda ctx: (0.25, estimate, 1e-9))
        assert check.run(VerifyContext()).passed

    def test_full_budgets(self):
        ctx = VerifyContext()
        assert ctx.qmc_tol == 1e-10
        assert ctx.mc_paths == 10 ** 7

    @pytest.mark.slow
    @pytest.mark.parametrize("pattern", ["1111", "1010"])
    def test_qmc_oracle_full_mode(self, pattern):
        registry = CheckRegistry.default_registry()
        result = registry.get(f"QMC vs closed p_{pattern} at rho=0.5").run(VerifyContext())
        assert result.passed, result.message
        assert result.tolerance == pytest.approx(ORACLE_FLOOR)
        assert result.deviation <= 1e-9

    @pytest.mark.slow
    def test_p11111_oracle_full_mode(self):
        registry = CheckRegistry.default_registry()
        result = registry.get("QMC vs inclusion-exclusion p_11111 at rho=0.5").run(VerifyContext())
        assert result.passed, result.message
        assert result.deviation <= 1e-9


class TestVerificationReport:
    def test_first_failure(self):
        report = VerificationReport(results=[
            CheckResult("a", "identity", CheckStatus.PASSED),
            CheckResult("b", "oracle", CheckStatus.FAILED, deviation=1.0, tolerance=0.1, message="off"),
        ])
        assert not report.passed
        assert report.first_failure.name == "b"
        assert "First failure: b" in report.summary()
        assert report.to_dict()["passed"] is False

    def test_fast_run_passes(self, fast_report):
        assert fast_report.passed, fast_report.summary()

    def test_fast_run_covers_all_groups(self, fast_report):
        groups = {r.group for r in fast_report.results}
        assert groups == {"golden", "appendix", "identity", "oracle"}
