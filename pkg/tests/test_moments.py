"""Tests for sign_changes.moments module."""

import math

import numpy as np
import pytest

from sign_changes.domain import EstimateStatus, Method, Rho, SignPattern
from sign_changes.errors import DomainError
from sign_changes.moments import (
    MomentReport, changes_distribution, mean_sign_changes, pattern_probability,
    variance_exact, variance_numeric,
)
from sign_changes.mvn import QMCConfig
from sign_changes.orthant import orthant3

V_S4_HALF = 0.7214075663610921033552384


class TestMeanSignChanges:
    @pytest.mark.parametrize("n", [2, 3, 5, 10])
    def test_independent(self, n):
        assert mean_sign_changes(n, 0.0) == pytest.approx((n - 1) / 2, abs=1e-15)

    def test_known_values(self):
        assert mean_sign_changes(4, 0.5) == pytest.approx(1.0, abs=1e-15)
        assert mean_sign_changes(2, -0.5) == pytest.approx(2 / 3, abs=1e-15)

    def test_rho_value_object(self):
        rho = Rho(0.5)
        assert float(rho) == 0.5
        assert mean_sign_changes(4, rho) == mean_sign_changes(4, 0.5)
        assert variance_exact(4, rho) == variance_exact(4, 0.5)
        assert Rho(-1 / 3).value == -1 / 3
        with pytest.raises(DomainError):
            Rho(1.0)
        with pytest.raises(DomainError):
            Rho(float("nan"))

    def test_domain(self):
        with pytest.raises(DomainError):
            mean_sign_changes(1, 0.5)
        with pytest.raises(DomainError):
            mean_sign_changes(3, -1.0)


class TestVarianceExact:
    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_independent(self, n):
        assert variance_exact(n, 0.0) == pytest.approx((n - 1) / 4, abs=1e-14)

    def test_published_value(self):
        assert abs(variance_exact(4, 0.5) - V_S4_HALF) <= 1e-12

    def test_two_points(self):
        assert variance_exact(2, 0.5) == pytest.approx(2 / 9, abs=1e-15)

    def test_three_points_from_orthants(self):
        for rho in np.linspace(-0.95, 0.95, 39):
            p100 = orthant3(-rho, -rho ** 2, rho)
            p010 = orthant3(-rho, rho ** 2, -rho)
            assembled = 4 * p100 + 8 * p010 - mean_sign_changes(3, rho) ** 2
            assert variance_exact(3, rho) == pytest.approx(assembled, abs=1e-13)

    def test_even_in_rho(self):
        for rho in (0.1, 0.45, 0.8, 0.97):
            assert variance_exact(4, -rho) == pytest.approx(variance_exact(4, rho), abs=1e-12)

    def test_larger_n_rejected(self):
        with pytest.raises(DomainError):
            variance_exact(5, 0.5)


class TestPatternProbability:
    def test_two_points(self):
        estimate = pattern_probability("10", 0.5)
        assert estimate.value == pytest.approx(1 / 6, abs=1e-15)
        assert estimate.method == Method.CLOSED_FORM
        assert estimate.error == 0.0

    def test_published_four_point_values(self):
        assert abs(pattern_probability("1010", 0.5).value - 0.0226893098357904842228499) <= 1e-12
        assert abs(pattern_probability("0110", 0.5).value - 0.0341139367935660863971512) <= 1e-12

    def test_five_points_use_qmc(self):
        estimate = pattern_probability("10101", 0.5, tol=1e-7)
        assert estimate.method == Method.QMC
        assert estimate.converged

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_sum_to_one(self, n):
        total = sum(pattern_probability(p, -0.3).value for p in SignPattern.all_patterns(n))
        assert total == pytest.approx(1.0, abs=1e-12)

    def test_sum_to_one_five_points(self):
        total = sum(
            pattern_probability(p, 0.6, tol=1e-7).value for p in SignPattern.all_patterns(5)
        )
        assert total == pytest.approx(1.0, abs=32 * 3e-7)


class TestVarianceNumeric:
    def test_matches_closed_form_n4(self):
        report = variance_numeric(4, 0.5)
        assert abs(report.variance - V_S4_HALF) <= 1e-9
        assert report.methods["variance"] == Method.CLOSED_FORM

    def test_binomial_five_points(self):
        report = variance_numeric(5, 0.0)
        assert report.mean == pytest.approx(2.0, abs=1e-12)
        assert report.variance == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("n", [6, 8, 10])
    def test_binomial_longer(self, n):
        report = variance_numeric(n, 0.0)
        assert report.mean == pytest.approx((n - 1) / 2, abs=1e-12)
        assert report.variance == pytest.approx((n - 1) / 4, abs=1e-12)

    @pytest.mark.parametrize("n", [
        2, 3, 4, 5,
        pytest.param(6, marks=pytest.mark.slow),
    ])
    @pytest.mark.parametrize("rho", [-0.9, -0.5, 0.0, 0.5, 0.9])
    def test_rice_mean(self, n, rho):
        report = variance_numeric(n, rho)
        assert report.status == EstimateStatus.CONVERGED
        allowed = max(1e-12, report.errors["mean"])
        assert abs(report.mean - mean_sign_changes(n, rho)) <= allowed

    def test_default_tolerance_converges(self):
        report = variance_numeric(5, 0.5)
        assert report.status == EstimateStatus.CONVERGED
        assert report.methods["mean"] == Method.QMC
        assert abs(report.mean - 4 / 3) <= max(1e-9, report.errors["mean"])
        assert report.evaluations <= 16 * QMCConfig().max_evaluations

    @pytest.mark.slow
    def test_five_points_at_tight_tolerance(self):
        report = variance_numeric(5, 0.5, tol=1e-10)
        assert report.status == EstimateStatus.CONVERGED
        assert abs(report.mean - 4 / 3) <= 1e-9

    def test_symmetric_in_rho(self):
        for rho in (0.3, 0.7):
            a = variance_numeric(4, rho)
            b = variance_numeric(4, -rho)
            assert a.variance == pytest.approx(b.variance, abs=1e-12)

    def test_report_invariants(self):
        report = variance_numeric(5, 0.5, tol=1e-7)
        assert report.variance == pytest.approx(report.second_moment - report.mean ** 2, abs=1e-14)
        assert report.variance >= 0
        assert report.evaluations > 0
        d = report.to_dict()
        assert d["methods"]["variance"] == "qmc"
        assert "variance" in report.summary()

    def test_range(self):
        with pytest.raises(DomainError):
            variance_numeric(11, 0.5)
        with pytest.raises(DomainError):
            variance_numeric(1, 0.5)


class TestChangesDistribution:
    def test_binomial(self):
        probabilities, errors = changes_distribution(3, 0.0)
        assert np.allclose(probabilities, [0.25, 0.5, 0.25], atol=1e-14)
        assert np.all(errors == 0)

    def test_moments_agree(self):
        probabilities, _ = changes_distribution(4, 0.5)
        k = np.arange(4)
        mean = float(k @ probabilities)
        var = float((k ** 2) @ probabilities) - mean ** 2
        assert mean == pytest.approx(1.0, abs=1e-12)
        assert var == pytest.approx(V_S4_HALF, abs=1e-12)

    def test_sums_to_one_five_points(self):
        probabilities, errors = changes_distribution(5, 0.5, tol=1e-7)
        assert probabilities.sum() == pytest.approx(1.0, abs=max(1e-6, 3 * errors.sum()))


class TestMomentReport:
    def test_summary_lists_methods(self):
        report = MomentReport(n=2, rho=0.0, mean=0.5, second_moment=0.5, variance=0.25)
        text = report.summary()
        assert "closed-form" in text
        assert math.isclose(report.to_dict()["variance"], 0.25)
