"""Tests for sign_changes.mc module."""

import math

import numpy as np
import pytest
from scipy import stats

from sign_changes.errors import DomainError
from sign_changes.mc import SimConfig, SimResult, _histogram_moments, simulate
from sign_changes.moments import variance_exact

V_S4_HALF = 0.7214075663610921033552384


class TestSimConfig:
    def test_defaults(self):
        cfg = SimConfig(n=4, rho=0.5, paths=100)
        assert cfg.seed == 0
        assert cfg.block_size == 2 ** 16
        assert cfg.workers == 1

    @pytest.mark.parametrize("kwargs", [
        {"n": 1, "rho": 0.5, "paths": 10},
        {"n": 4, "rho": 1.0, "paths": 10},
        {"n": 4, "rho": 0.5, "paths": 0},
        {"n": 4, "rho": 0.5, "paths": 10, "workers": 0},
    ])
    def test_invalid(self, kwargs):
        with pytest.raises(DomainError):
            SimConfig(**kwargs)


class TestHistogramMoments:
    def test_known_histogram(self):
        mean, var, se_mean, se_var = _histogram_moments(np.array([1, 2, 1]))
        assert mean == pytest.approx(1.0)
        assert var == pytest.approx(2.0 / 3.0)
        assert se_mean == pytest.approx(math.sqrt(var / 4))
        # central moments m2 = 1/2, m4 = 1/2
        assert se_var == pytest.approx(math.sqrt((0.5 - 0.25) / 4))

    def test_single_path(self):
        mean, var, se_mean, se_var = _histogram_moments(np.array([0, 1]))
        assert mean == 1.0
        assert var == 0.0


class TestSimulate:
    def test_result_shape(self):
        result = simulate(SimConfig(n=5, rho=0.3, paths=1000, seed=1))
        assert isinstance(result, SimResult)
        assert result.histogram.shape == (5,)
        assert result.histogram.sum() == 1000
        assert result.var_hat >= 0
        assert result.distribution().sum() == pytest.approx(1.0)

    def test_deterministic(self):
        cfg = SimConfig(n=4, rho=0.5, paths=200_000, seed=42)
        a, b = simulate(cfg), simulate(cfg)
        assert np.array_equal(a.histogram, b.histogram)
        assert a.mean_hat == b.mean_hat

    def test_independent_of_workers(self):
        serial = simulate(SimConfig(n=4, rho=0.5, paths=300_000, seed=9, block_size=50_000))
        parallel = simulate(SimConfig(n=4, rho=0.5, paths=300_000, seed=9, block_size=50_000, workers=3))
        assert np.array_equal(serial.histogram, parallel.histogram)

    def test_partial_last_block(self):
        result = simulate(SimConfig(n=3, rho=0.0, paths=1001, seed=3, block_size=100))
        assert result.histogram.sum() == 1001
        assert result.metadata["blocks"] == 11

    def test_fair_coin(self):
        result = simulate(SimConfig(n=2, rho=0.0, paths=500_000, seed=5))
        assert abs(result.mean_hat - 0.5) <= 4 * result.se_mean

    def test_four_points_half(self):
        result = simulate(SimConfig(n=4, rho=0.5, paths=1_000_000, seed=7))
        assert abs(result.mean_hat - 1.0) <= 4 * result.se_mean
        assert abs(result.var_hat - V_S4_HALF) <= 4 * result.se_var

    def test_negative_rho(self):
        result = simulate(SimConfig(n=4, rho=-0.5, paths=1_000_000, seed=8))
        assert abs(result.mean_hat - 2.0) <= 4 * result.se_mean
        assert abs(result.var_hat - variance_exact(4, -0.5)) <= 4 * result.se_var

    @pytest.mark.slow
    @pytest.mark.parametrize("rho,seed", [(0.5, 7), (-0.5, 8)])
    def test_ten_million_paths(self, rho, seed):
        result = simulate(SimConfig(n=4, rho=rho, paths=10 ** 7, seed=seed, workers=4))
        assert abs(result.mean_hat - 3 * math.acos(rho) / math.pi) <= 4 * result.se_mean
        assert abs(result.var_hat - variance_exact(4, rho)) <= 4 * result.se_var
        assert result.se_var < 5e-4

    def test_binomial_histogram(self):
        n = 5
        result = simulate(SimConfig(n=n, rho=0.0, paths=1_000_000, seed=11))
        expected = stats.binom.pmf(np.arange(n), n - 1, 0.5) * result.config.paths
        _, p_value = stats.chisquare(result.histogram, expected)
        assert p_value > 1e-6

    def test_standard_error_scaling(self):
        small = simulate(SimConfig(n=4, rho=0.5, paths=200_000, seed=21))
        large = simulate(SimConfig(n=4, rho=0.5, paths=400_000, seed=21))
        ratio = large.se_mean / small.se_mean
        assert 1 / math.sqrt(2) - 0.1 <= ratio <= 1 / math.sqrt(2) + 0.1

    def test_to_dict_and_summary(self):
        result = simulate(SimConfig(n=3, rho=0.2, paths=500, seed=0))
        d = result.to_dict()
        assert d["paths"] == 500
        assert sum(d["histogram"]) == 500
        assert "variance" in result.summary()
