"""Tests for sign_changes.iia module."""

import math

import numpy as np
import pytest

from sign_changes.errors import DomainError
from sign_changes.iia import (
    IIASequence, SeparationResult, iia_second_moment, iia_variance, model_curve,
    separation_search,
)
from sign_changes.moments import variance_exact

GRID = np.linspace(-0.99, 0.99, 199)


class TestRecursion:
    def test_c1_and_c2(self):
        seq = iia_second_moment(2, 0.3)
        assert seq.c(1) == 0.0
        assert seq.c(2) == pytest.approx(math.acos(0.3) / math.pi, abs=1e-15)

    def test_independent_values(self):
        seq = iia_second_moment(4, 0.0)
        assert seq.values == pytest.approx((0.0, 0.5, 1.5, 3.0), abs=1e-14)

    @pytest.mark.parametrize("n", range(1, 11))
    def test_binomial_second_moment(self, n):
        expected = (n - 1) / 4 + ((n - 1) / 2) ** 2
        assert iia_second_moment(n, 0.0).c(n) == pytest.approx(expected, abs=1e-12)

    def test_sequence_accessors(self):
        seq = iia_second_moment(5, -0.4, symmetrized=True)
        assert isinstance(seq, IIASequence)
        assert seq.n == 5
        assert seq.symmetrized
        assert seq.rho == -0.4
        with pytest.raises(DomainError):
            seq.c(6)

    def test_domain(self):
        with pytest.raises(DomainError):
            iia_second_moment(0, 0.5)
        with pytest.raises(DomainError):
            iia_second_moment(3, 1.0)


class TestModelVariance:
    @pytest.mark.parametrize("n", [2, 3])
    def test_exact_for_short_segments(self, n):
        for rho in GRID:
            assert abs(iia_variance(n, rho) - variance_exact(n, rho)) <= 1e-14

    def test_n4_close_but_not_equal(self):
        gap = abs(iia_variance(4, 0.5) - variance_exact(4, 0.5))
        assert 0.0 < gap < 0.002

    def test_symmetrized_is_even(self):
        for rho in GRID[GRID > 0]:
            assert iia_variance(4, rho, True) == pytest.approx(iia_variance(4, -rho, True), abs=1e-14)

    def test_literal_recursion_is_not_even(self):
        assert abs(iia_variance(4, 0.897) - iia_variance(4, -0.897)) > 0.03

    def test_model_curve(self):
        rhos = [-0.5, 0.0, 0.5]
        curve = model_curve(rhos)
        assert curve.shape == (3,)
        assert curve[1] == pytest.approx(0.75, abs=1e-14)
        assert curve[2] == iia_variance(4, 0.5)
        assert np.allclose(model_curve(rhos, symmetrized=True)[[0, 2]], curve[2])


class TestSeparationSearch:
    def test_positive_side(self):
        result = separation_search(4, "positive")
        assert isinstance(result, SeparationResult)
        assert result.rho_star == pytest.approx(0.763, abs=0.01)
        assert result.separation == pytest.approx(0.002, abs=0.001)
        assert result.refined

    def test_negative_side(self):
        result = separation_search(4, "negative")
        assert result.rho_star == pytest.approx(-0.897, abs=0.01)
        assert result.separation == pytest.approx(0.036, abs=0.004)

    def test_symmetrized_negative_side_mirrors_positive(self):
        positive = separation_search(4, "positive")
        mirrored = separation_search(4, "negative", symmetrized=True)
        assert mirrored.rho_star == pytest.approx(-positive.rho_star, abs=1e-3)
        assert mirrored.separation == pytest.approx(positive.separation, abs=1e-6)

    def test_refinement_not_worse_than_grid(self):
        result = separation_search(4, "positive")
        grid_value = abs(iia_variance(4, 0.763) - variance_exact(4, 0.763))
        assert result.separation >= grid_value - 1e-9

    def test_to_dict(self):
        d = separation_search(4, "positive").to_dict()
        assert d["side"] == "positive"
        assert d["grid_step"] == 1e-3

    @pytest.mark.parametrize("kwargs", [
        {"n": 5},
        {"side": "both"},
        {"grid_step": 0.01},
    ])
    def test_invalid_arguments(self, kwargs):
        with pytest.raises(DomainError):
            separation_search(**kwargs)
