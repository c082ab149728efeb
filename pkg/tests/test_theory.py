"""Tests for the risk-bound calculators and the offset Rademacher estimator."""

import math

import numpy as np
import pytest

import ivtskit as iv
from ivtskit.theory import RiskBoundInputs


def make_inputs(**overrides):
    base = dict(ell=1.0, c_A=1.0, c_B=1.0, c_Z=1.0, n=100, log_covering=10.0, varrho=0.125)
    base.update(overrides)
    return RiskBoundInputs(**base)


class TestLipschitzConstants:
    def test_stated_values(self):
        assert iv.lipschitz_constant("hinge") == 1.0
        assert iv.lipschitz_constant("squared_hinge") == 2.0
        assert iv.lipschitz_constant("exponential") == 1.0

    def test_unknown(self):
        with pytest.raises(ValueError):
            iv.lipschitz_constant("huber")


class TestGBounds:
    def test_worked_example(self):
        assert iv.g_bounds(1.0, 2.0, 3.0, 1.0) == (14.0, 28.0)

    def test_unit_caps(self):
        assert iv.g_bounds(1.0, 1.0, 1.0, 1.0) == (4.0, 8.0)

    def test_linear_in_ell(self):
        single, pair = iv.g_bounds(1.0, 1.5, 0.5, 2.0)
        single2, pair2 = iv.g_bounds(2.0, 1.5, 0.5, 2.0)
        assert (single2, pair2) == (2 * single, 2 * pair)

    def test_pair_is_twice_single(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            ell, ca, cz, cb = rng.uniform(0.1, 3.0, size=4)
            single, pair = iv.g_bounds(ell, ca, cz, cb)
            assert pair == 2.0 * single

    def test_positivity_required(self):
        with pytest.raises(ValueError):
            iv.g_bounds(0.0, 1.0, 1.0, 1.0)


class TestOffsetBound:
    def test_hand_value(self):
        # (1 + 10) / (2 * (1/8) * 100) + 8 * (1 + (1/8) * 8) = 0.44 + 16
        assert iv.offset_rademacher_bound(make_inputs()) == pytest.approx(16.44, abs=1e-12)

    def test_large_n_limit(self):
        bound = iv.offset_rademacher_bound(make_inputs(log_covering=0.0, n=10**12))
        assert bound == pytest.approx(16.0, abs=1e-9)

    def test_doubling_n_halves_first_term(self):
        second_term = 8.0 * (1.0 + 0.125 * 8.0)
        b1 = iv.offset_rademacher_bound(make_inputs(n=100))
        b2 = iv.offset_rademacher_bound(make_inputs(n=200))
        assert (b1 - second_term) == pytest.approx(2.0 * (b2 - second_term), rel=1e-15)

    def test_unique_interior_minimum_in_varrho(self):
        grid = np.logspace(-4, 1, 61)
        values = [
            iv.offset_rademacher_bound(make_inputs(varrho=float(v))) for v in grid
        ]
        best = int(np.argmin(values))
        assert 0 < best < len(grid) - 1
        diffs = np.sign(np.diff(values))
        # strictly decreasing then strictly increasing
        switch = np.where(diffs > 0)[0]
        assert switch.size > 0
        first_up = switch[0]
        assert (diffs[:first_up] < 0).all()
        assert (diffs[first_up:] > 0).all()

    def test_validation(self):
        with pytest.raises(ValueError):
            make_inputs(n=0)
        with pytest.raises(ValueError):
            make_inputs(log_covering=-1.0)
        with pytest.raises(ValueError):
            make_inputs(varrho=0.0)


class TestExcessRiskBound:
    def test_hand_value(self):
        got = iv.excess_risk_bound(1.0, 1.0, 1.0, 1.0, 100, 10.0)
        assert got == pytest.approx(65.76, abs=1e-9)

    def test_fixed_varrho(self):
        assert iv.optimal_varrho(1.0, 1.0, 1.0, 1.0) == 0.125
        assert iv.optimal_varrho(2.0, 1.0, 1.0, 1.0) == 0.0625

    def test_monotone_in_n(self):
        values = [
            iv.excess_risk_bound(1.0, 1.0, 1.0, 1.0, n, 10.0)
            for n in (1, 10, 100, 1000, 10**6)
        ]
        assert all(a >= b for a, b in zip(values, values[1:]))

    def test_monotone_in_log_covering(self):
        values = [
            iv.excess_risk_bound(1.0, 1.0, 1.0, 1.0, 100, c)
            for c in (0.0, 1.0, 5.0, 25.0, 125.0)
        ]
        assert all(a <= b for a, b in zip(values, values[1:]))


class TestHeuristicCovering:
    def test_positive_and_growing_in_p(self):
        a = iv.heuristic_log_covering(3, 10, 1.0, 1.0, 0.1)
        b = iv.heuristic_log_covering(3, 20, 1.0, 1.0, 0.1)
        assert 0.0 < a < b

    def test_matches_formula(self):
        got = iv.heuristic_log_covering(2, 4, 1.0, 2.0, 0.5)
        assert got == pytest.approx(2 * 5 * math.log1p(16.0))


class TestEmpiricalOffsetRademacher:
    def test_degenerate_class_is_exactly_zero(self):
        rng = np.random.default_rng(1)
        X = rng.standard_normal((10, 3))
        est = iv.empirical_offset_rademacher(X, 0.0, 0.0, varrho=1.0, mc_draws=16)
        assert est.value == 0.0

    def test_nonnegative_by_construction(self):
        rng = np.random.default_rng(2)
        X = rng.standard_normal((12, 4))
        est = iv.empirical_offset_rademacher(X, 0.5, 0.5, varrho=0.7, mc_draws=32)
        assert est.value >= 0.0

    def test_single_point_closed_form(self):
        # n=1, ||z||=1, c_A=1, c_B=0, varrho=1: each draw's supremum is
        # max_{s in [-1,1]} s - s^2 = 1/4 regardless of the sign.
        z = np.zeros((1, 3))
        z[0, 0] = 1.0
        est = iv.empirical_offset_rademacher(z, 1.0, 0.0, varrho=1.0, mc_draws=256)
        assert est.value == pytest.approx(0.25, abs=0.05)
        assert est.mc_draws == 256

    def test_bias_only_grid_oracle(self):
        # all-zero features reduce the class to f = b; the per-draw supremum
        # is max_{|b| <= c_B} mean(tau) b - varrho b^2, found by grid search.
        n, c_B, varrho, seed, draws = 5, 1.0, 0.5, 3, 64
        X = np.zeros((n, 2))
        est = iv.empirical_offset_rademacher(
            X, 1.0, c_B, varrho=varrho, mc_draws=draws, seed=seed
        )
        grid = np.linspace(-c_B, c_B, 20001)
        oracle_values = []
        for i in range(draws):
            rng = np.random.default_rng([seed, i])
            tau = rng.integers(0, 2, size=n) * 2.0 - 1.0
            s = tau.mean()
            oracle_values.append(float(np.max(s * grid - varrho * grid**2)))
        assert est.value == pytest.approx(float(np.mean(oracle_values)), abs=1e-6)

    def test_thread_count_does_not_change_value(self):
        rng = np.random.default_rng(4)
        X = rng.standard_normal((20, 5))
        one = iv.empirical_offset_rademacher(X, 1.0, 1.0, 0.5, mc_draws=32, threads=1)
        four = iv.empirical_offset_rademacher(X, 1.0, 1.0, 0.5, mc_draws=32, threads=4)
        assert one.value == four.value

    def test_deterministic_under_seed(self):
        rng = np.random.default_rng(5)
        X = rng.standard_normal((8, 3))
        a = iv.empirical_offset_rademacher(X, 1.0, 0.5, 0.25, mc_draws=16, seed=7)
        b = iv.empirical_offset_rademacher(X, 1.0, 0.5, 0.25, mc_draws=16, seed=7)
        assert a.value == b.value

    def test_validation(self):
        with pytest.raises(ValueError):
            iv.empirical_offset_rademacher(np.zeros((2, 2)), 1.0, 1.0, 0.0)
        with pytest.raises(ValueError):
            iv.empirical_offset_rademacher(np.zeros((0, 2)), 1.0, 1.0, 1.0)
        with pytest.raises(ValueError):
            iv.empirical_offset_rademacher(np.zeros((2, 2)), -1.0, 1.0, 1.0)


class TestBoundConsistencyWithClassifier:
    def test_surrogate_difference_never_exceeds_pair_bound(self):
        # ties the calculator to the classifier module: random in-cap
        # hinge-loss draws stay below 4 ell (c_A c_Z + c_B)
        from test_classify import random_capped_feature, random_in_cap_classifier

        rng = np.random.default_rng(6)
        _, pair = iv.g_bounds(1.0, 1.0, 1.0, 1.0)
        for _ in range(1000):
            f1 = random_in_cap_classifier(rng, 3, 4)
            f2 = random_in_cap_classifier(rng, 3, 4)
            z = random_capped_feature(rng, 4)
            y = int(rng.integers(1, 4))
            gap = abs(iv.max_loss(f1, z, y, "hinge") - iv.max_loss(f2, z, y, "hinge"))
            assert gap <= pair + 1e-12
