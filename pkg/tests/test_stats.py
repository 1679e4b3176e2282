"""Seeded sampling, the chi-square homogeneity test, and the overlap estimator."""

import math

import numpy as np
import pytest
import scipy.special
import scipy.stats

import temporalis as tp

UNIFORM = {1.0: 0.5, -1.0: 0.5}
CERTAIN = {1.0: 1.0, -1.0: 0.0}


class TestSample:
    def test_deterministic_distribution(self):
        counts = tp.sample(CERTAIN, 100, seed=5).counts
        assert counts == {1.0: 100, -1.0: 0}

    def test_identical_seeds_identical_counts(self):
        a = tp.sample(UNIFORM, 10000, seed=123)
        b = tp.sample(UNIFORM, 10000, seed=123)
        assert a.counts == b.counts

    def test_different_seeds_differ(self):
        a = tp.sample(UNIFORM, 10000, seed=1)
        b = tp.sample(UNIFORM, 10000, seed=2)
        assert a.counts != b.counts

    def test_binomial_bound_at_one_million(self):
        counts = tp.sample(UNIFORM, 10**6, seed=77).counts
        for label in UNIFORM:
            assert abs(counts[label] - 500000) <= 2500  # 5 standard deviations

    def test_three_outcome_distribution(self):
        dist = {0.0: 0.2, 1.0: 0.3, 2.0: 0.5}
        result = tp.sample(dist, 10**5, seed=11)
        assert result.n_total == 10**5
        for label, p in dist.items():
            sd = math.sqrt(p * (1 - p) * 10**5)
            assert abs(result.counts[label] - p * 10**5) <= 5 * sd

    def test_rejects_unnormalized(self):
        with pytest.raises(tp.InvariantViolationError, match="sums to"):
            tp.sample({1.0: 0.7, -1.0: 0.7}, 10, seed=0)

    def test_rejects_empty_draw(self):
        with pytest.raises(tp.InvariantViolationError, match="at least one"):
            tp.sample(UNIFORM, 0, seed=0)


class TestTwoSampleTest:
    def test_identical_counts(self):
        a = tp.SampleSet({1.0: 500, -1.0: 500})
        result = tp.two_sample_test(a, tp.SampleSet(dict(a.counts)))
        assert result.statistic == 0.0
        assert result.p_value == 1.0

    def test_certain_versus_uniform(self):
        a = tp.SampleSet({1.0: 1000, -1.0: 0})
        b = tp.SampleSet({1.0: 500, -1.0: 500})
        result = tp.two_sample_test(a, b)
        assert abs(result.statistic - 2000.0 / 3.0) < 1e-9
        assert result.dof == 1
        assert result.p_value < 1e-6

    def test_matches_scipy_contingency(self):
        rng = np.random.default_rng(8)
        for _ in range(50):
            counts_a = rng.integers(1, 400, size=3)
            counts_b = rng.integers(1, 400, size=3)
            a = tp.SampleSet(dict(zip((0.0, 1.0, 2.0), counts_a.tolist())))
            b = tp.SampleSet(dict(zip((0.0, 1.0, 2.0), counts_b.tolist())))
            result = tp.two_sample_test(a, b)
            table = np.array([counts_a, counts_b])
            expected = scipy.stats.chi2_contingency(table, correction=False)
            assert abs(result.statistic - expected.statistic) < 1e-8
            assert result.dof == expected.dof
            assert abs(result.p_value - expected.pvalue) < 1e-10

    def test_zero_pooled_category_dropped(self):
        a = tp.SampleSet({1.0: 600, -1.0: 400, 0.0: 0})
        b = tp.SampleSet({1.0: 300, -1.0: 700, 0.0: 0})
        result = tp.two_sample_test(a, b)
        assert result.dof == 1

    def test_label_mismatch(self):
        with pytest.raises(tp.InvariantViolationError, match="label mismatch"):
            tp.two_sample_test(tp.SampleSet({1.0: 5}), tp.SampleSet({2.0: 5}))

    def test_p_values_roughly_uniform_under_null(self):
        rejected = 0
        for trial in range(200):
            a = tp.sample(UNIFORM, 10**4, seed=9000 + 2 * trial)
            b = tp.sample(UNIFORM, 10**4, seed=9000 + 2 * trial + 1)
            if tp.two_sample_test(a, b).p_value < 0.05:
                rejected += 1
        assert 0.01 <= rejected / 200 <= 0.10


class TestKappaEstimate:
    def test_identical(self):
        a = tp.SampleSet({1.0: 123, -1.0: 877})
        assert abs(tp.kappa_estimate(a, tp.SampleSet(dict(a.counts))) - 1.0) < 1e-15

    def test_certain_versus_uniform_matches_analytic(self):
        a = tp.SampleSet({1.0: 1000, -1.0: 0})
        b = tp.SampleSet({1.0: 500, -1.0: 500})
        assert abs(tp.kappa_estimate(a, b) - math.sqrt(0.5)) < 1e-12

    def test_disjoint_supports(self):
        a = tp.SampleSet({1.0: 100, -1.0: 0})
        b = tp.SampleSet({1.0: 0, -1.0: 100})
        assert tp.kappa_estimate(a, b) == 0.0


class TestRegularizedGammaQ:
    def test_matches_scipy_to_1e10(self):
        shapes = (0.5, 1.0, 1.5, 2.5, 5.0, 17.0, 50.5, 120.0)
        xs = (0.0, 1e-8, 0.3, 1.0, 2.0, 7.5, 30.0, 120.0, 400.0)
        for a in shapes:
            for x in xs:
                mine = tp.regularized_gamma_q(a, x)
                ref = float(scipy.special.gammaincc(a, x))
                assert abs(mine - ref) <= 1e-10 * max(ref, 1e-300) + 1e-300, (a, x)

    def test_boundaries(self):
        assert tp.regularized_gamma_q(3.0, 0.0) == 1.0
        assert tp.regularized_gamma_q(0.5, 1e6) == 0.0

    def test_rejects_bad_arguments(self):
        with pytest.raises(tp.InvariantViolationError):
            tp.regularized_gamma_q(-1.0, 1.0)
        with pytest.raises(tp.InvariantViolationError):
            tp.regularized_gamma_q(1.0, -1.0)


class TestMonteCarloProperties:
    def test_kappa_estimator_consistency_at_max_violation(self):
        """kappa_hat lands within 0.02 of sqrt(1/2) in at least 95% of 500 trials."""
        target = math.sqrt(0.5)
        hits = 0
        for trial in range(500):
            a = tp.sample(CERTAIN, 10**4, seed=31000 + 2 * trial)
            b = tp.sample(UNIFORM, 10**4, seed=31000 + 2 * trial + 1)
            if abs(tp.kappa_estimate(a, b) - target) <= 0.02:
                hits += 1
        assert hits >= 475

    def test_power_at_max_violation(self):
        """p < 1e-6 in at least 99% of 500 trials at n = 10^4 per arm."""
        significant = 0
        for trial in range(500):
            a = tp.sample(CERTAIN, 10**4, seed=52000 + 2 * trial)
            b = tp.sample(UNIFORM, 10**4, seed=52000 + 2 * trial + 1)
            if tp.two_sample_test(a, b).p_value < 1e-6:
                significant += 1
        assert significant >= 495
        assert significant == 500  # observed rate frozen for this seed block
