"""Screen patterns, fringe structure, and the binned NSIT comparison."""

import math

import numpy as np
import pytest

import temporalis as tp

DEFAULTS = tp.DoubleSlitParams(sigma=1.0, d=10.0, mass=1.0, t_prop=100.0, grid=(-60.0, 60.0, 2001))

# Bhattacharyya overlap of the 40-bin experiment-I and mixture distributions at
# the default parameters, computed once by independent adaptive quadrature
# (per-bin integrals of the closed-form densities).
GOLDEN_KAPPA = 0.8992442425890482


class TestPatterns:
    def test_every_experiment_normalizes(self):
        for experiment in tp.Experiment:
            pattern = tp.double_slit_pattern(DEFAULTS, experiment)
            assert abs(pattern.masses.sum() - 1.0) < 1e-6
            assert abs(sum(pattern.binned().values()) - 1.0) < 1e-6
            assert np.all(pattern.density >= -1e-15)

    def test_mixture_is_arithmetic_mean_of_single_slits(self):
        right = tp.double_slit_pattern(DEFAULTS, tp.Experiment.II)
        left = tp.double_slit_pattern(DEFAULTS, tp.Experiment.III)
        mixture = tp.double_slit_pattern(DEFAULTS, tp.Experiment.II_AND_III)
        assert np.max(np.abs(mixture.density - 0.5 * (right.density + left.density))) < 1e-12

    def test_weighted_mixture(self):
        right = tp.double_slit_pattern(DEFAULTS, tp.Experiment.II)
        left = tp.double_slit_pattern(DEFAULTS, tp.Experiment.III)
        mixture = tp.double_slit_pattern(DEFAULTS, tp.Experiment.II_AND_III, weight=0.3)
        assert np.max(np.abs(mixture.density - (0.3 * right.density + 0.7 * left.density))) < 1e-12

    def test_single_slit_patterns_mirror_each_other(self):
        right = tp.double_slit_pattern(DEFAULTS, tp.Experiment.II)
        left = tp.double_slit_pattern(DEFAULTS, tp.Experiment.III)
        assert np.max(np.abs(right.density - left.density[::-1])) < 1e-10

    def test_symmetric_patterns_are_even(self):
        for experiment in (tp.Experiment.I, tp.Experiment.II_AND_III):
            pattern = tp.double_slit_pattern(DEFAULTS, experiment)
            assert np.max(np.abs(pattern.density - pattern.density[::-1])) < 1e-10

    def test_no_propagation_and_distant_slits_show_no_interference(self):
        p = tp.DoubleSlitParams(sigma=1.0, d=20.0, mass=1.0, t_prop=0.0, grid=(-30.0, 30.0, 1201))
        both = tp.double_slit_pattern(p, tp.Experiment.I)
        mixture = tp.double_slit_pattern(p, tp.Experiment.II_AND_III)
        assert np.max(np.abs(both.density - mixture.density)) < 1e-10


class TestFringes:
    def test_experiment_one_shows_fringes(self):
        pattern = tp.double_slit_pattern(DEFAULTS, tp.Experiment.I)
        assert tp.count_local_maxima(pattern.density) >= 3

    def test_mixture_shows_none(self):
        pattern = tp.double_slit_pattern(DEFAULTS, tp.Experiment.II_AND_III)
        assert tp.count_local_maxima(pattern.density) <= 1

    def test_counting_ignores_noise_below_floor(self):
        values = np.concatenate([
            np.linspace(0.0, 1.0, 50),
            1.0 + 1e-12 * np.sin(np.arange(30)),  # flat top with sub-floor wiggles
            np.linspace(1.0, 0.0, 50),
        ])
        assert tp.count_local_maxima(values) == 1

    def test_counting_sees_real_peaks(self):
        x = np.linspace(0.0, 4.0 * math.pi, 400)
        assert tp.count_local_maxima(np.sin(x)) == 2


class TestNsit:
    def test_golden_kappa(self):
        report = tp.double_slit_nsit(DEFAULTS)
        assert abs(report.kappa - GOLDEN_KAPPA) < 1e-6
        assert report.max_abs_delta > 0.01
        assert report.violated

    def test_mixture_against_itself_is_clean(self):
        # identical inputs: kappa equals their common total mass (1 up to rounding)
        mixture = tp.double_slit_pattern(DEFAULTS, tp.Experiment.II_AND_III)
        report = tp.nsit_compare(mixture.binned(), mixture.binned())
        assert report.kappa > 1.0 - 1e-10
        assert report.max_abs_delta == 0.0 and not report.violated


class TestValidation:
    def test_rejects_even_grid(self):
        with pytest.raises(tp.InvariantViolationError, match="odd"):
            tp.DoubleSlitParams(sigma=1.0, d=1.0, mass=1.0, t_prop=0.0, grid=(-1.0, 1.0, 100))

    def test_rejects_nonpositive_sigma(self):
        with pytest.raises(tp.InvariantViolationError, match="sigma"):
            tp.DoubleSlitParams(sigma=0.0, d=1.0, mass=1.0, t_prop=0.0, grid=(-1.0, 1.0, 101))

    def test_coarse_grid_raises(self):
        p = tp.DoubleSlitParams(sigma=1.0, d=50.0, mass=1.0, t_prop=2.0, grid=(-20.0, 20.0, 201))
        with pytest.raises(tp.InvariantViolationError, match="grid too coarse"):
            tp.double_slit_pattern(p, tp.Experiment.I)

    def test_misaligned_bins_rejected(self):
        pattern = tp.double_slit_pattern(DEFAULTS, tp.Experiment.II)
        with pytest.raises(tp.InvariantViolationError, match="align"):
            pattern.binned(33)

    def test_rejects_bad_weight(self):
        with pytest.raises(tp.InvariantViolationError, match="weight"):
            tp.double_slit_pattern(DEFAULTS, tp.Experiment.II_AND_III, weight=1.5)
