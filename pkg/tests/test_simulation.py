"""
Simulation Tests
================
Preset models, censoring calibration and misclassification rates.
"""

import numpy as np
import pytest


@pytest.fixture
def presets():
    from config import load_simulation_presets
    return load_simulation_presets()


class TestPresets:
    """Tests for building model specs from the presets file"""

    def test_model_two(self, presets):
        """Test model 2 has coefficients (12, -15, 0) on 250 uniform rows"""
        from models import CovariateLaw
        from simulation import spec_from_preset

        spec = spec_from_preset(presets, '2')
        assert spec.n == 250
        assert spec.p == 3
        assert spec.coefficients == (12.0, -15.0, 0.0)
        assert spec.covariate_law is CovariateLaw.UNIFORM
        assert spec.censoring_rate == 0.5

    def test_padding_extra_covariates(self, presets):
        """Test a larger p adds zero-coefficient noise covariates"""
        from simulation import spec_from_preset

        spec = spec_from_preset(presets, '1b', p=5)
        assert spec.coefficients == (12.0, -15.0, -5.0, 0.0, 0.0)
        assert spec.planted_box.lower.tolist() == [0.7, 0.0, 0.0, 0.0, 0.0]
        assert spec.planted_box.upper.tolist() == [1.0, 0.2, 0.4, 1.0, 1.0]

    def test_rejects_unknown_model_and_small_p(self, presets):
        """Test unknown ids and too few covariates are configuration errors"""
        from models import ConfigError
        from simulation import spec_from_preset

        with pytest.raises(ConfigError):
            spec_from_preset(presets, '9')
        with pytest.raises(ConfigError):
            spec_from_preset(presets, '2', p=2)

    def test_overrides(self, presets):
        """Test n, censoring rate and seed overrides"""
        from simulation import spec_from_preset

        spec = spec_from_preset(presets, '3', n=40, censoring_rate=0.2, seed=9)
        assert (spec.n, spec.censoring_rate, spec.seed) == (40, 0.2, 9)


class TestCalibration:
    """Tests for the censoring bound"""

    def test_unit_hazard(self):
        """Test unit hazard with target 0.5 gives v close to 1.594"""
        from simulation import calibrate_censoring, censoring_probability

        bound = calibrate_censoring(np.ones(10), 0.5)
        assert bound == pytest.approx(1.5936, abs=1e-3)
        assert censoring_probability(np.ones(10), bound) == pytest.approx(0.5, abs=1e-5)

    def test_wide_hazard_range(self):
        """Test calibration holds across hazards spanning many orders of magnitude"""
        from simulation import calibrate_censoring, censoring_probability

        hazards = np.exp(np.linspace(-15, 12, 50))
        bound = calibrate_censoring(hazards, 0.3)
        assert censoring_probability(hazards, bound) == pytest.approx(0.3, abs=1e-4)

    def test_invalid_targets(self):
        """Test out-of-range rates and bad hazards fail calibration"""
        from models import CalibrationFailure
        from simulation import calibrate_censoring

        with pytest.raises(CalibrationFailure):
            calibrate_censoring(np.ones(3), 1.0)
        with pytest.raises(CalibrationFailure):
            calibrate_censoring(np.array([1.0, -1.0]), 0.5)


class TestGenerate:
    """Tests for dataset generation"""

    def test_censoring_fraction(self, presets):
        """Test the realised censored fraction is near the target"""
        from simulation import generate, spec_from_preset

        data, truth = generate(spec_from_preset(presets, '2', n=2000, seed=3))
        assert 1.0 - data.n_events / data.n == pytest.approx(0.5, abs=0.04)
        assert np.isfinite(truth.censoring_bound)

    def test_observed_times(self, presets):
        """Test observed times are the minimum of event and censoring times"""
        from simulation import generate, spec_from_preset

        data, truth = generate(spec_from_preset(presets, '1', seed=4))
        np.testing.assert_array_equal(data.times, np.minimum(truth.true_times, truth.censor_times))
        np.testing.assert_array_equal(data.events.astype(bool), truth.true_times <= truth.censor_times)
        assert np.all(truth.censor_times <= truth.censoring_bound)

    def test_no_censoring(self, presets):
        """Test a zero censoring rate leaves every event observed"""
        from simulation import generate, spec_from_preset

        data, truth = generate(spec_from_preset(presets, '2', censoring_rate=0.0, seed=5))
        assert data.n_events == data.n
        assert truth.censoring_bound == float('inf')
        np.testing.assert_array_equal(data.times, truth.true_times)

    def test_null_model_event_times_are_unit_exponential(self, presets):
        """Test model 3 event times pass a Kolmogorov-Smirnov test against Exp(1)"""
        from scipy import stats
        from simulation import generate, spec_from_preset

        _, truth = generate(spec_from_preset(presets, '3', n=1000, seed=11))
        assert stats.kstest(truth.true_times, 'expon').pvalue > 0.001

    def test_reproducible(self, presets):
        """Test the same spec and seed give bit-identical data"""
        from simulation import generate, spec_from_preset

        first, _ = generate(spec_from_preset(presets, '2', seed=6))
        second, _ = generate(spec_from_preset(presets, '2', seed=6))
        other, _ = generate(spec_from_preset(presets, '2', seed=7))
        assert np.array_equal(first.times, second.times)
        assert np.array_equal(first.covariates, second.covariates)
        assert not np.array_equal(first.times, other.times)

    def test_linear_predictor(self, presets):
        """Test the linear predictor is X times the coefficients"""
        from simulation import generate, spec_from_preset

        data, truth = generate(spec_from_preset(presets, '2', seed=8))
        np.testing.assert_allclose(truth.linear_predictor, data.covariates @ np.array([12.0, -15.0, 0.0]))
        assert np.all((data.covariates >= 0) & (data.covariates <= 1))

    def test_planted_region(self, presets):
        """Test rows outside the planted box get a U(0, 1) linear predictor"""
        from simulation import generate, spec_from_preset

        spec = spec_from_preset(presets, '1b', seed=9)
        data, truth = generate(spec)
        inside = truth.planted_membership
        assert np.array_equal(inside, spec.planted_box.contains(data.covariates))
        outside = truth.linear_predictor[~inside]
        assert np.all((outside >= 0) & (outside <= 1))
        np.testing.assert_allclose(
            truth.linear_predictor[inside], data.covariates[inside] @ np.array([12.0, -15.0, -5.0])
        )

    def test_high_dimensional_model(self, presets):
        """Test model 4 draws 100 nonzero coefficients and flags the default sigma"""
        from simulation import generate, spec_from_preset

        data, truth = generate(spec_from_preset(presets, '4', seed=10))
        assert data.covariates.shape == (100, 1000)
        assert truth.coefficients_drawn
        assert truth.sigma_defaulted
        assert np.count_nonzero(truth.coefficients[:100]) == 100
        assert np.all(truth.coefficients[100:] == 0)
        assert np.all(np.abs(truth.coefficients) <= 1)

    def test_covariate_sigma(self, presets):
        """Test an explicit sigma clears the defaulted flag"""
        from simulation import generate, spec_from_preset

        _, truth = generate(spec_from_preset(presets, '4', n=20, p=120, sigma=2.0))
        assert not truth.sigma_defaulted


class TestMisclassification:
    """Tests for membership disagreement rates"""

    def test_examples(self):
        """Test hand-computed rates"""
        from simulation import misclassification_rate

        assert misclassification_rate([1, 1, 0, 0], [1, 0, 0, 1]) == 0.5
        assert misclassification_rate([1, 0], [1, 0]) == 0.0
        assert misclassification_rate([], []) == 0.0

    def test_shape_mismatch(self):
        """Test memberships of different length are rejected"""
        from simulation import misclassification_rate

        with pytest.raises(ValueError):
            misclassification_rate([1, 0, 1], [1, 0])
