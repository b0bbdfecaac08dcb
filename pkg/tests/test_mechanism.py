import math

import numpy as np
import pytest

from mmse_bounds import (
    ConditionalLaw,
    DomainError,
    MechanismConfig,
    Scenario,
    apply_mechanism,
    derivative_l1_norms,
    eta_derivative,
    eta_sigma,
    kernel_derivative,
    lambdas,
    out_of_range_prob,
    post_processed_law,
    q_function,
    sample_raw,
    smoothed_density_derivative,
    theta_derivative,
    theta_sigma,
    uniform_law,
)
from mmse_bounds.mechanism import DegenerateSampleError

from conftest import randomize_config, rng_for, truncate_config

# Frozen: quadrature of the three derivative L1 norms for the equal-prior
# +/-1 point-mass scenario under truncation at sigma = 10, r = 2, computed
# independently over the +/-(r + 12 sigma) window.
ETA_NORMS_SIGMA10 = (1.6793, 0.0141002, 2.08844e-4)


class TestConfig:
    def test_validation(self):
        with pytest.raises(DomainError):
            MechanismConfig(sigma=0.0, r=2.0, mode="truncate")
        with pytest.raises(DomainError):
            MechanismConfig(sigma=1.0, r=-1.0, mode="truncate")
        with pytest.raises(DomainError):
            MechanismConfig(sigma=1.0, r=2.0, mode="clip")


class TestApplyMechanism:
    def test_truncate_keeps_only_in_range(self, symmetric_scenario):
        raw = sample_raw(symmetric_scenario, 5000, seed=3)
        post = apply_mechanism(raw, truncate_config(2.0), seed=4)
        assert len(post) < len(raw)
        assert np.all(np.abs(post.x) <= 2.0)
        assert set(np.unique(post.y)) <= {-1.0, 1.0}

    def test_randomize_preserves_count_and_range(self, symmetric_scenario):
        raw = sample_raw(symmetric_scenario, 5000, seed=3)
        post = apply_mechanism(raw, randomize_config(2.0), seed=4)
        assert len(post) == len(raw)
        assert np.all(np.abs(post.x) <= 2.0)
        np.testing.assert_array_equal(post.y, raw.y)

    def test_deterministic_in_seed(self, symmetric_scenario):
        raw = sample_raw(symmetric_scenario, 1000, seed=3)
        a = apply_mechanism(raw, randomize_config(5.0), seed=9)
        b = apply_mechanism(raw, randomize_config(5.0), seed=9)
        np.testing.assert_array_equal(a.x, b.x)

    def test_truncate_can_exhaust_sample(self):
        scenario = Scenario(
            prior_p=0.5,
            law_plus=ConditionalLaw.point_mass(1.0),
            law_minus=ConditionalLaw.point_mass(-1.0),
        )
        raw = sample_raw(scenario, 3, seed=0)
        # huge noise, tiny window: every point lands outside almost surely
        with pytest.raises(DegenerateSampleError):
            apply_mechanism(raw, MechanismConfig(sigma=1e6, r=1e-9, mode="truncate"), seed=1)


class TestOutOfRange:
    def test_point_mass_closed_form(self, symmetric_scenario):
        sigma, r = 3.0, 2.0
        qp, qm = out_of_range_prob(symmetric_scenario, truncate_config(sigma))
        expected = q_function((r - 1.0) / sigma) + q_function((r + 1.0) / sigma)
        assert qp == pytest.approx(expected, rel=1e-12)
        assert qm == pytest.approx(expected, rel=1e-12)  # symmetric

    def test_monte_carlo_agreement(self, skewed_scenario):
        sigma, r = 1.5, 2.0
        qp, qm = out_of_range_prob(skewed_scenario, truncate_config(sigma))
        rng = rng_for(77)
        n = 200_000
        noisy_p = 0.7 + sigma * rng.standard_normal(n)
        noisy_m = -0.4 + sigma * rng.standard_normal(n)
        assert (np.abs(noisy_p) > r).mean() == pytest.approx(qp, abs=0.005)
        assert (np.abs(noisy_m) > r).mean() == pytest.approx(qm, abs=0.005)

    def test_density_law_against_mixture_quadrature(self):
        scenario = Scenario(
            prior_p=0.5,
            law_plus=uniform_law(0.1, 0.9),
            law_minus=uniform_law(-0.9, -0.1),
        )
        sigma, r = 2.0, 2.0
        qp, _ = out_of_range_prob(scenario, truncate_config(sigma))
        # independent: average the point-mass tail formula over the uniform law
        from scipy.integrate import quad

        def tail(m):
            return q_function((r - m) / sigma) + q_function((r + m) / sigma)

        expected = quad(lambda m: tail(m) / 0.8, 0.1, 0.9)[0]
        assert qp == pytest.approx(expected, rel=1e-8)


class TestLambdas:
    def test_truncate_is_prior_over_retention(self, skewed_scenario):
        config = truncate_config(1.5)
        qp, qm = out_of_range_prob(skewed_scenario, config)
        lp, lm = lambdas(skewed_scenario, config)
        assert lp == pytest.approx(0.3 / (1.0 - qp), rel=1e-12)
        assert lm == pytest.approx(0.7 / (1.0 - qm), rel=1e-12)

    def test_randomize_is_escape_density(self, skewed_scenario):
        config = randomize_config(1.5)
        qp, qm = out_of_range_prob(skewed_scenario, config)
        lp, lm = lambdas(skewed_scenario, config)
        assert lp == pytest.approx(qp / 4.0, rel=1e-12)  # 2r = 4
        assert lm == pytest.approx(qm / 4.0, rel=1e-12)

    def test_randomize_lambda_tends_to_uniform_level(self, symmetric_scenario):
        # escaping is certain as sigma grows, so lambda -> 1/(2r) at rate 1/sigma
        lp, _ = lambdas(symmetric_scenario, randomize_config(5000.0))
        assert lp == pytest.approx(1.0 / 4.0, rel=1e-3)


class TestSmoothedDensity:
    def test_point_mass_is_shifted_kernel(self):
        law = ConditionalLaw.point_mass(0.4)
        for order in (0, 1, 2, 3):
            for x in (-1.0, 0.0, 0.4, 2.2):
                direct = kernel_derivative(order, 1.3, x - 0.4)
                smoothed = smoothed_density_derivative(law, 1.3, order, x)
                assert smoothed == pytest.approx(direct, rel=1e-12)

    def test_density_law_matches_manual_convolution(self):
        law = uniform_law(-0.5, 0.5)
        from scipy.integrate import quad

        sigma, x = 0.8, 0.3
        for order in (0, 1, 2):
            expected = quad(
                lambda t: kernel_derivative(order, sigma, x - t), -0.5, 0.5
            )[0]
            got = smoothed_density_derivative(law, sigma, order, x)
            assert got == pytest.approx(expected, rel=1e-8)

    def test_smoothed_density_integrates_to_one(self):
        law = uniform_law(-0.4, 0.8)
        from scipy.integrate import quad

        total = quad(
            lambda x: smoothed_density_derivative(law, 0.7, 0, x), -10, 10, limit=200
        )[0]
        assert total == pytest.approx(1.0, abs=1e-8)


def _fd(fn, x: float, h: float) -> float:
    """Richardson-extrapolated central difference."""
    coarse = (fn(x + h) - fn(x - h)) / (2 * h)
    fine = (fn(x + h / 2) - fn(x - h / 2)) / h
    return (4.0 * fine - coarse) / 3.0


class TestTargetFunctions:
    def test_eta_is_odd_for_symmetric_scenario(self, symmetric_scenario):
        law = post_processed_law(symmetric_scenario, truncate_config(1.5))
        for x in (0.3, 0.9, 1.7):
            assert eta_sigma(law, x) == pytest.approx(-eta_sigma(law, -x), abs=1e-12)
        assert eta_sigma(law, 0.0) == pytest.approx(0.0, abs=1e-12)

    def test_theta_is_odd_for_symmetric_scenario(self, symmetric_scenario):
        law = post_processed_law(symmetric_scenario, randomize_config(1.5))
        for x in (0.3, 0.9, 1.7):
            assert theta_sigma(law, x) == pytest.approx(-theta_sigma(law, -x), abs=1e-12)

    def test_eta_bounded_by_one(self, skewed_scenario):
        law = post_processed_law(skewed_scenario, truncate_config(0.9))
        for x in np.linspace(-1.9, 1.9, 21):
            assert abs(eta_sigma(law, float(x))) <= 1.0

    def test_eta_derivatives_match_finite_differences(self, skewed_scenario):
        law = post_processed_law(skewed_scenario, truncate_config(1.1))
        for order in (1, 2, 3):
            for x in (-1.2, -0.3, 0.4, 1.5):
                fd = _fd(lambda t: eta_derivative(law, order - 1, t), x, 1e-3)
                closed = eta_derivative(law, order, x)
                assert closed == pytest.approx(fd, rel=1e-6, abs=1e-9)

    def test_theta_derivatives_match_finite_differences(self, skewed_scenario):
        law = post_processed_law(skewed_scenario, randomize_config(1.1))
        for order in (1, 2, 3):
            for x in (-1.2, -0.3, 0.4, 1.5):
                fd = _fd(lambda t: theta_derivative(law, order - 1, t), x, 1e-3)
                closed = theta_derivative(law, order, x)
                assert closed == pytest.approx(fd, rel=1e-6, abs=1e-9)

    def test_third_derivative_asymmetric_stress(self):
        # strongly asymmetric weights make the cross terms in the third
        # derivative matter; a symmetric scenario would mask sign errors
        scenario = Scenario(
            prior_p=0.15,
            law_plus=ConditionalLaw.point_mass(0.9),
            law_minus=uniform_law(-0.8, -0.1),
        )
        law = post_processed_law(scenario, truncate_config(0.8))
        for x in (-0.7, 0.2, 1.0):
            fd = _fd(lambda t: eta_derivative(law, 2, t), x, 1e-3)
            closed = eta_derivative(law, 3, x)
            assert closed == pytest.approx(fd, rel=1e-5, abs=1e-8)

    def test_order_validation(self, symmetric_scenario):
        law = post_processed_law(symmetric_scenario, truncate_config(1.0))
        with pytest.raises(DomainError):
            eta_derivative(law, 4, 0.0)


class TestDerivativeNorms:
    def test_frozen_norms_symmetric_sigma10(self, symmetric_scenario):
        norms = derivative_l1_norms("eta", symmetric_scenario, truncate_config(10.0))
        for got, want in zip(norms, ETA_NORMS_SIGMA10):
            assert got == pytest.approx(want, rel=1e-3)

    def test_target_mode_pairing_enforced(self, symmetric_scenario):
        with pytest.raises(DomainError):
            derivative_l1_norms("eta", symmetric_scenario, randomize_config(10.0))
        with pytest.raises(DomainError):
            derivative_l1_norms("theta", symmetric_scenario, truncate_config(10.0))

    def test_norms_positive_and_finite(self, skewed_scenario):
        norms = derivative_l1_norms("theta", skewed_scenario, randomize_config(2.0))
        for v in norms:
            assert v > 0.0 and math.isfinite(v)
