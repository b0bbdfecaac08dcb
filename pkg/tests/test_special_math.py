import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from mmse_bounds import (
    DEFAULT_QUADRATURE,
    DomainError,
    GaussianKernel,
    QuadratureSpec,
    gamma_function,
    integrate,
    kernel_derivative,
    kernel_derivative_norms,
    q_function,
)

# Frozen reference values, computed independently from erfc and the Gaussian
# integrals before the implementation existed.
Q_AT_1 = 0.15865525393145707
Q_AT_2_5 = 0.006209665325776138
NORMS_SIGMA_1 = {
    "l1_d1": 0.7978845608028654,
    "l2sq_d1": 0.14104739588693907,
    "l3cu_d1": 0.028219393748551546,
    "l2_d2": 0.4599685791773266,
    "l1_d2_upper": 2.0,
    "l1_d3_upper": 3.9894228040143274,
}


class TestQFunction:
    def test_frozen_values(self):
        assert q_function(0.0) == pytest.approx(0.5, abs=1e-15)
        assert q_function(1.0) == pytest.approx(Q_AT_1, abs=1e-15)
        assert q_function(2.5) == pytest.approx(Q_AT_2_5, abs=1e-15)

    def test_symmetry(self):
        for x in (0.3, 1.7, 4.0):
            assert q_function(-x) == pytest.approx(1.0 - q_function(x), abs=1e-14)

    @given(st.floats(-8, 8))
    def test_monotone_decreasing_and_bounded(self, x):
        v = q_function(x)
        assert 0.0 <= v <= 1.0
        assert q_function(x + 0.25) <= v


class TestGammaFunction:
    def test_known_values(self):
        assert gamma_function(1.0) == pytest.approx(1.0, rel=1e-14)
        assert gamma_function(0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-14)
        assert gamma_function(5.0) == pytest.approx(24.0, rel=1e-14)

    def test_rejects_nonpositive(self):
        with pytest.raises(DomainError):
            gamma_function(0.0)
        with pytest.raises(DomainError):
            gamma_function(-1.5)


class TestKernel:
    def test_density_normalizes(self):
        for sigma in (0.5, 1.0, 2.0):
            total, _ = quad(GaussianKernel(sigma), -12 * sigma, 12 * sigma)
            assert total == pytest.approx(1.0, abs=1e-10)

    def test_derivative_orders_match_finite_differences(self):
        sigma = 1.3
        h = 1e-5
        for order in (1, 2, 3):
            for x in (-2.0, -0.4, 0.0, 0.9, 2.5):
                lower = kernel_derivative(order - 1, sigma, x - h)
                upper = kernel_derivative(order - 1, sigma, x + h)
                fd = (upper - lower) / (2 * h)
                closed = kernel_derivative(order, sigma, x)
                assert closed == pytest.approx(fd, rel=1e-7, abs=1e-9)

    def test_array_evaluation_matches_scalar(self):
        sigma = 0.8
        xs = np.linspace(-3, 3, 11)
        for order in (0, 1, 2, 3):
            vec = kernel_derivative(order, sigma, xs)
            scalars = [kernel_derivative(order, sigma, float(x)) for x in xs]
            np.testing.assert_allclose(vec, scalars, rtol=1e-14)

    def test_rejects_bad_order(self):
        with pytest.raises(DomainError):
            kernel_derivative(4, 1.0, 0.0)
        with pytest.raises(DomainError):
            kernel_derivative(-1, 1.0, 0.0)


class TestKernelNorms:
    def test_frozen_closed_forms_at_sigma_1(self):
        norms = kernel_derivative_norms(1.0)
        for field, value in NORMS_SIGMA_1.items():
            assert getattr(norms, field) == pytest.approx(value, rel=1e-12), field

    @pytest.mark.parametrize("sigma", [0.5, 1.0, 3.0])
    def test_equalities_against_quadrature(self, sigma):
        norms = kernel_derivative_norms(sigma)
        w = 14 * sigma
        l1, _ = quad(lambda x: abs(kernel_derivative(1, sigma, x)), -w, w, limit=300)
        l2sq, _ = quad(lambda x: kernel_derivative(1, sigma, x) ** 2, -w, w, limit=300)
        l3cu, _ = quad(lambda x: abs(kernel_derivative(1, sigma, x)) ** 3, -w, w, limit=300)
        l2_d2sq, _ = quad(lambda x: kernel_derivative(2, sigma, x) ** 2, -w, w, limit=300)
        assert l1 == pytest.approx(norms.l1_d1, rel=1e-9)
        assert l2sq == pytest.approx(norms.l2sq_d1, rel=1e-9)
        assert l3cu == pytest.approx(norms.l3cu_d1, rel=1e-9)
        assert math.sqrt(l2_d2sq) == pytest.approx(norms.l2_d2, rel=1e-9)

    @pytest.mark.parametrize("sigma", [0.5, 1.0, 3.0])
    def test_upper_bounds_hold(self, sigma):
        norms = kernel_derivative_norms(sigma)
        w = 14 * sigma
        l1_d2, _ = quad(lambda x: abs(kernel_derivative(2, sigma, x)), -w, w, limit=300)
        l1_d3, _ = quad(lambda x: abs(kernel_derivative(3, sigma, x)), -w, w, limit=300)
        assert l1_d2 <= norms.l1_d2_upper * (1 + 1e-12)
        assert l1_d3 <= norms.l1_d3_upper * (1 + 1e-12)


class TestIntegrate:
    def test_gaussian_moments(self):
        sigma = 1.7
        k = GaussianKernel(sigma)
        assert integrate(k, -math.inf, math.inf, scale=sigma) == pytest.approx(1.0, abs=1e-9)
        second = integrate(lambda x: x * x * k(x), -math.inf, math.inf, scale=sigma)
        assert second == pytest.approx(sigma**2, rel=1e-9)

    def test_infinite_window_clips_at_center_plus_cutoff(self):
        # a far-off bump survives only if center/scale put it inside the window
        bump = GaussianKernel(0.5)
        far = integrate(lambda x: bump(x - 100.0), 0.0, math.inf, scale=1.0)
        assert far == pytest.approx(0.0, abs=1e-12)
        found = integrate(lambda x: bump(x - 100.0), 0.0, math.inf, center=100.0, scale=1.0)
        assert found == pytest.approx(1.0, abs=1e-9)

    def test_points_hint_resolves_narrow_spike(self):
        # narrow enough that the unhinted rule misses the bump entirely
        spike = GaussianKernel(0.01)
        unhinted = integrate(lambda x: spike(x - 0.5), -8.0, 8.0)
        assert unhinted == pytest.approx(0.0, abs=1e-12)
        value = integrate(lambda x: spike(x - 0.5), -8.0, 8.0, points=[0.5])
        assert value == pytest.approx(1.0, rel=1e-7)

    def test_empty_interval_is_zero(self):
        assert integrate(lambda x: 1.0, 2.0, 2.0) == 0.0

    def test_points_outside_interval_are_ignored(self):
        value = integrate(lambda x: 1.0, 0.0, 1.0, points=[-5.0, 0.5, 7.0])
        assert value == pytest.approx(1.0, rel=1e-12)


class TestQuadratureSpec:
    def test_defaults_are_sane(self):
        spec = DEFAULT_QUADRATURE
        assert spec.abs_tol > 0 and spec.rel_tol > 0
        assert spec.infinite_cutoff_sigmas == 12.0

    def test_rejects_bad_tolerances(self):
        with pytest.raises(DomainError):
            QuadratureSpec(abs_tol=-1e-9)
        with pytest.raises(DomainError):
            QuadratureSpec(max_subdivisions=0)
