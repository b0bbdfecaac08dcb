import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mmse_bounds import (
    ConditionalLaw,
    DomainError,
    SampleSet,
    Scenario,
    make_law,
    margin_mass,
    sample_raw,
    support_geometry,
    triangular_law,
    uniform_law,
)
from mmse_bounds.scenario import law_mean


class TestConditionalLaw:
    def test_point_mass_requires_unit_interval(self):
        ConditionalLaw.point_mass(1.0)
        ConditionalLaw.point_mass(-1.0)
        with pytest.raises(DomainError):
            ConditionalLaw.point_mass(1.2)

    def test_density_must_normalize(self):
        with pytest.raises(DomainError):
            ConditionalLaw.density(lambda t: 3.0, support=(0.0, 1.0))

    def test_density_support_inside_unit_interval(self):
        with pytest.raises(DomainError):
            uniform_law(0.0, 1.5)

    def test_uniform_law_normalizes(self):
        law = uniform_law(-0.5, 0.5)
        assert not law.is_point_mass
        assert law.pdf(0.0) == pytest.approx(1.0)

    def test_triangular_law_mean(self):
        # mean of a triangular density is (a + peak + b) / 3
        law = triangular_law(-0.6, 0.9, 0.3)
        assert law_mean(law) == pytest.approx((-0.6 + 0.3 + 0.9) / 3.0, abs=1e-8)


class TestScenario:
    def test_prior_validation(self):
        plus, minus = ConditionalLaw.point_mass(0.5), ConditionalLaw.point_mass(-0.5)
        with pytest.raises(DomainError):
            Scenario(prior_p=0.0, law_plus=plus, law_minus=minus)
        with pytest.raises(DomainError):
            Scenario(prior_p=1.0, law_plus=plus, law_minus=minus)

    def test_make_law_builtins(self):
        assert make_law({"kind": "point_mass", "location": 0.25}).is_point_mass
        assert make_law({"kind": "uniform", "support": [-0.2, 0.8]}).support == (-0.2, 0.8)
        tri = make_law({"kind": "triangular", "support": [-1.0, 1.0], "peak": 0.0})
        assert tri.pdf(0.0) == pytest.approx(1.0)

    def test_make_law_unknown_kind(self):
        with pytest.raises(DomainError):
            make_law({"kind": "beta"})


class TestSampleSet:
    def test_labels_validated(self):
        with pytest.raises(DomainError):
            SampleSet(x=np.array([0.0]), y=np.array([2.0]))

    def test_round_trip(self):
        pairs = [(0.1, 1.0), (-0.4, -1.0), (0.9, 1.0)]
        ss = SampleSet.from_pairs(pairs)
        assert len(ss) == 3
        assert ss.as_pairs() == pairs


class TestSampling:
    def test_deterministic_in_seed(self, symmetric_scenario):
        a = sample_raw(symmetric_scenario, 500, seed=42)
        b = sample_raw(symmetric_scenario, 500, seed=42)
        np.testing.assert_array_equal(a.x, b.x)
        np.testing.assert_array_equal(a.y, b.y)
        c = sample_raw(symmetric_scenario, 500, seed=43)
        assert not np.array_equal(a.y, c.y)

    def test_point_mass_values_and_prior(self, skewed_scenario):
        ss = sample_raw(skewed_scenario, 40_000, seed=7)
        plus = ss.y > 0
        assert np.all(ss.x[plus] == 0.7)
        assert np.all(ss.x[~plus] == -0.4)
        # binomial(40000, 0.3) has sd ~ 0.0023
        assert plus.mean() == pytest.approx(0.3, abs=0.01)

    def test_density_law_moments(self):
        scenario = Scenario(
            prior_p=0.5,
            law_plus=uniform_law(0.2, 1.0),
            law_minus=triangular_law(-1.0, -0.1, -0.7),
        )
        ss = sample_raw(scenario, 60_000, seed=11)
        xp = ss.x[ss.y > 0]
        xm = ss.x[ss.y < 0]
        assert xp.mean() == pytest.approx(0.6, abs=0.01)
        assert xp.min() >= 0.2 and xp.max() <= 1.0
        assert xm.mean() == pytest.approx((-1.0 - 0.7 - 0.1) / 3.0, abs=0.01)
        # uniform variance (b-a)^2/12
        assert xp.var() == pytest.approx(0.8**2 / 12.0, rel=0.05)


class TestGeometry:
    def test_margin_mass_uniform(self):
        scenario = Scenario(
            prior_p=0.5,
            law_plus=uniform_law(0.2, 1.0),
            law_minus=uniform_law(-1.0, -0.1),
        )
        dp, dm = margin_mass(scenario, 0.5)
        assert dp == pytest.approx(0.5 / 0.8, abs=1e-9)
        assert dm == pytest.approx(0.5 / 0.9, abs=1e-9)

    def test_separated_point_masses(self, symmetric_scenario):
        geom = support_geometry(symmetric_scenario)
        assert geom.kind == "separated"
        assert geom.gamma == pytest.approx(1.0)

    def test_separated_caller_margin_must_not_exceed_gap(self, skewed_scenario):
        geom = support_geometry(skewed_scenario)
        assert geom.kind == "separated"
        assert geom.gamma == pytest.approx(0.4)
        with pytest.raises(DomainError):
            support_geometry(skewed_scenario, gamma=0.41)

    def test_overlapping_needs_caller_gamma(self):
        scenario = Scenario(
            prior_p=0.5,
            law_plus=uniform_law(-0.3, 1.0),
            law_minus=uniform_law(-1.0, 0.2),
        )
        bare = support_geometry(scenario)
        assert bare.kind == "none"
        assert bare.gamma0 == pytest.approx(0.3)
        geom = support_geometry(scenario, gamma=0.5)
        assert geom.kind == "overlapping"
        assert geom.gamma0 == pytest.approx(0.3)
        assert geom.delta_plus == pytest.approx(0.5 / 1.3, abs=1e-9)
        assert geom.delta_minus == pytest.approx(0.5 / 1.2, abs=1e-9)

    @given(st.floats(0.05, 0.95))
    @settings(max_examples=25, deadline=None)
    def test_margin_masses_lie_in_unit_interval(self, gamma):
        scenario = Scenario(
            prior_p=0.5,
            law_plus=triangular_law(-0.8, 1.0, 0.4),
            law_minus=triangular_law(-1.0, 0.6, -0.2),
        )
        dp, dm = margin_mass(scenario, gamma)
        assert 0.0 <= dp <= 1.0 + 1e-12
        assert 0.0 <= dm <= 1.0 + 1e-12
