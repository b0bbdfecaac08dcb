import numpy as np
import pytest

from mmse_bounds import ConditionalLaw, MechanismConfig, Scenario


def make_symmetric_scenario() -> Scenario:
    return Scenario(
        prior_p=0.5,
        law_plus=ConditionalLaw.point_mass(1.0),
        law_minus=ConditionalLaw.point_mass(-1.0),
    )


@pytest.fixture
def symmetric_scenario() -> Scenario:
    """Equal-prior point masses at +1 and -1 (the X = Y setting)."""
    return make_symmetric_scenario()


@pytest.fixture
def skewed_scenario() -> Scenario:
    """Unequal prior, asymmetric point masses; separated supports."""
    return Scenario(
        prior_p=0.3,
        law_plus=ConditionalLaw.point_mass(0.7),
        law_minus=ConditionalLaw.point_mass(-0.4),
    )


def rng_for(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=np.uint64(seed)))


def randomize_config(sigma: float, r: float = 2.0) -> MechanismConfig:
    return MechanismConfig(sigma=sigma, r=r, mode="randomize")


def truncate_config(sigma: float, r: float = 2.0) -> MechanismConfig:
    return MechanismConfig(sigma=sigma, r=r, mode="truncate")
