import numpy as np
import pytest

from models.base_problems import FreeParticle, HarmonicOscillator
from models.quadrature import QuadratureSpec
from models.susy import PartnerModel, make_oscillator_transform, make_soliton_transform


@pytest.fixture(scope="session")
def osc_transform():
    return make_oscillator_transform(2j)


@pytest.fixture(scope="session")
def soliton_transform():
    return make_soliton_transform(1.0, 2.0)


@pytest.fixture(scope="session")
def osc_model(osc_transform):
    return PartnerModel.from_factorization(osc_transform)


@pytest.fixture(scope="session")
def soliton_model(soliton_transform):
    return PartnerModel.from_factorization(soliton_transform)


@pytest.fixture(scope="session")
def free_model():
    return PartnerModel.untransformed(FreeParticle())


@pytest.fixture(scope="session")
def harmonic_model():
    return PartnerModel.untransformed(HarmonicOscillator())


@pytest.fixture
def quad():
    return QuadratureSpec()


@pytest.fixture
def rng():
    return np.random.default_rng(7)
