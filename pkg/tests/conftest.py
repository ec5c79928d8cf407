import numpy as np
import pytest

from diracbag.bagmodel import BagConfig


@pytest.fixture
def massless_cfg():
    return BagConfig(a=1.0, mass=0.0, lam=0.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20260808)
