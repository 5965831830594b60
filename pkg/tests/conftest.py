import numpy as np
import pytest

from memslab import build_radial, build_rect
from memslab.profiles import constant_profile


@pytest.fixture(scope="session")
def disk256():
    return build_radial(2, 1.0, 256)


@pytest.fixture(scope="session")
def interval256():
    return build_radial(1, 1.0, 256)


@pytest.fixture(scope="session")
def square64():
    return build_rect(1.0, 1.0, 64, 64)


@pytest.fixture(scope="session")
def ones_disk(disk256):
    return constant_profile(disk256, 1.0)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
