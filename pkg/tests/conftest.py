import numpy as np
import pytest

from weylbound import Config


@pytest.fixture
def cfg():
    return Config()


@pytest.fixture
def rng():
    return np.random.default_rng(20260825)
