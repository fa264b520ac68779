import hypothesis
import numpy as np
import pytest

from torusctl import TorusGeometry

hypothesis.settings.register_profile(
    "default", max_examples=25, deadline=None, derandomize=True
)
hypothesis.settings.load_profile("default")


@pytest.fixture
def square_torus():
    return TorusGeometry.square(n=32)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
