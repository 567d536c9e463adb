import hypothesis
import numpy as np
import pytest

# numba-jitted kernels make first calls slow; never let hypothesis time out on them
hypothesis.settings.register_profile(
    "floqsim", deadline=None, derandomize=True, max_examples=50
)
hypothesis.settings.load_profile("floqsim")


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
