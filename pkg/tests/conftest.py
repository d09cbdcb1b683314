import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from qhamming import linalg, magic

settings.register_profile(
    "default", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def two_block_atom(rng):
    """Two-block representation with rank-1 cells in dimension 2."""
    p = linalg.random_projection(rng, 2, 1)
    q = linalg.random_projection(rng, 2, 1)
    return magic.two_block(p, q)
