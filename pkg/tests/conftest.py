import math

import numpy as np
import pytest

from deltadrift import PhysicalParams


@pytest.fixture
def reference_params():
    # g = 1 at n = 1: k_1 = 1, E_1 = 1/2, |H/D| = 1/(2 pi).
    return PhysicalParams(mu=1.0, hbar=1.0, a_bar=math.pi, r0=1.0, v=0.0, v0_override=0.5)


@pytest.fixture
def rng():
    return np.random.default_rng(20231018)


def random_params(rng, count=100):
    """Valid parameter sets with log-uniform coupling, half of them through
    the Green's function of a closed second channel."""
    sets = []
    for i in range(count):
        a_bar = rng.uniform(0.5, 10.0)
        n = int(rng.integers(1, 6))
        strength = 10 ** rng.uniform(-2.0, 1.0)
        if i % 2:
            e_n = (n * math.pi / a_bar) ** 2 / 2.0
            params = PhysicalParams(a_bar=a_bar, u0_bar=strength, v2_offset=e_n + rng.uniform(0.1, 10.0))
        else:
            params = PhysicalParams(a_bar=a_bar, v0_override=strength * rng.choice([-1.0, 1.0]))
        sets.append((params, n))
    return sets


@pytest.fixture
def random_sets(rng):
    return random_params(rng)
