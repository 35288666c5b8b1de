import numpy as np
import pytest

from matfatou.poly import MonicPoly


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)


@pytest.fixture
def z2():
    return MonicPoly.power(2)


def random_complex(rng, size=None, scale=1.0):
    return scale * (rng.normal(size=size) + 1j * rng.normal(size=size))
