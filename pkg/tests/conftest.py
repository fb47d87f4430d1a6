import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from dopid.prob import from_array  # noqa: E402


def truth_table(f, nz=2):
    p = np.zeros((2, 2, nz))
    for x in range(2):
        for y in range(2):
            p[x, y, f(x, y)] += 0.25
    return from_array(p)


@pytest.fixture
def xor():
    return truth_table(lambda x, y: x ^ y)


@pytest.fixture
def rdn():
    p = np.zeros((2, 2, 2))
    p[0, 0, 0] = p[1, 1, 1] = 0.5
    return from_array(p)


@pytest.fixture
def unq():
    return truth_table(lambda x, y: x)


@pytest.fixture
def copy_gate():
    return truth_table(lambda x, y: 2 * x + y, nz=4)


@pytest.fixture
def uniform222():
    return from_array(np.full((2, 2, 2), 1 / 8))


def random_dist(rng, shape):
    return from_array(rng.dirichlet(np.ones(int(np.prod(shape)))).reshape(shape))


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)
