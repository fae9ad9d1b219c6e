import numpy as np
import pytest

from obc_lib.cyclotomic import CycloData, parse_f


@pytest.fixture
def rng():
    return np.random.default_rng(7)


@pytest.fixture
def quadratic():
    """f = t^2 - 3 with formal f'."""
    return CycloData(parse_f("t^2-3"))


@pytest.fixture
def quadratic_pair():
    """f = t^2 - 3, f' = t^2 - 5."""
    return CycloData(parse_f("t^2-3"), parse_f("t^2-5"))
