import numpy as np
import pytest

from sgrouter import table1_rf, table1_thz


@pytest.fixture(scope="session")
def thz():
    return table1_thz()


@pytest.fixture(scope="session")
def rf():
    return table1_rf()


@pytest.fixture()
def rng():
    return np.random.default_rng(1234)
