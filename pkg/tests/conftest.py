import numpy as np
import pytest

from ibt import IbtMap, build_factor, build_induced, make_beta_icf


def _system(a0, a1, n_max=4096):
    return build_induced(IbtMap(build_factor(make_beta_icf(a0, a1))), n_max=n_max)


@pytest.fixture(scope="session")
def sys11():
    return _system(1.0, 1.0)


@pytest.fixture(scope="session")
def sys22():
    return _system(2.0, 2.0)


@pytest.fixture(scope="session")
def syshh():
    return _system(0.5, 0.5)


@pytest.fixture(scope="session")
def sys21():
    return _system(2.0, 1.0)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20260823)
