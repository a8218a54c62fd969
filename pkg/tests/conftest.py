import numpy as np
import pytest

from additive_tails.sieve import get_table


@pytest.fixture(scope="session")
def table_1e6():
    return get_table(1_000_000)


@pytest.fixture(scope="session")
def table_1e4():
    return get_table(10_000)


@pytest.fixture()
def rng():
    return np.random.default_rng(20260810)
