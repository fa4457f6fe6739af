import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from primroots.arith import prime_array  # noqa: E402


@pytest.fixture(scope="session")
def primes_1e4():
    return prime_array(10**4).tolist()


@pytest.fixture(scope="session")
def odd_primes_1e5():
    return prime_array(10**5).tolist()[1:]
