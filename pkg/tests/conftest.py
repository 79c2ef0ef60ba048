import numpy as np
import pytest

from ladderlab.primes import build_prime_store
from ladderlab.workbench import Workbench


def simple_sieve(limit):
    """Independent oracle sieve: plain bytearray Eratosthenes."""
    flags = bytearray([1]) * (limit + 1)
    flags[0:2] = b"\x00\x00"
    p = 2
    while p * p <= limit:
        if flags[p]:
            flags[p * p :: p] = bytearray(len(range(p * p, limit + 1, p)))
        p += 1
    return [i for i, f in enumerate(flags) if f]


@pytest.fixture(scope="session")
def store_small():
    return build_prime_store(2_000_000)


@pytest.fixture(scope="session")
def oracle_primes_100k():
    return simple_sieve(100_000)


@pytest.fixture(scope="session")
def bench(store_small):
    """Shared workbench; its integral cache warms up across the session."""
    return Workbench.create(store=store_small, zeta_range=1.0e6)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20260810)
