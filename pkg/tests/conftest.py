import pytest

from src.prime_engine import sieve_upto

# NOTE: Sieved tables are shared across test files; building them once per
# session keeps the suite fast. Tables are immutable, so sharing is safe.


@pytest.fixture(scope="session")
def small_table():
    """All primes up to 1,000."""
    return sieve_upto(1000)


@pytest.fixture(scope="session")
def table_1e5():
    """All primes up to 10^5 (9,592 primes)."""
    return sieve_upto(100_000)


@pytest.fixture(scope="session")
def table_1e6():
    """All primes up to 10^6 (78,498 primes)."""
    return sieve_upto(1_000_000)


@pytest.fixture(scope="session")
def table_1e7():
    """All primes up to 10^7, the top of the published estimation table."""
    return sieve_upto(10_000_000)
