import logging
import math
from dataclasses import dataclass

import numpy as np

from src.exceptions import BoundError, IndexRangeError

# Initialize the logger for this specific module
# This logger automatically inherits the configuration (format, level) defined in utils/main
logger = logging.getLogger(__name__)

DEFAULT_MAX_LIMIT = 10**9
DEFAULT_SEGMENT_SIZE = 2**20


@dataclass(frozen=True, eq=False)
class PrimeTable:
    """
    Immutable result of a sieve: every prime <= limit, in increasing order.

    Indexing is 1-based throughout (p_1 = 2). The `primes` array is marked
    read-only so the table can be shared between threads.
    eq=False keeps identity hashing, which the order memo relies on.
    """
    limit: int
    primes: np.ndarray

    @property
    def count(self) -> int:
        """pi(limit), the number of primes in the table."""
        return int(self.primes.size)

    def index_of(self, p: int) -> int | None:
        """1-based index of p, or None if p is not a prime <= limit."""
        pos = int(np.searchsorted(self.primes, p))
        if pos < self.count and int(self.primes[pos]) == p:
            return pos + 1
        return None

    def indices_of(self, values: np.ndarray) -> np.ndarray:
        """
        Vectorised index_of: returns the 1-based index for each value, 0 where
        the value is not a prime in the table.
        """
        values = np.asarray(values, dtype=np.int64)
        pos = np.searchsorted(self.primes, values)
        clipped = np.minimum(pos, max(self.count - 1, 0))
        hit = (pos < self.count) & (self.primes[clipped] == values)
        return np.where(hit, pos + 1, 0)


def _simple_sieve(limit: int) -> np.ndarray:
    """Plain Eratosthenes over [0, limit]; returns the primes as int64."""
    if limit < 2:
        return np.array([], dtype=np.int64)
    is_prime = np.ones(limit + 1, dtype=bool)
    is_prime[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if is_prime[p]:
            is_prime[p * p::p] = False
    return np.flatnonzero(is_prime).astype(np.int64)


def _sieve_segment(low: int, high: int, base: np.ndarray) -> np.ndarray:
    """Primes in the half-open range [low, high), crossed off with the base primes."""
    mask = np.ones(high - low, dtype=bool)
    for p in base:
        p = int(p)
        if p * p >= high:
            break
        # first multiple of p inside the segment, never below p*p
        start = max(p * p, ((low + p - 1) // p) * p)
        mask[start - low::p] = False
    return np.flatnonzero(mask).astype(np.int64) + low


def sieve_upto(limit: int, max_limit: int = DEFAULT_MAX_LIMIT,
               segment_size: int = DEFAULT_SEGMENT_SIZE, segmented: bool = True) -> PrimeTable:
    """
    Segmented sieve of Eratosthenes producing the PrimeTable of all primes <= limit.

    Args:
        limit (int): Inclusive bound, 2 <= limit <= max_limit.
        max_limit (int): Guard against accidental memory exhaustion.
        segment_size (int): Numbers per segment.
        segmented (bool): False sieves the whole range in one pass (used as a cross-check).

    Returns:
        PrimeTable: Identical regardless of segment size or segmentation.
    """
    if isinstance(limit, bool) or not isinstance(limit, (int, np.integer)):
        raise BoundError(f"Sieve limit must be an integer, got {limit!r}")
    limit = int(limit)
    if limit < 2 or limit > max_limit:
        raise BoundError(f"Sieve limit {limit} outside [2, {max_limit}]")
    if segment_size < 1:
        raise BoundError(f"Segment size must be positive, got {segment_size}")

    try:
        # Log that the sieve has started
        logger.info(f"Sieving primes up to {limit:,}")

        if not segmented:
            primes = _simple_sieve(limit)
        else:
            # Step 1: base primes up to sqrt(limit) cross off every composite in the range
            base = _simple_sieve(math.isqrt(limit))
            chunks = []
            low = 2
            while low <= limit:
                high = min(low + segment_size, limit + 1)
                chunks.append(_sieve_segment(low, high, base))
                low = high
            primes = np.concatenate(chunks)
            logger.debug(f"Sieved {len(chunks)} segments of {segment_size} numbers")

        # Step 2: mark the primes read-only and wrap them in the table
        primes.flags.writeable = False
        table = PrimeTable(limit=limit, primes=primes)
        logger.info(f"Sieve complete: pi({limit:,}) = {table.count:,}")
        return table

    except MemoryError as e:
        # The boolean mask of a single segment or the concatenated table did not fit
        logger.error(f"Out of memory sieving to {limit}: {e}")
        raise e

    except Exception as e:
        # Catch any other unexpected errors
        logger.error(f"Error sieving to {limit}: {e}")
        raise e


def _check_within(table: PrimeTable, value: int, what: str):
    """Raises BoundError if value exceeds the table's limit."""
    if value > table.limit:
        raise BoundError(f"{what} {value} exceeds table limit {table.limit}")


def nth_prime(table: PrimeTable, n: int) -> int:
    """Returns the n-th prime (1-based: nth_prime(1) == 2)."""
    if n < 1 or n > table.count:
        raise IndexRangeError(f"Prime index {n} outside [1, {table.count}]")
    return int(table.primes[n - 1])


def prime_index(table: PrimeTable, p: int) -> int | None:
    """
    Inverse of nth_prime: returns n with nth_prime(n) == p, or None if p is not prime.
    Raises BoundError when p lies beyond the table (which is not the same as "not prime").
    """
    _check_within(table, p, "Value")
    return table.index_of(p)


def prime_count(table: PrimeTable, x: int) -> int:
    """pi(x): the number of primes <= x, by binary search over the table."""
    _check_within(table, x, "Bound")
    if x < 2:
        return 0
    return int(np.searchsorted(table.primes, x, side="right"))
