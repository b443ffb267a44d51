import logging
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import pandas as pd

from src.exceptions import BoundError, DomainError, TableExhaustedError
from src.prime_engine import PrimeTable, prime_count, prime_index

# Initialize the logger for this specific module
# This logger automatically inherits the configuration (format, level) defined in utils/main
logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class OrderRecord:
    """A prime with its order of primeness and its P'/P'' classification."""
    p: int
    order: int
    in_p_prime: bool


@dataclass(frozen=True)
class PartitionReport:
    """Result of checking that P'(x) and P''(x) split the primes <= x."""
    x: int
    pprime_count: int
    pdoubleprime_count: int
    pi: int
    disjoint: bool
    complete: bool
    counterexample: int | None

    @property
    def passed(self) -> bool:
        return self.disjoint and self.complete and self.pprime_count + self.pdoubleprime_count == self.pi


@dataclass(frozen=True)
class ConstructionComparison:
    """Parity-based P' versus N-sieve P' up to x."""
    x: int
    parity_length: int
    nsieve_length: int
    equal: bool
    first_divergence: int | None = None
    parity_value: int | None = None
    nsieve_value: int | None = None


def _check_bound(table: PrimeTable, x: int):
    """Raises BoundError if x lies beyond the sieved table."""
    if x > table.limit:
        raise BoundError(f"Bound {x} exceeds table limit {table.limit}")


@lru_cache(maxsize=2)
def _order_array(table: PrimeTable) -> np.ndarray:
    """
    Order of primeness of every prime in the table, aligned with table.primes.

    Memoized per table (identity hash); lru_cache is safe under concurrent use.
    Every chain starts at the prime's own index and follows the index map while
    the current value is prime. Indices never exceed the prime itself, so all
    lookups stay inside the table.
    """
    try:
        logger.info(f"Classifying {table.count:,} primes by order of primeness")

        # Step 1: every prime has order >= 1; a chain stays alive while its index is prime
        orders = np.ones(table.count, dtype=np.int16)
        current = np.arange(1, table.count + 1, dtype=np.int64)
        next_index = table.indices_of(current)
        alive = next_index > 0

        # Step 2: each pass moves every still-prime chain one step down the index map
        while alive.any():
            orders[alive] += 1
            current[alive] = next_index[alive]
            next_index[alive] = table.indices_of(current[alive])
            alive &= next_index > 0

        orders.flags.writeable = False
        logger.info(f"Classification done: maximum order {int(orders.max()) if orders.size else 0}")
        return orders

    except Exception as e:
        logger.error(f"Error classifying primes up to {table.limit}: {e}")
        raise e


def _orders_upto(table: PrimeTable, x: int) -> tuple[np.ndarray, np.ndarray]:
    """Primes <= x and their orders, as two aligned arrays."""
    n = prime_count(table, x)
    return table.primes[:n], _order_array(table)[:n]


def primeness_order(table: PrimeTable, p: int) -> int:
    """
    Largest k such that p belongs to the k-th order sequence p^(k).

    k = 1; i = index(p); while i is prime: k += 1, i = index(i).
    """
    index = prime_index(table, p)
    if index is None:
        raise DomainError(f"{p} is not prime")
    return int(_order_array(table)[index - 1])


def classify(table: PrimeTable, p: int) -> OrderRecord:
    """Builds the OrderRecord of a prime."""
    order = primeness_order(table, p)
    return OrderRecord(p=p, order=order, in_p_prime=order % 2 == 1)


def index_chain(table: PrimeTable, p: int) -> list[int]:
    """
    The chain p, index(p), index(index(p)), ... ending at the first value that is not prime.
    Its length is the order of p plus one.
    """
    if prime_index(table, p) is None:
        raise DomainError(f"{p} is not prime")

    chain = [p]
    value = table.index_of(p)
    while True:
        chain.append(value)
        nxt = table.index_of(value)
        if nxt is None:
            return chain
        value = nxt


def higher_order_sequence(table: PrimeTable, k: int, m: int) -> list[int]:
    """
    First m terms of p^(k): the index map n -> p_n applied k times to n = 1..m.

    Raises TableExhaustedError naming the first unreachable term and the depth at
    which its lookup left the table.
    """
    if k < 1:
        raise DomainError(f"Order k must be >= 1, got {k}")
    if m < 0:
        raise DomainError(f"Term count must be >= 0, got {m}")

    values = np.arange(1, m + 1, dtype=np.int64)
    for depth in range(1, k + 1):
        beyond = np.flatnonzero(values > table.count)
        if beyond.size:
            term = int(beyond[0]) + 1
            raise TableExhaustedError(
                f"Term {term} of p^({k}) needs p_{int(values[beyond[0]])} at depth {depth}, "
                f"but the table holds only {table.count} primes",
                term=term, depth=depth,
            )
        values = table.primes[values - 1]

    return values.tolist()


def pprime_by_parity(table: PrimeTable, x: int) -> list[int]:
    """P' up to x: the primes whose order of primeness is odd (the alternating-sum rows)."""
    _check_bound(table, x)
    primes, orders = _orders_upto(table, x)
    return primes[orders % 2 == 1].tolist()


def pdoubleprime_by_parity(table: PrimeTable, x: int) -> list[int]:
    """P'' up to x from the complementary alternating sum: the even-order primes."""
    _check_bound(table, x)
    primes, orders = _orders_upto(table, x)
    return primes[orders % 2 == 0].tolist()


def pprime_by_nsieve(table: PrimeTable, x: int) -> list[int]:
    """
    P' up to x by the N-sieve.

    A cursor walks the natural numbers 1, 2, 3, ..., skipping eliminated ones.
    Each visited s emits p_s and eliminates p_s from the line. Since s < p_s,
    every term <= x needs only indexes s <= pi(x), so a table sieved to x suffices.
    """
    _check_bound(table, x)
    if x < 2:
        return []

    try:
        # Cursor positions never pass pi(x); p_s for those is always inside the table
        last_cursor = prime_count(table, x)
        eliminated = np.zeros(x + 1, dtype=bool)
        terms = []

        for s in range(1, last_cursor + 1):
            # Skip numbers struck out by an earlier visit
            if eliminated[s]:
                continue
            p = int(table.primes[s - 1])
            terms.append(p)
            eliminated[p] = True

        logger.debug(f"N-sieve emitted {len(terms)} terms up to {x}")
        return terms

    except MemoryError as e:
        logger.error(f"Out of memory allocating the N-sieve line up to {x}: {e}")
        raise e


def pdoubleprime(table: PrimeTable, x: int) -> list[int]:
    """P'' up to x as {p_k : k in P'}, i.e. the primes indexed by P'."""
    _check_bound(table, x)
    indexes = np.asarray(pprime_by_parity(table, prime_count(table, x)), dtype=np.int64)
    return table.primes[indexes - 1].tolist()


def verify_partition(table: PrimeTable, x: int) -> PartitionReport:
    """Checks that P'(x) and P''(x) are disjoint and together make up every prime <= x."""
    try:
        pprimes = np.asarray(pprime_by_parity(table, x), dtype=np.int64)
        pdoubles = np.asarray(pdoubleprime(table, x), dtype=np.int64)
        all_primes = table.primes[:prime_count(table, x)]

        overlap = np.intersect1d(pprimes, pdoubles)
        missing = np.setdiff1d(all_primes, np.union1d(pprimes, pdoubles))

        counterexample = None
        if overlap.size:
            counterexample = int(overlap[0])
        elif missing.size:
            counterexample = int(missing[0])

        report = PartitionReport(
            x=x,
            pprime_count=int(pprimes.size),
            pdoubleprime_count=int(pdoubles.size),
            pi=int(all_primes.size),
            disjoint=overlap.size == 0,
            complete=missing.size == 0,
            counterexample=counterexample,
        )
        logger.info(f"Partition at {x}: |P'|={report.pprime_count}, |P''|={report.pdoubleprime_count}, "
                    f"pi={report.pi}, passed={report.passed}")
        return report

    except Exception as e:
        logger.error(f"Partition check failed at {x}: {e}")
        raise e


def compare_constructions(table: PrimeTable, x: int) -> ConstructionComparison:
    """
    Compares parity-based and N-sieve P' up to x element for element.
    A divergence is reported, never corrected.
    """
    parity = pprime_by_parity(table, x)
    nsieve = pprime_by_nsieve(table, x)

    if parity == nsieve:
        return ConstructionComparison(x=x, parity_length=len(parity), nsieve_length=len(nsieve), equal=True)

    # First position where the lists differ, counting a missing element as a difference
    position = next(
        (i for i, (a, b) in enumerate(zip(parity, nsieve)) if a != b),
        min(len(parity), len(nsieve)),
    )
    logger.warning(f"P' constructions diverge at term {position + 1} (x={x})")
    return ConstructionComparison(
        x=x,
        parity_length=len(parity),
        nsieve_length=len(nsieve),
        equal=False,
        first_divergence=position + 1,
        parity_value=parity[position] if position < len(parity) else None,
        nsieve_value=nsieve[position] if position < len(nsieve) else None,
    )


def order_counts(table: PrimeTable, x: int) -> dict[int, int]:
    """Number of primes <= x of each order of primeness."""
    _check_bound(table, x)
    _, orders = _orders_upto(table, x)
    return dict(sorted(Counter(orders.tolist()).items()))


def alternating_sum_table(table: PrimeTable, x: int, depth: int = 6) -> pd.DataFrame:
    """
    Element-wise alternating-sum chart of p^(1), p^(2), ..., p^(depth).

    One row per prime <= x. Column `+p(k)` / `-p(k)` holds the prime if its order
    is at least k, else 0. The `p'` column keeps the prime when its order is odd,
    i.e. when the signed row sum would leave it standing.
    """
    if depth < 1:
        raise DomainError(f"Depth must be >= 1, got {depth}")
    _check_bound(table, x)

    try:
        primes, orders = _orders_upto(table, x)

        # One signed column per order; a prime appears in every column up to its own order
        columns = {}
        for k in range(1, depth + 1):
            sign = "+" if k % 2 == 1 else "-"
            columns[f"{sign}p({k})"] = np.where(orders >= k, primes, 0)
        # The p' column follows the true order, including orders beyond `depth`
        columns["p'"] = np.where(orders % 2 == 1, primes, 0)

        frame = pd.DataFrame(columns, index=pd.RangeIndex(1, primes.size + 1, name="row"))
        logger.debug(f"Alternating-sum chart: {len(frame)} rows, depth {depth}")
        return frame

    except Exception as e:
        logger.error(f"Error building the alternating-sum chart up to {x}: {e}")
        raise e
