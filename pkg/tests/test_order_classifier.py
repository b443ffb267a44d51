import pytest

from src.exceptions import BoundError, DomainError, TableExhaustedError
from src.order_classifier import (
    _order_array,
    alternating_sum_table,
    classify,
    compare_constructions,
    higher_order_sequence,
    index_chain,
    order_counts,
    pdoubleprime,
    pdoubleprime_by_parity,
    pprime_by_nsieve,
    pprime_by_parity,
    primeness_order,
    verify_partition,
)
from src.prime_engine import prime_count, prime_index, sieve_upto

# NOTE: Expected sequences below are the published first terms of P', P'' and p^(k).

# ----------------------------------------------------------------
# Fixtures (Data Setup)
# ----------------------------------------------------------------

@pytest.fixture
def pprime_first_terms():
    """First 15 terms of P'."""
    return [2, 5, 7, 13, 19, 23, 29, 31, 37, 43, 47, 53, 59, 61, 71]


@pytest.fixture
def pdoubleprime_first_terms():
    """First 12 terms of P''."""
    return [3, 11, 17, 41, 67, 83, 109, 127, 157, 191, 211, 241]


@pytest.fixture
def brute_force_order():
    """Reference order of primeness written straight from the definition."""
    def order(table, p):
        k = 1
        i = prime_index(table, p)
        while prime_index(table, i) is not None:
            k += 1
            i = prime_index(table, i)
        return k
    return order


# ----------------------------------------------------------------
# 1. Tests for: primeness_order / classify / index_chain
# ----------------------------------------------------------------

@pytest.mark.parametrize("p, expected", [(2, 1), (3, 2), (5, 3), (7, 1), (11, 4), (31, 5), (127, 6)])
def test_primeness_order(p, expected, small_table):
    assert primeness_order(small_table, p) == expected


def test_primeness_order_non_prime(small_table):
    with pytest.raises(DomainError, match="not prime"):
        primeness_order(small_table, 4)


def test_primeness_order_matches_brute_force(small_table, brute_force_order):
    """Vectorised classification agrees with the per-prime index loop."""
    for p in small_table.primes.tolist():
        assert primeness_order(small_table, p) == brute_force_order(small_table, p)


def test_order_one_iff_index_not_prime(small_table):
    for p in small_table.primes.tolist():
        index_is_prime = prime_index(small_table, prime_index(small_table, p)) is not None
        assert (primeness_order(small_table, p) == 1) == (not index_is_prime)


def test_classify_parity(small_table):
    """in_p_prime is true exactly for odd orders."""
    assert classify(small_table, 31).in_p_prime is True
    assert classify(small_table, 3).in_p_prime is False
    record = classify(small_table, 11)
    assert (record.p, record.order, record.in_p_prime) == (11, 4, False)


def test_index_chain(small_table):
    """31 -> 11 -> 5 -> 3 -> 2 -> 1, one longer than the order."""
    chain = index_chain(small_table, 31)
    assert chain == [31, 11, 5, 3, 2, 1]
    assert len(chain) == primeness_order(small_table, 31) + 1


def test_index_chain_stops_at_composite(small_table):
    assert index_chain(small_table, 7) == [7, 4]


# ----------------------------------------------------------------
# 2. Tests for: higher_order_sequence
# ----------------------------------------------------------------

@pytest.mark.parametrize("k, m, expected", [
    (1, 4, [2, 3, 5, 7]),
    (2, 5, [3, 5, 11, 17, 31]),
    (3, 8, [5, 11, 31, 59, 127, 179, 277, 331]),
    (4, 5, [11, 31, 127, 277, 709]),
    (5, 3, [31, 127, 709]),
])
def test_higher_order_sequence(k, m, expected, small_table):
    assert higher_order_sequence(small_table, k, m) == expected


def test_higher_order_sequence_exhaustion_names_term_and_depth(small_table):
    """p^(5)_4 walks 4 -> 7 -> 17 -> 59 -> 277, and p_277 lies beyond pi(1000) = 168."""
    with pytest.raises(TableExhaustedError) as info:
        higher_order_sequence(small_table, 5, 4)
    assert info.value.term == 4
    assert info.value.depth == 5


def test_higher_order_sequence_is_order_filter(table_1e5):
    """p^(k) up to x equals the primes <= x whose order is at least k."""
    x = 10_000
    for k in range(1, 5):
        expected = [p for p in table_1e5.primes.tolist() if p <= x and primeness_order(table_1e5, p) >= k]
        assert higher_order_sequence(table_1e5, k, len(expected)) == expected


def test_higher_order_sequence_rejects_order_zero(small_table):
    with pytest.raises(DomainError):
        higher_order_sequence(small_table, 0, 3)


# ----------------------------------------------------------------
# 3. Tests for: P' constructions
# ----------------------------------------------------------------

def test_pprime_by_parity_first_terms(small_table, pprime_first_terms):
    assert pprime_by_parity(small_table, 75) == pprime_first_terms


@pytest.mark.parametrize("x, expected", [(2, [2]), (1, []), (0, [])])
def test_pprime_by_parity_edges(x, expected, small_table):
    assert pprime_by_parity(small_table, x) == expected


def test_pprime_by_nsieve_chart_to_100(small_table):
    """The circled numbers of the N-sieve chart up to 100."""
    assert pprime_by_nsieve(small_table, 100) == [
        2, 5, 7, 13, 19, 23, 29, 31, 37, 43, 47, 53, 59, 61, 71, 73, 79, 89, 97,
    ]


@pytest.mark.parametrize("x, expected", [(5, [2, 5]), (1, []), (2, [2])])
def test_pprime_by_nsieve_edges(x, expected, small_table):
    assert pprime_by_nsieve(small_table, x) == expected


def test_pprime_beyond_limit(small_table):
    with pytest.raises(BoundError):
        pprime_by_parity(small_table, 1001)
    with pytest.raises(BoundError):
        pprime_by_nsieve(small_table, 1001)


def test_constructions_agree_full_prefix(table_1e5):
    """Parity and N-sieve P' agree element for element up to 10^5 (so on every prefix)."""
    assert pprime_by_parity(table_1e5, 100_000) == pprime_by_nsieve(table_1e5, 100_000)


@pytest.mark.parametrize("x", [3, 10, 97, 100, 541, 1000, 7919, 31_337, 65_536, 99_991])
def test_constructions_agree_spot_grid(x):
    """Spot grid of bounds, each with a table sieved exactly to x."""
    table = sieve_upto(x)
    assert pprime_by_parity(table, x) == pprime_by_nsieve(table, x)


def test_compare_constructions_reports_agreement(table_1e5):
    comparison = compare_constructions(table_1e5, 100_000)
    assert comparison.equal
    assert comparison.first_divergence is None
    assert comparison.parity_length == comparison.nsieve_length


@pytest.mark.parametrize("nsieve, position, parity_value, nsieve_value", [
    ([2, 5, 11], 3, 7, 11),
    ([2, 5], 3, 7, None),
    ([2, 5, 7, 11], 4, None, 11),
    ([3, 5, 7], 1, 2, 3),
])
def test_compare_constructions_reports_divergence(nsieve, position, parity_value, nsieve_value,
                                                  small_table, monkeypatch):
    """A differing, truncated or longer N-sieve list is reported at its first differing term."""
    monkeypatch.setattr("src.order_classifier.pprime_by_nsieve", lambda table, x: nsieve)
    comparison = compare_constructions(small_table, 10)
    assert not comparison.equal
    assert (comparison.parity_length, comparison.nsieve_length) == (3, len(nsieve))
    assert comparison.first_divergence == position
    assert (comparison.parity_value, comparison.nsieve_value) == (parity_value, nsieve_value)


# ----------------------------------------------------------------
# 4. Tests for: P'' and the partition
# ----------------------------------------------------------------

def test_pdoubleprime_first_terms(small_table, pdoubleprime_first_terms):
    assert pdoubleprime(small_table, 250) == pdoubleprime_first_terms


@pytest.mark.parametrize("x, expected", [(3, [3]), (2, [])])
def test_pdoubleprime_edges(x, expected, small_table):
    assert pdoubleprime(small_table, x) == expected


def test_pdoubleprime_equals_even_orders(table_1e5):
    """P'' built from P' indexes equals the even-order primes."""
    for x in (10, 1000, 100_000):
        assert pdoubleprime(table_1e5, x) == pdoubleprime_by_parity(table_1e5, x)


def test_index_map_identity(table_1e5):
    """p is in P'' iff prime_index(p) is in P' (checked where the index is within range)."""
    x = 100_000
    pprimes = set(pprime_by_parity(table_1e5, x))
    pdoubles = set(pdoubleprime(table_1e5, x))
    for p in table_1e5.primes.tolist():
        index = prime_index(table_1e5, p)
        assert (p in pdoubles) == (index in pprimes)


@pytest.mark.parametrize("x, n_pprime, n_pdouble, pi", [
    (2, 1, 0, 1),
    (10, 3, 1, 4),
    (100, 19, 6, 25),
])
def test_verify_partition_counts(x, n_pprime, n_pdouble, pi, small_table):
    report = verify_partition(small_table, x)
    assert (report.pprime_count, report.pdoubleprime_count, report.pi) == (n_pprime, n_pdouble, pi)
    assert report.disjoint and report.complete
    assert report.counterexample is None
    assert report.passed


@pytest.mark.parametrize("x", [100, 1000, 10_000, 100_000, 1_000_000])
def test_partition_identity(x, table_1e6):
    """P'(x) and P''(x) are disjoint and cover all primes <= x."""
    report = verify_partition(table_1e6, x)
    assert report.passed
    assert report.pprime_count + report.pdoubleprime_count == prime_count(table_1e6, x)


# ----------------------------------------------------------------
# 5. Tests for: order_counts / alternating_sum_table
# ----------------------------------------------------------------

def test_order_counts_sum_to_pi(small_table):
    counts = order_counts(small_table, 1000)
    assert sum(counts.values()) == 168
    assert counts[1] > counts[2] > counts[3]


def test_alternating_sum_table_rows(small_table):
    """The first eleven rows reproduce the alternating-sum chart."""
    frame = alternating_sum_table(small_table, 31, depth=6)
    assert list(frame.columns) == ["+p(1)", "-p(2)", "+p(3)", "-p(4)", "+p(5)", "-p(6)", "p'"]
    assert frame["p'"].tolist() == [2, 0, 5, 7, 0, 13, 0, 19, 23, 29, 31]
    # 31 runs through five orders, 11 through four
    assert frame.loc[11].tolist() == [31, 31, 31, 31, 31, 0, 31]
    assert frame.loc[5].tolist() == [11, 11, 11, 11, 0, 0, 0]


def test_alternating_sum_table_bad_depth(small_table):
    with pytest.raises(DomainError):
        alternating_sum_table(small_table, 100, depth=0)


def test_alternating_sum_table_shallow_depth_keeps_true_parity(small_table):
    """Orders beyond the last column still decide the p' column."""
    frame = alternating_sum_table(small_table, 31, depth=2)
    assert list(frame.columns) == ["+p(1)", "-p(2)", "p'"]
    # 31 has order 5 (odd), 11 has order 4 (even)
    assert frame.loc[11].tolist() == [31, 31, 31]
    assert frame.loc[5].tolist() == [11, 11, 0]
    assert frame["p'"].tolist() == [2, 0, 5, 7, 0, 13, 0, 19, 23, 29, 31]


def test_order_cache_holds_at_most_two_tables():
    """Sieving many tables does not keep every order array alive."""
    tables = [sieve_upto(limit) for limit in (100, 200, 300, 400)]
    for table in tables:
        order_counts(table, table.limit)
    assert _order_array.cache_info().currsize <= 2


def test_alternating_sum_table_failure_is_logged_and_reraised(small_table, monkeypatch, caplog):
    def broken_orders(table, x):
        raise RuntimeError("lookup failed")

    monkeypatch.setattr("src.order_classifier._orders_upto", broken_orders)
    with caplog.at_level("ERROR"), pytest.raises(RuntimeError, match="lookup failed"):
        alternating_sum_table(small_table, 31)
    assert "Error building the alternating-sum chart up to 31" in caplog.text
