import logging
from dataclasses import dataclass, asdict
from fractions import Fraction
from functools import lru_cache

import numpy as np
import pandas as pd

from src.exceptions import BoundError, DomainError, TableExhaustedError
from src.order_classifier import pprime_by_parity
from src.prime_engine import PrimeTable, prime_count
from src.utils import round_ratio

# Initialize the logger for this specific module
# This logger automatically inherits the configuration (format, level) defined in utils/main
logger = logging.getLogger(__name__)

# Bounds of the published estimation table, 1E02 through 10E6
PUBLISHED_BOUNDS = [
    100, 1000, 10_000, 100_000, 1_000_000, 2_000_000, 3_000_000, 4_000_000,
    5_000_000, 6_000_000, 7_000_000, 8_000_000, 9_000_000, 10_000_000,
]

REPORT_COLUMNS = ["bound", "pi", "gap_sum", "c3"]
VERBOSE_COLUMNS = REPORT_COLUMNS + ["n_terms", "last_upper"]


@dataclass(frozen=True)
class GapEntry:
    """One term of the gap sequence: upper = p_{p'_n}, lower = p_{p'_n - 1}."""
    n: int
    p_prime_n: int
    upper: int
    lower: int
    gap: int


@dataclass(frozen=True)
class ReportRow:
    """One row of the estimation table. `c3` is exact; rounding happens at output."""
    bound: int
    pi_x: int
    gap_sum: int
    c3: Fraction
    n_terms: int
    last_upper: int | None


@lru_cache(maxsize=2)
def _gap_arrays(table: PrimeTable):
    """
    P' values usable as indexes into the table, with their upper/lower primes.
    Cached per table; the arrays are returned read-only.

    Returns (p_prime, upper, lower) where upper[i] = p_{p'_i} and
    lower[i] = p_{p'_i - 1}. Only P' elements <= pi(limit) can be looked up.
    """
    try:
        # Step 1: P' up to pi(limit), the only indexes the table can resolve
        p_prime = np.asarray(pprime_by_parity(table, table.count), dtype=np.int64)

        # Step 2: the prime at each index and the prime just before it
        upper = table.primes[p_prime - 1]
        # p'_1 = 2 is the smallest P' index, so p'_n - 1 >= 1 always
        lower = table.primes[p_prime - 2]
        for array in (p_prime, upper, lower):
            array.flags.writeable = False
        return p_prime, upper, lower

    except Exception as e:
        logger.error(f"Error building gap arrays for table limit {table.limit}: {e}")
        raise e


def gap_terms(table: PrimeTable, count: int) -> list[GapEntry]:
    """
    First `count` terms of the gap sequence p_{p'_n} - p_{p'_n - 1}.
    Raises TableExhaustedError naming the first term whose upper prime is not in the table.
    """
    if count < 0:
        raise DomainError(f"Term count must be >= 0, got {count}")

    p_prime, upper, lower = _gap_arrays(table)
    if count > p_prime.size:
        missing = p_prime.size + 1
        raise TableExhaustedError(
            f"Gap term {missing} needs p_(p'_{missing}) beyond the table limit {table.limit}",
            term=missing,
        )

    return [
        GapEntry(n=i + 1, p_prime_n=int(p_prime[i]), upper=int(upper[i]),
                 lower=int(lower[i]), gap=int(upper[i] - lower[i]))
        for i in range(count)
    ]


def _gap_sum_with_last(table: PrimeTable, x: int) -> tuple[int, int, int | None]:
    """(N, S, p_{p'_N}) for the bound x."""
    if x > table.limit:
        raise BoundError(f"Bound {x} exceeds table limit {table.limit}")

    # p_{p'_n} <= x  <=>  p'_n <= pi(x)
    p_prime, upper, lower = _gap_arrays(table)
    n_terms = int(np.searchsorted(p_prime, prime_count(table, x), side="right"))
    gap_sum = int((upper[:n_terms] - lower[:n_terms]).sum())
    last_upper = int(upper[n_terms - 1]) if n_terms else None
    return n_terms, gap_sum, last_upper


def gap_sum_at(table: PrimeTable, x: int) -> tuple[int, int]:
    """
    N = max{n : p_{p'_n} <= x} and S = sum of the first N gaps.
    """
    n_terms, gap_sum, _ = _gap_sum_with_last(table, x)
    return n_terms, gap_sum


def c3_ratio(table: PrimeTable, x: int) -> Fraction:
    """pi(x) / S(x) as an exact fraction."""
    _, gap_sum = gap_sum_at(table, x)
    if gap_sum == 0:
        raise DomainError(f"Gap sum is zero at x={x}; the ratio needs x >= 3")
    return Fraction(prime_count(table, x), gap_sum)


def estimate_pi(table: PrimeTable, x: int, c: float) -> float:
    """The estimator pi(x) ~ c * S(x)."""
    if c <= 0:
        raise DomainError(f"Constant must be positive, got {c}")
    if x < 3:
        raise DomainError(f"Estimation needs x >= 3, got {x}")
    _, gap_sum = gap_sum_at(table, x)
    return c * gap_sum


def estimate_relative_error(table: PrimeTable, x: int, c: float) -> float:
    """|c * S(x) - pi(x)| / pi(x)."""
    pi_x = prime_count(table, x)
    return abs(estimate_pi(table, x, c) - pi_x) / pi_x


def build_report(table: PrimeTable, bounds: list[int]) -> list[ReportRow]:
    """
    One ReportRow per bound, in input order.

    Every bound is validated before any row is computed, so an invalid bound
    fails the whole report and is named in the error.
    """
    for bound in bounds:
        if bound < 3:
            raise BoundError(f"Report bound {bound} is below 3")
        if bound > table.limit:
            raise BoundError(f"Report bound {bound} exceeds table limit {table.limit}")

    try:
        rows = []
        for bound in bounds:
            n_terms, gap_sum, last_upper = _gap_sum_with_last(table, bound)
            pi_x = prime_count(table, bound)
            rows.append(ReportRow(
                bound=bound, pi_x=pi_x, gap_sum=gap_sum, c3=Fraction(pi_x, gap_sum),
                n_terms=n_terms, last_upper=last_upper,
            ))

        logger.info(f"Built report with {len(rows)} rows")
        return rows

    except Exception as e:
        logger.error(f"Error building report: {e}")
        raise e


def report_frame(rows: list[ReportRow], verbose: bool = False) -> pd.DataFrame:
    """
    Report rows as a DataFrame with columns bound, pi, gap_sum, c3 (c3 rounded to 5 places,
    kept as a string so serialisation is bit-exact). verbose adds n_terms and last_upper.
    """
    frame = pd.DataFrame({
        "bound": [r.bound for r in rows],
        "pi": [r.pi_x for r in rows],
        "gap_sum": [r.gap_sum for r in rows],
        "c3": [str(round_ratio(r.c3)) for r in rows],
        "n_terms": [r.n_terms for r in rows],
        "last_upper": pd.array([r.last_upper for r in rows], dtype="Int64"),
    })
    return frame[VERBOSE_COLUMNS if verbose else REPORT_COLUMNS]


def report_to_csv(rows: list[ReportRow], verbose: bool = False) -> str:
    """CSV text with header `bound,pi,gap_sum,c3`, LF line endings."""
    return report_frame(rows, verbose).to_csv(index=False, lineterminator="\n")


def report_to_json(rows: list[ReportRow], verbose: bool = False) -> str:
    """JSON array of row objects with the CSV's keys; c3 is a number with 5 decimals."""
    frame = report_frame(rows, verbose).assign(c3=lambda f: f["c3"].astype(float))
    return frame.to_json(orient="records")


def gap_frame(entries: list[GapEntry]) -> pd.DataFrame:
    """GapEntry list as a DataFrame, one column per field."""
    return pd.DataFrame([asdict(e) for e in entries], columns=["n", "p_prime_n", "upper", "lower", "gap"])


def gap_statistics(entries: list[GapEntry]) -> tuple[pd.Series, pd.DataFrame]:
    """
    Descriptive statistics of the gap values and a frequency table of gap sizes.

    Returns:
        tuple: (summary Series with count/mean/std/min/max, frequency DataFrame indexed by gap)
    """
    if not entries:
        raise DomainError("No gap entries to summarise")

    try:
        gaps = gap_frame(entries)["gap"]

        # Step 1: descriptive statistics of the gap values
        summary = gaps.agg(["count", "mean", "std", "min", "max"])

        # Step 2: how often each gap size occurs, smallest gap first
        freq = gaps.value_counts().sort_index().rename_axis("gap").to_frame(name="count")

        logger.info(f"Gap statistics over {len(entries)} terms: mean {summary['mean']:.3f}")
        return summary, freq

    except Exception as e:
        logger.error(f"Error computing gap statistics: {e}")
        raise e
