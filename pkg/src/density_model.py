import logging
import math
from dataclasses import dataclass, asdict

import numpy as np
import pandas as pd

from src.exceptions import DomainError
from src.gap_series import gap_sum_at
from src.order_classifier import pprime_by_parity
from src.prime_engine import PrimeTable, prime_count

# Initialize the logger for this specific module
# This logger automatically inherits the configuration (format, level) defined in utils/main
logger = logging.getLogger(__name__)

# Densest packing of equal circles in the plane, pi*sqrt(3)/6
HEXAGONAL_PACKING_DENSITY = math.pi * math.sqrt(3) / 6

# Arguments must exceed 1 + DOMAIN_EPSILON so ln x is safely away from 0
DOMAIN_EPSILON = 1e-9

MODEL_COLUMNS = ["x", "empirical_S", "model_S", "emp_r1", "model_r1", "emp_r2", "model_r2"]


@dataclass(frozen=True)
class ModelComparison:
    """Empirical gap-sum quantities at x side by side with their closed-form models."""
    x: int
    empirical_S: int
    model_S: float
    empirical_ratio1: float
    model_ratio1: float
    empirical_ratio2: float
    model_ratio2: float


@dataclass(frozen=True)
class AverageGapComparison:
    """Empirical average gaps of P' and of all primes up to x, with the ln x + 1 / ln x models."""
    x: int
    empirical_pprime_gap: float
    empirical_prime_gap: float
    empirical_difference: float
    model_pprime_gap: float
    model_prime_gap: float


def _require_above_one(value: float, name: str):
    """Domain guard for every ln-based model."""
    if not value > 1 + DOMAIN_EPSILON:
        raise DomainError(f"{name} must exceed 1, got {value}")


def _require_unit_disc(x: float):
    """The alternating geometric series only converges for |x| < 1."""
    if not abs(x) < 1:
        raise DomainError(f"Series diverges for |x| >= 1, got {x}")


def geometric_tail(x: float) -> float:
    """T = x - x^2 + x^3 - ... = x / (1 + x) for |x| < 1."""
    _require_unit_disc(x)
    return x / (1 + x)


def truncated_alternating(x: float, terms: int) -> float:
    """Partial sum x - x^2 + x^3 - ... with `terms` terms."""
    _require_unit_disc(x)
    if terms < 1:
        raise DomainError(f"Need at least one term, got {terms}")
    powers = np.arange(1, terms + 1)
    signs = np.where(powers % 2 == 1, 1.0, -1.0)
    return float(np.sum(signs * np.power(float(x), powers)))


def pprime_density(n: float) -> float:
    """Density of P' near n: 1 / (ln n + 1)."""
    _require_above_one(n, "n")
    return 1 / (math.log(n) + 1)


def pprime_gap(n: float) -> float:
    """Average gap of P' near n: ln n + 1, the reciprocal of the density."""
    _require_above_one(n, "n")
    return math.log(n) + 1


def superprime_density(n: float, k: int) -> float:
    """Leading-order density of the k-th order sequence p^(k): 1 / (ln n)^k."""
    _require_above_one(n, "n")
    if k < 1:
        raise DomainError(f"Order k must be >= 1, got {k}")
    return math.log(n) ** -k


def alternating_density(n: float, depth: int) -> float:
    """
    Alternating sum of the superprime densities over orders 1..depth.
    Tends to pprime_density(n) as depth grows, whenever ln n > 1.
    """
    if depth < 1:
        raise DomainError(f"Depth must be >= 1, got {depth}")
    _require_above_one(n, "n")
    return sum((-1) ** (k - 1) * superprime_density(n, k) for k in range(1, depth + 1))


def gap_sum_model(x: float) -> float:
    """x [1 - ln x / (ln x + 1)], evaluated as x / (ln x + 1)."""
    _require_above_one(x, "x")
    return x / (math.log(x) + 1)


def gap_sum_complement_model(x: float) -> float:
    """x - gap_sum_model(x) in its own closed form: x [1 - 1 / (ln x + 1)]."""
    _require_above_one(x, "x")
    return x * (1 - 1 / (math.log(x) + 1))


def ratio_models(x: float) -> tuple[float, float]:
    """
    Closed forms of pi(x)/S(x) and pi(x)/(x - S(x)) under pi(x) ~ x/ln x.

    Returns:
        tuple: (r1, r2) = ((ln x + 1)/ln x, (ln x + 1)/(ln x)^2)
    """
    _require_above_one(x, "x")
    log_x = math.log(x)
    return (log_x + 1) / log_x, (log_x + 1) / log_x ** 2


def empirical_vs_model(table: PrimeTable, x: int) -> ModelComparison:
    """Joins the empirical gap sum at x with the closed-form models at the same x."""
    if x < 3:
        raise DomainError(f"Comparison needs x >= 3, got {x}")

    try:
        _, gap_sum = gap_sum_at(table, x)
        pi_x = prime_count(table, x)
        r1, r2 = ratio_models(x)

        comparison = ModelComparison(
            x=x,
            empirical_S=gap_sum,
            model_S=gap_sum_model(x),
            empirical_ratio1=pi_x / gap_sum,
            model_ratio1=r1,
            empirical_ratio2=pi_x / (x - gap_sum),
            model_ratio2=r2,
        )
        logger.info(f"Model comparison at {x}: S={gap_sum} vs {comparison.model_S:.1f}")
        return comparison

    except Exception as e:
        logger.error(f"Error comparing empirical values with models at {x}: {e}")
        raise e


def average_gap_comparison(table: PrimeTable, x: int) -> AverageGapComparison:
    """
    Average gaps up to x: x / |P'(x)| and x / pi(x), reported beside ln x + 1 and ln x.
    Trend data only; nothing here asserts that the difference approaches 1.
    """
    if x < 3:
        raise DomainError(f"Average gaps need x >= 3, got {x}")

    pprime_total = len(pprime_by_parity(table, x))
    pi_x = prime_count(table, x)
    pprime_avg = x / pprime_total
    prime_avg = x / pi_x
    return AverageGapComparison(
        x=x,
        empirical_pprime_gap=pprime_avg,
        empirical_prime_gap=prime_avg,
        empirical_difference=pprime_avg - prime_avg,
        model_pprime_gap=pprime_gap(x),
        model_prime_gap=math.log(x),
    )


def model_frame(comparisons: list[ModelComparison]) -> pd.DataFrame:
    """ModelComparison rows as a DataFrame with the serialised column names."""
    frame = pd.DataFrame([asdict(c) for c in comparisons])
    frame = frame.rename(columns={
        "empirical_ratio1": "emp_r1", "model_ratio1": "model_r1",
        "empirical_ratio2": "emp_r2", "model_ratio2": "model_r2",
    })
    return frame.reindex(columns=MODEL_COLUMNS)
