import logging
from decimal import Decimal, ROUND_HALF_UP, localcontext
from fractions import Fraction
from pathlib import Path


def setup_logging(level=logging.INFO):
    """
    Sets up the logging configuration for the entire project.
    """
    # Configure the logging system with a specific format including time.
    # force=True lets the CLI reconfigure the level on every invocation.
    logging.basicConfig(level=level, format='%(asctime)s - %(levelname)s - %(message)s', force=True)


def verbosity_to_level(verbosity: int) -> int:
    """Maps the count of -v flags to a logging level (0 -> WARNING, 1 -> INFO, 2+ -> DEBUG)."""
    if verbosity <= 0:
        return logging.WARNING
    if verbosity == 1:
        return logging.INFO
    return logging.DEBUG


def resolve_path(filename) -> Path:
    """
    Resolves a filename or absolute path.
    Relative paths are resolved against the project root.
    """
    # '.parents[1]' assumes this script is located in a subdirectory (e.g., 'src/')
    base_dir = Path(__file__).resolve().parents[1]
    path = Path(filename)

    # Join relative paths with the project root to get a full absolute path
    if not path.is_absolute():
        path = base_dir / path

    logging.debug(f"Resolved path: {path}")
    return path


def round_ratio(ratio: Fraction, places: int = 5) -> Decimal:
    """
    Rounds an exact ratio to a fixed number of decimals, half away from zero.

    The division runs in a local decimal context wide enough that the only
    rounding that happens is the final quantize.
    """
    with localcontext() as ctx:
        ctx.prec = 60
        value = Decimal(ratio.numerator) / Decimal(ratio.denominator)
        return value.quantize(Decimal(1).scaleb(-places), rounding=ROUND_HALF_UP)
