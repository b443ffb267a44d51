"""
Exception hierarchy for the prime-sequence toolkit.

Every error raised on purpose by the package derives from PrimeSequenceError,
and additionally from the builtin it refines (ValueError, IndexError or
RuntimeError) so callers can keep catching the builtin types.
"""


class PrimeSequenceError(Exception):
    """Root of all toolkit errors."""


class BoundError(PrimeSequenceError, ValueError):
    """A limit or argument lies outside the sieved table or the configured maximum."""


class IndexRangeError(PrimeSequenceError, IndexError):
    """A 1-based prime index is 0 or larger than the table's prime count."""


class DomainError(PrimeSequenceError, ValueError):
    """An argument is outside the mathematical domain of the operation."""


class TableExhaustedError(PrimeSequenceError, RuntimeError):
    """
    The prime table is too small to produce a requested sequence term.

    `term` is the first unreachable 1-based term; `depth` is the nesting level
    of the index map at which the lookup failed, when that is meaningful.
    """

    def __init__(self, message: str, term: int, depth: int | None = None):
        super().__init__(message)
        self.term = term
        self.depth = depth


class BFileParseError(PrimeSequenceError, ValueError):
    """A b-file line could not be read as an `index value` pair."""

    def __init__(self, message: str, line_number: int):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


class BFileStructureError(PrimeSequenceError, ValueError):
    """b-file indexes are not strictly increasing and contiguous."""


class FetchError(PrimeSequenceError, RuntimeError):
    """A b-file could not be downloaded and no cached copy exists."""


class UsageError(PrimeSequenceError, ValueError):
    """Malformed user input, e.g. a sequence id that is not `A` + 6 digits."""
