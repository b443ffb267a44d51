"""
Command-line interface for the prime-sequence toolkit.

Usage:
    python main.py primes --limit 100 --count
    python main.py pprime --limit 75 --method both
    python main.py order 31
    python main.py table --bounds 1e2,1e3,1e4
    python main.py estimate --x 1e6 --c 0.9069
    python main.py sequence --k 3 --m 8
    python main.py oeis-check --seq A333242 --limit 10000 --bfile tests/data/b333242.txt
"""
import argparse
import json
import logging
import math
import os
import sys
from dataclasses import dataclass, asdict
from decimal import Decimal, InvalidOperation
from pathlib import Path

import pandas as pd

from src.density_model import (
    HEXAGONAL_PACKING_DENSITY,
    alternating_density,
    average_gap_comparison,
    empirical_vs_model,
    gap_sum_complement_model,
    model_frame,
    pprime_density,
)
from src.exceptions import PrimeSequenceError, TableExhaustedError, UsageError
from src.gap_series import (
    build_report,
    c3_ratio,
    estimate_pi,
    estimate_relative_error,
    gap_frame,
    gap_sum_at,
    gap_statistics,
    gap_terms,
    report_frame,
    report_to_csv,
    report_to_json,
)
from src.oeis_io import (
    REFERENCE_STREAMS,
    crosscheck,
    fetch_bfile,
    load_bfile,
    parse_bfile,
    reference_stream,
)
from src.order_classifier import (
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
    verify_partition,
)
from src.prime_engine import DEFAULT_MAX_LIMIT, prime_count, sieve_upto
from src.utils import round_ratio, setup_logging, verbosity_to_level

# Initialize the logger for this specific module
logger = logging.getLogger(__name__)

FORMATS = ("csv", "json", "plain")
# Default output format per command when --format is not given; others print plain
COMMAND_FORMATS = {"table": "csv", "density": "csv", "estimate": "csv"}
ENV_CACHE = "PRIMESEQ_OEIS_CACHE"
ENV_NETWORK = "PRIMESEQ_NETWORK"
ENV_MAX_LIMIT = "PRIMESEQ_MAX_LIMIT"
DEFAULT_CACHE_DIR = Path.home() / ".cache" / "primeseq" / "oeis"

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2


@dataclass(frozen=True)
class CliConfig:
    """Settings shared by every subcommand, resolved once from flags and environment."""
    limit: int | None
    output_format: str
    oeis_cache: Path
    network: bool
    verbosity: int
    max_limit: int


# ----------------------------------------------------------------
# Argument parsing
# ----------------------------------------------------------------

def parse_natural(text: str) -> int:
    """
    Parses a natural number given as a plain integer or scientific shorthand ("1e6", "10E6").
    Non-integral values are rejected rather than truncated.
    """
    try:
        value = Decimal(text.strip())
    except InvalidOperation:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not value.is_finite() or value != value.to_integral_value() or value < 0:
        raise argparse.ArgumentTypeError(f"not a natural number: {text!r}")
    return int(value)


def parse_limit(text: str) -> int:
    """A sieve bound: a natural number >= 2."""
    value = parse_natural(text)
    if value < 2:
        raise argparse.ArgumentTypeError(f"limit must be >= 2, got {value}")
    return value


def parse_positive(text: str) -> int:
    value = parse_natural(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def parse_positive_real(text: str) -> float:
    """A strictly positive finite real, e.g. the estimator constant."""
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not math.isfinite(value) or value <= 0:
        raise argparse.ArgumentTypeError(f"must be a positive number, got {text!r}")
    return value


def parse_bounds(text: str) -> list[int]:
    """Comma-separated report bounds, each >= 3."""
    bounds = [parse_natural(part) for part in text.split(",") if part.strip()]
    if not bounds:
        raise argparse.ArgumentTypeError("at least one bound is required")
    too_small = [b for b in bounds if b < 3]
    if too_small:
        raise argparse.ArgumentTypeError(f"report bounds must be >= 3, got {too_small[0]}")
    return bounds


def _env_flag(name: str) -> bool:
    return os.environ.get(name, "").strip().lower() in ("1", "true", "yes", "on")


def build_parser() -> argparse.ArgumentParser:
    """Builds the argparse parser with one subparser per operation."""
    parser = argparse.ArgumentParser(
        prog="primeseq",
        description="Higher-order prime subsequences P' and P'', gap sums and the pi(x) estimation table",
    )
    parser.add_argument("-v", "--verbose", action="count", default=0,
                        help="More logging on stderr; with `table`, adds n_terms and last_upper columns")
    parser.add_argument("--format", choices=FORMATS, default=None, dest="output_format",
                        help="Output format (default: csv for table/density/estimate, plain otherwise)")
    parser.add_argument("--oeis-cache", type=Path, default=None,
                        help=f"OEIS b-file cache directory (env {ENV_CACHE})")
    network = parser.add_mutually_exclusive_group()
    network.add_argument("--network", action="store_true", default=None,
                         help=f"Allow downloading b-files (env {ENV_NETWORK}=1)")
    network.add_argument("--offline", action="store_false", dest="network", default=None,
                         help="Never touch the network")
    parser.add_argument("--max-limit", type=parse_limit, default=None,
                        help=f"Largest permitted sieve bound (env {ENV_MAX_LIMIT}, default {DEFAULT_MAX_LIMIT})")

    # --format is also accepted after the subcommand; SUPPRESS leaves the global value alone when absent
    format_option = argparse.ArgumentParser(add_help=False)
    format_option.add_argument("--format", choices=FORMATS, default=argparse.SUPPRESS, dest="output_format",
                               help="Output format for this command")

    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add_command(name: str, **kwargs) -> argparse.ArgumentParser:
        return sub.add_parser(name, parents=[format_option], **kwargs)

    p = add_command("primes", help="Primes up to a limit")
    p.add_argument("--limit", type=parse_limit, required=True)
    p.add_argument("--count", action="store_true", help="Print pi(limit) only")

    p = add_command("pprime", help="P' up to a limit")
    p.add_argument("--limit", type=parse_limit, required=True)
    p.add_argument("--method", choices=("parity", "nsieve", "both"), default="parity")

    p = add_command("ppdouble", help="P'' up to a limit")
    p.add_argument("--limit", type=parse_limit, required=True)
    p.add_argument("--method", choices=("index", "parity"), default="index",
                   help="index: primes indexed by P' (default); parity: even-order primes")

    p = add_command("sequence", help="First M terms of the k-th order sequence p^(k)")
    p.add_argument("--k", type=parse_positive, required=True)
    p.add_argument("--m", type=parse_natural, required=True)

    p = add_command("order", help="Order of primeness of a prime and its index chain")
    p.add_argument("prime", type=parse_limit)

    p = add_command("order-counts", help="How many primes up to a limit have each order of primeness")
    p.add_argument("--limit", type=parse_limit, required=True)

    p = add_command("gaps", help="First N terms of the gap sequence")
    p.add_argument("--count", type=parse_positive, required=True)
    p.add_argument("--stats", action="store_true", help="Print gap statistics instead of the terms")

    p = add_command("table", help="Estimation table pi(x), S(x), C3")
    p.add_argument("--bounds", type=parse_bounds, required=True, help="e.g. 1e2,1e3,1e4")

    p = add_command("estimate", help="pi(x) estimated as c * S(x), with its relative error")
    p.add_argument("--x", type=parse_natural, required=True)
    p.add_argument("--c", type=parse_positive_real, default=HEXAGONAL_PACKING_DENSITY,
                   help="Estimator constant (default pi*sqrt(3)/6)")

    p = add_command("verify", help="Check that P' and P'' partition the primes")
    p.add_argument("--limit", type=parse_limit, required=True)

    p = add_command("density", help="Empirical gap sum against the closed-form models")
    p.add_argument("--x", type=parse_natural, required=True)
    p.add_argument("--depth", type=parse_positive, default=6,
                   help="Orders summed by the alternating density shown with -v")

    p = add_command("alt-table", help="Element-wise alternating-sum chart")
    p.add_argument("--limit", type=parse_limit, required=True)
    p.add_argument("--depth", type=parse_positive, default=6)

    p = add_command("oeis-check", help="Cross-check a generated sequence against an OEIS b-file")
    p.add_argument("--seq", required=True, choices=sorted(REFERENCE_STREAMS))
    p.add_argument("--limit", type=parse_limit, required=True)
    p.add_argument("--bfile", type=Path, default=None, help="Local b-file instead of the cache")
    p.add_argument("--offline", action="store_true", dest="check_offline",
                   help="Use the cached b-file only, same as the global --offline")

    return parser


def build_config(args: argparse.Namespace) -> CliConfig:
    """Resolves flags over environment overrides."""
    cache = args.oeis_cache or Path(os.environ.get(ENV_CACHE, DEFAULT_CACHE_DIR))
    network = args.network if args.network is not None else _env_flag(ENV_NETWORK)

    max_limit = args.max_limit
    if max_limit is None:
        env_value = os.environ.get(ENV_MAX_LIMIT)
        try:
            max_limit = parse_limit(env_value) if env_value else DEFAULT_MAX_LIMIT
        except argparse.ArgumentTypeError as e:
            raise UsageError(f"{ENV_MAX_LIMIT}: {e}") from None

    return CliConfig(
        limit=getattr(args, "limit", None),
        output_format=args.output_format or COMMAND_FORMATS.get(args.command, "plain"),
        oeis_cache=cache,
        network=network,
        verbosity=args.verbose,
        max_limit=max_limit,
    )


# ----------------------------------------------------------------
# Output helpers
# ----------------------------------------------------------------

def _emit(text: str):
    sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _emit_sequence(values: list[int], config: CliConfig):
    """Sequence dump: space separated (plain), `n,value` rows (csv) or a JSON array."""
    if config.output_format == "json":
        _emit(json.dumps(values))
    elif config.output_format == "csv":
        frame = pd.DataFrame({"n": range(1, len(values) + 1), "value": values})
        _emit(frame.to_csv(index=False, lineterminator="\n"))
    else:
        _emit(" ".join(str(v) for v in values))


def _emit_frame(frame: pd.DataFrame, config: CliConfig, index: bool = False):
    """Tabular output: aligned columns (plain), CSV, or JSON records."""
    if config.output_format == "json":
        _emit(frame.to_json(orient="records"))
    elif config.output_format == "csv":
        _emit(frame.to_csv(index=index, lineterminator="\n"))
    else:
        _emit(frame.to_string(index=index))


def _emit_record(record: dict, config: CliConfig):
    """A single record: `key: value` lines (plain), a one-row CSV, or a JSON object."""
    if config.output_format == "json":
        _emit(json.dumps(record))
    elif config.output_format == "csv":
        _emit(pd.DataFrame([record]).to_csv(index=False, lineterminator="\n"))
    else:
        _emit("\n".join(f"{key}: {value}" for key, value in record.items()))


# ----------------------------------------------------------------
# Subcommands
# ----------------------------------------------------------------

def _cmd_primes(args, config: CliConfig) -> int:
    table = sieve_upto(args.limit, max_limit=config.max_limit)
    if args.count:
        _emit(str(table.count))
    else:
        _emit_sequence(table.primes.tolist(), config)
    return EXIT_OK


def _cmd_pprime(args, config: CliConfig) -> int:
    table = sieve_upto(args.limit, max_limit=config.max_limit)
    if args.method == "parity":
        _emit_sequence(pprime_by_parity(table, args.limit), config)
        return EXIT_OK
    if args.method == "nsieve":
        _emit_sequence(pprime_by_nsieve(table, args.limit), config)
        return EXIT_OK

    comparison = compare_constructions(table, args.limit)
    _emit_sequence(pprime_by_parity(table, args.limit), config)
    if comparison.equal:
        sys.stderr.write(f"constructions agree: {comparison.parity_length} terms\n")
        return EXIT_OK
    sys.stderr.write(
        f"constructions differ at term {comparison.first_divergence}: "
        f"parity={comparison.parity_value} nsieve={comparison.nsieve_value}\n"
    )
    return EXIT_FAILURE


def _cmd_ppdouble(args, config: CliConfig) -> int:
    table = sieve_upto(args.limit, max_limit=config.max_limit)
    if args.method == "parity":
        _emit_sequence(pdoubleprime_by_parity(table, args.limit), config)
    else:
        _emit_sequence(pdoubleprime(table, args.limit), config)
    return EXIT_OK


def _sieve_until(produce, config: CliConfig, start: int = 100):
    """
    Sieves to `start`, then doubles the limit until `produce(table)` stops raising
    TableExhaustedError. Returns the produced value; gives up at the configured maximum.
    """
    limit = start
    while True:
        table = sieve_upto(min(limit, config.max_limit), max_limit=config.max_limit)
        try:
            return produce(table)
        except TableExhaustedError as e:
            if table.limit >= config.max_limit:
                raise e
            logger.info(f"{e}; doubling the sieve limit")
            limit *= 2


def _cmd_sequence(args, config: CliConfig) -> int:
    terms = _sieve_until(lambda table: higher_order_sequence(table, args.k, args.m), config)
    _emit_sequence(terms, config)
    return EXIT_OK


def _cmd_order(args, config: CliConfig) -> int:
    table = sieve_upto(args.prime, max_limit=config.max_limit)
    record = classify(table, args.prime)
    chain = index_chain(table, args.prime)
    if config.output_format == "plain":
        membership = "P'" if record.in_p_prime else "P''"
        _emit(f"{record.p}: order {record.order} ({membership}) chain {' -> '.join(map(str, chain))}")
    else:
        fields = asdict(record)
        fields["chain"] = chain if config.output_format == "json" else " ".join(map(str, chain))
        _emit_record(fields, config)
    return EXIT_OK


def _cmd_order_counts(args, config: CliConfig) -> int:
    table = sieve_upto(args.limit, max_limit=config.max_limit)
    counts = order_counts(table, args.limit)
    frame = pd.DataFrame({"order": list(counts), "count": list(counts.values())})
    frame["in_p_prime"] = frame["order"] % 2 == 1
    _emit_frame(frame, config)
    return EXIT_OK


def _cmd_gaps(args, config: CliConfig) -> int:
    # Grow the sieve by doubling until the requested number of terms exists
    entries = _sieve_until(lambda table: gap_terms(table, args.count), config)

    if args.stats:
        summary, freq = gap_statistics(entries)
        _emit_frame(summary.to_frame(name="value"), config, index=True)
        _emit_frame(freq, config, index=True)
    else:
        _emit_frame(gap_frame(entries), config)
    return EXIT_OK


def _cmd_table(args, config: CliConfig) -> int:
    # One sieve at the largest bound, reused for every row
    table = sieve_upto(max(args.bounds), max_limit=config.max_limit)
    rows = build_report(table, args.bounds)
    verbose = config.verbosity > 0
    if config.output_format == "csv":
        _emit(report_to_csv(rows, verbose))
    elif config.output_format == "json":
        _emit(report_to_json(rows, verbose))
    else:
        _emit(report_frame(rows, verbose).to_string(index=False))
    return EXIT_OK


def _cmd_verify(args, config: CliConfig) -> int:
    table = sieve_upto(args.limit, max_limit=config.max_limit)
    report = verify_partition(table, args.limit)
    record = asdict(report)
    record["passed"] = report.passed
    _emit_record(record, config)
    return EXIT_OK if report.passed else EXIT_FAILURE


def _cmd_density(args, config: CliConfig) -> int:
    if args.x < 3:
        raise UsageError(f"--x must be >= 3, got {args.x}")
    table = sieve_upto(args.x, max_limit=config.max_limit)
    comparison = empirical_vs_model(table, args.x)
    _emit_frame(model_frame([comparison]), config)
    if config.verbosity > 0:
        record = asdict(average_gap_comparison(table, args.x))
        # complement of the gap sum, x - S(x), beside its closed form
        record["empirical_complement"] = args.x - comparison.empirical_S
        record["model_complement"] = gap_sum_complement_model(args.x)
        record["pprime_density"] = pprime_density(args.x)
        record["alternating_density"] = alternating_density(args.x, args.depth)
        record["depth"] = args.depth
        _emit_record(record, config)
    return EXIT_OK


def _cmd_estimate(args, config: CliConfig) -> int:
    if args.x < 3:
        raise UsageError(f"--x must be >= 3, got {args.x}")
    table = sieve_upto(args.x, max_limit=config.max_limit)
    _, gap_sum = gap_sum_at(table, args.x)
    c3 = round_ratio(c3_ratio(table, args.x))
    record = {
        "x": args.x,
        "pi": prime_count(table, args.x),
        "gap_sum": gap_sum,
        "c3": float(c3) if config.output_format == "json" else str(c3),
        "c": args.c,
        "estimate": estimate_pi(table, args.x, args.c),
        "relative_error": estimate_relative_error(table, args.x, args.c),
    }
    _emit_record(record, config)
    return EXIT_OK


def _cmd_alt_table(args, config: CliConfig) -> int:
    table = sieve_upto(args.limit, max_limit=config.max_limit)
    _emit_frame(alternating_sum_table(table, args.limit, args.depth), config, index=True)
    return EXIT_OK


def _cmd_oeis_check(args, config: CliConfig) -> int:
    stream = reference_stream(args.seq)
    if args.bfile is not None:
        reference = load_bfile(args.bfile)
    else:
        reference = parse_bfile(fetch_bfile(args.seq, config.oeis_cache,
                                           allow_network=config.network and not args.check_offline))

    table = sieve_upto(args.limit, max_limit=config.max_limit)
    if stream == "pprime":
        generated = pprime_by_parity(table, args.limit)
    else:
        # every gap term whose upper prime lies within the limit
        generated = [e.gap for e in gap_terms(table, _available_gap_terms(table))]

    report = crosscheck(generated, reference)
    record = {"seq": args.seq, "compared": report.compared, "passed": report.passed,
              "degenerate": report.degenerate}
    if report.mismatch is not None:
        record.update({"index": report.mismatch.index, "expected": report.mismatch.expected,
                       "got": report.mismatch.got})
    _emit_record(record, config)
    return EXIT_OK if report.passed else EXIT_FAILURE


def _available_gap_terms(table) -> int:
    """How many gap terms a table can produce: the P' elements that are <= pi(limit)."""
    return len(pprime_by_parity(table, prime_count(table, table.limit)))


COMMANDS = {
    "primes": _cmd_primes,
    "pprime": _cmd_pprime,
    "ppdouble": _cmd_ppdouble,
    "sequence": _cmd_sequence,
    "order": _cmd_order,
    "order-counts": _cmd_order_counts,
    "gaps": _cmd_gaps,
    "table": _cmd_table,
    "estimate": _cmd_estimate,
    "verify": _cmd_verify,
    "density": _cmd_density,
    "alt-table": _cmd_alt_table,
    "oeis-check": _cmd_oeis_check,
}


def run(argv: list[str]) -> int:
    """
    Runs one CLI invocation and returns its exit code:
    0 success/pass, 1 computation error or failed check, 2 usage error.
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse exits 2 on usage errors and 0 on --help
        return int(e.code) if isinstance(e.code, int) else EXIT_USAGE

    setup_logging(verbosity_to_level(args.verbose))

    try:
        config = build_config(args)
        return COMMANDS[args.command](args, config)
    except UsageError as e:
        sys.stderr.write(f"usage error: {e}\n")
        return EXIT_USAGE
    except PrimeSequenceError as e:
        logger.debug(f"{args.command} failed", exc_info=True)
        sys.stderr.write(f"error: {e}\n")
        return EXIT_FAILURE
    except FileNotFoundError as e:
        sys.stderr.write(f"error: {e}\n")
        return EXIT_FAILURE
