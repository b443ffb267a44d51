import logging
import os
import re
import tempfile
from dataclasses import dataclass
from pathlib import Path

import requests

from src.exceptions import BFileParseError, BFileStructureError, FetchError, UsageError
from src.utils import resolve_path

# Initialize the logger for this specific module
# This logger automatically inherits the configuration (format, level) defined in utils/main
logger = logging.getLogger(__name__)

OEIS_BFILE_URL = "https://oeis.org/{seq_id}/b{digits}.txt"
SEQUENCE_ID_PATTERN = re.compile(r"^A(\d{6})$")
FETCH_TIMEOUT_SECONDS = 30

# Which generated stream each supported sequence is checked against
REFERENCE_STREAMS = {
    "A333242": "pprime",
    "A348677": "gaps",
}


@dataclass(frozen=True)
class BFileEntry:
    """One `index value` line of an OEIS b-file."""
    index: int
    value: int


@dataclass(frozen=True)
class Mismatch:
    """First position where a generated sequence disagrees with the reference."""
    index: int
    expected: int
    got: int


@dataclass(frozen=True)
class CrossCheckReport:
    """Outcome of comparing a generated sequence against b-file entries."""
    compared: int
    passed: bool
    degenerate: bool
    mismatch: Mismatch | None = None


def parse_bfile(text: str) -> list[BFileEntry]:
    """
    Parses b-file text into entries, in file order.

    Blank lines and `#` comments are skipped; LF and CRLF line endings are both accepted.
    Raises BFileParseError (with the line number) on a malformed line and
    BFileStructureError when indexes are not contiguous.
    """
    entries = []
    for line_number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue

        parts = line.split()
        if len(parts) != 2:
            raise BFileParseError(f"expected 'index value', got {raw!r}", line_number)
        try:
            index, value = int(parts[0]), int(parts[1])
        except ValueError:
            raise BFileParseError(f"non-integer field in {raw!r}", line_number) from None

        if entries and index != entries[-1].index + 1:
            raise BFileStructureError(
                f"index {index} on line {line_number} does not follow {entries[-1].index}"
            )
        entries.append(BFileEntry(index=index, value=value))

    logger.debug(f"Parsed {len(entries)} b-file entries")
    return entries


def serialize_bfile(entries: list[BFileEntry]) -> str:
    """Writes entries back to b-file text, one `index value` line each."""
    return "".join(f"{e.index} {e.value}\n" for e in entries)


def _decode(data: bytes, source) -> str:
    """UTF-8 text of a b-file; undecodable bytes become a BFileParseError on their line."""
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError as e:
        line_number = data.count(b"\n", 0, e.start) + 1
        raise BFileParseError(f"{source} is not valid UTF-8 ({e.reason})", line_number) from None


def load_bfile(filename) -> list[BFileEntry]:
    """
    Loads and parses a b-file from a path.
    Relative paths are resolved against the project root.
    """
    path = resolve_path(filename)
    try:
        data = path.read_bytes()
    except FileNotFoundError:
        logger.error(f"File not found: {path}")
        raise FileNotFoundError(f"File not found: {path}")
    except OSError as e:
        # directories, permissions and the like
        logger.error(f"Cannot read b-file {path}: {e}")
        raise FetchError(f"Cannot read b-file {path}: {e.strerror or e}") from e
    return parse_bfile(_decode(data, path))


def crosscheck(generated: list[int], reference: list[BFileEntry]) -> CrossCheckReport:
    """
    Compares a generated sequence with reference entries over their common length.

    The first differing position is reported regardless of which list is longer.
    Zero compared terms is a pass flagged as degenerate.
    """
    compared = min(len(generated), len(reference))
    if compared == 0:
        logger.warning("Cross-check compared zero terms")
        return CrossCheckReport(compared=0, passed=True, degenerate=True)

    for got, entry in zip(generated, reference):
        if got != entry.value:
            logger.info(f"Cross-check mismatch at index {entry.index}: expected {entry.value}, got {got}")
            return CrossCheckReport(
                compared=compared, passed=False, degenerate=False,
                mismatch=Mismatch(index=entry.index, expected=entry.value, got=got),
            )

    logger.info(f"Cross-check passed over {compared} terms")
    return CrossCheckReport(compared=compared, passed=True, degenerate=False)


def reference_stream(seq_id: str) -> str:
    """Name of the generated stream a sequence id is checked against ('pprime' or 'gaps')."""
    validate_sequence_id(seq_id)
    try:
        return REFERENCE_STREAMS[seq_id]
    except KeyError:
        raise UsageError(f"No generator is registered for {seq_id}; supported: {sorted(REFERENCE_STREAMS)}") from None


def validate_sequence_id(seq_id: str) -> str:
    """Returns the 6 digits of an `A` + 6 digits id, or raises UsageError."""
    match = SEQUENCE_ID_PATTERN.match(seq_id or "")
    if match is None:
        raise UsageError(f"Malformed OEIS id {seq_id!r}; expected 'A' followed by 6 digits")
    return match.group(1)


def cache_path(seq_id: str, cache_dir) -> Path:
    """Location of the cached b-file for a sequence id."""
    digits = validate_sequence_id(seq_id)
    return Path(cache_dir) / f"b{digits}.txt"


def _write_atomic(path: Path, data: bytes):
    """Writes to a temp file in the target directory, then renames it into place."""
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as handle:
            handle.write(data)
        os.replace(tmp_name, path)
    except Exception:
        Path(tmp_name).unlink(missing_ok=True)
        raise


def fetch_bfile(seq_id: str, cache_dir, allow_network: bool = False) -> str:
    """
    Returns the b-file text for a sequence, from the cache when present.

    On a cache miss the file is downloaded (only when allow_network is set),
    stored verbatim and atomically, then returned. A cold cache without network
    raises FetchError.
    """
    digits = validate_sequence_id(seq_id)
    path = cache_path(seq_id, cache_dir)

    if path.exists():
        logger.info(f"Serving {seq_id} from cache: {path}")
        try:
            data = path.read_bytes()
        except OSError as e:
            logger.error(f"Cannot read cached b-file {path}: {e}")
            raise FetchError(f"Cannot read cached b-file {path}: {e.strerror or e}") from e
        return _decode(data, path)

    if not allow_network:
        raise FetchError(f"{seq_id} is not cached in {cache_dir} and network access is disabled")

    url = OEIS_BFILE_URL.format(seq_id=seq_id, digits=digits)
    try:
        logger.info(f"Downloading {url}")
        response = requests.get(url, timeout=FETCH_TIMEOUT_SECONDS)
        response.raise_for_status()
    except requests.RequestException as e:
        logger.error(f"Download of {seq_id} failed: {e}")
        raise FetchError(f"Could not download {seq_id}: {e}") from e

    # decode first so a corrupt download never reaches the cache
    text = _decode(response.content, url)
    _write_atomic(path, response.content)
    return text
