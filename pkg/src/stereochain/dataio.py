"""Dataset files (CSV and JSON Lines) and structured report documents.

Floats are serialized with Python's shortest round-trip representation,
so write-then-read reproduces every value bit for bit.  All writes are
atomic: the content goes to a temporary file in the target directory
first and is moved into place with a single rename.
"""

from __future__ import annotations

import json
import math
import os
import tempfile
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .dataset import Dataset
from .errors import (
    DatasetIoError,
    EmptyFileError,
    NonFiniteValueError,
    ParseError,
    RaggedRowsError,
)

SCHEMA_VERSION = 1

# Characters that can occur inside a serialized float; none of them can
# serve as a field delimiter without breaking the round-trip guarantee.
_FORBIDDEN_DELIMITER_CHARS = set("0123456789-+.eE")


@dataclass(frozen=True)
class DatasetFileFormat:
    """How a dataset file is laid out.

    ``kind`` is "csv" or "jsonl".  ``has_header`` applies to CSV only:
    True and False force the interpretation of the first line, None asks
    the reader to detect it by trying to parse the first line as
    numbers.  ``delimiter`` must be a single character that cannot
    appear inside a serialized float and is not whitespace.
    """

    kind: str = "csv"
    has_header: bool | None = None
    delimiter: str = ","

    def __post_init__(self) -> None:
        if self.kind not in ("csv", "jsonl"):
            raise ValueError(f"unknown dataset format {self.kind!r}")
        d = self.delimiter
        if len(d) != 1 or d.isspace() or d in _FORBIDDEN_DELIMITER_CHARS:
            raise ValueError(f"unusable delimiter {d!r}")


def infer_format(path: str | Path) -> DatasetFileFormat:
    """Guess the file format from the suffix; CSV is the fallback."""
    suffix = Path(path).suffix.lower()
    if suffix in (".jsonl", ".ndjson"):
        return DatasetFileFormat(kind="jsonl")
    return DatasetFileFormat(kind="csv")


def _parse_float(text: str, line_no: int, col_no: int) -> float:
    try:
        value = float(text)
    except ValueError:
        raise ParseError(f"could not read {text!r} as a number", line_no, col_no) from None
    if not math.isfinite(value):
        raise NonFiniteValueError(f"non-finite value {text!r}", line_no, col_no)
    return value


def _read_csv(path: Path, fmt: DatasetFileFormat) -> list[list[float]]:
    lines = path.read_text().splitlines()
    numbered = [(i + 1, ln) for i, ln in enumerate(lines) if ln.strip() != ""]
    if not numbered:
        raise EmptyFileError(f"{path} holds no data rows")
    has_header = fmt.has_header
    if has_header is None:
        # a first line that parses cleanly as numbers is data
        first = numbered[0][1].split(fmt.delimiter)
        try:
            for cell in first:
                value = float(cell)
                if not math.isfinite(value):
                    break
            else:
                has_header = False
        except ValueError:
            has_header = True
        if has_header is None:
            has_header = False
    if has_header:
        numbered = numbered[1:]
        if not numbered:
            raise EmptyFileError(f"{path} holds a header but no data rows")
    rows: list[list[float]] = []
    for line_no, line in numbered:
        cells = line.split(fmt.delimiter)
        row = [
            _parse_float(cell.strip(), line_no, c + 1) for c, cell in enumerate(cells)
        ]
        if rows and len(row) != len(rows[0]):
            raise RaggedRowsError(
                f"row has {len(row)} fields, expected {len(rows[0])}", line_no
            )
        rows.append(row)
    return rows


def _read_jsonl(path: Path) -> list[list[float]]:
    lines = path.read_text().splitlines()
    numbered = [(i + 1, ln) for i, ln in enumerate(lines) if ln.strip() != ""]
    if not numbered:
        raise EmptyFileError(f"{path} holds no data rows")
    rows: list[list[float]] = []
    for line_no, line in numbered:
        try:
            payload = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc.msg}", line_no) from None
        if not isinstance(payload, list) or not payload:
            raise ParseError("each line must be a non-empty JSON array", line_no)
        row = []
        for c, cell in enumerate(payload):
            if isinstance(cell, bool) or not isinstance(cell, (int, float)):
                raise ParseError(f"entry {cell!r} is not a number", line_no, c + 1)
            if not math.isfinite(cell):
                raise NonFiniteValueError(f"non-finite value {cell!r}", line_no, c + 1)
            row.append(float(cell))
        if rows and len(row) != len(rows[0]):
            raise RaggedRowsError(
                f"row has {len(row)} fields, expected {len(rows[0])}", line_no
            )
        rows.append(row)
    return rows


def read_dataset(path: str | Path, fmt: DatasetFileFormat | None = None) -> Dataset:
    """Read a dataset file; row ids are assigned 0..n-1 in file order."""
    path = Path(path)
    if fmt is None:
        fmt = infer_format(path)
    if fmt.kind == "csv":
        rows = _read_csv(path, fmt)
    else:
        rows = _read_jsonl(path)
    return Dataset(np.array(rows, dtype=float), tuple(range(len(rows))))


def _atomic_write_text(path: Path, text: str) -> None:
    path = Path(path)
    try:
        fd, tmp_name = tempfile.mkstemp(
            prefix=path.name + ".", suffix=".tmp", dir=path.parent
        )
        try:
            with os.fdopen(fd, "w") as handle:
                handle.write(text)
            os.replace(tmp_name, path)
        except BaseException:
            os.unlink(tmp_name)
            raise
    except OSError as exc:
        raise DatasetIoError(f"could not write {path}: {exc}") from exc


def write_dataset(
    X: Dataset, path: str | Path, fmt: DatasetFileFormat | None = None
) -> None:
    """Write a dataset with bit-exact float round-tripping."""
    path = Path(path)
    if fmt is None:
        fmt = infer_format(path)
    if fmt.kind == "csv":
        lines = []
        if fmt.has_header:
            lines.append(fmt.delimiter.join(f"x{c}" for c in range(X.dim)))
        lines.extend(
            fmt.delimiter.join(repr(float(v)) for v in row) for row in X.points
        )
    else:
        lines = [json.dumps([float(v) for v in row]) for row in X.points]
    _atomic_write_text(path, "\n".join(lines) + "\n")


def make_report_doc(command: str, seed: int, inputs: dict, results: dict) -> dict:
    """Assemble the single report document shape used by every command."""
    return {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "seed": seed,
        "inputs": inputs,
        "results": results,
    }


def write_report_doc(path: str | Path, doc: dict) -> None:
    """Write a report document as stable, human-readable JSON.

    Key order follows construction order, which the callers keep fixed,
    so identical inputs produce byte-identical files.  Wall-clock time
    never goes into the document body.
    """
    _atomic_write_text(Path(path), json.dumps(doc, indent=2) + "\n")
