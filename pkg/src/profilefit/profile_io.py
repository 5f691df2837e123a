"""CSV ingestion and output for profile fitting.

Input files follow the renewables.ninja-style convention: a short metadata
preamble, then a header row, then one value per time step. Outputs are a
fitted-profile CSV, a JSON fit report, and optional plot-data CSVs holding
the chronological series and the descending-sorted duration curves.
"""

from __future__ import annotations

import csv
import json
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .fitcore import (
    NonFiniteValueError,
    Profile,
    ProfileFitError,
    ValueOutOfRangeError,
    validate_profile,
)

__all__ = [
    "CsvLayout",
    "CsvParseError",
    "FitReport",
    "LengthMismatchError",
    "MissingColumnError",
    "read_profile",
    "write_plot_data",
    "write_profile",
    "write_report",
]


class MissingColumnError(ProfileFitError):
    def __init__(self, column: str, path=None):
        self.column = column
        origin = f" in {path}" if path is not None else ""
        super().__init__(f"column {column!r} not found{origin}")


class CsvParseError(ProfileFitError):
    def __init__(self, line_number: int, content: str, path=None):
        self.line_number = line_number
        self.content = content
        origin = f"{path}:" if path is not None else "line "
        super().__init__(f"{origin}{line_number}: cannot parse {content!r}")


class LengthMismatchError(ProfileFitError):
    def __init__(self, message: str):
        super().__init__(message)


@dataclass(frozen=True)
class CsvLayout:
    """Shape of an input CSV: preamble to skip, then header, then data.

    The default matches files whose header sits on line 4 below three
    metadata lines, with the profile in an "electricity" column.
    """

    preamble_lines: int = 3
    value_column: str = "electricity"
    time_column: str | None = "time"
    delimiter: str = ","

    def __post_init__(self):
        if self.preamble_lines < 0:
            raise ValueError("preamble_lines must be >= 0")
        if not self.value_column:
            raise ValueError("value_column must be non-empty")
        if len(self.delimiter) != 1:
            raise ValueError("delimiter must be a single character")


@dataclass(frozen=True)
class FitReport:
    """Everything a script needs to know about one completed fit."""

    input_path: str
    m: int
    r: int
    n: int
    current_cf: float
    target_cf: float
    exponent: float
    achieved_cf: float
    status: str
    iterations: int
    elapsed_ms: float


def read_profile(
    path, layout: CsvLayout | None = None
) -> tuple[Profile, list[str] | None]:
    """Parse a profile CSV into a validated Profile plus optional timestamps.

    Skips ``layout.preamble_lines`` raw lines, reads the next line as the
    header, and extracts ``layout.value_column`` in file order. Values from
    ``layout.time_column`` are carried through verbatim when that column
    exists. Parse and validation errors report 1-based file line numbers.
    """
    if layout is None:
        layout = CsvLayout()
    path = Path(path)
    with open(path, encoding="utf-8", newline="") as fh:
        for _ in range(layout.preamble_lines):
            if fh.readline() == "":
                raise CsvParseError(
                    layout.preamble_lines, "file ends inside the preamble", path
                )
        reader = csv.reader(fh, delimiter=layout.delimiter)
        header = next(reader, None)
        if header is None:
            raise CsvParseError(layout.preamble_lines + 1, "missing header row", path)
        header = [name.strip() for name in header]
        if layout.value_column not in header:
            raise MissingColumnError(layout.value_column, path)
        value_idx = header.index(layout.value_column)
        time_idx = (
            header.index(layout.time_column)
            if layout.time_column and layout.time_column in header
            else None
        )

        values: list[float] = []
        timestamps: list[str] | None = [] if time_idx is not None else None
        first_data_line = layout.preamble_lines + 2
        for line_no, row in enumerate(reader, start=first_data_line):
            if not row:
                continue
            needed = value_idx if time_idx is None else max(value_idx, time_idx)
            if needed >= len(row):
                raise CsvParseError(line_no, layout.delimiter.join(row), path)
            cell = row[value_idx].strip()
            try:
                values.append(float(cell))
            except ValueError:
                raise CsvParseError(line_no, cell, path) from None
            if timestamps is not None:
                timestamps.append(row[time_idx])

    try:
        profile = validate_profile(np.asarray(values, dtype=np.float64))
    except NonFiniteValueError as exc:
        raise NonFiniteValueError(exc.index, line=exc.index + first_data_line) from None
    except ValueOutOfRangeError as exc:
        raise ValueOutOfRangeError(
            exc.index, exc.value, line=exc.index + first_data_line
        ) from None
    return profile, timestamps


def write_profile(
    path,
    timestamps: list[str] | None,
    original: Profile,
    fitted: Profile,
    layout: CsvLayout | None = None,
) -> None:
    """Write original and fitted series side by side.

    Header is ``time,original,fitted`` when timestamps are given, otherwise
    ``original,fitted``. Floats are rendered with shortest round-trip
    precision, so reading the file back reproduces them exactly.
    """
    if layout is None:
        layout = CsvLayout()
    if len(original) != len(fitted):
        raise LengthMismatchError(
            f"original has {len(original)} values but fitted has {len(fitted)}"
        )
    if timestamps is not None and len(timestamps) != len(original):
        raise LengthMismatchError(
            f"{len(timestamps)} timestamps for {len(original)} values"
        )
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, delimiter=layout.delimiter, lineterminator="\n")
        if timestamps is not None:
            writer.writerow(["time", "original", "fitted"])
            for t, orig, fit in zip(timestamps, original.values, fitted.values):
                writer.writerow([t, float(orig), float(fit)])
        else:
            writer.writerow(["original", "fitted"])
            for orig, fit in zip(original.values, fitted.values):
                writer.writerow([float(orig), float(fit)])


def write_report(path, report: FitReport) -> None:
    """Serialize one fit report as a single JSON object."""
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(asdict(report), fh, indent=2)
        fh.write("\n")


def write_plot_data(path_prefix, original: Profile, fitted: Profile) -> None:
    """Emit plot-ready CSVs: chronological order and duration-curve order.

    ``<prefix>_chronological.csv`` keeps input order; ``<prefix>_sorted.csv``
    sorts each column independently in descending order. Both carry
    ``index,original,fitted`` with a 1-based index.
    """
    if len(original) != len(fitted):
        raise LengthMismatchError(
            f"original has {len(original)} values but fitted has {len(fitted)}"
        )
    prefix = str(path_prefix)
    _write_indexed(f"{prefix}_chronological.csv", original.values, fitted.values)
    _write_indexed(
        f"{prefix}_sorted.csv",
        np.sort(original.values)[::-1],
        np.sort(fitted.values)[::-1],
    )


def _write_indexed(path: str, original: np.ndarray, fitted: np.ndarray) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["index", "original", "fitted"])
        for i, (orig, fit) in enumerate(zip(original, fitted), start=1):
            writer.writerow([i, float(orig), float(fit)])
