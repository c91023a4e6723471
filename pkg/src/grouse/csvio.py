"""CSV schemas used by the command-line tool.

All files are UTF-8 with LF line endings and ``.`` decimals. Reals are
written with ``repr`` so that reading a file back gives the identical float.

* stream CSV: a header with one name per coordinate (its length declares n),
  then one vector per row; an empty field is an unobserved entry.
* entry-list CSV: header ``row,col,value``, one observed matrix entry per row.
* telemetry CSV: header ``TELEMETRY_FIELDS``, one row per reported step.
* matrix CSV: plain numeric rows, no header.
"""
from __future__ import annotations

import csv
import math
from dataclasses import astuple, dataclass, fields
from pathlib import Path

import numpy as np

from .linalg import MaskedVector
from .streamgen import SamplingModel, draw_mask


class CSVFormatError(ValueError):
    """Malformed CSV input; the message carries the file and line number."""


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    return "" if math.isnan(x) else repr(x)


def _open_write(path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    return open(path, "w", newline="", encoding="utf-8")


def _writer(fh):
    return csv.writer(fh, lineterminator="\n")


def _parse_float(cell: str, path, line: int) -> float:
    try:
        return float(cell)
    except ValueError:
        raise CSVFormatError(f"{path}:{line}: non-numeric cell {cell!r}") from None


# -- stream CSV ---------------------------------------------------------------

def write_stream_csv(path, vectors, masks=None, names=None) -> None:
    """Write full vectors; masked-out and NaN cells are left empty (unobserved)."""
    vectors = [np.asarray(v, dtype=np.float64) for v in vectors]
    if not vectors:
        raise ValueError("no vectors to write")
    n = vectors[0].shape[0]
    names = names or [f"x{i}" for i in range(n)]
    with _open_write(path) as fh:
        w = _writer(fh)
        w.writerow(names)
        for k, v in enumerate(vectors):
            if v.shape[0] != n:
                raise ValueError(f"vector {k} has length {v.shape[0]}, expected {n}")
            cells = [_fmt(x) for x in v]
            if masks is not None:
                keep = np.zeros(n, dtype=bool)
                keep[masks[k]] = True
                cells = [c if keep[i] else "" for i, c in enumerate(cells)]
            w.writerow(cells)


def read_stream_matrix(path) -> np.ndarray:
    """Whole stream CSV as a T x n array, NaN where a cell is empty."""
    rows = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise CSVFormatError(f"{path}: empty file") from None
        n = len(header)
        for row in reader:
            line = reader.line_num
            if not row:
                continue
            if len(row) != n:
                raise CSVFormatError(f"{path}:{line}: expected {n} fields, got {len(row)}")
            rows.append(
                [math.nan if c.strip() == "" else _parse_float(c, path, line) for c in row]
            )
    return np.array(rows, dtype=np.float64).reshape(-1, n)


def ingest_stream_csv(path, sampling: SamplingModel | None = None):
    """Yield one ``MaskedVector`` per data row.

    Empty cells are excluded from the support. With ``sampling`` each row is
    further subsampled by ``draw_mask(sampling, n, t)`` for t = 1, 2, ...
    """
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise CSVFormatError(f"{path}: empty file") from None
        n = len(header)
        t = 0
        for row in reader:
            line = reader.line_num
            if not row:
                continue
            if len(row) != n:
                raise CSVFormatError(f"{path}:{line}: expected {n} fields, got {len(row)}")
            t += 1
            idx = [i for i, c in enumerate(row) if c.strip() != ""]
            vals = [_parse_float(row[i], path, line) for i in idx]
            idx = np.array(idx, dtype=np.int64)
            vals = np.array(vals, dtype=np.float64)
            if sampling is not None and sampling.density < 1:
                keep = np.isin(idx, draw_mask(sampling, n, t))
                idx, vals = idx[keep], vals[keep]
            yield MaskedVector(n, idx, vals)


# -- entry-list CSV -----------------------------------------------------------

ENTRY_HEADER = ["row", "col", "value"]


def write_entries_csv(path, rows, cols, values) -> None:
    with _open_write(path) as fh:
        w = _writer(fh)
        w.writerow(ENTRY_HEADER)
        for i, j, v in zip(rows, cols, values):
            w.writerow([int(i), int(j), repr(float(v))])


def read_entries_csv(path) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    rows, cols, vals = [], [], []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ENTRY_HEADER:
            raise CSVFormatError(f"{path}:1: header must be {','.join(ENTRY_HEADER)}")
        for row in reader:
            line = reader.line_num
            if not row:
                continue
            if len(row) != 3:
                raise CSVFormatError(f"{path}:{line}: expected 3 fields, got {len(row)}")
            try:
                rows.append(int(row[0]))
                cols.append(int(row[1]))
            except ValueError:
                raise CSVFormatError(f"{path}:{line}: row/col must be integers") from None
            vals.append(_parse_float(row[2], path, line))
    return (
        np.array(rows, dtype=np.int64),
        np.array(cols, dtype=np.int64),
        np.array(vals, dtype=np.float64),
    )


# -- telemetry CSV ------------------------------------------------------------

@dataclass(frozen=True)
class TelemetryRow:
    t: int
    eta: float
    residual_signal: float
    cost: float
    subspace_error: float  # NaN when the truth is unknown
    skipped: bool
    wall_nanos: int


TELEMETRY_FIELDS = [f.name for f in fields(TelemetryRow)]


def write_telemetry(path, rows) -> None:
    with _open_write(path) as fh:
        w = _writer(fh)
        w.writerow(TELEMETRY_FIELDS)
        for row in rows:
            w.writerow([_fmt(x) for x in astuple(row)])


def read_telemetry(path) -> list[TelemetryRow]:
    out = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != TELEMETRY_FIELDS:
            raise CSVFormatError(f"{path}:1: unexpected telemetry header {header}")
        for row in reader:
            line = reader.line_num
            if len(row) != len(TELEMETRY_FIELDS):
                raise CSVFormatError(f"{path}:{line}: expected {len(TELEMETRY_FIELDS)} fields")
            t, eta, sig, cost, err, skipped, ns = row
            out.append(
                TelemetryRow(
                    int(t),
                    _parse_float(eta, path, line),
                    _parse_float(sig, path, line),
                    _parse_float(cost, path, line),
                    math.nan if err == "" else _parse_float(err, path, line),
                    skipped == "1",
                    int(ns),
                )
            )
    return out


# -- generic tables and matrices ----------------------------------------------

def write_table(path, header, rows) -> None:
    with _open_write(path) as fh:
        w = _writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(x) for x in row])


def read_table(path) -> tuple[list[str], np.ndarray]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        data = [
            [math.nan if c == "" else _parse_float(c, path, reader.line_num) for c in row]
            for row in reader
            if row
        ]
    return header, np.array(data, dtype=np.float64).reshape(-1, len(header))


def write_matrix(path, M) -> None:
    M = np.atleast_2d(np.asarray(M, dtype=np.float64))
    with _open_write(path) as fh:
        w = _writer(fh)
        for row in M:
            w.writerow([repr(float(x)) for x in row])


def read_matrix(path) -> np.ndarray:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        data = [[_parse_float(c, path, reader.line_num) for c in row] for row in reader if row]
    return np.array(data, dtype=np.float64)
