"""CSV ingestion, block maxima and output writers."""
from __future__ import annotations

import csv
import io
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Iterable, Sequence

import numpy as np

from .core import DataSample
from .errors import DegenerateData, DomainError, ParseError


@dataclass(frozen=True)
class BlockSpec:
    block_size: int
    drop_partial: bool = True

    def __post_init__(self):
        if int(self.block_size) != self.block_size or self.block_size < 1:
            raise DomainError(f"block size must be a positive integer, got {self.block_size!r}")


def _is_number(s: str) -> bool:
    try:
        float(s)
    except ValueError:
        return False
    return True


def read_values(stream: IO[str], column: str | int | None = None, source: str = "<input>"
                ) -> np.ndarray:
    """Values of one CSV column in file order.

    A first row whose selected cell is not numeric is taken as the header.
    Blank lines are skipped.
    """
    reader = csv.reader(stream)
    rows = [(i, r) for i, r in enumerate(reader, start=1) if r and any(c.strip() for c in r)]
    if not rows:
        raise ParseError(f"{source}: no data")
    first = [c.strip() for c in rows[0][1]]
    if isinstance(column, str) and not column.lstrip("-").isdigit():
        if column not in first:
            raise ParseError(f"{source}: column {column!r} not in header {first}")
        idx, body = first.index(column), rows[1:]
    else:
        idx = 0 if column is None else int(column)
        if not 0 <= idx < len(first):
            raise ParseError(f"{source}: column index {idx} out of range for {len(first)} columns")
        body = rows if _is_number(first[idx]) else rows[1:]
    out = []
    for line, row in body:
        if idx >= len(row):
            raise ParseError(f"{source}: line {line}: missing column {idx}")
        cell = row[idx].strip()
        try:
            v = float(cell)
        except ValueError:
            raise ParseError(f"{source}: line {line}: cannot parse {cell!r} as a number") from None
        if not math.isfinite(v):
            raise ParseError(f"{source}: line {line}: non-finite value {cell!r}")
        out.append(v)
    if not out:
        raise ParseError(f"{source}: no data rows")
    return np.array(out)


def ingest_csv(path: str | Path | IO[str], column: str | int | None = None) -> DataSample:
    """DataSample from one column of a CSV file (path, '-' for stdin, or a stream)."""
    if hasattr(path, "read"):
        vals = read_values(path, column, getattr(path, "name", "<stream>"))
    elif str(path) == "-":
        vals = read_values(sys.stdin, column, "<stdin>")
    else:
        with open(path, newline="") as fh:
            vals = read_values(fh, column, str(path))
    return DataSample.from_values(vals)


def block_maxima(raw: DataSample | Sequence[float], spec: BlockSpec) -> DataSample:
    """Maxima of consecutive non-overlapping blocks, in original order."""
    y = raw.observed if isinstance(raw, DataSample) else np.asarray(raw, dtype=float)
    m = int(spec.block_size)
    full = y.size // m
    maxima = list(y[: full * m].reshape(full, m).max(axis=1)) if full else []
    if not spec.drop_partial and y.size % m:
        maxima.append(float(y[full * m:].max()))
    if len(maxima) < 2:
        raise DegenerateData(f"block size {m} leaves {len(maxima)} block(s); need at least 2")
    return DataSample.from_values(maxima)


def fmt_float(v: float) -> str:
    return format(float(v), ".17g")


def values_csv(values: Iterable[float], header: str = "value") -> str:
    buf = io.StringIO()
    buf.write(header + "\n")
    for v in values:
        buf.write(fmt_float(v) + "\n")
    return buf.getvalue()


def jsonable(o):
    """Plain JSON types; NaN and infinities become null."""
    if isinstance(o, dict):
        return {str(k): jsonable(v) for k, v in o.items()}
    if isinstance(o, (list, tuple)):
        return [jsonable(v) for v in o]
    if isinstance(o, (float, np.floating)):
        x = float(o)
        return x if math.isfinite(x) else None
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.bool_):
        return bool(o)
    return o


def to_json(obj, sort_keys: bool = False) -> str:
    """JSON text; floats use the shortest round-trip representation."""
    return json.dumps(jsonable(obj), indent=2, sort_keys=sort_keys) + "\n"


def write_text(text: str, output: str | Path | None) -> None:
    """Write to a file, or to stdout when output is None or '-'."""
    if output is None or str(output) == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        with open(output, "w", newline="\n") as fh:
            fh.write(text)
