"""Minimal column table with RFC 4180 CSV input/output.

Floats are written with ``repr``, the shortest string that round-trips to
the same double.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

from .errors import ValidationError


class ParseError(ValidationError):
    pass


def format_cell(x) -> str:
    if isinstance(x, str):
        return x
    if isinstance(x, bool):
        return str(x).lower()
    if isinstance(x, int):
        return str(x)
    if hasattr(x, "item"):  # numpy scalar
        return format_cell(x.item())
    return repr(float(x))


@dataclass
class Table:
    columns: List[str]
    rows: List[list] = field(default_factory=list)
    # source line of each row, when read from a file
    lines: Optional[List[int]] = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if len(set(self.columns)) != len(self.columns):
            raise ValidationError(f"duplicate column names in {self.columns}")
        for i, row in enumerate(self.rows):
            if len(row) != len(self.columns):
                raise ValidationError(f"row {i} has {len(row)} cells, expected {len(self.columns)}")

    def __len__(self) -> int:
        return len(self.rows)

    def column(self, name: str) -> list:
        try:
            j = self.columns.index(name)
        except ValueError:
            raise ValidationError(f"no column named {name!r}; have {self.columns}") from None
        return [row[j] for row in self.rows]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\r\n")
        w.writerow(self.columns)
        for row in self.rows:
            w.writerow([format_cell(x) for x in row])
        return buf.getvalue()

    def write_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(self.to_csv())

    @classmethod
    def from_csv_text(cls, text: str, source: str = "<csv>") -> "Table":
        reader = csv.reader(io.StringIO(text))
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"{source}: empty file, expected a header row") from None
        header = [h.strip() for h in header]
        rows, lines = [], []
        for row in reader:
            line = reader.line_num
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise ParseError(f"{source}: line {line}: expected {len(header)} fields, got {len(row)}")
            rows.append([_parse_cell(c) for c in row])
            lines.append(line)
        return cls(header, rows, lines)

    @classmethod
    def read_csv(cls, path) -> "Table":
        try:
            with open(path, encoding="utf-8", newline="") as fh:
                text = fh.read()
        except OSError as exc:
            raise ParseError(f"{path}: {exc.strerror}") from None
        return cls.from_csv_text(text, str(path))


def _parse_cell(cell: str):
    s = cell.strip()
    try:
        return int(s)
    except ValueError:
        pass
    try:
        return float(s)
    except ValueError:
        return s


def numeric_column(table: Table, name: str, source: str = "<csv>") -> List[float]:
    j = table.columns.index(name)
    out = []
    for i, row in enumerate(table.rows):
        x = row[j]
        if isinstance(x, str):
            line = table.lines[i] if table.lines else i + 2
            raise ParseError(f"{source}: line {line}: column {name!r} has non-numeric value {x!r}")
        out.append(float(x))
    return out


def pivot_long(table: Table, value_column: str) -> Table:
    """Long sweep table (``sweep_name, sweep_value, t, ...``) to one column per sweep value."""
    for c in ("sweep_name", "sweep_value", "t", value_column):
        if c not in table.columns:
            raise ValidationError(f"long table lacks column {c!r}")
    names = table.column("sweep_name")
    values = table.column("sweep_value")
    ts = table.column("t")
    ys = table.column(value_column)
    keys: List[str] = []
    data = {}
    for n, v, t, y in zip(names, values, ts, ys):
        key = f"{value_column}[{n}={format_cell(v)}]"
        if key not in data:
            keys.append(key)
            data[key] = {}
        data[key][t] = y
    all_t = sorted({t for d in data.values() for t in d})
    rows = [[t] + [data[k].get(t, math.nan) for k in keys] for t in all_t]
    return Table(["t"] + keys, rows)


def from_columns(names: Sequence[str], cols: Sequence[Sequence]) -> Table:
    return Table(list(names), [list(r) for r in zip(*cols)])
