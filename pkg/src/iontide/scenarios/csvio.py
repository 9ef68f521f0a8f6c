"""CSV tables: '#' metadata lines, a column-name line, a unit line, then rows."""

from __future__ import annotations

import csv
import datetime as _dt
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

TIMESTAMP_KEY = "timestamp"


@dataclass
class Table:
    columns: tuple[str, ...]
    units: tuple[str, ...]
    rows: list[tuple] = field(default_factory=list)

    def __post_init__(self):
        if len(self.columns) != len(self.units):
            raise ValueError("columns and units differ in length")

    def append(self, *values) -> None:
        if len(values) != len(self.columns):
            raise ValueError(f"expected {len(self.columns)} values, got {len(values)}")
        self.rows.append(tuple(values))

    def column(self, name: str) -> list:
        i = self.columns.index(name)
        return [r[i] for r in self.rows]


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def write_table(path: str | Path, table: Table, metadata: dict[str, str], timestamp: bool = True) -> None:
    """Write ``table``; the timestamp line is the only one that varies between identical runs."""
    with open(path, "w", newline="") as fh:
        if timestamp:
            fh.write(f"# {TIMESTAMP_KEY}: {_dt.datetime.now(_dt.timezone.utc).isoformat(timespec='seconds')}\n")
        for k, v in metadata.items():
            fh.write(f"# {k}: {v}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(table.columns)
        w.writerow(table.units)
        for r in table.rows:
            w.writerow([_fmt(v) for v in r])


def read_table(path: str | Path) -> tuple[Table, dict[str, str]]:
    meta: dict[str, str] = {}
    with open(path, newline="") as fh:
        lines = fh.read().splitlines()
    body = []
    for line in lines:
        if line.startswith("#"):
            key, _, val = line[1:].strip().partition(":")
            meta[key.strip()] = val.strip()
        else:
            body.append(line)
    rows = list(csv.reader(body))
    table = Table(tuple(rows[0]), tuple(rows[1]))
    for r in rows[2:]:
        table.rows.append(tuple(_parse(v) for v in r))
    return table, meta


def _parse(v: str):
    try:
        return float(v)
    except ValueError:
        return v
