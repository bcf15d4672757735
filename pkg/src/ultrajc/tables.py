"""Result tables and their CSV / JSON serialisation."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

FORMATS = ("csv", "json")


@dataclass(frozen=True)
class Column:
    name: str
    unit: str = ""


@dataclass
class ResultTable:
    name: str
    columns: list
    rows: list
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.columns = [c if isinstance(c, Column) else Column(*c) for c in self.columns]
        self.rows = [list(r) for r in self.rows]
        width = len(self.columns)
        for i, row in enumerate(self.rows):
            if len(row) != width:
                raise ValueError(f"table {self.name!r}: row {i} has {len(row)} values, schema has {width}")

    @property
    def names(self) -> list:
        return [c.name for c in self.columns]

    def column(self, name: str) -> list:
        k = self.names.index(name)
        return [row[k] for row in self.rows]

    def to_dict(self) -> dict:
        return {
            "metadata": self.metadata,
            "schema": [{"name": c.name, "unit": c.unit} for c in self.columns],
            "rows": self.rows,
        }

    @classmethod
    def from_dict(cls, data: dict, name: str = "") -> "ResultTable":
        cols = [Column(c["name"], c.get("unit", "")) for c in data["schema"]]
        meta = data.get("metadata", {})
        return cls(name or meta.get("table", ""), cols, data["rows"], meta)


def format_number(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return format(value, ".17g")
    return str(value)


def to_csv(table: ResultTable) -> str:
    buf = io.StringIO()
    for key, value in table.metadata.items():
        buf.write(f"# {key}: {json.dumps(value, sort_keys=True)}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(table.names)
    for row in table.rows:
        writer.writerow([format_number(v) for v in row])
    return buf.getvalue()


def to_json(table: ResultTable) -> str:
    return json.dumps(table.to_dict(), indent=1, sort_keys=False) + "\n"


def emit(table: ResultTable, fmt: str, out_dir) -> Path:
    """Write ``table`` as ``<out_dir>/<table.name>.<fmt>`` and return the path."""
    if fmt not in FORMATS:
        raise ValueError(f"unknown format {fmt!r}; choose csv or json")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"{table.name}.{fmt}"
    text = to_csv(table) if fmt == "csv" else to_json(table)
    path.write_text(text, encoding="utf-8")
    return path


def read_json(path) -> ResultTable:
    return ResultTable.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def read_csv(path) -> ResultTable:
    meta, body = {}, []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line.startswith("#"):
            key, _, value = line[1:].strip().partition(": ")
            meta[key] = json.loads(value)
        else:
            body.append(line)
    reader = csv.reader(body)
    header = next(reader)
    rows = [[_parse_cell(v) for v in r] for r in reader]
    return ResultTable(meta.get("table", ""), [Column(h) for h in header], rows, meta)


def _parse_cell(text: str):
    if text in ("true", "false"):
        return text == "true"
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def columns(*fields: Sequence[str]) -> list:
    return [Column(*s) if isinstance(s, tuple) else Column(s) for s in fields]
