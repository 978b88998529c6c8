"""Shared input parsing for the figure scripts.

Reads the CLI's CSV files (one '# meta = {...}' line, a header row, then
17-significant-digit numeric rows) and JSON reports.  Every numeric value
is kept twice: as a float for positioning and as the exact source string
for labels, so annotations are verbatim quotes of the input file.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Sequence

import numpy as np


class SchemaError(ValueError):
    """Input file does not match the documented CSV/JSON layout."""


class LiteralFloat(float):
    """Float that remembers the exact source text it was parsed from."""

    raw: str

    def __new__(cls, text: str):
        value = super().__new__(cls, float(text))
        value.raw = str(text)
        return value


def parse_json_literal(text: str):
    """json.loads keeping the verbatim text of every number."""
    return json.loads(text, parse_float=LiteralFloat,
                      parse_int=lambda s: LiteralFloat(s))


@dataclass(frozen=True)
class Table:
    """One CSV file: metadata, column names, raw cells, numeric view."""

    meta: dict
    columns: List[str]
    cells: List[List[str]]

    def column(self, name: str) -> np.ndarray:
        if name not in self.columns:
            raise SchemaError(f"missing column {name!r}; file has "
                              f"{self.columns}")
        k = self.columns.index(name)
        return np.array([float(row[k]) for row in self.cells])

    def raw_column(self, name: str) -> List[str]:
        if name not in self.columns:
            raise SchemaError(f"missing column {name!r}; file has "
                              f"{self.columns}")
        k = self.columns.index(name)
        return [row[k] for row in self.cells]


def read_table(path, required: Sequence[str]) -> Table:
    """Parse a meta-line CSV and check the required column names."""
    lines = Path(path).read_text().splitlines()
    if not lines or not lines[0].startswith("# meta = "):
        raise SchemaError(f"{path}: first line must be '# meta = {{...}}'")
    meta = parse_json_literal(lines[0][len("# meta = "):])
    if len(lines) < 2:
        raise SchemaError(f"{path}: missing header row")
    columns = lines[1].split(",")
    missing = [name for name in required if name not in columns]
    if missing:
        raise SchemaError(f"{path}: missing columns {missing}; file has "
                          f"{columns}")
    cells = []
    for line in lines[2:]:
        if not line:
            continue
        row = line.split(",")
        if len(row) != len(columns):
            raise SchemaError(f"{path}: row width {len(row)} does not match "
                              f"header {columns}")
        cells.append(row)
    return Table(meta=meta, columns=columns, cells=cells)


def read_report(path, required: Sequence[str]) -> dict:
    """Parse a JSON report, keeping number text, and check required keys."""
    try:
        report = parse_json_literal(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: not valid JSON: {exc}")
    if not isinstance(report, dict):
        raise SchemaError(f"{path}: expected a JSON object")
    missing = [key for key in required if key not in report]
    if missing:
        raise SchemaError(f"{path}: missing keys {missing}; file has "
                          f"{sorted(report)}")
    return report


def raw_text(value) -> str:
    """Verbatim source text of a parsed number (or its repr as fallback)."""
    if isinstance(value, LiteralFloat):
        return value.raw
    return str(value)


def polynomial_history(meta: dict):
    """History polynomial and delay from a delay-run's recorded config.

    The CLI stores the resolved configuration in the meta line; the history
    curve is drawn from those coefficients, never re-fit from the data.
    """
    config = meta.get("config")
    if not isinstance(config, dict):
        raise SchemaError("meta line lacks the resolved 'config' object")
    for key in ("history_poly", "delay"):
        if key not in config:
            raise SchemaError(f"meta config lacks {key!r}; file has "
                              f"{sorted(config)}")
    coeffs = [float(c) for c in config["history_poly"]]
    return coeffs, float(config["delay"])


def breaking_points(meta: dict) -> List[Dict]:
    """Breaking-point records stored by the delay CLI, verbatim."""
    points = meta.get("breaking_points")
    if points is None:
        raise SchemaError("meta line lacks 'breaking_points'; re-run the "
                          "delay command to produce it")
    return points
