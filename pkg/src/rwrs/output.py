"""Deterministic table serialization (CSV and JSON) and run manifests."""

from __future__ import annotations

import csv
import io
import json
import math
import os
import subprocess
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Sequence

from . import __version__


@dataclass
class Table:
    name: str
    columns: tuple[str, ...]
    rows: list = field(default_factory=list)
    key: tuple[str, ...] = ()

    def add(self, *values):
        if len(values) != len(self.columns):
            raise ValueError(f"table {self.name}: expected {len(self.columns)} values, got {len(values)}")
        self.rows.append(tuple(values))

    def sorted_rows(self) -> list:
        if not self.key:
            return list(self.rows)
        idx = [self.columns.index(k) for k in self.key]
        return sorted(self.rows, key=lambda r: tuple(_sort_key(r[i]) for i in idx))

    def column(self, name: str) -> list:
        i = self.columns.index(name)
        return [r[i] for r in self.rows]


def _sort_key(v):
    # bools and numbers sort numerically, everything else as text after them
    if isinstance(v, (bool, int, float, Fraction)):
        return (0, float(v), "")
    return (1, 0.0, str(v))


def format_value(v: Any) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, (float, Fraction)):
        x = float(v)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return "%.17g" % x
    return str(v)


def _json_value(v: Any):
    if isinstance(v, Fraction):
        v = float(v)
    if isinstance(v, float) and not math.isfinite(v):
        return format_value(v)
    return v


def table_to_csv(table: Table) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n", quoting=csv.QUOTE_MINIMAL)
    w.writerow(table.columns)
    for row in table.sorted_rows():
        w.writerow([format_value(v) for v in row])
    return buf.getvalue()


def table_to_json(table: Table) -> str:
    doc = {"columns": list(table.columns), "rows": [[_json_value(v) for v in r] for r in table.sorted_rows()]}
    return json.dumps(doc, indent=1, sort_keys=True) + "\n"


def write_tables(tables: Sequence[Table], directory: Path, fmt: str = "csv") -> list[Path]:
    if fmt not in ("csv", "json"):
        raise ValueError("format must be csv or json")
    directory.mkdir(parents=True, exist_ok=True)
    paths = []
    for t in tables:
        path = directory / f"{t.name}.{fmt}"
        text = table_to_csv(t) if fmt == "csv" else table_to_json(t)
        path.write_bytes(text.encode("utf-8"))
        paths.append(path)
    return paths


def version_string() -> str:
    """``git describe`` of the source tree when available, else the package version."""
    try:
        out = subprocess.run(
            ["git", "describe", "--always", "--dirty", "--tags"],
            cwd=os.path.dirname(__file__),
            capture_output=True,
            text=True,
            timeout=5,
        )
        if out.returncode == 0 and out.stdout.strip():
            return f"{__version__}+{out.stdout.strip()}"
    except (OSError, subprocess.SubprocessError):
        pass
    return __version__


def write_manifest(path: Path, spec: dict, checks: list, wall_time: float, files: list[Path]) -> None:
    doc = {
        "spec": spec,
        "version": version_string(),
        "wall_time_seconds": round(wall_time, 6),
        "checks": checks,
        "files": sorted(p.name for p in files),
    }
    path.write_text(json.dumps(doc, indent=1, sort_keys=True, default=_json_value) + "\n", encoding="utf-8")
