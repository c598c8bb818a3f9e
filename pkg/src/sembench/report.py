"""Benchmark report rows and their CSV / JSON / gnuplot serializations.

One PerfReport per (problem size, kernel variant) run. The CSV schema is
a fixed column order matching the dataclass fields, with a header row;
every row carries the schema version. Floats are written with repr so a
parsed file compares equal to the in-memory rows. The gnuplot format
emits, per variant, (elements, achieved GFlop/s) pairs plus the measured
roofline as its own block, enough to redraw the performance-versus-size
figures.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, fields

__all__ = ["PerfReport", "SCHEMA_VERSION", "emit_csv", "parse_csv", "emit_json",
           "parse_json", "emit_gnuplot"]

SCHEMA_VERSION = "sembench-1"


@dataclass
class PerfReport:
    """One benchmark row; all numeric fields must be finite."""

    schema_version: str
    variant: str
    elements: int
    box: str  # ex x ey x ez factorization, e.g. "16x16x16"
    n: int
    dofs: int
    iterations: int
    workers: int
    seed: int
    include_dssum: bool
    total_seconds: float
    seconds_per_iteration: float
    ax_seconds: float
    dssum_seconds: float
    model_flops_per_iteration: int
    model_bytes_per_iteration: int
    model_read_bytes_per_iteration: int
    model_write_bytes_per_iteration: int
    instr_flops: int
    instr_read_words: int
    instr_write_words: int
    achieved_gflops: float
    measured_bandwidth: float  # bytes/second
    roofline_peak_gflops: float
    roofline_fraction: float
    flags: str  # semicolon-joined, possibly empty

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if isinstance(v, (int, float)) and not isinstance(v, bool):
                if not math.isfinite(v):
                    raise ValueError(f"report field {f.name} is not finite: {v!r}")


def _format(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _parse(value: str, ftype):
    if ftype is bool:
        return value == "true"
    if ftype is int:
        return int(value)
    if ftype is float:
        return float(value)
    return value


_FIELD_TYPES = {"schema_version": str, "variant": str, "box": str, "flags": str,
                "include_dssum": bool}


def _field_type(name: str):
    if name in _FIELD_TYPES:
        return _FIELD_TYPES[name]
    for f in fields(PerfReport):
        if f.name == name:
            return {"int": int, "float": float, "str": str, "bool": bool}[f.type]
    raise KeyError(name)


def emit_csv(rows: list[PerfReport]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    names = [f.name for f in fields(PerfReport)]
    writer.writerow(names)
    for row in rows:
        writer.writerow([_format(getattr(row, name)) for name in names])
    return buf.getvalue()


def parse_csv(text: str) -> list[PerfReport]:
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    expected = [f.name for f in fields(PerfReport)]
    if header != expected:
        raise ValueError(f"unexpected CSV header {header}")
    rows = []
    for record in reader:
        if not record:
            continue
        kwargs = {name: _parse(value, _field_type(name))
                  for name, value in zip(header, record)}
        rows.append(PerfReport(**kwargs))
    return rows


def emit_json(rows: list[PerfReport]) -> str:
    return json.dumps([asdict(row) for row in rows], indent=2) + "\n"


def parse_json(text: str) -> list[PerfReport]:
    return [PerfReport(**obj) for obj in json.loads(text)]


def emit_gnuplot(rows: list[PerfReport]) -> str:
    """Data blocks separated by double blank lines, usable with gnuplot index."""
    lines = [f"# {SCHEMA_VERSION} benchmark data", "# columns: elements gflops"]
    variants = []
    for row in rows:
        if row.variant not in variants:
            variants.append(row.variant)
    for variant in variants:
        lines.append(f"# variant: {variant}")
        for row in rows:
            if row.variant == variant:
                lines.append(f"{row.elements} {row.achieved_gflops!r}")
        lines.append("")
        lines.append("")
    lines.append("# roofline peak from measured bandwidth")
    seen = set()
    for row in rows:
        if row.elements not in seen:
            seen.add(row.elements)
            lines.append(f"{row.elements} {row.roofline_peak_gflops!r}")
    return "\n".join(lines) + "\n"
