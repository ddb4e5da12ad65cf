"""Microdata ingestion and aggregation into interval datasets.

Microdata arrive as (group key, variable, value) records; aggregation trims
a fixed count from each tail of every cell and takes the min/max of what
remains. Cells left with zero range are dropped (with their whole row, to
keep the frame rectangular) and reported. Interval datasets round-trip
through CSV losslessly.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DataValidationError, DomainError
from .estimation import ScaledSample
from .interval import Interval, IntervalFrame

__all__ = [
    "MicroRecord",
    "AggregationReport",
    "AggregateResult",
    "aggregate",
    "read_microdata_csv",
    "read_summary_csv",
    "load_interval_csv",
    "write_interval_csv",
    "write_scaled_csv",
    "read_scaled_csv",
]


@dataclass(frozen=True)
class MicroRecord:
    """One microdata point: a group key, a variable name, and a value."""

    key: tuple
    variable: str
    value: float

    def __post_init__(self):
        object.__setattr__(self, "key", tuple(str(k) for k in self.key))
        if not self.key or any(k == "" for k in self.key):
            raise DomainError("record key must be a non-empty tuple of non-empty strings")
        if not math.isfinite(self.value):
            raise DomainError(f"non-finite value for {self.key}/{self.variable}")


@dataclass
class AggregationReport:
    """Dropped cells and structural problems found while aggregating."""

    dropped_rows: list = field(default_factory=list)
    messages: list = field(default_factory=list)


@dataclass
class AggregateResult:
    frame: IntervalFrame
    scaled: dict
    report: AggregationReport


def _label(key):
    return ":".join(key)


def aggregate(records, trim=0.0, keep_degenerate=False):
    """Aggregate microdata records into an interval frame.

    Per (group, variable) cell, the floor(trim * n) smallest and largest
    values are dropped and the interval is the min/max of the remainder.
    Rows containing a degenerate (zero-range) or emptied cell are dropped
    and reported, unless ``keep_degenerate`` is set with trim zero. Scaled
    microdata for every retained, non-degenerate cell are returned
    alongside. Output ordering is deterministic: rows sorted by group key,
    variables sorted by name.
    """
    if not (0.0 <= trim < 0.5):
        raise DomainError("trim must lie in [0, 0.5)")
    cells = {}
    variables = set()
    for rec in records:
        variables.add(rec.variable)
        cells.setdefault(rec.key, {}).setdefault(rec.variable, []).append(rec.value)
    if not cells:
        raise DataValidationError("no records to aggregate")
    names = sorted(variables)
    report = AggregationReport()

    keys = sorted(cells)
    kept_rows = []
    for key in keys:
        row = cells[key]
        row_out = {}
        drop_reasons = []
        for name in names:
            values = row.get(name)
            if not values:
                drop_reasons.append(f"empty cell {name}")
                continue
            values = sorted(values)
            k = int(trim * len(values))
            rest = values[k:len(values) - k] if k else values
            if not rest:
                drop_reasons.append(f"cell {name} emptied by trimming")
                continue
            lo, hi = rest[0], rest[-1]
            if hi - lo == 0.0 and not (keep_degenerate and trim == 0.0):
                drop_reasons.append(f"degenerate cell {name} ({lo})")
                continue
            row_out[name] = (lo, hi, rest)
        if drop_reasons:
            report.dropped_rows.append((_label(key), drop_reasons))
            continue
        kept_rows.append((key, row_out))

    if not kept_rows:
        raise DataValidationError("every row was dropped during aggregation",
                                  violations=report.dropped_rows)

    labels = [_label(key) for key, _ in kept_rows]
    lower = np.array([[row[name][0] for name in names] for _, row in kept_rows])
    upper = np.array([[row[name][1] for name in names] for _, row in kept_rows])
    frame = IntervalFrame(lower, upper, names, labels=labels)

    scaled = {}
    for j, name in enumerate(names):
        values = []
        rows = []
        for i, (key, row) in enumerate(kept_rows):
            lo, hi, rest = row[name]
            if hi - lo == 0.0:
                continue
            iv = Interval(lo, hi)
            u = 2.0 * (np.asarray(rest) - iv.centre) / iv.range
            values.append(np.clip(u, -1.0, 1.0))
            rows.extend([labels[i]] * len(rest))
        if values:
            scaled[name] = ScaledSample(variable=name,
                                        values=np.concatenate(values),
                                        rows=tuple(rows))
    return AggregateResult(frame=frame, scaled=scaled, report=report)


# --- CSV formats ----------------------------------------------------------

def read_microdata_csv(path):
    """Read records from a CSV with columns group1[,group2,...],variable,value."""
    path = Path(path)
    records = []
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise DataValidationError(f"{path}: empty file")
        header = [h.strip() for h in header]
        try:
            var_col = header.index("variable")
            val_col = header.index("value")
        except ValueError:
            raise DataValidationError(
                f"{path}: header must contain 'variable' and 'value' columns") from None
        key_cols = [i for i in range(len(header)) if i not in (var_col, val_col)]
        if not key_cols:
            raise DataValidationError(f"{path}: at least one group column is required")
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            try:
                value = float(row[val_col])
            except (ValueError, IndexError):
                raise DataValidationError(
                    f"{path}:{lineno}: cannot parse value field") from None
            try:
                records.append(MicroRecord(key=tuple(row[i] for i in key_cols),
                                           variable=row[var_col], value=value))
            except DomainError as exc:
                raise DataValidationError(f"{path}:{lineno}: {exc}") from exc
    return records


def read_summary_csv(path):
    """Read summary statistics rows: group,variable,mean,median,min,max.

    Returns {variable: list of (group, mean, median, Interval)} preserving
    row order within each variable.
    """
    path = Path(path)
    out = {}
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        required = {"group", "variable", "mean", "median", "min", "max"}
        if reader.fieldnames is None or not required.issubset(set(reader.fieldnames)):
            raise DataValidationError(
                f"{path}: header must contain columns {sorted(required)}")
        for lineno, row in enumerate(reader, start=2):
            try:
                iv = Interval(float(row["min"]), float(row["max"]))
                out.setdefault(row["variable"], []).append(
                    (row["group"], float(row["mean"]), float(row["median"]), iv))
            except (ValueError, DomainError) as exc:
                raise DataValidationError(f"{path}:{lineno}: {exc}") from exc
    return out


_SUFFIXES = ((".lo", ".hi"), (".c", ".r"))


def _parse_interval_header(header, path):
    pairs = []          # (name, mode, lo_idx, hi_idx)
    seen = {}
    label_col = None
    for idx, raw in enumerate(header):
        col = raw.strip()
        matched = False
        for mode, (lo_sfx, hi_sfx) in enumerate(_SUFFIXES):
            for pos, sfx in enumerate((lo_sfx, hi_sfx)):
                if col.endswith(sfx):
                    name = col[:-len(sfx)]
                    entry = seen.setdefault(name, [mode, None, None])
                    if entry[0] != mode:
                        raise DataValidationError(
                            f"{path}: variable {name!r} mixes column encodings")
                    entry[1 + pos] = idx
                    matched = True
                    break
            if matched:
                break
        if not matched:
            if idx == 0 and label_col is None:
                label_col = idx
            else:
                raise DataValidationError(
                    f"{path}: unrecognized column {col!r} (expected .lo/.hi or .c/.r)")
    for name, (mode, lo_idx, hi_idx) in seen.items():
        if lo_idx is None or hi_idx is None:
            raise DataValidationError(
                f"{path}: variable {name!r} is missing its paired column")
        pairs.append((name, mode, lo_idx, hi_idx))
    pairs.sort(key=lambda item: item[2])
    if not pairs:
        raise DataValidationError(f"{path}: no interval columns found")
    return label_col, pairs


def load_interval_csv(path):
    """Load an interval dataset from CSV.

    Each variable occupies two columns, ``name.lo,name.hi`` (bounds) or
    ``name.c,name.r`` (centre and range), detected per variable from the
    header. An unsuffixed first column is the row label. Out-of-order
    bounds are loaded as-is and surface through ``IntervalFrame.validate``.
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise DataValidationError(f"{path}: empty file")
        label_col, pairs = _parse_interval_header(header, path)
        labels = [] if label_col is not None else None
        lower_rows = []
        upper_rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            lo_row = []
            hi_row = []
            for name, mode, i1, i2 in pairs:
                try:
                    v1 = float(row[i1])
                    v2 = float(row[i2])
                except (ValueError, IndexError):
                    raise DataValidationError(
                        f"{path}:{lineno}: cannot parse variable {name!r}") from None
                if mode == 0:
                    lo, hi = v1, v2
                else:
                    lo, hi = v1 - 0.5 * v2, v1 + 0.5 * v2
                lo_row.append(lo)
                hi_row.append(hi)
            lower_rows.append(lo_row)
            upper_rows.append(hi_row)
            if labels is not None:
                labels.append(row[label_col])
    if not lower_rows:
        raise DataValidationError(f"{path}: no data rows")
    names = [name for name, *_ in pairs]
    return IntervalFrame(lower_rows, upper_rows, names, labels=labels)


def write_interval_csv(frame, path, mode="bounds"):
    """Write an interval dataset to CSV, losslessly (shortest round-trip
    float representation). ``mode`` picks bounds (.lo/.hi) or centre/range
    (.c/.r) columns."""
    if mode not in ("bounds", "centre_range"):
        raise DomainError(f"unknown mode {mode!r}")
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        header = []
        if frame.labels is not None:
            header.append("label")
        for name in frame.names:
            if mode == "bounds":
                header.extend((f"{name}.lo", f"{name}.hi"))
            else:
                header.extend((f"{name}.c", f"{name}.r"))
        writer.writerow(header)
        c, r = frame.centres_ranges()
        for i in range(frame.n):
            row = []
            if frame.labels is not None:
                row.append(frame.labels[i])
            for j in range(frame.p):
                if mode == "bounds":
                    row.extend((repr(float(frame.lower[i, j])), repr(float(frame.upper[i, j]))))
                else:
                    row.extend((repr(float(c[i, j])), repr(float(r[i, j]))))
            writer.writerow(row)


def write_scaled_csv(scaled, path):
    """Write scaled microdata samples as long-form CSV variable,row,value."""
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["variable", "row", "value"])
        for name in sorted(scaled):
            sample = scaled[name]
            rows = sample.rows if sample.rows is not None else [""] * sample.values.size
            for row_id, value in zip(rows, sample.values):
                writer.writerow([name, row_id, repr(float(value))])


def read_scaled_csv(path):
    """Read long-form scaled microdata back into ScaledSample objects."""
    path = Path(path)
    data = {}
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        required = {"variable", "row", "value"}
        if reader.fieldnames is None or not required.issubset(set(reader.fieldnames)):
            raise DataValidationError(
                f"{path}: header must contain columns {sorted(required)}")
        for lineno, row in enumerate(reader, start=2):
            try:
                value = float(row["value"])
            except ValueError:
                raise DataValidationError(
                    f"{path}:{lineno}: cannot parse value field") from None
            entry = data.setdefault(row["variable"], ([], []))
            entry[0].append(value)
            entry[1].append(row["row"])
    return {name: ScaledSample(variable=name, values=np.array(values),
                               rows=tuple(rows))
            for name, (values, rows) in data.items()}
