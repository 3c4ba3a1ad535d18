"""Plot-ready CSV/JSON writers with fixed, versioned column layouts.

Every table is a list of rows under fixed column names (see ``COLUMNS``).
CSV files carry a header row; JSON files are objects of the form
``{"schema": name, "schema_version": 1, "columns": [...], "rows": [[...], ...]}``.
Undefined values are empty CSV cells / JSON ``null``. Output is
byte-deterministic: floats use shortest repr and JSON keys are sorted.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from typing import Iterable, Optional

import numpy as np

from .analytics import CorrelationMatrix, DiurnalProfile, SeasonalSummary
from .timeseries import TimeSeries

SCHEMA_VERSION = 1

COLUMNS = {
    "diurnal": ("hour", "mean", "std", "n"),
    "daily": ("date", "mean"),
    "hourly": ("timestamp", "mean"),
    "monthly": ("month", "mean"),
    "seasonal": ("season", "mean", "std", "n"),
    "correlation": ("site_a", "site_b", "r", "n"),
    "forecast": ("timestamp", "observed", "predicted", "persistence"),
}


def _clean(v):
    if isinstance(v, (np.floating, float)):
        v = float(v)
        return None if math.isnan(v) else v
    if isinstance(v, np.integer):
        return int(v)
    return v


def _cell(v) -> str:
    v = _clean(v)
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def iso(t: np.datetime64, unit: str = "s") -> str:
    s = str(np.datetime_as_string(np.datetime64(t, unit), unit=unit))
    return s + "Z" if unit in ("s", "m", "h") else s


def diurnal_rows(p: DiurnalProfile):
    return [list(r) for r in p.rows()]


def seasonal_rows(s: SeasonalSummary):
    return [[season.value, *s[season]] for season in s.seasons]


def series_rows(ts: TimeSeries, unit: str = "s"):
    return [[iso(t, unit), v] for t, v in zip(ts.times, ts.values.tolist())]


def correlation_rows(cm: CorrelationMatrix):
    rows = []
    for i, a in enumerate(cm.labels):
        for j, b in enumerate(cm.labels):
            rows.append([a, b, cm.r[i, j], int(cm.overlap[i, j])])
    return rows


def write_table(path: Path, schema: str, rows: Iterable, fmt: str = "csv", meta: Optional[dict] = None) -> Path:
    """Write ``rows`` under the column layout ``COLUMNS[schema]``.

    The file suffix is replaced by ``.csv`` or ``.json`` per ``fmt``.
    """
    columns = COLUMNS[schema]
    rows = [[_clean(v) for v in r] for r in rows]
    for r in rows:
        if len(r) != len(columns):
            raise ValueError(f"{schema} row has {len(r)} cells, expected {len(columns)}")
    path = Path(path).with_suffix("." + fmt)
    path.parent.mkdir(parents=True, exist_ok=True)
    if fmt == "csv":
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(columns)
            w.writerows([_cell(v) for v in r] for r in rows)
    elif fmt == "json":
        doc = {"schema": schema, "schema_version": SCHEMA_VERSION, "columns": list(columns), "rows": rows}
        if meta:
            doc["meta"] = meta
        write_json(path, doc)
    else:
        raise ValueError(f"format must be 'csv' or 'json', not {fmt!r}")
    return path


def write_json(path: Path, doc: dict) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(_jsonable(doc), indent=1, sort_keys=True, allow_nan=False) + "\n", encoding="utf-8")
    return path


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, np.datetime64):
        return iso(obj)
    return _clean(obj)
