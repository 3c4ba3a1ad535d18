"""CSV ingestion, size-bin differencing and quality control.

Records are held column-wise in :class:`Records` (one numpy array per
field) because a year of one-minute data is ~525k rows per site.
:class:`RawRecord` is the row view.
"""

from __future__ import annotations

import csv
import io
import math
from collections import Counter
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone
from pathlib import Path
from typing import Iterable, NamedTuple, Optional, TextIO

import numpy as np

# cumulative ">size" thresholds in um, in channel order
COUNT_THRESHOLDS = (0.3, 0.5, 1.0, 2.5, 5.0, 10.0)
COUNT_FIELDS = ("count_0_3", "count_0_5", "count_1_0", "count_2_5", "count_5_0", "count_10_0")
OPTIONAL_FIELDS = ("count_10_0", "pm25_atm", "temperature", "humidity", "pressure")
MANDATORY_FIELDS = ("timestamp",) + COUNT_FIELDS[:5] + ("pm25_cf1",)

# PurpleAir SD-card style header names
DEFAULT_SCHEMA = {
    "timestamp": "UTCDateTime",
    "count_0_3": "p_0_3_um",
    "count_0_5": "p_0_5_um",
    "count_1_0": "p_1_0_um",
    "count_2_5": "p_2_5_um",
    "count_5_0": "p_5_0_um",
    "count_10_0": "p_10_0_um",
    "pm25_cf1": "pm2_5_cf_1",
    "pm25_atm": "pm2_5_atm",
    "temperature": "current_temp_c",
    "humidity": "current_humidity",
    "pressure": "pressure",
}


class SchemaError(ValueError):
    """The header lacks a mandatory column or the schema is malformed."""


def load_schema(path: str | Path) -> dict[str, str]:
    """Read a ``logical_field = column name`` schema file.

    Blank lines and ``#`` comments are ignored. Fields not named in the file
    keep their :data:`DEFAULT_SCHEMA` column.
    """
    schema = dict(DEFAULT_SCHEMA)
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            key, sep, value = line.partition(":")
        key, value = key.strip(), value.strip()
        if not sep or not key or not value:
            raise SchemaError(f"{path}:{lineno}: expected 'field = column'")
        if key not in DEFAULT_SCHEMA:
            raise SchemaError(f"{path}:{lineno}: unknown field {key!r}")
        schema[key] = value
    return schema


@dataclass(frozen=True)
class RawRecord:
    timestamp: np.datetime64
    counts_gt: tuple[float, ...]
    pm25_cf1: float
    pm25_atm: float = math.nan
    temperature: float = math.nan
    humidity: float = math.nan
    pressure: float = math.nan


@dataclass(eq=False)
class Records:
    """Column store of raw records.

    ``counts`` has shape (n, 6), columns ordered as :data:`COUNT_THRESHOLDS`;
    a missing >10 um channel is NaN, as are missing optional scalars.
    """

    times: np.ndarray
    counts: np.ndarray
    pm25_cf1: np.ndarray
    pm25_atm: np.ndarray = None
    temperature: np.ndarray = None
    humidity: np.ndarray = None
    pressure: np.ndarray = None

    def __post_init__(self):
        n = len(self.times)
        self.times = np.asarray(self.times, dtype="datetime64[s]")
        self.counts = np.asarray(self.counts, dtype=np.float64).reshape(n, 6)
        self.pm25_cf1 = np.asarray(self.pm25_cf1, dtype=np.float64)
        for name in ("pm25_atm", "temperature", "humidity", "pressure"):
            col = getattr(self, name)
            setattr(self, name, np.full(n, np.nan) if col is None else np.asarray(col, dtype=np.float64))

    def __len__(self) -> int:
        return len(self.times)

    def __getitem__(self, i) -> "RawRecord | Records":
        if isinstance(i, (int, np.integer)):
            return RawRecord(
                self.times[i], tuple(self.counts[i].tolist()), float(self.pm25_cf1[i]),
                float(self.pm25_atm[i]), float(self.temperature[i]),
                float(self.humidity[i]), float(self.pressure[i]),
            )
        return Records(
            self.times[i], self.counts[i], self.pm25_cf1[i], self.pm25_atm[i],
            self.temperature[i], self.humidity[i], self.pressure[i],
        )

    def __iter__(self):
        for i in range(len(self)):
            yield self[i]

    @classmethod
    def from_records(cls, rows: Iterable[RawRecord]) -> "Records":
        rows = list(rows)
        counts = np.full((len(rows), 6), np.nan)
        for i, r in enumerate(rows):
            counts[i, : len(r.counts_gt)] = r.counts_gt
        return cls(
            np.array([r.timestamp for r in rows], dtype="datetime64[s]"),
            counts,
            [r.pm25_cf1 for r in rows],
            [r.pm25_atm for r in rows],
            [r.temperature for r in rows],
            [r.humidity for r in rows],
            [r.pressure for r in rows],
        )

    @classmethod
    def empty(cls) -> "Records":
        return cls(np.array([], dtype="datetime64[s]"), np.empty((0, 6)), [])


@dataclass(frozen=True)
class RowError:
    line: int
    reason: str
    detail: str = ""


def _parse_time(text: str, offset: timedelta) -> np.datetime64:
    text = text.strip()
    if text.endswith("Z"):
        text = text[:-1] + "+00:00"
    dt = datetime.fromisoformat(text.replace("/", "-"))
    if dt.tzinfo is None:
        dt = dt - offset
    else:
        dt = dt.astimezone(timezone.utc).replace(tzinfo=None)
    return np.datetime64(dt, "s")


def parse_csv(
    stream: TextIO | str | Path,
    schema: Optional[dict[str, str]] = None,
    utc_offset_hours: float = 0.0,
) -> tuple[Records, list[RowError]]:
    """Parse sensor CSV rows into :class:`Records`.

    Every data row yields either a record or a :class:`RowError`; a bad row
    never stops the parse. Timestamps carrying an explicit offset (or ``Z``)
    are honoured; naive ones are read as local time at ``utc_offset_hours``.

    Raises :class:`SchemaError` when a mandatory column is absent.
    """
    schema = dict(DEFAULT_SCHEMA if schema is None else schema)
    if isinstance(stream, (str, Path)):
        with open(stream, newline="", encoding="utf-8") as fh:
            return parse_csv(fh, schema, utc_offset_hours)

    reader = csv.reader(stream)
    try:
        header = [h.strip() for h in next(reader)]
    except StopIteration:
        raise SchemaError("empty input: no header row") from None
    index = {name: i for i, name in enumerate(header)}
    missing = [f"{f} ({schema.get(f)!r})" for f in MANDATORY_FIELDS if schema.get(f) not in index]
    if missing:
        raise SchemaError("header missing mandatory column(s): " + ", ".join(missing))
    cols = {f: index[c] for f, c in schema.items() if c in index}

    offset = timedelta(hours=utc_offset_hours)
    numeric = [f for f in COUNT_FIELDS + ("pm25_cf1", "pm25_atm", "temperature", "humidity", "pressure") if f in cols]
    times, rows, errors = [], [], []
    for lineno, row in enumerate(reader, start=2):
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        try:
            t = _parse_time(row[cols["timestamp"]], offset)
        except (ValueError, IndexError) as exc:
            errors.append(RowError(lineno, "unparseable timestamp", str(exc)))
            continue
        out = []
        bad = None
        for f in numeric:
            try:
                text = row[cols[f]].strip()
            except IndexError:
                text = ""
            if not text:
                if f in OPTIONAL_FIELDS:
                    out.append(math.nan)
                    continue
                bad = RowError(lineno, "missing field", f)
                break
            try:
                v = float(text)
            except ValueError:
                bad = RowError(lineno, "unparseable field", f"{f}={text!r}")
                break
            if not math.isfinite(v):
                bad = RowError(lineno, "unparseable field", f"{f}={text!r}")
                break
            out.append(v)
        if bad is not None:
            errors.append(bad)
            continue
        times.append(t)
        rows.append(out)

    data = np.array(rows, dtype=np.float64).reshape(len(rows), len(numeric))
    column = {f: data[:, j] for j, f in enumerate(numeric)}
    nan = np.full(len(rows), np.nan)
    counts = np.column_stack([column.get(f, nan) for f in COUNT_FIELDS]) if rows else np.empty((0, 6))
    records = Records(
        np.array(times, dtype="datetime64[s]"),
        counts,
        column["pm25_cf1"],
        column.get("pm25_atm"),
        column.get("temperature"),
        column.get("humidity"),
        column.get("pressure"),
    )
    return records, errors


def write_csv(records: Records, stream: TextIO | str | Path, schema: Optional[dict[str, str]] = None) -> None:
    """Write records in the format :func:`parse_csv` reads.

    Optional columns that are entirely NaN are left out. Floats use ``repr``
    so values round-trip exactly.
    """
    schema = dict(DEFAULT_SCHEMA if schema is None else schema)
    if isinstance(stream, (str, Path)):
        with open(stream, "w", newline="", encoding="utf-8") as fh:
            return write_csv(records, fh, schema)

    columns: list[tuple[str, np.ndarray]] = []
    for j, f in enumerate(COUNT_FIELDS):
        col = records.counts[:, j]
        if f in MANDATORY_FIELDS or not np.all(np.isnan(col)):
            columns.append((f, col))
    for f in ("pm25_cf1", "pm25_atm", "temperature", "humidity", "pressure"):
        col = getattr(records, f)
        if f in MANDATORY_FIELDS or not np.all(np.isnan(col)):
            columns.append((f, col))

    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow([schema["timestamp"]] + [schema[f] for f, _ in columns])
    stamps = np.datetime_as_string(records.times, unit="s")
    lists = [c.tolist() for _, c in columns]
    for i, stamp in enumerate(stamps):
        writer.writerow([stamp + "Z"] + ["" if math.isnan(c[i]) else repr(c[i]) for c in lists])


class SizeBinCounts(NamedTuple):
    """Particles per dL in the 0.3-0.5, 0.5-1.0 and 1.0-2.5 um bins."""

    x: float
    y: float
    z: float
    clamped: bool = False


def difference_counts(counts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised bin differencing.

    ``counts`` is (..., >=4) cumulative channels >0.3, >0.5, >1.0, >2.5.
    Returns bins of shape (..., 3) with negatives clamped to zero, and a
    boolean mask of rows where clamping happened.
    """
    c = np.asarray(counts, dtype=np.float64)
    raw = c[..., 0:3] - c[..., 1:4]
    flagged = np.any(raw < 0, axis=-1)
    return np.maximum(raw, 0.0), flagged


def difference_bins(record: RawRecord | Iterable[float]) -> SizeBinCounts:
    counts = record.counts_gt if isinstance(record, RawRecord) else record
    bins, flagged = difference_counts(np.asarray(list(counts)[:4], dtype=np.float64))
    return SizeBinCounts(float(bins[0]), float(bins[1]), float(bins[2]), bool(flagged))


@dataclass(frozen=True)
class QcConfig:
    max_pm25: float = 1000.0
    max_count: float = 1e6
    require_monotone_counts: bool = True
    local_utc_offset_hours: int = 2

    def __post_init__(self):
        if self.max_pm25 <= 0 or self.max_count <= 0:
            raise ValueError("QC limits must be positive")


@dataclass
class IngestReport:
    accepted: int = 0
    rejected_by_reason: dict[str, int] = field(default_factory=dict)
    first_timestamp: Optional[np.datetime64] = None
    last_timestamp: Optional[np.datetime64] = None

    @property
    def rejected(self) -> int:
        return sum(self.rejected_by_reason.values())

    @property
    def total(self) -> int:
        return self.accepted + self.rejected

    def add_row_errors(self, errors: Iterable[RowError]) -> "IngestReport":
        reasons = Counter(self.rejected_by_reason)
        reasons.update(e.reason for e in errors)
        self.rejected_by_reason = dict(sorted(reasons.items()))
        return self

    def to_dict(self) -> dict:
        def stamp(t):
            return None if t is None else str(np.datetime_as_string(t, unit="s")) + "Z"

        return {
            "accepted": self.accepted,
            "rejected": self.rejected,
            "rejected_by_reason": dict(self.rejected_by_reason),
            "total": self.total,
            "first_timestamp": stamp(self.first_timestamp),
            "last_timestamp": stamp(self.last_timestamp),
        }


def qc_filter(records: Records, cfg: QcConfig = QcConfig()) -> tuple[Records, IngestReport]:
    """Drop implausible records; each rejection is charged to one reason.

    Reasons, in precedence order: ``count_range`` (a channel negative or
    above ``max_count``), ``pm25_range`` (CF1 outside [0, max_pm25]),
    ``non_monotone`` (cumulative channels increase with size).
    """
    counts = records.counts
    present = ~np.isnan(counts)
    bad_count = np.any(present & ((counts < 0) | (counts > cfg.max_count)), axis=1)
    bad_pm = (records.pm25_cf1 < 0) | (records.pm25_cf1 > cfg.max_pm25)
    if cfg.require_monotone_counts:
        step = np.diff(counts, axis=1)
        non_mono = np.any(np.nan_to_num(step, nan=0.0) > 0, axis=1)
    else:
        non_mono = np.zeros(len(records), dtype=bool)

    reasons: dict[str, int] = {}
    taken = np.zeros(len(records), dtype=bool)
    for name, mask in (("count_range", bad_count), ("pm25_range", bad_pm), ("non_monotone", non_mono)):
        hit = mask & ~taken
        if hit.any():
            reasons[name] = int(hit.sum())
        taken |= hit

    clean = records[~taken]
    report = IngestReport(
        accepted=len(clean),
        rejected_by_reason=reasons,
        first_timestamp=clean.times[0] if len(clean) else None,
        last_timestamp=clean.times[-1] if len(clean) else None,
    )
    return clean, report


def read_text(text: str, **kwargs) -> tuple[Records, list[RowError]]:
    """Convenience wrapper: :func:`parse_csv` over an in-memory string."""
    return parse_csv(io.StringIO(text), **kwargs)
