"""Per-site pipeline steps and the intermediate record store.

Store file (CSV, header row, one row per accepted record, sorted by time)::

    timestamp  ISO-8601 UTC with trailing Z
    x, y, z    differenced counts per dL (0.3-0.5, 0.5-1.0, 1.0-2.5 um)
    clamped    1 if a negative difference was clamped to zero, else 0
    pm25_cf1   vendor CF1 PM2.5, ug/m3
    pm25_alt   ALT CF3 PM2.5, ug/m3
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional

import numpy as np

from .analytics import (
    WHO_24H_GUIDELINE,
    AggConfig,
    annual_mean,
    diurnal_profile,
    exceedance,
    monthly_means,
    resample,
    seasonal_summary,
)
from .correction import CorrectionParams, alt_cf3, compare_algorithms
from .ingest import IngestReport, QcConfig, Records, RowError, difference_counts, parse_csv, qc_filter
from .timeseries import TimeSeries, ts_new

STORE_COLUMNS = ("timestamp", "x", "y", "z", "clamped", "pm25_cf1", "pm25_alt")


def ingest_files(
    paths: Iterable[str | Path],
    schema: Optional[dict] = None,
    qc: QcConfig = QcConfig(),
) -> tuple[Records, IngestReport, list[RowError]]:
    """Parse and QC several files of one site into one time-sorted batch.

    Duplicate timestamps keep the first record (file order, then row order)
    and are reported under ``duplicate_timestamp``.
    """
    parts, errors = [], []
    for path in paths:
        recs, errs = parse_csv(path, schema, utc_offset_hours=qc.local_utc_offset_hours)
        parts.append(recs)
        errors.extend(errs)
    if parts:
        merged = Records(
            np.concatenate([p.times for p in parts]),
            np.concatenate([p.counts for p in parts]),
            np.concatenate([p.pm25_cf1 for p in parts]),
            np.concatenate([p.pm25_atm for p in parts]),
            np.concatenate([p.temperature for p in parts]),
            np.concatenate([p.humidity for p in parts]),
            np.concatenate([p.pressure for p in parts]),
        )
    else:
        merged = Records.empty()
    clean, report = qc_filter(merged, qc)

    order = np.argsort(clean.times.astype(np.int64), kind="stable")
    clean = clean[order]
    keep = np.ones(len(clean), bool)
    keep[1:] = clean.times[1:] != clean.times[:-1]
    if not keep.all():
        report.rejected_by_reason["duplicate_timestamp"] = int((~keep).sum())
        clean = clean[keep]
        report.accepted = len(clean)
    report.add_row_errors(errors)
    return clean, report, errors


@dataclass(eq=False)
class Store:
    times: np.ndarray
    bins: np.ndarray
    clamped: np.ndarray
    pm25_cf1: np.ndarray
    pm25_alt: np.ndarray

    def __len__(self) -> int:
        return len(self.times)

    def alt_series(self) -> TimeSeries:
        return ts_new(times=self.times, values=self.pm25_alt, resolution="minute")[0]

    def cf1_series(self) -> TimeSeries:
        return ts_new(times=self.times, values=self.pm25_cf1, resolution="minute")[0]


def build_store(records: Records, params: CorrectionParams = CorrectionParams()) -> Store:
    bins, clamped = difference_counts(records.counts)
    return Store(records.times, bins, clamped, records.pm25_cf1, alt_cf3(bins, params))


def write_store(path: str | Path, store: Store) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    stamps = np.datetime_as_string(store.times, unit="s")
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(STORE_COLUMNS)
        for i in range(len(store)):
            x, y, z = store.bins[i].tolist()
            w.writerow([
                stamps[i] + "Z", repr(x), repr(y), repr(z), int(store.clamped[i]),
                repr(float(store.pm25_cf1[i])), repr(float(store.pm25_alt[i])),
            ])


def read_store(path: str | Path) -> Store:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = tuple(next(reader, ()))
        if header != STORE_COLUMNS:
            raise ValueError(f"{path}: not a record store (header {header})")
        rows = list(reader)
    stamps = np.array([r[0].rstrip("Z") for r in rows], dtype="datetime64[s]")
    data = np.array([r[1:] for r in rows], dtype=np.float64).reshape(len(rows), 6)
    return Store(stamps, data[:, 0:3], data[:, 3].astype(bool), data[:, 4], data[:, 5])


@dataclass(eq=False)
class SiteAnalysis:
    hourly: TimeSeries
    daily: TimeSeries
    monthly: TimeSeries
    diurnal: object
    seasonal: object
    annual_mean: Optional[float]
    coverage: Optional[float]
    exceedance: object
    comparison: Optional[object]


def analyze_store(
    store: Store,
    agg: AggConfig = AggConfig(),
    guideline: float = WHO_24H_GUIDELINE,
) -> SiteAnalysis:
    alt = store.alt_series()
    hourly = resample(alt, "hour", agg)
    daily = resample(hourly, "day", agg)
    if len(daily):
        mean, coverage = annual_mean(daily)
    else:
        mean = coverage = None
    try:
        comparison = compare_algorithms(alt, store.cf1_series())
    except ValueError:
        comparison = None
    return SiteAnalysis(
        hourly=hourly,
        daily=daily,
        monthly=monthly_means(daily),
        diurnal=diurnal_profile(hourly, agg),
        seasonal=seasonal_summary(daily, agg),
        annual_mean=mean,
        coverage=coverage,
        exceedance=exceedance(daily, guideline),
        comparison=comparison,
    )


def longest_contiguous_run(hourly: TimeSeries) -> int:
    if len(hourly) == 0:
        return 0
    steps = np.diff(hourly.times.astype(np.int64)) == 3600
    best = run = 1
    for ok in steps:
        run = run + 1 if ok else 1
        best = max(best, run)
    return best
