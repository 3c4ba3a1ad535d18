"""Resampling and summary statistics for PM2.5 series.

Hour-of-day grouping uses local time (UTC+2); hourly and daily buckets are
aligned to UTC. Undefined statistics are NaN inside arrays and ``None`` for
scalars.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Optional

import numpy as np

from .timeseries import (
    LOCAL_UTC_OFFSET_HOURS,
    RESOLUTIONS,
    SEASONS,
    AlignedPair,
    Season,
    TimeSeries,
    epoch_seconds,
    local_hour,
    season_codes,
    ts_align,
)

WHO_24H_GUIDELINE = 25.0


@dataclass(frozen=True)
class AggConfig:
    hour_completeness: float = 0.75
    day_completeness: float = 0.75
    std_kind: str = "sample"

    def __post_init__(self):
        for name in ("hour_completeness", "day_completeness"):
            v = getattr(self, name)
            if not (0 < v <= 1):
                raise ValueError(f"{name} must lie in (0, 1], got {v}")
        if self.std_kind not in ("sample", "population"):
            raise ValueError("std_kind must be 'sample' or 'population'")

    @property
    def ddof(self) -> int:
        return 1 if self.std_kind == "sample" else 0


class GroupedMoments:
    """Streaming per-group count/mean/M2.

    Each call to :meth:`add` computes exact two-pass moments for the chunk
    and merges them into the running state with Chan et al.'s pairwise
    update, so feeding data in any chunking gives the same answer to
    rounding.
    """

    def __init__(self, n_groups: int):
        self.n = np.zeros(n_groups, dtype=np.int64)
        self.mean = np.zeros(n_groups)
        self.m2 = np.zeros(n_groups)

    def add(self, keys, values) -> "GroupedMoments":
        keys = np.asarray(keys, dtype=np.int64)
        values = np.asarray(values, dtype=np.float64)
        size = len(self.n)
        nb = np.bincount(keys, minlength=size)
        if not nb.any():
            return self
        sums = np.bincount(keys, weights=values, minlength=size)
        with np.errstate(invalid="ignore", divide="ignore"):
            mb = np.where(nb > 0, sums / np.maximum(nb, 1), 0.0)
        dev = values - mb[keys]
        m2b = np.bincount(keys, weights=dev * dev, minlength=size)

        na = self.n
        n = na + nb
        safe = np.maximum(n, 1)
        delta = mb - self.mean
        self.mean = np.where(nb > 0, self.mean + delta * (nb / safe), self.mean)
        self.m2 = self.m2 + m2b + delta * delta * (na * nb / safe)
        self.n = n
        return self

    def std(self, ddof: int = 1) -> np.ndarray:
        with np.errstate(invalid="ignore", divide="ignore"):
            var = np.where(self.n > ddof, self.m2 / (self.n - ddof), np.nan)
        return np.sqrt(np.maximum(var, 0.0))

    def means(self) -> np.ndarray:
        return np.where(self.n > 0, self.mean, np.nan)


class RunningStats(GroupedMoments):
    """Single-group Welford accumulator."""

    def __init__(self):
        super().__init__(1)

    def push(self, value: float) -> None:
        self.n[0] += 1
        delta = value - self.mean[0]
        self.mean[0] += delta / self.n[0]
        self.m2[0] += delta * (value - self.mean[0])

    def update(self, values) -> "RunningStats":
        values = np.asarray(values, dtype=np.float64).reshape(-1)
        self.add(np.zeros(len(values), dtype=np.int64), values)
        return self

    @property
    def count(self) -> int:
        return int(self.n[0])

    @property
    def value_mean(self) -> float:
        return float(self.mean[0]) if self.n[0] else math.nan

    def variance(self, ddof: int = 1) -> float:
        return float(self.m2[0] / (self.n[0] - ddof)) if self.n[0] > ddof else math.nan


def resample(ts: TimeSeries, target: str, cfg: AggConfig = AggConfig()) -> TimeSeries:
    """Bucket means at ``target`` ("hour" or "day") resolution.

    A bucket is emitted only when it holds at least ``completeness *
    expected`` points, where expected is the number of source steps per
    bucket. Buckets are stamped with their start time.
    """
    if target not in ("hour", "day"):
        raise ValueError(f"target must be 'hour' or 'day', not {target!r}")
    src, dst = RESOLUTIONS[ts.resolution], RESOLUTIONS[target]
    if src >= dst:
        raise ValueError(f"cannot resample {ts.resolution} series to {target}")
    completeness = cfg.hour_completeness if target == "hour" else cfg.day_completeness
    if len(ts) == 0:
        return TimeSeries.empty(target, ts.unit)

    secs = epoch_seconds(ts.times)
    bucket = secs // dst
    starts = np.flatnonzero(np.r_[True, bucket[1:] != bucket[:-1]])
    counts = np.diff(np.r_[starts, len(bucket)])
    sums = np.add.reduceat(ts.values, starts)
    keep = counts >= completeness * (dst // src)
    means = sums[keep] / counts[keep]
    # guard against sum rounding pushing a mean outside its bucket range
    lo = np.minimum.reduceat(ts.values, starts)[keep]
    hi = np.maximum.reduceat(ts.values, starts)[keep]
    means = np.clip(means, lo, hi)
    times = (bucket[starts][keep] * dst).astype("datetime64[s]")
    return TimeSeries(times, means, target, ts.unit)


@dataclass(frozen=True, eq=False)
class DiurnalProfile:
    hours: np.ndarray
    mean: np.ndarray
    std: np.ndarray
    count: np.ndarray

    def rows(self):
        for h in range(24):
            yield int(h), _opt(self.mean[h]), _opt(self.std[h]), int(self.count[h])


def _opt(v) -> Optional[float]:
    v = float(v)
    return None if math.isnan(v) else v


def diurnal_profile(
    hourly: TimeSeries,
    cfg: AggConfig = AggConfig(),
    utc_offset_hours: float = LOCAL_UTC_OFFSET_HOURS,
) -> DiurnalProfile:
    """Mean, std and count of hourly values per local hour of day.

    Hours with fewer than two samples (or none, for the mean) report NaN.
    """
    if hourly.resolution != "hour":
        raise ValueError("diurnal_profile needs an hourly series")
    acc = GroupedMoments(24)
    if len(hourly):
        acc.add(local_hour(hourly.times, utc_offset_hours), hourly.values)
    std = acc.std(cfg.ddof)
    std[acc.n < 2] = np.nan
    return DiurnalProfile(np.arange(24), acc.means(), std, acc.n.copy())


@dataclass(frozen=True, eq=False)
class SeasonalSummary:
    seasons: tuple[Season, ...]
    mean: np.ndarray
    std: np.ndarray
    count: np.ndarray

    def __getitem__(self, season: Season) -> tuple[Optional[float], Optional[float], int]:
        i = self.seasons.index(season)
        return _opt(self.mean[i]), _opt(self.std[i]), int(self.count[i])


def seasonal_summary(daily: TimeSeries, cfg: AggConfig = AggConfig()) -> SeasonalSummary:
    if daily.resolution != "day":
        raise ValueError("seasonal_summary needs a daily series")
    acc = GroupedMoments(len(SEASONS))
    if len(daily):
        acc.add(season_codes(daily.times), daily.values)
    std = acc.std(cfg.ddof)
    std[acc.n < 2] = np.nan
    return SeasonalSummary(SEASONS, acc.means(), std, acc.n.copy())


def monthly_means(daily: TimeSeries) -> TimeSeries:
    """Mean of available daily values per calendar month (no completeness rule)."""
    if daily.resolution != "day":
        raise ValueError("monthly_means needs a daily series")
    if len(daily) == 0:
        return TimeSeries.empty("day", daily.unit)
    months = daily.times.astype("datetime64[M]")
    starts = np.flatnonzero(np.r_[True, months[1:] != months[:-1]])
    counts = np.diff(np.r_[starts, len(months)])
    means = np.add.reduceat(daily.values, starts) / counts
    return TimeSeries(months[starts].astype("datetime64[s]"), means, "day", daily.unit)


def annual_mean(daily: TimeSeries) -> tuple[float, float]:
    """(mean of daily values, available days / days spanned)."""
    if daily.resolution != "day":
        raise ValueError("annual_mean needs a daily series")
    if len(daily) == 0:
        raise ValueError("annual_mean of an empty series")
    days = daily.times.astype("datetime64[D]").astype(np.int64)
    span = int(days[-1] - days[0]) + 1
    acc = RunningStats().update(daily.values)
    return acc.value_mean, len(daily) / span


@dataclass(frozen=True)
class ExceedanceReport:
    guideline: float
    days_over: int
    days_total: int

    @property
    def fraction(self) -> Optional[float]:
        return self.days_over / self.days_total if self.days_total else None


def exceedance(daily: TimeSeries, guideline: float = WHO_24H_GUIDELINE) -> ExceedanceReport:
    """Count days strictly above ``guideline``."""
    if guideline <= 0:
        raise ValueError("guideline must be positive")
    if daily.resolution != "day":
        raise ValueError("exceedance needs a daily series")
    return ExceedanceReport(guideline, int(np.sum(daily.values > guideline)), len(daily))


def pearson(pair: AlignedPair | tuple) -> Optional[float]:
    """Sample Pearson correlation; ``None`` if either side is constant."""
    if isinstance(pair, AlignedPair):
        a, b = pair.a_values, pair.b_values
    else:
        a, b = (np.asarray(v, dtype=np.float64) for v in pair)
    if len(a) != len(b):
        raise ValueError("sequences differ in length")
    if len(a) < 2:
        return None
    da, db = a - a.mean(), b - b.mean()
    saa, sbb = float(da @ da), float(db @ db)
    if saa == 0 or sbb == 0:
        return None
    return float(np.clip(float(da @ db) / math.sqrt(saa * sbb), -1.0, 1.0))


@dataclass(frozen=True, eq=False)
class CorrelationMatrix:
    labels: tuple[str, ...]
    r: np.ndarray
    overlap: np.ndarray

    def __getitem__(self, key: tuple[str, str]) -> Optional[float]:
        i, j = (self.labels.index(k) for k in key)
        return _opt(self.r[i, j])


def correlation_matrix(sites: Mapping[str, TimeSeries]) -> CorrelationMatrix:
    """Pairwise Pearson r of site series over their common timestamps."""
    labels = tuple(sites)
    if len(labels) < 2:
        raise ValueError("need at least two sites")
    k = len(labels)
    r = np.full((k, k), np.nan)
    overlap = np.zeros((k, k), dtype=np.int64)
    for i in range(k):
        overlap[i, i] = len(sites[labels[i]])
        r[i, i] = 1.0
        for j in range(i + 1, k):
            pair = ts_align(sites[labels[i]], sites[labels[j]])
            value = pearson(pair)
            overlap[i, j] = overlap[j, i] = len(pair)
            r[i, j] = r[j, i] = np.nan if value is None else value
    return CorrelationMatrix(labels, r, overlap)
