"""Time-series value types and a two-wet, two-dry season calendar.

Timestamps are ``numpy.datetime64[s]`` values in UTC. A :class:`TimeSeries`
holds two read-only arrays (times, values) plus a declared resolution.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from datetime import date, datetime, timezone
from typing import Iterable, Sequence, Union

import numpy as np

TimeLike = Union[np.datetime64, datetime, date, str, int]

# seconds per nominal step
RESOLUTIONS = {"minute": 60, "hour": 3600, "day": 86400}

LOCAL_UTC_OFFSET_HOURS = 2  # CAT, no DST


def to_datetime64(t: TimeLike) -> np.datetime64:
    """Coerce ``t`` to a UTC ``datetime64[s]``.

    Aware datetimes are converted to UTC; naive ones are taken as UTC.
    Integers are epoch seconds.
    """
    if isinstance(t, np.datetime64):
        return t.astype("datetime64[s]")
    if isinstance(t, datetime):
        if t.tzinfo is not None:
            t = t.astimezone(timezone.utc).replace(tzinfo=None)
        return np.datetime64(t, "s")
    if isinstance(t, date):
        return np.datetime64(t, "D").astype("datetime64[s]")
    if isinstance(t, (int, np.integer)):
        return np.datetime64(int(t), "s")
    if isinstance(t, str):
        return to_datetime64(datetime.fromisoformat(t.replace("Z", "+00:00")))
    raise TypeError(f"cannot interpret {t!r} as a timestamp")


def as_datetime64_array(times: Iterable[TimeLike]) -> np.ndarray:
    if isinstance(times, np.ndarray) and np.issubdtype(times.dtype, np.datetime64):
        return times.astype("datetime64[s]")
    return np.array([to_datetime64(t) for t in times], dtype="datetime64[s]")


def epoch_seconds(times: np.ndarray) -> np.ndarray:
    return np.asarray(times, dtype="datetime64[s]").astype(np.int64)


class Season(enum.Enum):
    LONG_DRY = "LongDry"
    SHORT_WET = "ShortWet"
    SHORT_DRY = "ShortDry"
    LONG_WET = "LongWet"

    @property
    def is_dry(self) -> bool:
        return self in (Season.LONG_DRY, Season.SHORT_DRY)


SEASONS = tuple(Season)


def _season_for_month_day(month: int, day: int) -> Season:
    if 6 <= month <= 8:
        return Season.LONG_DRY
    if month >= 9 or (month == 1 and day < 15):
        return Season.SHORT_WET
    if (month == 1 and day >= 15) or (month == 2 and day < 15):
        return Season.SHORT_DRY
    return Season.LONG_WET


def season_of(ts: TimeLike) -> Season:
    """Season of the UTC calendar date of ``ts``.

    Jun-Aug long dry, Sep 1-Jan 14 short wet, Jan 15-Feb 14 short dry,
    Feb 15-May 31 long wet.
    """
    d = to_datetime64(ts).astype("datetime64[D]").item()
    return _season_for_month_day(d.month, d.day)


def season_codes(times: np.ndarray) -> np.ndarray:
    """Vectorised :func:`season_of`; returns indices into :data:`SEASONS`."""
    days = np.asarray(times, dtype="datetime64[s]").astype("datetime64[D]")
    months = days.astype("datetime64[M]")
    month = months.astype(np.int64) % 12 + 1
    day = (days - months.astype("datetime64[D]")).astype(np.int64) + 1
    table = np.empty((13, 32), dtype=np.int64)
    for m in range(1, 13):
        for dd in range(1, 32):
            table[m, dd] = SEASONS.index(_season_for_month_day(m, dd))
    return table[month, day]


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class TimeSeries:
    """Strictly increasing, finite-valued series with a nominal resolution.

    Build through :func:`ts_new` unless the inputs are already clean; the
    constructor only validates.
    """

    times: np.ndarray
    values: np.ndarray
    resolution: str = "minute"
    unit: str = "ug/m3"

    def __post_init__(self):
        times = as_datetime64_array(self.times)
        values = np.asarray(self.values, dtype=np.float64).reshape(-1)
        if times.shape != values.shape:
            raise ValueError("times and values differ in length")
        if self.resolution not in RESOLUTIONS:
            raise ValueError(f"unknown resolution {self.resolution!r}")
        if len(times) > 1 and not np.all(np.diff(times.astype(np.int64)) > 0):
            raise ValueError("timestamps must be strictly increasing")
        if not np.all(np.isfinite(values)):
            raise ValueError("values must be finite")
        object.__setattr__(self, "times", _readonly(times))
        object.__setattr__(self, "values", _readonly(values))

    def __len__(self) -> int:
        return len(self.values)

    def __eq__(self, other) -> bool:
        if not isinstance(other, TimeSeries):
            return NotImplemented
        return (
            self.resolution == other.resolution
            and self.unit == other.unit
            and np.array_equal(self.times, other.times)
            and np.array_equal(self.values, other.values)
        )

    @property
    def points(self) -> list[tuple[np.datetime64, float]]:
        return list(zip(self.times, self.values.tolist()))

    @property
    def step_seconds(self) -> int:
        return RESOLUTIONS[self.resolution]

    @classmethod
    def empty(cls, resolution: str = "minute", unit: str = "ug/m3") -> "TimeSeries":
        return cls(np.array([], dtype="datetime64[s]"), np.array([]), resolution, unit)


@dataclass(frozen=True)
class BuildReport:
    dropped: int = 0
    deduplicated: int = 0


def ts_new(
    points: Sequence[tuple[TimeLike, float]] | None = None,
    resolution: str = "minute",
    unit: str = "ug/m3",
    *,
    times=None,
    values=None,
) -> tuple[TimeSeries, BuildReport]:
    """Build a clean series from raw points.

    Non-finite values are dropped, then duplicate timestamps keep their first
    occurrence in input order, then the result is sorted. Either pass
    ``points`` or the parallel arrays ``times``/``values``.
    """
    if points is not None:
        if times is not None or values is not None:
            raise TypeError("pass points or times/values, not both")
        pts = list(points)
        times = [p[0] for p in pts]
        values = [p[1] for p in pts]
    t = as_datetime64_array([] if times is None else times)
    v = np.asarray([] if values is None else values, dtype=np.float64).reshape(-1)
    if t.shape != v.shape:
        raise ValueError("times and values differ in length")

    finite = np.isfinite(v)
    dropped = int((~finite).sum())
    t, v = t[finite], v[finite]
    # stable sort keeps input order among equal timestamps -> first wins
    order = np.argsort(t.astype(np.int64), kind="stable")
    t, v = t[order], v[order]
    if len(t):
        keep = np.ones(len(t), dtype=bool)
        keep[1:] = t[1:] != t[:-1]
    else:
        keep = np.ones(0, dtype=bool)
    dedup = int((~keep).sum())
    series = TimeSeries(t[keep], v[keep], resolution, unit)
    return series, BuildReport(dropped=dropped, deduplicated=dedup)


@dataclass(frozen=True, eq=False)
class AlignedPair:
    timestamps: np.ndarray
    a_values: np.ndarray
    b_values: np.ndarray = field(repr=False)

    def __post_init__(self):
        if not (len(self.timestamps) == len(self.a_values) == len(self.b_values)):
            raise ValueError("aligned sequences differ in length")
        for name in ("timestamps", "a_values", "b_values"):
            object.__setattr__(self, name, _readonly(getattr(self, name)))

    def __len__(self) -> int:
        return len(self.timestamps)


def ts_align(a: TimeSeries, b: TimeSeries) -> AlignedPair:
    """Restrict two series to their common timestamps."""
    if a.resolution != b.resolution:
        raise ValueError(
            f"resolution mismatch: {a.resolution!r} vs {b.resolution!r}"
        )
    common, ia, ib = np.intersect1d(
        a.times.astype(np.int64), b.times.astype(np.int64),
        assume_unique=True, return_indices=True,
    )
    return AlignedPair(common.astype("datetime64[s]"), a.values[ia], b.values[ib])


def local_hour(times: np.ndarray, utc_offset_hours: float = LOCAL_UTC_OFFSET_HOURS) -> np.ndarray:
    """Hour of day (0-23) in local time for UTC ``times``."""
    secs = epoch_seconds(times) + int(round(utc_offset_hours * 3600))
    return (secs // 3600) % 24
