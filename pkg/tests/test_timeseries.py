from datetime import date, datetime, timedelta, timezone

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pmsense.timeseries import (
    SEASONS,
    Season,
    TimeSeries,
    season_codes,
    season_of,
    to_datetime64,
    ts_align,
    ts_new,
)

from oracles import season_oracle

T = [np.datetime64("2023-01-01T00:00:00") + np.timedelta64(h, "h") for h in range(6)]


@pytest.mark.parametrize(
    "day, expected",
    [
        ("2023-07-15", Season.LONG_DRY),
        ("2023-02-14", Season.SHORT_DRY),
        ("2023-02-15", Season.LONG_WET),
        ("2022-12-31", Season.SHORT_WET),
        ("2023-01-14", Season.SHORT_WET),
        ("2023-01-15", Season.SHORT_DRY),
        ("2023-05-31", Season.LONG_WET),
        ("2023-06-01", Season.LONG_DRY),
        ("2023-08-31", Season.LONG_DRY),
        ("2023-09-01", Season.SHORT_WET),
    ],
)
def test_season_boundaries(day, expected):
    assert season_of(day) is expected


@pytest.mark.parametrize("year", [2023, 2024])
def test_season_partition_full_year(year):
    d = date(year, 1, 1)
    n = 0
    while d.year == year:
        matches = [s for s in Season if season_of(d) is s]
        assert len(matches) == 1
        assert matches[0].value == season_oracle(datetime(d.year, d.month, d.day))
        d += timedelta(days=1)
        n += 1
    assert n == (366 if year == 2024 else 365)


def test_season_codes_vectorised_matches_scalar():
    days = np.arange("2023-01-01", "2025-01-01", dtype="datetime64[D]").astype("datetime64[s]")
    codes = season_codes(days + np.timedelta64(13, "h"))
    assert [SEASONS[c] for c in codes] == [season_of(d) for d in days]


def test_to_datetime64_handles_offsets():
    aware = datetime(2023, 1, 1, 2, 0, tzinfo=timezone(timedelta(hours=2)))
    assert to_datetime64(aware) == np.datetime64("2023-01-01T00:00:00")
    assert to_datetime64("2023-01-01T00:00:00Z") == np.datetime64("2023-01-01T00:00:00")


def test_ts_new_sorts():
    s, rep = ts_new([(T[2], 5.0), (T[1], 3.0)], "hour")
    assert s.points == [(T[1], 3.0), (T[2], 5.0)]
    assert rep.dropped == rep.deduplicated == 0


def test_ts_new_keeps_first_duplicate():
    s, rep = ts_new([(T[1], 3.0), (T[1], 9.0)], "hour")
    assert s.points == [(T[1], 3.0)]
    assert rep.deduplicated == 1


def test_ts_new_drops_non_finite():
    s, rep = ts_new([(T[1], float("nan"))], "hour")
    assert len(s) == 0
    assert rep.dropped == 1
    s, rep = ts_new([(T[1], float("inf")), (T[2], 1.0)], "hour")
    assert len(s) == 1 and rep.dropped == 1


def test_timeseries_rejects_bad_input():
    with pytest.raises(ValueError):
        TimeSeries([T[1], T[0]], [1.0, 2.0], "hour")
    with pytest.raises(ValueError):
        TimeSeries([T[0]], [np.nan], "hour")
    with pytest.raises(ValueError):
        TimeSeries([T[0]], [1.0], "week")


def test_timeseries_is_immutable():
    s, _ = ts_new([(T[0], 1.0)], "hour")
    with pytest.raises(ValueError):
        s.values[0] = 2.0


points = st.lists(
    st.tuples(
        st.integers(0, 200),
        st.one_of(st.floats(-1e6, 1e6), st.just(float("nan")), st.just(float("inf"))),
    ),
    max_size=60,
)


@given(points)
@settings(max_examples=200)
def test_ts_new_idempotent(raw):
    pts = [(T[0] + np.timedelta64(k, "m"), v) for k, v in raw]
    once, _ = ts_new(pts, "minute")
    twice, rep = ts_new(once.points, "minute")
    assert once == twice
    assert rep.dropped == rep.deduplicated == 0


@given(points)
@settings(max_examples=100)
def test_ts_new_accounting(raw):
    pts = [(T[0] + np.timedelta64(k, "m"), v) for k, v in raw]
    s, rep = ts_new(pts, "minute")
    assert len(s) + rep.dropped + rep.deduplicated == len(pts)


def test_ts_align_examples():
    a, _ = ts_new([(T[1], 1.0), (T[2], 2.0), (T[3], 3.0)], "hour")
    b, _ = ts_new([(T[2], 20.0), (T[3], 30.0), (T[4], 40.0)], "hour")
    pair = ts_align(a, b)
    assert list(pair.timestamps) == [T[2], T[3]]
    assert list(pair.a_values) == [2.0, 3.0]
    assert list(pair.b_values) == [20.0, 30.0]

    c, _ = ts_new([(T[5], 1.0)], "hour")
    assert len(ts_align(a, c)) == 0
    assert len(ts_align(a, a)) == 3


def test_ts_align_resolution_mismatch():
    a, _ = ts_new([(T[1], 1.0)], "hour")
    b, _ = ts_new([(T[1], 1.0)], "minute")
    with pytest.raises(ValueError, match="resolution"):
        ts_align(a, b)


@given(st.sets(st.integers(0, 100), max_size=40), st.sets(st.integers(0, 100), max_size=40))
def test_ts_align_symmetric(ka, kb):
    a, _ = ts_new([(T[0] + np.timedelta64(k, "h"), float(k)) for k in ka], "hour")
    b, _ = ts_new([(T[0] + np.timedelta64(k, "h"), -float(k)) for k in kb], "hour")
    ab, ba = ts_align(a, b), ts_align(b, a)
    assert np.array_equal(ab.timestamps, ba.timestamps)
    assert np.array_equal(ab.a_values, ba.b_values)
    assert np.array_equal(ab.b_values, ba.a_values)
    assert len(ab) == len(ka & kb)
