import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pmsense.analytics import (
    AggConfig,
    GroupedMoments,
    RunningStats,
    annual_mean,
    correlation_matrix,
    diurnal_profile,
    exceedance,
    monthly_means,
    pearson,
    resample,
    seasonal_summary,
)
from pmsense.timeseries import Season, TimeSeries, ts_new

import oracles

T0 = np.datetime64("2023-03-01T00:00:00")


def series(values, step="m", start=T0, resolution=None, offsets=None):
    unit = {"m": 60, "h": 3600, "D": 86400}[step]
    idx = np.arange(len(values)) if offsets is None else np.asarray(offsets)
    times = start + idx * np.timedelta64(unit, "s")
    res = resolution or {"m": "minute", "h": "hour", "D": "day"}[step]
    return ts_new(times=times, values=values, resolution=res)[0]


def test_resample_constant_hour():
    h = resample(series([10.0] * 60), "hour")
    assert h.points == [(T0, 10.0)]


def test_resample_incomplete_bucket_omitted():
    assert len(resample(series([1.0] * 30), "hour")) == 0
    assert len(resample(series([1.0] * 45), "hour")) == 1  # 45/60 == 0.75


def test_resample_mean():
    h = resample(series(np.arange(1.0, 61.0)), "hour")
    assert h.values[0] == 30.5


def test_resample_errors():
    with pytest.raises(ValueError):
        resample(series([1.0] * 24, "h"), "hour")
    with pytest.raises(ValueError):
        resample(series([1.0] * 3, "D"), "day")


def test_resample_hour_to_day():
    d = resample(series(np.arange(48.0), "h"), "day")
    assert d.values.tolist() == [11.5, 35.5]
    assert d.resolution == "day"


@given(st.lists(st.floats(-1e3, 1e3), min_size=1, max_size=300), st.integers(0, 3))
@settings(max_examples=100)
def test_resample_mean_within_bucket_range(vals, shift):
    s = series(vals, offsets=np.arange(len(vals)) * 3 + shift)
    h = resample(s, "hour", AggConfig(hour_completeness=0.05))
    for t, v in h.points:
        inside = s.values[(s.times >= t) & (s.times < t + np.timedelta64(3600, "s"))]
        assert inside.min() <= v <= inside.max()


def test_resample_matches_bruteforce_random():
    rng = np.random.default_rng(7)
    for _ in range(10):
        n = int(rng.integers(100, 5000))
        offsets = np.sort(rng.choice(3 * n, size=n, replace=False))
        s = series(rng.gamma(2.0, 15.0, n), offsets=offsets)
        h = resample(s, "hour", AggConfig(hour_completeness=0.3))
        ref = oracles.resample_oracle(s.times, s.values, "hour", 60, 0.3)
        assert len(h) == len(ref)
        for (t, v), (kt, kv) in zip(h.points, ref):
            assert oracles.to_dt(t) == kt
            assert v == pytest.approx(kv, rel=1e-12)


def test_diurnal_constant():
    p = diurnal_profile(series([7.0] * 72, "h"))
    assert np.all(p.mean == 7.0)
    assert np.all(p.std == 0.0)
    assert np.all(p.count == 3)


def test_diurnal_single_hour_populated():
    # 06:00 UTC is 08:00 local
    start = np.datetime64("2023-03-01T06:00:00")
    p = diurnal_profile(series([1.0, 2.0, 3.0], "h", start=start, offsets=[0, 24, 48]))
    assert p.count[8] == 3
    assert p.count.sum() == 3
    assert np.isnan(p.mean[0]) and np.isnan(p.std[0])


def test_diurnal_two_days_sample_std():
    start = np.datetime64("2023-03-01T06:00:00")
    p = diurnal_profile(series([10.0, 20.0], "h", start=start, offsets=[0, 24]))
    assert p.mean[8] == 15.0
    assert p.std[8] == pytest.approx(math.sqrt(50.0), rel=1e-15)  # 7.0711
    pop = diurnal_profile(series([10.0, 20.0], "h", start=start, offsets=[0, 24]), AggConfig(std_kind="population"))
    assert pop.std[8] == 5.0


def test_diurnal_single_sample_std_undefined():
    p = diurnal_profile(series([1.0], "h"))
    assert p.count[2] == 1 and np.isnan(p.std[2])


def test_diurnal_empty():
    p = diurnal_profile(TimeSeries.empty("hour"))
    assert p.count.sum() == 0 and len(p.mean) == 24


def test_seasonal_examples():
    july = series([5.0] * 10, "D", start=np.datetime64("2023-07-01"))
    s = seasonal_summary(july)
    assert s[Season.LONG_DRY][2] == 10
    assert sum(s.count) == 10

    year = series([20.0] * 365, "D", start=np.datetime64("2023-01-01"))
    s = seasonal_summary(year)
    assert np.all(s.mean == 20.0)
    assert s.count.sum() == 365

    t = np.array(["2023-07-01", "2023-07-02", "2023-04-01", "2023-04-02"], dtype="datetime64[s]")
    pts, _ = ts_new(times=t, values=[30.0, 40.0, 10.0, 20.0], resolution="day")
    s = seasonal_summary(pts)
    assert s[Season.LONG_DRY][0] == 35.0
    assert s[Season.LONG_WET][0] == 15.0
    assert s[Season.SHORT_WET] == (None, None, 0)


def test_annual_mean():
    m, cov = annual_mean(series([28.3] * 365, "D"))
    assert m == pytest.approx(28.3, rel=1e-14) and cov == 1.0
    assert annual_mean(series([12.0], "D")) == (12.0, 1.0)
    assert annual_mean(series([10.0, 30.0], "D")) == (20.0, 1.0)
    assert annual_mean(series([10.0, 30.0], "D", offsets=[0, 3]))[1] == 0.5
    with pytest.raises(ValueError):
        annual_mean(TimeSeries.empty("day"))


def test_exceedance():
    r = exceedance(series([30.0] * 5, "D"), 25.0)
    assert r.fraction == 1.0
    assert exceedance(series([25.0] * 5, "D")).days_over == 0
    r = exceedance(series([20.0, 26.0, 30.0], "D"))
    assert (r.days_over, r.days_total) == (2, 3)
    assert r.fraction == pytest.approx(2 / 3)


def test_monthly_means():
    d = series(np.arange(31 + 28, dtype=float), "D", start=np.datetime64("2023-01-01"))
    m = monthly_means(d)
    assert m.values.tolist() == [15.0, 44.5]


def test_pearson_examples():
    assert pearson(([1, 2, 3], [1, 2, 3])) == 1.0
    assert pearson(([1, 2, 3], [3, 2, 1])) == -1.0
    assert pearson(([1, 2, 3], [1, 2, 4])) == pytest.approx(0.98198050606, rel=1e-10)
    assert pearson(([1, 2, 3], [1, 2, 4])) == pytest.approx(oracles.pearson_oracle([1, 2, 3], [1, 2, 4]), rel=1e-14)
    assert pearson(([1, 1, 1], [1, 2, 3])) is None
    assert pearson(([1], [2])) is None


vecs = st.lists(st.floats(-100, 100), min_size=3, max_size=50)


@given(vecs, st.floats(0.1, 10), st.floats(-50, 50), st.data())
def test_pearson_affine_invariance(a, k, c, data):
    b = data.draw(st.lists(st.floats(-100, 100), min_size=len(a), max_size=len(a)))
    a, b = np.array(a), np.array(b)
    r = pearson((a, b))
    if r is None or np.ptp(b) < 1e-3 or np.ptp(a) < 1e-3:
        return
    assert pearson((a, k * b + c)) == pytest.approx(r, abs=1e-9)
    assert pearson((a, -k * b + c)) == pytest.approx(-r, abs=1e-9)


def test_correlation_matrix_examples():
    rng = np.random.default_rng(1)
    a = series(rng.normal(size=40), "D")
    cm = correlation_matrix({"A": a, "B": a})
    assert cm["A", "B"] == 1.0

    b = series(2 * a.values + 1, "D")
    assert correlation_matrix({"A": a, "B": b})["A", "B"] == pytest.approx(1.0, abs=1e-15)

    far = series(rng.normal(size=40), "D", start=np.datetime64("2030-01-01"))
    c = series(rng.normal(size=40), "D")
    cm = correlation_matrix({"A": a, "B": c, "X": far})
    assert cm["X", "X"] == 1.0
    assert cm["X", "A"] is None and cm["B", "X"] is None
    assert cm["A", "B"] is not None
    assert cm.overlap[0, 2] == 0
    assert np.array_equal(cm.r, cm.r.T, equal_nan=True)


def test_correlation_matrix_needs_two_sites():
    with pytest.raises(ValueError):
        correlation_matrix({"A": series([1.0, 2.0], "D")})


def test_running_stats_matches_welford_and_two_pass():
    rng = np.random.default_rng(3)
    x = rng.normal(1e3, 5.0, size=5000)
    rs = RunningStats()
    for v in x:
        rs.push(v)
    n, m, m2 = oracles.welford(x.tolist())
    assert rs.count == n
    assert rs.value_mean == pytest.approx(m, rel=1e-13)
    assert rs.variance() == pytest.approx(np.var(x, ddof=1), rel=1e-10)

    chunked = RunningStats()
    for chunk in np.array_split(x, 17):
        chunked.update(chunk)
    assert chunked.value_mean == pytest.approx(np.mean(x), rel=1e-13)
    assert chunked.variance() == pytest.approx(np.var(x, ddof=1), rel=1e-10)


@given(st.lists(st.floats(-1e4, 1e4), min_size=2, max_size=200), st.integers(1, 10))
def test_grouped_moments_chunking_invariant(xs, n_chunks):
    x = np.array(xs)
    keys = np.arange(len(x)) % 3
    whole = GroupedMoments(3).add(keys, x)
    parts = GroupedMoments(3)
    for kc, xc in zip(np.array_split(keys, n_chunks), np.array_split(x, n_chunks)):
        parts.add(kc, xc)
    assert np.array_equal(whole.n, parts.n)
    np.testing.assert_allclose(parts.mean, whole.mean, rtol=1e-10, atol=1e-9)
    np.testing.assert_allclose(parts.m2, whole.m2, rtol=1e-8, atol=1e-6)
