import numpy as np
import pytest

from pmsense.analytics import diurnal_profile, resample, seasonal_summary
from pmsense.correction import alt_cf3, correct_series
from pmsense.ingest import QcConfig, difference_counts, qc_filter
from pmsense.synth import SiteProfile, counts_for_mass, generate, true_signal
from pmsense.timeseries import Season


def test_constant_profile_round_trip():
    p = SiteProfile(base_level=23.0, peak_amplitude=0.0, noise_std=0.0, dry_multiplier=1.0)
    recs = generate(p, "2023-01-01", "2023-01-03")
    assert len(recs) == 2 * 1440
    np.testing.assert_allclose(correct_series(recs).values, 23.0, atol=1e-6)


def test_noise_free_round_trip_relative():
    p = SiteProfile(noise_std=0.0, dry_multiplier=1.7)
    recs, truth = generate(p, "2023-05-30", "2023-06-03", return_truth=True)
    alt = correct_series(recs).values
    np.testing.assert_allclose(alt, truth, rtol=1e-4)
    np.testing.assert_allclose(recs.pm25_cf1, 2.0 * truth, rtol=1e-15)


def test_counts_are_monotone_and_pass_qc():
    recs = generate(SiteProfile(noise_std=8.0, seed=4), "2023-01-01", "2023-01-02")
    _, flagged = difference_counts(recs.counts)
    assert not flagged.any()
    clean, rep = qc_filter(recs, QcConfig())
    assert rep.rejected == 0


def test_majority_of_counts_in_smallest_bin():
    bins, _ = difference_counts(counts_for_mass(np.array([30.0])))
    assert bins[0, 0] > bins[0, 1:].sum()
    assert alt_cf3(bins)[0] == pytest.approx(30.0, rel=1e-12)


def test_peaks_recovered_noise_free():
    p = SiteProfile(noise_std=0.0, morning_peak_hour=7, evening_peak_hour=19, peak_amplitude=20.0)
    recs = generate(p, "2023-03-01", "2023-03-08")
    prof = diurnal_profile(resample(correct_series(recs), "hour"))
    top = set(np.argsort(prof.mean)[-2:].tolist())
    morning = [h for h in top if abs(h - 7) <= 1]
    evening = [h for h in top if abs(h - 19) <= 1]
    assert morning and evening


def test_same_seed_same_stream():
    p = SiteProfile(noise_std=5.0, seed=12)
    a, b = generate(p, "2023-01-01", "2023-01-02"), generate(p, "2023-01-01", "2023-01-02")
    assert np.array_equal(a.counts, b.counts) and np.array_equal(a.times, b.times)
    c = generate(SiteProfile(noise_std=5.0, seed=13), "2023-01-01", "2023-01-02")
    assert not np.array_equal(a.counts, c.counts)


def test_dry_season_elevated():
    p = SiteProfile(dry_multiplier=1.5, noise_std=2.0, seed=1)
    recs = generate(p, "2022-08-01", "2023-08-01")
    daily = resample(resample(correct_series(recs), "hour"), "day")
    s = seasonal_summary(daily)
    assert s[Season.LONG_DRY][0] > s[Season.LONG_WET][0]


def test_signal_non_negative():
    times = np.arange("2023-01-01", "2023-01-02", dtype="datetime64[m]").astype("datetime64[s]")
    p = SiteProfile(base_level=1.0, noise_std=50.0)
    assert true_signal(p, times, np.random.default_rng(0)).min() >= 0


@pytest.mark.parametrize("kw", [dict(base_level=0), dict(morning_peak_hour=24), dict(noise_std=-1), dict(dry_multiplier=0.5)])
def test_profile_validation(kw):
    with pytest.raises(ValueError):
        SiteProfile(**kw)


def test_generate_rejects_empty_range():
    with pytest.raises(ValueError):
        generate(SiteProfile(), "2023-01-02", "2023-01-01")
