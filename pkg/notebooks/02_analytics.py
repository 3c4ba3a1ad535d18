"""Synthesise a year at one site and look at its diurnal and seasonal shape.

Run: python3 notebooks/02_analytics.py
"""

import numpy as np

from pmsense.analytics import annual_mean, diurnal_profile, exceedance, monthly_means, resample, seasonal_summary
from pmsense.correction import cf1_series, compare_algorithms, correct_series
from pmsense.synth import SiteProfile, generate

profile = SiteProfile(base_level=22, peak_amplitude=12, dry_multiplier=1.5, noise_std=4, seed=7)
records = generate(profile, "2022-08-01", "2023-08-01")
print(f"{len(records)} minute records")

alt = correct_series(records)
hourly = resample(alt, "hour")
daily = resample(hourly, "day")

stats = compare_algorithms(alt, cf1_series(records))
print(f"CF1 / ALT mean ratio {stats.mean_ratio:.3f}, r {stats.pearson_r:.4f}")

prof = diurnal_profile(hourly)
print("\nlocal hour  mean")
for h, m in enumerate(prof.mean):
    bar = "#" * int(round(m / 2))
    print(f"  {h:02d}      {m:6.1f} {bar}")
print("peak hour:", int(np.nanargmax(prof.mean)))

print("\nseason      mean    std     n")
summary = seasonal_summary(daily)
for season in summary.seasons:
    mean, std, n = summary[season]
    print(f"  {season.value:9s} {mean:6.1f} {std:6.1f} {n:5d}")

months = monthly_means(daily)
print("\nmonthly means:", ", ".join(f"{m:.1f}" for m in months.values))
mean, coverage = annual_mean(daily)
print(f"annual mean {mean:.1f} ug/m3 at {coverage:.0%} coverage")
rep = exceedance(daily, 25.0)
print(f"{rep.days_over}/{rep.days_total} days above 25 ug/m3")
