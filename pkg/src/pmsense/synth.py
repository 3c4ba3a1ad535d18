"""Synthetic minute-level sensor records with known PM2.5 truth.

The truth signal is a base level plus two Gaussian bumps in local hour of
day, scaled up in the dry seasons, plus seeded Gaussian noise, clamped at
zero. Particle counts are produced by inverting the ALT CF3 formula with a
fixed mass split across the three bins, so correcting the records returns
the truth up to floating-point error.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .correction import CorrectionParams
from .ingest import Records
from .timeseries import LOCAL_UTC_OFFSET_HOURS, SEASONS, TimeLike, epoch_seconds, season_codes, to_datetime64

# share of ALT CF3 mass carried by the 0.3-0.5, 0.5-1.0, 1.0-2.5 um bins;
# with the default coefficients this puts ~85% of the particles in X
MASS_SPLIT = (0.3, 0.3, 0.4)
# coarse channels as fractions of the 1.0-2.5 um bin count
COARSE_FRACTIONS = (0.25, 0.05, 0.01)  # >2.5, >5.0, >10 um

CF1_FACTOR = 2.0
PEAK_WIDTH_HOURS = 1.5

_DRY = np.array([s.is_dry for s in SEASONS])


@dataclass(frozen=True)
class SiteProfile:
    base_level: float = 25.0
    morning_peak_hour: int = 7
    evening_peak_hour: int = 19
    peak_amplitude: float = 15.0
    dry_multiplier: float = 1.0
    noise_std: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.base_level <= 0:
            raise ValueError("base_level must be positive")
        for h in (self.morning_peak_hour, self.evening_peak_hour):
            if not 0 <= h <= 23:
                raise ValueError("peak hours must lie in 0..23")
        if self.noise_std < 0:
            raise ValueError("noise_std must be non-negative")
        if self.dry_multiplier < 1:
            raise ValueError("dry_multiplier must be >= 1")


def _bump(hour: np.ndarray, centre: float) -> np.ndarray:
    d = np.abs(hour - centre)
    d = np.minimum(d, 24.0 - d)  # wrap around midnight
    return np.exp(-0.5 * (d / PEAK_WIDTH_HOURS) ** 2)


def true_signal(profile: SiteProfile, times: np.ndarray, rng: np.random.Generator | None = None) -> np.ndarray:
    """Truth in ug/m3 at UTC ``times``; noise is drawn from ``rng`` when given."""
    secs = epoch_seconds(times) + LOCAL_UTC_OFFSET_HOURS * 3600
    hour = (secs % 86400) / 3600.0
    signal = profile.base_level + profile.peak_amplitude * (
        _bump(hour, profile.morning_peak_hour) + _bump(hour, profile.evening_peak_hour)
    )
    signal = signal * np.where(_DRY[season_codes(times)], profile.dry_multiplier, 1.0)
    if rng is not None and profile.noise_std > 0:
        signal = signal + rng.normal(0.0, profile.noise_std, size=len(signal))
    return np.maximum(signal, 0.0)


def counts_for_mass(pm25, params: CorrectionParams = CorrectionParams()) -> np.ndarray:
    """Cumulative channels (>0.3 ... >10 um) whose ALT CF3 value is ``pm25``."""
    pm25 = np.asarray(pm25, dtype=np.float64)
    per_bin = pm25[:, None] / params.cf * np.asarray(MASS_SPLIT) / params.coefficients
    x, y, z = per_bin.T
    c25 = COARSE_FRACTIONS[0] * z
    c50 = COARSE_FRACTIONS[1] * z
    c100 = COARSE_FRACTIONS[2] * z
    c10 = c25 + z
    c05 = c10 + y
    c03 = c05 + x
    return np.column_stack([c03, c05, c10, c25, c50, c100])


def generate(
    profile: SiteProfile,
    start: TimeLike,
    end: TimeLike,
    params: CorrectionParams = CorrectionParams(),
    return_truth: bool = False,
):
    """Minute records on ``[start, end)``.

    ``pm25_cf1`` is :data:`CF1_FACTOR` times the truth. With
    ``return_truth`` the truth array is returned alongside the records.
    """
    t0, t1 = to_datetime64(start), to_datetime64(end)
    if t1 <= t0:
        raise ValueError("end must be after start")
    first = -(-t0.astype(np.int64) // 60) * 60
    times = np.arange(first, t1.astype(np.int64), 60).astype("datetime64[s]")
    rng = np.random.default_rng(profile.seed)
    truth = true_signal(profile, times, rng)
    records = Records(times, counts_for_mass(truth, params), CF1_FACTOR * truth)
    return (records, truth) if return_truth else records
