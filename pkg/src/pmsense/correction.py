"""ALT CF3 PM2.5 from particle counts, and comparison with vendor CF1.

The per-bin mass coefficients are derived from the bin bounds at
construction time: spherical particles of diameter ``d`` (geometric mean of
the bounds, or their midpoint) at the given density. The unit conversion is

    coefficient [ug/m3 per particle/dL] = rho [g/cm3] * V [cm3] * 1e6 [ug/g] * 1e4 [dL/m3]
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .ingest import Records, SizeBinCounts, difference_counts
from .timeseries import TimeSeries, ts_align, ts_new

UM_TO_CM = 1e-4
UG_PER_G = 1e6
DL_PER_M3 = 1e4

DEFAULT_BOUNDS = ((0.3, 0.5), (0.5, 1.0), (1.0, 2.5))


@dataclass(frozen=True)
class BinCoefficient:
    lower_um: float
    upper_um: float
    d_um: float
    coefficient: float


def bin_mass_coefficient(
    lower_um: float, upper_um: float, density: float = 1.0, diameter: str = "geometric"
) -> BinCoefficient:
    """Mass per particle of one size bin, in ug/m3 per particle/dL."""
    if not (0 < lower_um < upper_um):
        raise ValueError(f"bin bounds must satisfy 0 < lower < upper, got ({lower_um}, {upper_um})")
    if density <= 0:
        raise ValueError("density must be positive")
    if diameter == "geometric":
        d = math.sqrt(lower_um * upper_um)
    elif diameter == "midpoint":
        d = 0.5 * (lower_um + upper_um)
    else:
        raise ValueError(f"diameter must be 'geometric' or 'midpoint', not {diameter!r}")
    r_cm = d / 2 * UM_TO_CM
    volume = 4.0 / 3.0 * math.pi * r_cm**3
    return BinCoefficient(lower_um, upper_um, d, density * volume * UG_PER_G * DL_PER_M3)


@dataclass(frozen=True)
class CorrectionParams:
    cf: float = 3.0
    density: float = 1.0
    bounds: tuple[tuple[float, float], ...] = DEFAULT_BOUNDS
    diameter: str = "geometric"
    bins: tuple[BinCoefficient, ...] = field(init=False, repr=False)

    def __post_init__(self):
        if self.cf <= 0:
            raise ValueError("calibration factor must be positive")
        bounds = tuple((float(lo), float(hi)) for lo, hi in self.bounds)
        if len(bounds) != 3:
            raise ValueError("exactly three size bins are required")
        if [b[0] for b in bounds] != sorted(b[0] for b in bounds):
            raise ValueError("bins must be ordered by lower bound")
        object.__setattr__(self, "bounds", bounds)
        object.__setattr__(
            self, "bins",
            tuple(bin_mass_coefficient(lo, hi, self.density, self.diameter) for lo, hi in bounds),
        )

    @property
    def coefficients(self) -> np.ndarray:
        return np.array([b.coefficient for b in self.bins])

    @classmethod
    def from_dict(cls, d: dict) -> "CorrectionParams":
        known = {"cf", "density", "bounds", "diameter"}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown correction keys: {sorted(unknown)}")
        kw = dict(d)
        if "bounds" in kw:
            kw["bounds"] = tuple(tuple(b) for b in kw["bounds"])
        return cls(**kw)


def alt_cf3(bins, params: CorrectionParams = CorrectionParams()):
    """``cf * (alpha*x + beta*y + gamma*z)``.

    ``bins`` is a :class:`SizeBinCounts` (returns a float) or an array whose
    last axis holds (x, y, z) (returns an array).
    """
    coef = params.coefficients
    if isinstance(bins, SizeBinCounts):
        return params.cf * (coef[0] * bins.x + coef[1] * bins.y + coef[2] * bins.z)
    b = np.asarray(bins, dtype=np.float64)
    return params.cf * (b @ coef)


def correct_series(records: Records, params: CorrectionParams = CorrectionParams()) -> TimeSeries:
    """ALT CF3 minute series, one point per record."""
    if len(records) == 0:
        return TimeSeries.empty("minute")
    bins, _ = difference_counts(records.counts)
    series, _ = ts_new(times=records.times, values=alt_cf3(bins, params), resolution="minute")
    return series


def cf1_series(records: Records) -> TimeSeries:
    series, _ = ts_new(times=records.times, values=records.pm25_cf1, resolution="minute")
    return series


@dataclass(frozen=True)
class ComparisonStats:
    pearson_r: Optional[float]
    mean_ratio: Optional[float]
    ols_slope: Optional[float]
    ols_intercept: Optional[float]
    n: int

    def to_dict(self) -> dict:
        return dict(
            pearson_r=self.pearson_r, mean_ratio=self.mean_ratio,
            ols_slope=self.ols_slope, ols_intercept=self.ols_intercept, n=self.n,
        )


def compare_algorithms(alt: TimeSeries, cf1: TimeSeries) -> ComparisonStats:
    """Agreement between ALT CF3 and CF1 over their common timestamps.

    Undefined quantities (zero ALT mean, zero variance) are ``None``.
    """
    pair = ts_align(alt, cf1)
    n = len(pair)
    if n < 2:
        raise ValueError(f"need at least 2 overlapping points, got {n}")
    a, c = pair.a_values, pair.b_values
    ma, mc = a.mean(), c.mean()
    da, dc = a - ma, c - mc
    saa, scc, sac = float(da @ da), float(dc @ dc), float(da @ dc)

    ratio = None if ma == 0 else float(mc / ma)
    if saa == 0:
        return ComparisonStats(None, ratio, None, None, n)
    slope = sac / saa
    intercept = float(mc - slope * ma)
    r = None if scc == 0 else float(np.clip(sac / math.sqrt(saa * scc), -1.0, 1.0))
    return ComparisonStats(r, ratio, slope, intercept, n)
