"""Low-cost sensor PM2.5: ALT CF3 correction, temporal analytics and
recurrent forecasting."""

__version__ = "0.1.0"

from .analytics import (
    AggConfig,
    CorrelationMatrix,
    DiurnalProfile,
    ExceedanceReport,
    SeasonalSummary,
    annual_mean,
    correlation_matrix,
    diurnal_profile,
    exceedance,
    monthly_means,
    pearson,
    resample,
    seasonal_summary,
)
from .correction import (
    BinCoefficient,
    ComparisonStats,
    CorrectionParams,
    alt_cf3,
    bin_mass_coefficient,
    compare_algorithms,
    correct_series,
)
from .ingest import QcConfig, RawRecord, Records, SizeBinCounts, difference_bins, parse_csv, qc_filter
from .synth import SiteProfile, generate
from .timeseries import AlignedPair, Season, TimeSeries, season_of, ts_align, ts_new
