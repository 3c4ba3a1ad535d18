"""Sliding windows and min-max scaling for hourly series."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..timeseries import TimeSeries, epoch_seconds


@dataclass(frozen=True)
class Scaler:
    min: float
    max: float

    def __post_init__(self):
        if not self.max > self.min:
            raise ValueError(f"scaler needs max > min, got min={self.min}, max={self.max}")

    @classmethod
    def fit(cls, values) -> "Scaler":
        v = np.asarray(values, dtype=np.float64)
        if v.size == 0:
            raise ValueError("cannot fit a scaler on no data")
        lo, hi = float(v.min()), float(v.max())
        if hi == lo:
            raise ValueError("cannot fit a scaler on constant data")
        return cls(lo, hi)

    def transform(self, values):
        return (np.asarray(values, dtype=np.float64) - self.min) / (self.max - self.min)

    def invert(self, scaled):
        return np.asarray(scaled, dtype=np.float64) * (self.max - self.min) + self.min


def scaler_fit(values) -> Scaler:
    return Scaler.fit(values)


@dataclass(frozen=True, eq=False)
class WindowDataset:
    """``inputs[k]`` are the L values preceding ``targets[k]``."""

    inputs: np.ndarray
    targets: np.ndarray
    target_times: np.ndarray
    window: int

    def __len__(self) -> int:
        return len(self.targets)

    def subset(self, mask_or_index) -> "WindowDataset":
        return WindowDataset(
            self.inputs[mask_or_index], self.targets[mask_or_index],
            self.target_times[mask_or_index], self.window,
        )


def make_windows(
    hourly: TimeSeries, window: int = 24, horizon: int = 1, scaler: Optional[Scaler] = None
) -> WindowDataset:
    """Every gap-free run of ``window`` inputs followed by a one-step target.

    Windows spanning a missing hour are skipped, never imputed. Values are
    scaled when ``scaler`` is given.
    """
    if hourly.resolution != "hour":
        raise ValueError("make_windows needs an hourly series")
    if window < 1:
        raise ValueError("window must be >= 1")
    if horizon != 1:
        raise ValueError("only one-step-ahead horizons are supported")
    values = hourly.values if scaler is None else scaler.transform(hourly.values)
    n = len(values)
    if n < window + 1:
        return WindowDataset(np.empty((0, window)), np.empty(0), hourly.times[:0], window)

    step_ok = (np.diff(epoch_seconds(hourly.times)) == 3600).astype(np.int64)
    ok_so_far = np.r_[0, np.cumsum(step_ok)]
    ends = np.arange(window, n)  # target index
    valid = ends[ok_so_far[ends] - ok_so_far[ends - window] == window]
    idx = valid[:, None] + np.arange(-window, 0)[None, :]
    return WindowDataset(values[idx], values[valid], hourly.times[valid], window)


def chronological_split(
    hourly: TimeSeries, window: int, split: float = 0.8
) -> tuple[WindowDataset, WindowDataset, Scaler]:
    """Scale on the first ``split`` of the series and window both parts.

    A window is a training window when its target lies in the training span;
    test inputs may reach back into the training span (observed history).
    """
    if not 0 < split < 1:
        raise ValueError("split must lie in (0, 1)")
    n_train = int(np.floor(split * len(hourly)))
    scaler = Scaler.fit(hourly.values[:n_train])
    ds = make_windows(hourly, window, 1, scaler)
    cut = hourly.times[n_train] if n_train < len(hourly) else None
    is_train = np.ones(len(ds), bool) if cut is None else ds.target_times < cut
    return ds.subset(is_train), ds.subset(~is_train), scaler
