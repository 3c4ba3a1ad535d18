"""Forecast error metrics."""

from __future__ import annotations

import math
from typing import Optional

import numpy as np


def _pair(y, yhat) -> tuple[np.ndarray, np.ndarray]:
    y = np.asarray(y, dtype=np.float64).reshape(-1)
    yhat = np.asarray(yhat, dtype=np.float64).reshape(-1)
    if y.shape != yhat.shape:
        raise ValueError(f"length mismatch: {len(y)} vs {len(yhat)}")
    if len(y) == 0:
        raise ValueError("metrics need at least one observation")
    return y, yhat


def rmse(y, yhat) -> float:
    y, yhat = _pair(y, yhat)
    return math.sqrt(float(np.mean((y - yhat) ** 2)))


def mae(y, yhat) -> float:
    y, yhat = _pair(y, yhat)
    return float(np.mean(np.abs(y - yhat)))


def r_squared(y, yhat) -> Optional[float]:
    """Squared sample Pearson correlation between observed and predicted.

    ``None`` when fewer than two points or either side has zero variance.
    """
    y, yhat = _pair(y, yhat)
    if len(y) < 2:
        return None
    dy, dp = y - y.mean(), yhat - yhat.mean()
    syy, spp = float(dy @ dy), float(dp @ dp)
    if syy == 0 or spp == 0:
        return None
    r = float(dy @ dp) / math.sqrt(syy * spp)
    return min(r * r, 1.0)


def coefficient_of_determination(y, yhat) -> Optional[float]:
    """``1 - SS_res / SS_tot``; penalises bias, unlike :func:`r_squared`."""
    y, yhat = _pair(y, yhat)
    dy = y - y.mean()
    ss_tot = float(dy @ dy)
    if ss_tot == 0:
        return None
    res = y - yhat
    return 1.0 - float(res @ res) / ss_tot
