"""Point-forecast error metrics over aligned hourly series."""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .errors import MetricError
from .timeseries import HourlySeries


@dataclass(frozen=True)
class MetricResult:
    mape: float
    smape: float
    mae: float
    n_points: int

    def to_dict(self) -> dict:
        return asdict(self)


def _aligned(actual, forecast) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(actual, HourlySeries) and isinstance(forecast, HourlySeries):
        lo, hi = max(actual.start, forecast.start), min(actual.end, forecast.end)
        if hi <= lo:
            raise MetricError("actual and forecast do not overlap in time")
        hours = np.arange(lo, hi)
        return actual.at(hours), forecast.at(hours)
    a = np.asarray(getattr(actual, "values", actual), dtype=float)
    f = np.asarray(getattr(forecast, "values", forecast), dtype=float)
    if a.shape != f.shape:
        raise MetricError(f"length mismatch: {a.shape} vs {f.shape}")
    return a, f


def mape(actual, forecast) -> float:
    """Mean absolute percentage error in percent; zero-actual hours are skipped."""
    a, f = _aligned(actual, forecast)
    ok = ~np.isnan(a) & ~np.isnan(f) & (a != 0)
    if not ok.any():
        raise MetricError("no valid hours for MAPE")
    return float(100.0 * np.mean(np.abs(a[ok] - f[ok]) / np.abs(a[ok])))


def smape(actual, forecast) -> float:
    """Symmetric MAPE in percent, bounded by 200."""
    a, f = _aligned(actual, forecast)
    denom = np.abs(a) + np.abs(f)
    ok = ~np.isnan(a) & ~np.isnan(f) & (denom > 0)
    if not ok.any():
        raise MetricError("no valid hours for sMAPE")
    return float(100.0 * np.mean(2.0 * np.abs(a[ok] - f[ok]) / denom[ok]))


def mae(actual, forecast) -> float:
    a, f = _aligned(actual, forecast)
    ok = ~np.isnan(a) & ~np.isnan(f)
    if not ok.any():
        raise MetricError("no valid hours for MAE")
    return float(np.mean(np.abs(a[ok] - f[ok])))


def evaluate(actual, forecast) -> MetricResult:
    a, f = _aligned(actual, forecast)
    n = int(np.count_nonzero(~np.isnan(a) & ~np.isnan(f) & (a != 0)))
    return MetricResult(mape(a, f), smape(a, f), mae(a, f), n)
