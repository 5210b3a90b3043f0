"""Synthetic inertia datasets generated from the explanatory model itself.

Used as an oracle: with zero noise the generating coefficients are exactly
recoverable by :func:`inertia_forecast.explanatory.fit` over the trend window.
"""
from __future__ import annotations

from typing import Mapping

import numpy as np

from .errors import ConfigError
from .features import HYDRO_LAG_HOURS, FeatureSpec, expand_columns
from .timeseries import HolidayCalendar, HourlySeries, InertiaDataset, RegionId, Unit

# Per day-type base coefficients; stable (lag + hydro share < 1) around ~2e5 MVA·s.
_BASE = {
    "weekday": {"inertia_lag": 0.6, "demand_fc": 2.0, "wind_fc": -1.5, "solar_fc": -1.0, "ic_flow": -0.5,
                "trend": -10000.0, "trend_sq": 4000.0, "hydro_lag": 0.1, "intercept": 10000.0},
    "weekend_or_holiday": {"inertia_lag": 0.55, "demand_fc": 1.9, "wind_fc": -1.6, "solar_fc": -1.1,
                           "ic_flow": -0.4, "trend": -9000.0, "trend_sq": 3500.0, "hydro_lag": 0.12,
                           "intercept": 8000.0},
}
HYDRO_SHARE = 0.5


def default_coefficients(spec: FeatureSpec) -> np.ndarray:
    """Plausible coefficient vector in ``spec``'s column layout."""
    out = []
    for name in spec.column_names():
        block, _, col = name.rpartition(":")
        base = _BASE[block or "weekday"]
        feature, _, month = col.partition("@m")
        value = base[feature]
        if month:
            value *= 1.0 + 0.08 * np.cos(2 * np.pi * (int(month) - 1) / 12)
        out.append(value)
    return np.array(out)


def _exogenous(hours: np.ndarray, rng: np.random.Generator) -> dict[str, np.ndarray]:
    n = len(hours)
    hod = hours % 24
    year_phase = 2 * np.pi * hours / 8766.0
    day_phase = 2 * np.pi * hod / 24.0
    demand = 40000 + 8000 * np.cos(year_phase) + 5000 * np.sin(day_phase - np.pi / 2) + rng.normal(0, 600, n)
    wind = np.clip(5000 * (1 + 0.6 * np.sin(2 * np.pi * hours / 97.0 + rng.uniform(0, 2 * np.pi)))
                   + rng.normal(0, 500, n), 0, None)
    solar = np.clip(2000 * np.sin(np.pi * (hod - 6) / 12.0), 0, None) * (1 - 0.3 * np.cos(year_phase))
    solar = solar * rng.uniform(0.7, 1.0, n)
    ic = 3000 * np.sin(2 * np.pi * hours / 53.0 + rng.uniform(0, 2 * np.pi)) + rng.normal(0, 800, n)
    return {"demand": demand, "wind": wind, "solar": solar, "ic_flow": ic}


def generate_synthetic(
    spec: FeatureSpec,
    true_coeffs,
    noise_sd: float,
    span: tuple[int, int],
    *,
    seed: int = 0,
    forecast_error: float = 0.0,
    region: RegionId | str = RegionId.NORDIC_TOTAL,
    calendar: HolidayCalendar | None = None,
    trend_window: tuple[int, int] | None = None,
    init_level: float = 200000.0,
) -> InertiaDataset:
    """Simulate a complete dataset whose target follows the explanatory model.

    ``true_coeffs`` is a vector (or name -> value mapping) in ``spec``'s
    column layout.  Actual demand/wind/solar are drawn first and drive the
    target; the forecast columns are the actuals times ``1 + forecast_error
    * N(0, 1)`` (so ``forecast_error = 0`` makes them identical and the
    model exactly specified).  The target is produced day by day because
    each hour depends on its own lagged value; the first lag period is
    seeded around ``init_level``.  ``trend_window`` fixes the time-trend
    normalisation (default: the span itself).
    """
    columns = spec.column_names()
    if isinstance(true_coeffs, Mapping):
        missing = [c for c in columns if c not in true_coeffs]
        if missing or len(true_coeffs) != len(columns):
            raise ConfigError(f"coefficient mapping does not match layout (missing {missing[:3]})")
        beta = np.array([true_coeffs[c] for c in columns], dtype=float)
    else:
        beta = np.asarray(true_coeffs, dtype=float)
        if beta.shape != (len(columns),):
            raise ConfigError(f"expected {len(columns)} coefficients, got {beta.shape}")
    if noise_sd < 0 or forecast_error < 0:
        raise ConfigError("noise_sd and forecast_error must be non-negative")

    region = RegionId(region)
    cal = calendar or HolidayCalendar.default(region)
    rng = np.random.default_rng(seed)
    start, end = int(span[0]), int(span[1])
    hours = np.arange(start, end, dtype=np.int64)
    n = len(hours)
    t0, t1 = trend_window if trend_window is not None else (start, end)
    tau = (hours - t0) / float(t1 - t0)

    actual = _exogenous(hours, rng)
    fc = {k: np.clip(v * (1 + forecast_error * rng.normal(0, 1, n)), 0, None) if forecast_error else v.copy()
          for k, v in actual.items() if k != "ic_flow"}
    noise = rng.normal(0, noise_sd, n) if noise_sd > 0 else np.zeros(n)
    hydro_noise = rng.normal(0, 2000.0, n)
    weh = cal.weekend_or_holiday_mask(start, end)

    # The system responds to realised conditions; forecasts only observe them.
    static = {"demand_fc": actual["demand"], "wind_fc": actual["wind"], "solar_fc": actual["solar"],
              "ic_flow": actual["ic_flow"], "trend": tau, "trend_sq": tau * tau, "intercept": np.ones(n)}
    lag = spec.lag_target_hours
    warmup = max(lag, HYDRO_LAG_HOURS if spec.hydro_lag else 0)
    step = min(lag, HYDRO_LAG_HOURS)
    target = np.full(n, np.nan)
    target[:warmup] = init_level * (1 + 0.01 * rng.normal(0, 1, min(warmup, n)))
    hydro = np.full(n, np.nan)
    hydro[:warmup] = HYDRO_SHARE * target[:warmup] + hydro_noise[:warmup]
    names = spec.feature_names()
    for lo in range(warmup, n, step):
        hi = min(lo + step, n)
        idx = np.arange(lo, hi)
        cols = {f: static[f][idx] for f in names if f in static}
        if "inertia_lag" in names:
            cols["inertia_lag"] = target[idx - lag]
        if "hydro_lag" in names:
            cols["hydro_lag"] = hydro[idx - HYDRO_LAG_HOURS]
        X = expand_columns(spec, cols, hours[idx], weh[idx])
        target[idx] = X @ beta + noise[idx]
        hydro[idx] = HYDRO_SHARE * target[idx] + hydro_noise[idx]
    if not np.all(np.isfinite(target)) or np.any(target < 0):
        raise ConfigError("coefficients drive the simulated inertia negative or unbounded")
    hydro = np.clip(hydro, 0, None)

    def mw(name, values):
        return HourlySeries(name, Unit.MW, start, values)

    return InertiaDataset(
        region=region,
        target=HourlySeries("inertia_mvas", Unit.MVAS, start, target),
        hydro_inertia=HourlySeries("hydro_inertia_mvas", Unit.MVAS, start, hydro),
        demand_fc=mw("demand_fc_mw", fc["demand"]),
        wind_fc=mw("wind_fc_mw", fc["wind"]),
        solar_fc=mw("solar_fc_mw", fc["solar"]),
        ic_flow=mw("ic_flow_mw", actual["ic_flow"]),
        demand_actual=mw("demand_mw", actual["demand"]),
        wind_actual=mw("wind_mw", actual["wind"]),
        solar_actual=mw("solar_mw", actual["solar"]),
        calendar=cal,
    )
