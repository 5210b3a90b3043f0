"""Design-matrix construction for the explanatory inertia model."""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import ConfigError, EmptyDesignError, MissingSeriesError, SplitError
from .timeseries import InertiaDataset, format_hour, utc_month

TIME_TRENDS = ("none", "linear", "quadratic")
FORECAST_FEATURES = ("demand_fc", "wind_fc", "solar_fc")
MONTHLY_ELIGIBLE = ("inertia_lag", "demand_fc", "wind_fc", "solar_fc", "ic_flow", "hydro_lag")
BLOCKS = ("weekday", "weekend_or_holiday")
HYDRO_LAG_HOURS = 24
SUBSTITUTABLE = {"demand": ("demand_fc", "demand_actual"),
                 "wind": ("wind_fc", "wind_actual"),
                 "solar": ("solar_fc", "solar_actual")}


@dataclass(frozen=True)
class FeatureSpec:
    lag_target_hours: int = 24
    use_demand_fc: bool = True
    use_wind_fc: bool = True
    use_solar_fc: bool = True
    use_ic_flow: bool = True
    time_trend: str = "quadratic"
    daytype_interaction: bool = True
    monthly_interaction_on: tuple[str, ...] = ()
    hydro_lag: bool = False
    include_intercept: bool = False

    def __post_init__(self):
        object.__setattr__(self, "monthly_interaction_on", tuple(sorted(set(self.monthly_interaction_on))))
        if int(self.lag_target_hours) < 1:
            raise ConfigError("lag_target_hours must be >= 1")
        if self.time_trend not in TIME_TRENDS:
            raise ConfigError(f"time_trend must be one of {TIME_TRENDS}")
        enabled = set(self.feature_names())
        bad = [f for f in self.monthly_interaction_on if f not in enabled or f not in MONTHLY_ELIGIBLE]
        if bad:
            raise ConfigError(f"monthly interaction requested on disabled or unknown features {bad}")

    def feature_names(self) -> list[str]:
        """Base regressors in canonical order (before monthly/day-type expansion)."""
        names = ["inertia_lag"]
        names += [f for f in FORECAST_FEATURES if getattr(self, f"use_{f}")]
        if self.use_ic_flow:
            names.append("ic_flow")
        if self.time_trend in ("linear", "quadratic"):
            names.append("trend")
        if self.time_trend == "quadratic":
            names.append("trend_sq")
        if self.hydro_lag:
            names.append("hydro_lag")
        if self.include_intercept:
            names.append("intercept")
        return names

    def block_columns(self) -> list[str]:
        cols = []
        for f in self.feature_names():
            if f in self.monthly_interaction_on:
                cols += [f"{f}@m{m:02d}" for m in range(1, 13)]
            else:
                cols.append(f)
        return cols

    def column_names(self) -> tuple[str, ...]:
        cols = self.block_columns()
        if not self.daytype_interaction:
            return tuple(cols)
        return tuple(f"{b}:{c}" for b in BLOCKS for c in cols)

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["monthly_interaction_on"] = list(self.monthly_interaction_on)
        return d

    @classmethod
    def from_dict(cls, d: dict | None) -> FeatureSpec:
        d = dict(d or {})
        unknown = set(d) - {f.name for f in dataclasses.fields(cls)}
        if unknown:
            raise ConfigError(f"unknown feature options {sorted(unknown)}")
        if "monthly_interaction_on" in d:
            d["monthly_interaction_on"] = tuple(d["monthly_interaction_on"])
        return cls(**d)


@dataclass(frozen=True, eq=False)
class DesignMatrix:
    """Regressor matrix with one row per usable hour.

    ``targets[i]`` is the inertial energy at ``timestamps[i]``; lag features
    in the same row look back from that hour.  ``t0``/``t_scale`` define the
    normalised time ``(h - t0) / t_scale`` used by the trend columns.
    """

    timestamps: np.ndarray
    X: np.ndarray
    targets: np.ndarray
    column_names: tuple[str, ...]
    t0: int
    t_scale: float

    def __len__(self):
        return len(self.timestamps)

    @property
    def rows(self):
        return list(zip(self.timestamps.tolist(), self.X))


def _lookup(ds: InertiaDataset, attr: str):
    s = getattr(ds, attr)
    if s is None:
        raise MissingSeriesError(f"dataset for {ds.region.value} has no {attr} series")
    return s


def base_columns(ds: InertiaDataset, spec: FeatureSpec, hours: np.ndarray, t0: int, t_scale: float) -> dict[str, np.ndarray]:
    """Un-expanded regressor values at ``hours`` (NaN where an input is missing)."""
    tau = (hours - t0) / t_scale
    cols = {}
    for f in spec.feature_names():
        if f == "inertia_lag":
            cols[f] = ds.target.at(hours - spec.lag_target_hours)
        elif f in FORECAST_FEATURES or f == "ic_flow":
            cols[f] = _lookup(ds, f).at(hours)
        elif f == "trend":
            cols[f] = tau
        elif f == "trend_sq":
            cols[f] = tau * tau
        elif f == "hydro_lag":
            cols[f] = _lookup(ds, "hydro_inertia").at(hours - HYDRO_LAG_HOURS)
        elif f == "intercept":
            cols[f] = np.ones(len(hours))
    return cols


def build_design(
    ds: InertiaDataset,
    spec: FeatureSpec,
    window: tuple[int, int],
    *,
    trend_origin: tuple[int, float] | None = None,
    require_target: bool = True,
) -> DesignMatrix:
    """Build the regression design over the half-open hour window.

    Only hours where every referenced input (lags included) is present are
    emitted; with ``require_target`` the target must be present too.  The
    trend origin defaults to the window itself (``tau`` in [0, 1)); pass the
    training origin when building a prediction design.
    """
    start, end = int(window[0]), int(window[1])
    if not (ds.start <= start < end <= ds.end):
        raise SplitError(f"window [{format_hour(start)}, {format_hour(end)}) outside dataset range")
    t0, t_scale = trend_origin if trend_origin is not None else (start, float(end - start))
    hours = np.arange(start, end, dtype=np.int64)
    cols = base_columns(ds, spec, hours, t0, t_scale)
    y = ds.target.values[start - ds.start:end - ds.start]

    valid = np.ones(len(hours), dtype=bool)
    for values in cols.values():
        valid &= ~np.isnan(values)
    if require_target:
        valid &= ~np.isnan(y)
    if not valid.any():
        raise EmptyDesignError(f"no usable rows in [{format_hour(start)}, {format_hour(end)})")

    kept = hours[valid]
    weh = ds.calendar.weekend_or_holiday_mask(start, end)[valid] if spec.daytype_interaction else None
    X = expand_columns(spec, {f: v[valid] for f, v in cols.items()}, kept, weh)
    return DesignMatrix(kept, X, y[valid].copy(), spec.column_names(), int(t0), float(t_scale))


def expand_columns(spec: FeatureSpec, cols: dict[str, np.ndarray], hours: np.ndarray,
                   weekend_or_holiday: np.ndarray | None) -> np.ndarray:
    """Apply monthly and day-type expansion to base regressor columns."""
    month = utc_month(hours) if spec.monthly_interaction_on else None
    parts = []
    for f in spec.feature_names():
        v = cols[f]
        if f in spec.monthly_interaction_on:
            parts.append(v[:, None] * (month[:, None] == np.arange(1, 13)[None, :]))
        else:
            parts.append(v[:, None])
    block = np.hstack(parts)
    if not spec.daytype_interaction:
        return block
    weh = np.asarray(weekend_or_holiday, dtype=bool)
    return np.hstack([block * (~weh)[:, None], block * weh[:, None]])


def substitute_actuals(ds: InertiaDataset, which: Iterable[str]) -> InertiaDataset:
    """Replace day-ahead forecast features by their realised values."""
    changes = {}
    for key in sorted(set(which)):
        if key not in SUBSTITUTABLE:
            raise ConfigError(f"cannot substitute {key!r}; choose from {sorted(SUBSTITUTABLE)}")
        fc_attr, actual_attr = SUBSTITUTABLE[key]
        actual = getattr(ds, actual_attr)
        if actual is None:
            raise MissingSeriesError(f"dataset for {ds.region.value} has no {actual_attr} series")
        changes[fc_attr] = dataclasses.replace(getattr(ds, fc_attr), values=actual.values)
    return ds.replace(**changes) if changes else ds
