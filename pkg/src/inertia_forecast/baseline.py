"""Additive trend + seasonality + holiday baseline fitted to the inertia series alone.

The trend is a single logistic curve with capacity fixed at
``capacity_factor * max(train)``.  Internally it is parameterised on
normalised time ``u = (h - center) / span`` as ``C * sigmoid(a * u + b)`` so
that a flat trend (``a == 0``) is representable; :attr:`TsBaselineModel.rate`
and :attr:`TsBaselineModel.midpoint` give the hour-based parameters.
"""
from __future__ import annotations

import datetime as dt
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize, special

from .errors import ConfigError, FitError
from .ols import solve_lsq
from .timeseries import HolidayCalendar, HourlySeries, Unit

HOURS_PER_YEAR = 8766.0
BASELINE_NAME = "baseline_forecast"


@dataclass(frozen=True)
class BaselineConfig:
    """Hyper-parameters of the additive baseline.

    Seasonalities whose period exceeds half of the training span are
    dropped at fit time, which disables the yearly terms for spans under
    two years.
    """

    seasonalities: tuple[tuple[float, int], ...] = ((24.0, 6), (168.0, 3), (HOURS_PER_YEAR, 10))
    growth: str = "logistic"
    capacity_factor: float = 1.05
    holidays: bool = True
    rate_bound: float = 20.0
    offset_bound: float = 12.0
    grid_size: int = 41
    max_sweeps: int = 100
    tol: float = 1e-12

    def __post_init__(self):
        seas = tuple((float(p), int(n)) for p, n in self.seasonalities)
        object.__setattr__(self, "seasonalities", seas)
        periods = [p for p, _ in seas]
        if any(p <= 0 for p in periods) or len(set(periods)) != len(periods):
            raise ConfigError("seasonal periods must be positive and distinct")
        if any(n < 1 for _, n in seas):
            raise ConfigError("Fourier orders must be >= 1")
        if self.growth not in ("logistic", "flat"):
            raise ConfigError("growth must be 'logistic' or 'flat'")
        if self.capacity_factor <= 1.0:
            raise ConfigError("capacity_factor must exceed 1")
        if self.grid_size < 3 or self.grid_size % 2 == 0:
            raise ConfigError("grid_size must be an odd integer >= 3")

    def to_dict(self) -> dict:
        return {
            "seasonalities": [[p, n] for p, n in self.seasonalities],
            "growth": self.growth,
            "capacity_factor": self.capacity_factor,
            "holidays": self.holidays,
            "rate_bound": self.rate_bound,
            "offset_bound": self.offset_bound,
            "grid_size": self.grid_size,
            "max_sweeps": self.max_sweeps,
            "tol": self.tol,
        }

    @classmethod
    def from_dict(cls, d: dict | None) -> BaselineConfig:
        d = dict(d or {})
        known = set(cls.__dataclass_fields__)
        if set(d) - known:
            raise ConfigError(f"unknown baseline options {sorted(set(d) - known)}")
        if "seasonalities" in d:
            d["seasonalities"] = tuple(tuple(x) for x in d["seasonalities"])
        return cls(**d)


@dataclass(frozen=True)
class Seasonality:
    period: float
    order: int
    cos_coefs: tuple[float, ...]
    sin_coefs: tuple[float, ...]


@dataclass(frozen=True, eq=False)
class TsBaselineModel:
    growth: str
    capacity: float
    slope: float  # per normalised time unit
    offset: float
    center: float
    span: float
    level: float  # used when growth == "flat"
    seasonalities: tuple[Seasonality, ...]
    holiday_effects: dict = field(default_factory=dict)
    calendar: HolidayCalendar | None = field(default=None, repr=False)

    @property
    def rate(self) -> float:
        """Logistic growth rate per hour."""
        return self.slope / self.span

    @property
    def midpoint(self) -> float:
        """Hour stamp of the logistic inflection point (inf for a flat trend)."""
        if self.slope == 0:
            return float("inf") if self.offset <= 0 else float("-inf")
        return self.center - self.offset * self.span / self.slope


def logistic(u: np.ndarray, capacity: float, slope: float, offset: float) -> np.ndarray:
    return capacity * special.expit(slope * u + offset)


def fourier_columns(hours: np.ndarray, period: float, order: int) -> np.ndarray:
    """``[cos(2 pi n h / P), sin(2 pi n h / P)]`` for n = 1..order, phase anchored at the epoch."""
    x = 2.0 * np.pi * (np.asarray(hours, dtype=float) % period) / period
    n = np.arange(1, order + 1)
    arg = x[:, None] * n[None, :]
    return np.hstack([np.cos(arg), np.sin(arg)])


def holiday_classes(hours: np.ndarray, cal: HolidayCalendar) -> np.ndarray:
    """Holiday class name per hour ('' on non-holidays), by local civil date."""
    hours = np.asarray(hours, dtype=np.int64)
    out = np.full(len(hours), "", dtype=object)
    if len(hours) == 0 or not len(cal):
        return out
    # Hours may be non-contiguous; map each through the contiguous cover.
    lo, hi = int(hours.min()), int(hours.max()) + 1
    days = cal.local_days(lo, hi)[hours - lo]
    epoch = dt.date(1970, 1, 1)
    names = {(d - epoch).days: cal.name_of(d) for d in cal.dates}
    for i, day in enumerate(days.tolist()):
        name = names.get(day)
        if name is not None:
            out[i] = name
    return out


def _fit_trend(u: np.ndarray, y: np.ndarray, capacity: float, cfg: BaselineConfig) -> tuple[float, float]:
    def sse(a, b):
        r = y - logistic(u, capacity, a, b)
        return float(r @ r)

    slopes = np.linspace(-cfg.rate_bound, cfg.rate_bound, cfg.grid_size)
    offsets = np.linspace(-cfg.offset_bound, cfg.offset_bound, cfg.grid_size)
    best = min(((sse(a, b), a, b) for a in slopes for b in offsets), key=lambda t: t[0])
    cur, a, b = best
    da = slopes[1] - slopes[0]
    db = offsets[1] - offsets[0]
    for _ in range(cfg.max_sweeps):
        prev = cur
        res = optimize.minimize_scalar(
            lambda x: sse(x, b),
            bounds=(max(-cfg.rate_bound, a - 2 * da), min(cfg.rate_bound, a + 2 * da)),
            method="bounded", options={"xatol": 1e-12},
        )
        if res.fun < cur:
            a, cur = float(res.x), float(res.fun)
        res = optimize.minimize_scalar(
            lambda x: sse(a, x),
            bounds=(max(-cfg.offset_bound, b - 2 * db), min(cfg.offset_bound, b + 2 * db)),
            method="bounded", options={"xatol": 1e-12},
        )
        if res.fun < cur:
            b, cur = float(res.x), float(res.fun)
        if prev - cur <= cfg.tol * max(prev, 1e-300):
            break
    return a, b


def fit_baseline(train: HourlySeries, cal: HolidayCalendar | None = None, config: BaselineConfig | None = None) -> TsBaselineModel:
    """Fit trend by grid search plus coordinate descent, then seasonal and
    holiday terms by least squares on the detrended series."""
    cfg = config or BaselineConfig()
    if len(train) == 0:
        raise FitError("empty training series")
    present = ~np.isnan(train.values)
    if not present.any():
        raise FitError("training series has no observed values")
    hours = train.hours[present]
    y = train.values[present]
    span = float(train.end - train.start)
    center = train.start + span / 2.0
    u = (hours - center) / span

    capacity = cfg.capacity_factor * float(y.max())
    if cfg.growth == "flat" or capacity <= 0:
        slope, offset, level = 0.0, 0.0, float(y.mean())
        trend = np.full(len(y), level)
        growth = "flat"
    else:
        slope, offset = _fit_trend(u, y, capacity, cfg)
        trend = logistic(u, capacity, slope, offset)
        level = 0.0
        growth = "logistic"

    active = [(p, n) for p, n in cfg.seasonalities if span >= 2 * p]
    blocks, names = [], []
    for p, n in active:
        blocks.append(fourier_columns(hours, p, n))
        names += [f"P{p:g}:cos{i}" for i in range(1, n + 1)] + [f"P{p:g}:sin{i}" for i in range(1, n + 1)]
    classes = []
    if cfg.holidays and cal is not None:
        labels = holiday_classes(hours, cal)
        classes = sorted(set(labels.tolist()) - {""})
        if classes:
            blocks.append(np.column_stack([(labels == c).astype(float) for c in classes]))
            names += [f"holiday:{c}" for c in classes]

    coefs = np.zeros(0)
    if blocks:
        coefs = solve_lsq(np.hstack(blocks), y - trend, names).coefficients
    seasonal, k = [], 0
    for p, n in active:
        seasonal.append(Seasonality(p, n, tuple(coefs[k:k + n].tolist()), tuple(coefs[k + n:k + 2 * n].tolist())))
        k += 2 * n
    effects = dict(zip(classes, coefs[k:].tolist()))
    return TsBaselineModel(growth, capacity, slope, offset, center, span, level, tuple(seasonal), effects, cal)


def baseline_components(model: TsBaselineModel, hours, cal: HolidayCalendar | None = None) -> dict[str, np.ndarray]:
    """Trend, seasonal and holiday contributions evaluated separately."""
    hours = np.asarray(hours, dtype=np.int64)
    cal = cal if cal is not None else model.calendar
    if model.growth == "flat":
        trend = np.full(len(hours), model.level)
    else:
        trend = logistic((hours - model.center) / model.span, model.capacity, model.slope, model.offset)
    seasonal = np.zeros(len(hours))
    for s in model.seasonalities:
        cols = fourier_columns(hours, s.period, s.order)
        seasonal = seasonal + cols @ np.array(s.cos_coefs + s.sin_coefs)
    holiday = np.zeros(len(hours))
    if model.holiday_effects and cal is not None:
        labels = holiday_classes(hours, cal)
        for name, effect in model.holiday_effects.items():
            holiday = holiday + np.where(labels == name, effect, 0.0)
    return {"trend": trend, "seasonal": seasonal, "holiday": holiday}


def predict_baseline(model: TsBaselineModel, window, cal: HolidayCalendar | None = None) -> HourlySeries:
    start, end = int(window[0]), int(window[1])
    parts = baseline_components(model, np.arange(start, end), cal)
    return HourlySeries(BASELINE_NAME, Unit.MVAS, start, parts["trend"] + parts["seasonal"] + parts["holiday"])
