"""Explanatory day-ahead inertia model, its Gaussian wrapper and regional aggregation."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np
from scipy import special

from .errors import ConfigError, EmptyDesignError, FitError, InertiaError
from .features import FeatureSpec, build_design
from .ols import LsqSolution, solve_lsq
from .timeseries import NORDIC_REGIONS, HourlySeries, InertiaDataset, RegionId, Unit

SIGMA_METHODS = ("target", "residual")
FORECAST_NAME = "inertia_forecast"


@dataclass(frozen=True, eq=False)
class ExplanatoryModel:
    """Fitted coefficients plus the constant forecast standard deviation.

    ``sigma_hat`` is the population standard deviation (divisor N) of the
    training target by default, or of the training residuals when
    ``sigma_method == "residual"``.
    """

    spec: FeatureSpec
    column_names: tuple[str, ...]
    coefficients: np.ndarray
    rank: int
    sigma_hat: float
    train_mu: float
    n_train: int
    t0: int
    t_scale: float
    sigma_method: str = "target"
    residuals: np.ndarray | None = field(default=None, repr=False)

    @property
    def solution(self) -> LsqSolution | None:
        if self.residuals is None:
            return None
        return LsqSolution(self.coefficients, self.residuals, self.rank, self.column_names)

    def coefficient(self, name: str) -> float:
        return float(self.coefficients[self.column_names.index(name)])

    def to_dict(self) -> dict:
        return {
            "spec": self.spec.to_dict(),
            "column_names": list(self.column_names),
            "coefficients": self.coefficients.tolist(),
            "rank": self.rank,
            "sigma_hat": self.sigma_hat,
            "sigma_method": self.sigma_method,
            "train_mu": self.train_mu,
            "n_train": self.n_train,
            "t0": self.t0,
            "t_scale": self.t_scale,
        }

    @classmethod
    def from_dict(cls, d: dict) -> ExplanatoryModel:
        spec = FeatureSpec.from_dict(d["spec"])
        names = tuple(d["column_names"])
        if names != spec.column_names():
            raise ConfigError("serialized column layout does not match its feature spec")
        return cls(
            spec=spec,
            column_names=names,
            coefficients=np.array(d["coefficients"], dtype=float),
            rank=int(d["rank"]),
            sigma_hat=float(d["sigma_hat"]),
            train_mu=float(d["train_mu"]),
            n_train=int(d["n_train"]),
            t0=int(d["t0"]),
            t_scale=float(d["t_scale"]),
            sigma_method=d.get("sigma_method", "target"),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_json(cls, text: str) -> ExplanatoryModel:
        return cls.from_dict(json.loads(text))


def fit(train: InertiaDataset, spec: FeatureSpec, window=None, *, sigma_method: str = "target") -> ExplanatoryModel:
    if sigma_method not in SIGMA_METHODS:
        raise ConfigError(f"sigma_method must be one of {SIGMA_METHODS}")
    window = (train.start, train.end) if window is None else window
    design = build_design(train, spec, window)
    sol = solve_lsq(design)
    y = design.targets
    mu = float(y.mean())
    if sigma_method == "target":
        sigma = float(np.sqrt(np.mean((y - mu) ** 2)))
    else:
        sigma = float(np.sqrt(np.mean(sol.residuals ** 2)))
    return ExplanatoryModel(
        spec=spec,
        column_names=sol.column_names,
        coefficients=sol.coefficients,
        rank=sol.rank,
        sigma_hat=sigma,
        train_mu=mu,
        n_train=len(y),
        t0=design.t0,
        t_scale=design.t_scale,
        sigma_method=sigma_method,
        residuals=sol.residuals,
    )


def predict(model: ExplanatoryModel, ds: InertiaDataset, window=None) -> HourlySeries:
    """Point forecast over the window; hours with a missing input are gaps."""
    start, end = (ds.start, ds.end) if window is None else (int(window[0]), int(window[1]))
    out = np.full(end - start, np.nan)
    try:
        design = build_design(ds, model.spec, (start, end), trend_origin=(model.t0, model.t_scale), require_target=False)
    except EmptyDesignError:
        return HourlySeries(FORECAST_NAME, Unit.MVAS, start, out)
    if design.column_names != model.column_names:
        raise InertiaError("design layout differs from the fitted model's layout")
    out[design.timestamps - start] = design.X @ model.coefficients
    return HourlySeries(FORECAST_NAME, Unit.MVAS, start, out)


@dataclass(frozen=True, eq=False)
class ProbabilisticForecast:
    """Gaussian forecast with per-hour mean and constant standard deviation."""

    mean: HourlySeries
    sigma: float

    def cdf(self, level) -> np.ndarray:
        level = np.asarray(level, dtype=float)
        mu = self.mean.values
        if self.sigma == 0:
            return np.where(np.isnan(mu), np.nan, (level >= mu).astype(float))
        return special.ndtr((level - mu) / self.sigma)

    def quantile(self, p) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        if np.any((p <= 0) | (p >= 1)):
            raise ValueError("quantile levels must lie strictly between 0 and 1")
        return self.mean.values + self.sigma * special.ndtri(p)


def predict_distribution(model: ExplanatoryModel, ds: InertiaDataset, window=None) -> ProbabilisticForecast:
    return ProbabilisticForecast(predict(model, ds, window), model.sigma_hat)


@dataclass(frozen=True, eq=False)
class RegionalModelSet:
    per_region: Mapping[RegionId, ExplanatoryModel]

    def __post_init__(self):
        missing = [r.value for r in NORDIC_REGIONS if r not in self.per_region]
        if missing:
            raise ConfigError(f"regional model set missing regions {missing}")
        layouts = {m.column_names for m in self.per_region.values()}
        if len(layouts) != 1:
            raise ConfigError("regional models do not share a feature layout")


def fit_regional(regions: Mapping[RegionId, InertiaDataset], spec: FeatureSpec, window=None,
                 *, sigma_method: str = "target") -> RegionalModelSet:
    """Fit one explanatory model per Nordic region on its own data and calendar."""
    models = {}
    for region in NORDIC_REGIONS:
        if region not in regions:
            raise ConfigError(f"no dataset for region {region.value}")
        try:
            models[region] = fit(regions[region], spec, window, sigma_method=sigma_method)
        except InertiaError as exc:
            raise FitError(f"region {region.value}: {exc}") from exc
    return RegionalModelSet(models)


def predict_aggregate(models: RegionalModelSet, regions: Mapping[RegionId, InertiaDataset], window) -> HourlySeries:
    """Sum of the regional point forecasts; a gap in any region is a gap in the total."""
    total = None
    for region in NORDIC_REGIONS:
        part = predict(models.per_region[region], regions[region], window)
        total = part.values.copy() if total is None else total + part.values
    return HourlySeries(FORECAST_NAME, Unit.MVAS, int(window[0]), total)
