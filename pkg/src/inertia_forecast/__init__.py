"""Day-ahead power-system inertia forecasting and benchmarking."""
from .baseline import BaselineConfig, TsBaselineModel, fit_baseline, predict_baseline
from .explanatory import (
    ExplanatoryModel,
    ProbabilisticForecast,
    RegionalModelSet,
    fit,
    fit_regional,
    predict,
    predict_aggregate,
    predict_distribution,
)
from .features import DesignMatrix, FeatureSpec, build_design, substitute_actuals
from .metrics import MetricResult, evaluate, mae, mape, smape
from .ols import LsqSolution, solve_lsq
from .synthetic import default_coefficients, generate_synthetic
from .timeseries import (
    DayType,
    HolidayCalendar,
    HourlySeries,
    InertiaDataset,
    RegionId,
    SplitSpec,
    day_type,
    load_csv,
    load_dataset_dir,
    resample_to_hourly,
    split,
    to_hour,
    write_csv,
)

__version__ = "0.1.0"
