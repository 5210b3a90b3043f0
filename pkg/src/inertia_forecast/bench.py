"""Experiment configuration, runner, reports and the canned benchmark suite."""
from __future__ import annotations

import csv
import io
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from functools import lru_cache
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from . import explanatory
from .baseline import BaselineConfig, fit_baseline, predict_baseline
from .errors import ConfigError, ExperimentError, InertiaError
from .features import SUBSTITUTABLE, FeatureSpec, substitute_actuals
from .metrics import MetricResult, evaluate
from .synthetic import default_coefficients, generate_synthetic
from .timeseries import (
    NORDIC_REGIONS,
    HolidayCalendar,
    HourlySeries,
    InertiaDataset,
    RegionId,
    SplitSpec,
    Unit,
    load_dataset_dir,
    split,
    to_hour,
)

MODELS = ("explanatory", "baseline", "regional")
CALENDAR_MODES = ("region", "common")


@dataclass(frozen=True)
class SyntheticSource:
    """Generate the dataset instead of loading it; ``seed`` drives all randomness.

    ``features`` is the generating model.  When unset the experiment's own
    feature spec is used, so the fitted model is exactly specified; set it
    to give several experiments the same data.
    """

    seed: int = 0
    noise_sd: float = 0.0
    forecast_error: float = 0.0
    start: str = "2018-01-01"
    end: str = "2020-09-01"
    trend_start: str | None = None
    trend_end: str | None = None
    features: FeatureSpec | None = None

    @classmethod
    def from_dict(cls, d: Mapping) -> SyntheticSource:
        d = dict(d)
        if "features" in d:
            d["features"] = FeatureSpec.from_dict(d["features"])
        return cls(**d)

    def to_dict(self) -> dict:
        out = {k: v for k, v in vars(self).items() if v is not None}
        if self.features is not None:
            out["features"] = self.features.to_dict()
        return out

    def generate(self, spec: FeatureSpec, region: RegionId) -> InertiaDataset:
        spec = self.features or spec
        trend = None
        if self.trend_start is not None:
            trend = (to_hour(self.trend_start), to_hour(self.trend_end))
        # Per-region seed offsets keep regional series distinct yet reproducible.
        seed = (self.seed + 7919 * list(RegionId).index(region)) % 2**64
        return generate_synthetic(
            spec, default_coefficients(spec), self.noise_sd, (to_hour(self.start), to_hour(self.end)),
            seed=seed, forecast_error=self.forecast_error, region=region, trend_window=trend,
        )


@dataclass(frozen=True)
class ExperimentConfig:
    id: str
    split: SplitSpec
    model: str = "explanatory"
    region: RegionId = RegionId.NORDIC_TOTAL
    dataset: Path | None = None
    features: FeatureSpec = field(default_factory=FeatureSpec)
    baseline: BaselineConfig = field(default_factory=BaselineConfig)
    substitutions: tuple[str, ...] = ()
    sigma_method: str = "target"
    calendar: str = "region"
    synthetic: SyntheticSource | None = None

    def __post_init__(self):
        object.__setattr__(self, "region", RegionId(self.region))
        object.__setattr__(self, "substitutions", tuple(sorted(set(self.substitutions))))
        if self.dataset is not None:
            object.__setattr__(self, "dataset", Path(self.dataset))
        if self.model not in MODELS:
            raise ConfigError(f"{self.id}: model must be one of {MODELS}")
        if self.calendar not in CALENDAR_MODES:
            raise ConfigError(f"{self.id}: calendar must be one of {CALENDAR_MODES}")
        bad = set(self.substitutions) - set(SUBSTITUTABLE)
        if bad:
            raise ConfigError(f"{self.id}: unknown substitutions {sorted(bad)}")
        if self.dataset is None and self.synthetic is None:
            raise ConfigError(f"{self.id}: needs a dataset path or a synthetic source")

    @classmethod
    def from_dict(cls, d: Mapping, defaults: Mapping | None = None) -> ExperimentConfig:
        defaults = dict(defaults or {})
        if "synthetic" in d:
            defaults.pop("dataset", None)  # generated data ignores the suite's dataset
        d = {**defaults, **d}
        known = {"id", "model", "region", "dataset", "train", "test", "features", "baseline",
                 "substitutions", "sigma_method", "calendar", "synthetic"}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown experiment keys {sorted(unknown)}")
        try:
            exp_id = str(d["id"])
            train, test = d["train"], d["test"]
            spec = SplitSpec(train[0], train[1], test[0], test[1])
            synth = d.get("synthetic")
            return cls(
                id=exp_id,
                split=spec,
                model=d.get("model", "explanatory"),
                region=RegionId(d.get("region", "NORDIC_TOTAL")),
                dataset=d.get("dataset"),
                features=FeatureSpec.from_dict(d.get("features")),
                baseline=BaselineConfig.from_dict(d.get("baseline")),
                substitutions=tuple(d.get("substitutions", ())),
                sigma_method=d.get("sigma_method", "target"),
                calendar=d.get("calendar", "region"),
                synthetic=SyntheticSource.from_dict(synth) if synth is not None else None,
            )
        except ConfigError:
            raise
        except (KeyError, TypeError, ValueError, InertiaError) as exc:
            raise ConfigError(f"experiment {d.get('id', '?')!r}: {exc}") from exc

    def to_dict(self) -> dict:
        out = {
            "id": self.id,
            "model": self.model,
            "region": self.region.value,
            **self.split.to_dict(),
            "substitutions": list(self.substitutions),
            "sigma_method": self.sigma_method,
            "calendar": self.calendar,
            "features": self.features.to_dict(),
        }
        if self.model == "baseline":
            out["baseline"] = self.baseline.to_dict()
        if self.dataset is not None:
            out["dataset"] = str(self.dataset)
        if self.synthetic is not None:
            out["synthetic"] = self.synthetic.to_dict()
        return out


@dataclass(frozen=True)
class Suite:
    experiments: tuple[ExperimentConfig, ...]
    base_case: str | None = None
    out: Path | None = None
    jobs: int = 1


def parse_suite(doc: Mapping, root: Path | None = None) -> Suite:
    """Build a :class:`Suite` from a parsed TOML document.

    Relative dataset and output paths resolve against ``root``.
    """
    head = dict(doc.get("suite", {}))
    defaults = {}
    if "dataset" in head:
        defaults["dataset"] = head.pop("dataset")
    base_case = head.pop("base_case", None)
    out = head.pop("out", None)
    jobs = int(head.pop("jobs", 1))
    if head:
        raise ConfigError(f"unknown [suite] keys {sorted(head)}")
    extra = set(doc) - {"suite", "experiments"}
    if extra:
        raise ConfigError(f"unknown top-level tables {sorted(extra)}")
    exps = []
    for raw in doc.get("experiments", []):
        cfg = ExperimentConfig.from_dict(raw, defaults)
        if root is not None and cfg.dataset is not None and not cfg.dataset.is_absolute():
            cfg = replace(cfg, dataset=root / cfg.dataset)
        exps.append(cfg)
    ids = [e.id for e in exps]
    dupes = sorted({i for i in ids if ids.count(i) > 1})
    if dupes:
        raise ConfigError(f"duplicate experiment ids {dupes}")
    if base_case is not None and base_case not in ids:
        raise ConfigError(f"base case {base_case!r} is not an experiment id")
    if out is not None:
        out = Path(out)
        if root is not None and not out.is_absolute():
            out = root / out
    return Suite(tuple(exps), base_case, out, jobs)


def load_suite(path) -> Suite:
    path = Path(path)
    try:
        doc = tomllib.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    return parse_suite(doc, root=path.parent)


def check_files(suite: Suite) -> list[str]:
    """Referenced data files that do not exist."""
    missing = []
    for cfg in suite.experiments:
        if cfg.dataset is None:
            continue
        for region in _regions_needed(cfg):
            p = cfg.dataset / f"{region.value}.csv"
            if not p.exists():
                missing.append(f"{cfg.id}: {p}")
    return missing


# ---------------------------------------------------------------------------
# running


@dataclass
class ReportRow:
    id: str
    model: str
    region: str
    status: str = "ok"
    train: MetricResult | None = None
    test: MetricResult | None = None
    delta_mae_mvas: float | None = None
    error: str = ""

    def flat(self) -> dict:
        out = {"id": self.id, "model": self.model, "region": self.region, "status": self.status}
        for part in ("train", "test"):
            m = getattr(self, part)
            out[f"{part}_mape"] = m.mape if m else None
            out[f"{part}_smape"] = m.smape if m else None
            out[f"{part}_mae"] = m.mae if m else None
            out[f"n_{part}"] = m.n_points if m else None
        out["delta_mae_mvas"] = self.delta_mae_mvas
        out["error"] = self.error
        return out


@dataclass
class BenchmarkReport:
    rows: list[ReportRow] = field(default_factory=list)
    base_case: str | None = None

    def row(self, exp_id: str) -> ReportRow:
        for r in self.rows:
            if r.id == exp_id:
                return r
        raise KeyError(exp_id)

    @property
    def failures(self) -> list[ReportRow]:
        return [r for r in self.rows if r.status != "ok"]


def _regions_needed(cfg: ExperimentConfig) -> list[RegionId]:
    if cfg.model == "regional":
        return list(NORDIC_REGIONS)
    return [cfg.region]


@lru_cache(maxsize=8)
def _load_dir(directory: str, regions: tuple[str, ...]) -> dict:
    return load_dataset_dir(directory, regions)


def load_inputs(cfg: ExperimentConfig) -> dict[RegionId, InertiaDataset]:
    regions = _regions_needed(cfg)
    if cfg.synthetic is not None:
        return {r: cfg.synthetic.generate(cfg.features, r) for r in regions}
    wanted = list(regions)
    if cfg.model == "regional" and (cfg.dataset / "NORDIC_TOTAL.csv").exists():
        wanted.append(RegionId.NORDIC_TOTAL)
    return dict(_load_dir(str(cfg.dataset), tuple(r.value for r in wanted)))


def _score(actual: HourlySeries, forecast: HourlySeries, window) -> MetricResult:
    return evaluate(actual.window(*window), forecast)


def _regional_actual(data: Mapping[RegionId, InertiaDataset]) -> HourlySeries:
    if RegionId.NORDIC_TOTAL in data:
        return data[RegionId.NORDIC_TOTAL].target
    parts = [data[r].target for r in NORDIC_REGIONS]
    lo, hi = max(p.start for p in parts), min(p.end for p in parts)
    total = sum(p.at(np.arange(lo, hi)) for p in parts)
    return HourlySeries("inertia_mvas", Unit.MVAS, lo, total)


def run_experiment(cfg: ExperimentConfig, data: Mapping[RegionId, InertiaDataset] | None = None) -> ReportRow:
    """Load, substitute, split, fit, predict and score one experiment.

    Raises :class:`ExperimentError` naming the failing stage.
    """
    stage = "load"
    try:
        data = dict(data) if data is not None else load_inputs(cfg)
        stage = "substitute"
        regions = _regions_needed(cfg)
        for r in regions:
            if r not in data:
                raise ConfigError(f"no dataset for region {r.value}")
            data[r] = substitute_actuals(data[r], cfg.substitutions)
        if cfg.model == "regional" and cfg.calendar == "common":
            common = HolidayCalendar.common(data[r].calendar for r in NORDIC_REGIONS)
            for r in NORDIC_REGIONS:
                data[r] = data[r].replace(calendar=replace(common, region=r))
        stage = "split"
        for r in regions:
            split(data[r], cfg.split)
        train_w, test_w = cfg.split.train, cfg.split.test

        if cfg.model == "explanatory":
            ds = data[cfg.region]
            stage = "fit"
            model = explanatory.fit(ds, cfg.features, train_w, sigma_method=cfg.sigma_method)
            stage = "predict"
            preds = [explanatory.predict(model, ds, w) for w in (train_w, test_w)]
            actual = ds.target
        elif cfg.model == "regional":
            stage = "fit"
            models = explanatory.fit_regional(data, cfg.features, train_w, sigma_method=cfg.sigma_method)
            stage = "predict"
            preds = [explanatory.predict_aggregate(models, data, w) for w in (train_w, test_w)]
            actual = _regional_actual(data)
        else:
            ds = data[cfg.region]
            stage = "fit"
            model = fit_baseline(ds.target.window(*train_w), ds.calendar, cfg.baseline)
            stage = "predict"
            preds = [predict_baseline(model, w, ds.calendar) for w in (train_w, test_w)]
            actual = ds.target
        stage = "score"
        train_m = _score(actual, preds[0], train_w)
        test_m = _score(actual, preds[1], test_w)
    except ExperimentError:
        raise
    except Exception as exc:  # every stage failure is attributed to the experiment
        raise ExperimentError(cfg.id, stage, exc) from exc
    return ReportRow(cfg.id, cfg.model, "NORDIC_TOTAL" if cfg.model == "regional" else cfg.region.value,
                     train=train_m, test=test_m)


def _run_safe(cfg: ExperimentConfig, data=None) -> ReportRow:
    try:
        return run_experiment(cfg, data)
    except ExperimentError as exc:
        return ReportRow(cfg.id, cfg.model, cfg.region.value, status="failed", error=str(exc))


def run_suite(configs: Sequence[ExperimentConfig], jobs: int = 1, base_case: str | None = None,
              data: Mapping[RegionId, InertiaDataset] | None = None) -> BenchmarkReport:
    """Run experiments (optionally in worker processes); rows keep config order.

    ``data`` overrides loading for every experiment.  Failed experiments are
    recorded in-row.  ``delta_mae_mvas`` is the test MAE difference against
    ``base_case`` when that experiment succeeded.
    """
    configs = list(configs)
    ids = [c.id for c in configs]
    if len(set(ids)) != len(ids):
        raise ConfigError("experiment ids must be unique")
    if jobs > 1 and len(configs) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_run_safe, configs, [data] * len(configs)))
    else:
        rows = [_run_safe(c, data) for c in configs]
    report = BenchmarkReport(rows, base_case)
    if base_case is not None and base_case in ids:
        base = report.row(base_case)
        if base.status == "ok":
            for r in rows:
                if r.status == "ok":
                    r.delta_mae_mvas = r.test.mae - base.test.mae
    return report


# ---------------------------------------------------------------------------
# reports

CSV_COLUMNS = ("id", "model", "region", "status", "train_mape", "test_mape", "train_smape", "test_smape",
               "train_mae", "test_mae", "n_train", "n_test", "delta_mae_mvas", "error")
_FLOAT_COLUMNS = {"train_mape", "test_mape", "train_smape", "test_smape", "train_mae", "test_mae", "delta_mae_mvas"}
_INT_COLUMNS = {"n_train", "n_test"}


def report_to_csv(report: BenchmarkReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in report.rows:
        flat = row.flat()
        cells = []
        for col in CSV_COLUMNS:
            v = flat[col]
            if v is None:
                cells.append("")
            elif col in _FLOAT_COLUMNS:
                cells.append(f"{v:.3f}")
            else:
                cells.append(str(v))
        writer.writerow(cells)
    return buf.getvalue()


def report_to_json(report: BenchmarkReport) -> str:
    doc = {"base_case": report.base_case, "rows": [r.flat() for r in report.rows]}
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def emit_report(report: BenchmarkReport, fmt: str, path) -> Path:
    if fmt not in ("csv", "json"):
        raise ConfigError(f"unknown report format {fmt!r}")
    path = Path(path)
    text = report_to_csv(report) if fmt == "csv" else report_to_json(report)
    path.write_text(text, encoding="utf-8")
    return path


def _row_from_flat(d: Mapping) -> ReportRow:
    def metric(part):
        if d.get(f"{part}_mape") is None:
            return None
        return MetricResult(d[f"{part}_mape"], d[f"{part}_smape"], d[f"{part}_mae"], d[f"n_{part}"])

    return ReportRow(d["id"], d["model"], d["region"], d["status"], metric("train"), metric("test"),
                     d.get("delta_mae_mvas"), d.get("error", ""))


def read_report(path) -> BenchmarkReport:
    """Parse a report written by :func:`emit_report` (format from the suffix)."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    if path.suffix == ".json":
        doc = json.loads(text)
        return BenchmarkReport([_row_from_flat(r) for r in doc["rows"]], doc.get("base_case"))
    rows = []
    for rec in csv.DictReader(io.StringIO(text)):
        flat = {}
        for k, v in rec.items():
            if k in _FLOAT_COLUMNS:
                flat[k] = float(v) if v else None
            elif k in _INT_COLUMNS:
                flat[k] = int(v) if v else None
            else:
                flat[k] = v
        rows.append(_row_from_flat(flat))
    return BenchmarkReport(rows)


# ---------------------------------------------------------------------------
# canned reference suite

TEST_2020 = ("2020-01-01", "2020-09-01")
BASE_CASE = "duration_1y"


def reference_suite(dataset) -> list[ExperimentConfig]:
    """Training-duration, monthly, regional, hydro and substitution experiments
    on the Nordic dataset, plus the single-day baseline comparison."""
    dataset = Path(dataset)
    base = FeatureSpec()
    monthly = FeatureSpec(monthly_interaction_on=("demand_fc",))

    def exp(exp_id, train, test=TEST_2020, **kw):
        return ExperimentConfig(id=exp_id, split=SplitSpec(train[0], train[1], test[0], test[1]),
                                dataset=dataset, **kw)

    cfgs = [
        exp("single_day_explanatory", ("2017-01-31", "2018-01-31"), ("2018-01-31", "2018-02-01")),
        exp("single_day_baseline", ("2017-01-31", "2018-01-31"), ("2018-01-31", "2018-02-01"), model="baseline"),
    ]
    for years in (1, 2, 3, 4):
        train = (f"{2020 - years}-01-01", "2020-01-01")
        cfgs.append(exp(f"duration_{years}y", train, features=base))
    for years in (1, 2, 3, 4):
        train = (f"{2020 - years}-01-01", "2020-01-01")
        cfgs.append(exp(f"monthly_{years}y", train, features=monthly))
    one_year = ("2019-01-01", "2020-01-01")
    cfgs += [
        exp("spatial_regional", one_year, model="regional", calendar="region"),
        exp("spatial_regional_common", one_year, model="regional", calendar="common"),
        exp("hydro_1y", one_year, features=FeatureSpec(hydro_lag=True)),
        exp("subst_demand", one_year, substitutions=("demand",)),
        exp("subst_wind", one_year, substitutions=("wind",)),
        exp("subst_solar", one_year, substitutions=("solar",)),
        exp("subst_all", one_year, substitutions=("demand", "wind", "solar")),
    ]
    return cfgs


REFERENCE_MAPE = {
    # experiment id -> (train MAPE %, test MAPE %) of the reference results; None where unreported
    "single_day_explanatory": (None, 4.0),
    "single_day_baseline": (None, 7.0),
    "duration_1y": (4.539, 4.420),
    "duration_2y": (4.320, 4.505),
    "duration_3y": (4.197, 4.862),
    "duration_4y": (4.426, 4.553),
    "monthly_1y": (3.553, 7.700),
    "monthly_2y": (3.600, 3.870),
    "monthly_3y": (3.447, 4.572),
    "monthly_4y": (3.679, 4.115),
    "spatial_regional": (4.420, 4.261),
}


def format_summary(report: BenchmarkReport) -> str:
    lines = [f"{'experiment':26s} {'train MAPE':>10s} {'test MAPE':>10s} {'reference':>10s} {'dMAE MVA.s':>11s}"]
    for r in report.rows:
        if r.status != "ok":
            lines.append(f"{r.id:26s} FAILED: {r.error}")
            continue
        pub = REFERENCE_MAPE.get(r.id, (None, None))[1]
        pub_s = f"{pub:10.3f}" if pub is not None else f"{'-':>10s}"
        delta = f"{r.delta_mae_mvas:11.1f}" if r.delta_mae_mvas is not None else f"{'-':>11s}"
        lines.append(f"{r.id:26s} {r.train.mape:10.3f} {r.test.mape:10.3f} {pub_s} {delta}")
    return "\n".join(lines)

