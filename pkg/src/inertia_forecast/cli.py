"""``inertia-bench`` command line interface.

Exit codes: 0 success, 1 configuration error, 2 data error, 3 one or more
experiments failed.
"""
from __future__ import annotations

import argparse
import csv
import logging
import sys
from pathlib import Path

from . import bench, explanatory
from .errors import ConfigError, DataError, InertiaError
from .features import FeatureSpec
from .timeseries import format_hour, load_csv, to_hour

log = logging.getLogger("inertia_forecast")

EXIT_OK, EXIT_CONFIG, EXIT_DATA, EXIT_FAILURES = 0, 1, 2, 3


def _write_reports(report: bench.BenchmarkReport, out: Path, stem: str = "report") -> None:
    out.mkdir(parents=True, exist_ok=True)
    bench.emit_report(report, "csv", out / f"{stem}.csv")
    bench.emit_report(report, "json", out / f"{stem}.json")
    log.info("wrote %s/%s.{csv,json}", out, stem)


def cmd_run(args) -> int:
    suite = bench.load_suite(args.config)
    missing = bench.check_files(suite)
    if missing:
        raise DataError("missing data files:\n  " + "\n  ".join(missing))
    jobs = args.jobs or suite.jobs
    report = bench.run_suite(suite.experiments, jobs=jobs, base_case=suite.base_case)
    out = Path(args.out) if args.out else (suite.out or Path("reports"))
    _write_reports(report, out)
    print(bench.format_summary(report))
    return EXIT_FAILURES if report.failures else EXIT_OK


def cmd_validate(args) -> int:
    suite = bench.load_suite(args.config)
    missing = bench.check_files(suite)
    if missing:
        raise ConfigError("missing data files:\n  " + "\n  ".join(missing))
    print(f"{args.config}: {len(suite.experiments)} experiment(s) OK")
    return EXIT_OK


def cmd_tables(args) -> int:
    dataset = Path(args.dataset)
    if not dataset.is_dir():
        raise DataError(f"dataset directory {dataset} not found")
    configs = bench.reference_suite(dataset)
    report = bench.run_suite(configs, jobs=args.jobs, base_case=bench.BASE_CASE)
    _write_reports(report, Path(args.out), stem="tables")
    print(bench.format_summary(report))
    return EXIT_FAILURES if report.failures else EXIT_OK


def _feature_spec(path) -> FeatureSpec:
    if path is None:
        return FeatureSpec()
    doc = bench.tomllib.loads(Path(path).read_text(encoding="utf-8"))
    return FeatureSpec.from_dict(doc.get("features", doc))


def cmd_fit(args) -> int:
    ds = load_csv(args.data, region=args.region)
    window = (to_hour(args.train[0]), to_hour(args.train[1]))
    model = explanatory.fit(ds, _feature_spec(args.features), window, sigma_method=args.sigma)
    Path(args.out).write_text(model.to_json(), encoding="utf-8")
    print(f"fitted {len(model.column_names)} coefficients on {model.n_train} hours; sigma_hat={model.sigma_hat:.1f} MVA·s")
    return EXIT_OK


def cmd_predict(args) -> int:
    model = explanatory.ExplanatoryModel.from_json(Path(args.model).read_text(encoding="utf-8"))
    ds = load_csv(args.data, region=args.region)
    window = (to_hour(args.window[0]), to_hour(args.window[1]))
    dist = explanatory.predict_distribution(model, ds, window)
    qs = [float(q) for q in args.quantiles]
    bands = [dist.quantile(q) for q in qs]
    out = open(args.out, "w", newline="", encoding="utf-8") if args.out else sys.stdout
    try:
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["timestamp", "mean_mvas"] + [f"q{q:g}" for q in qs])
        for i, h in enumerate(range(window[0], window[1])):
            mean = dist.mean.values[i]
            cells = [repr(float(mean)) if mean == mean else ""]
            cells += [repr(float(b[i])) if b[i] == b[i] else "" for b in bands]
            writer.writerow([format_hour(h)] + cells)
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="inertia-bench", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run the experiments in a TOML config")
    run.add_argument("--config", required=True)
    run.add_argument("--out")
    run.add_argument("--jobs", type=int, default=0)
    run.set_defaults(func=cmd_run)

    val = sub.add_parser("validate", help="check a TOML config without running it")
    val.add_argument("--config", required=True)
    val.set_defaults(func=cmd_validate)

    tab = sub.add_parser("tables", help="run the canned reference suite on a dataset directory")
    tab.add_argument("--dataset", required=True, help="directory with <REGION>.csv files")
    tab.add_argument("--out", required=True)
    tab.add_argument("--jobs", type=int, default=1)
    tab.set_defaults(func=cmd_tables)

    fit = sub.add_parser("fit", help="fit one explanatory model and save it as JSON")
    fit.add_argument("--data", required=True, help="per-region CSV")
    fit.add_argument("--region")
    fit.add_argument("--train", nargs=2, required=True, metavar=("START", "END"))
    fit.add_argument("--features", help="TOML file with a [features] table")
    fit.add_argument("--sigma", choices=explanatory.SIGMA_METHODS, default="target")
    fit.add_argument("--out", required=True)
    fit.set_defaults(func=cmd_fit)

    pred = sub.add_parser("predict", help="forecast with a saved model")
    pred.add_argument("--model", required=True)
    pred.add_argument("--data", required=True)
    pred.add_argument("--region")
    pred.add_argument("--window", nargs=2, required=True, metavar=("START", "END"))
    pred.add_argument("--quantiles", nargs="*", default=[])
    pred.add_argument("--out")
    pred.set_defaults(func=cmd_predict)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DataError, OSError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InertiaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURES


if __name__ == "__main__":
    sys.exit(main())
