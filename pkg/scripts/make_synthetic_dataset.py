"""Write a synthetic Nordic dataset directory in the canonical CSV schema.

Each of DK2/FI/NO/SE is simulated from the explanatory model with its own
seed; NORDIC_TOTAL is the hour-by-hour sum of the regional series.  Useful
for exercising ``inertia-bench tables`` end to end without the field data.

    python scripts/make_synthetic_dataset.py data/synthetic --noise 0.02
"""
import argparse
from pathlib import Path

import numpy as np

from inertia_forecast import FeatureSpec, HolidayCalendar, InertiaDataset, RegionId, to_hour, write_csv
from inertia_forecast.synthetic import default_coefficients, generate_synthetic
from inertia_forecast.timeseries import NORDIC_REGIONS, HourlySeries

SHARES = {RegionId.DK2: 0.08, RegionId.FI: 0.22, RegionId.NO: 0.32, RegionId.SE: 0.38}


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("out", type=Path)
    parser.add_argument("--noise", type=float, default=0.02, help="noise SD as a fraction of the level")
    parser.add_argument("--forecast-error", type=float, default=0.05)
    parser.add_argument("--seed", type=int, default=2021)
    args = parser.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    spec = FeatureSpec(hydro_lag=True)
    span = (to_hour("2016-01-01"), to_hour("2020-09-01"))
    regional = {}
    for i, region in enumerate(NORDIC_REGIONS):
        coefs = default_coefficients(spec)
        ds = generate_synthetic(spec, coefs, args.noise * 200000.0, span, seed=args.seed + i,
                                forecast_error=args.forecast_error, region=region)
        # Rescale to the region's share of the system.
        share = SHARES[region]
        ds = ds.replace(**{name: s.scaled(share) for name, s in ds.series().items()})
        regional[region] = ds
        write_csv(ds, args.out / f"{region.value}.csv")

    totals = {}
    for name in regional[RegionId.SE].series():
        parts = [regional[r].series()[name] for r in NORDIC_REGIONS]
        totals[name] = HourlySeries(parts[0].name, parts[0].unit, parts[0].start, np.sum([p.values for p in parts], axis=0))
    total = InertiaDataset(region=RegionId.NORDIC_TOTAL, calendar=HolidayCalendar.default("NORDIC_TOTAL"), **totals)
    write_csv(total, args.out / "NORDIC_TOTAL.csv")
    print(f"wrote {len(NORDIC_REGIONS) + 1} files to {args.out}")


if __name__ == "__main__":
    main()
