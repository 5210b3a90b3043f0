"""Regenerate the bundled holiday calendars.

Writes one text file per region into src/inertia_forecast/data/holidays/.
Only public (non-working) days are listed; observed/substitute days are
used for GB bank holidays.

    python scripts/make_holiday_files.py --years 2015 2021
"""
import argparse
import datetime as dt
from pathlib import Path

from dateutil.easter import easter

OUT = Path(__file__).resolve().parents[1] / "src" / "inertia_forecast" / "data" / "holidays"


def _weekday_in(year, month, first_day, weekday):
    """First date on/after (month, first_day) falling on `weekday`."""
    d = dt.date(year, month, first_day)
    return d + dt.timedelta(days=(weekday - d.weekday()) % 7)


def _easter_based(year, offsets):
    e = easter(year)
    return [(e + dt.timedelta(days=off), name) for off, name in offsets]


def denmark(year):
    days = [(dt.date(year, 1, 1), "new_year")]
    days += _easter_based(year, [
        (-3, "maundy_thursday"), (-2, "good_friday"), (0, "easter_sunday"),
        (1, "easter_monday"), (26, "great_prayer_day"), (39, "ascension"),
        (49, "whit_sunday"), (50, "whit_monday"),
    ])
    days += [(dt.date(year, 12, 25), "christmas_day"), (dt.date(year, 12, 26), "boxing_day")]
    return days


def finland(year):
    days = [(dt.date(year, 1, 1), "new_year"), (dt.date(year, 1, 6), "epiphany")]
    days += _easter_based(year, [
        (-2, "good_friday"), (0, "easter_sunday"), (1, "easter_monday"),
        (39, "ascension"), (49, "whit_sunday"),
    ])
    days += [
        (dt.date(year, 5, 1), "may_day"),
        (_weekday_in(year, 6, 19, 4), "midsummer_eve"),
        (_weekday_in(year, 6, 20, 5), "midsummer_day"),
        (_weekday_in(year, 10, 31, 5), "all_saints_day"),
        (dt.date(year, 12, 6), "independence_day"),
        (dt.date(year, 12, 24), "christmas_eve"),
        (dt.date(year, 12, 25), "christmas_day"),
        (dt.date(year, 12, 26), "boxing_day"),
    ]
    return days


def norway(year):
    days = [(dt.date(year, 1, 1), "new_year")]
    days += _easter_based(year, [
        (-3, "maundy_thursday"), (-2, "good_friday"), (0, "easter_sunday"),
        (1, "easter_monday"), (39, "ascension"), (49, "whit_sunday"), (50, "whit_monday"),
    ])
    days += [
        (dt.date(year, 5, 1), "may_day"),
        (dt.date(year, 5, 17), "constitution_day"),
        (dt.date(year, 12, 25), "christmas_day"),
        (dt.date(year, 12, 26), "boxing_day"),
    ]
    return days


def sweden(year):
    days = [(dt.date(year, 1, 1), "new_year"), (dt.date(year, 1, 6), "epiphany")]
    days += _easter_based(year, [
        (-2, "good_friday"), (0, "easter_sunday"), (1, "easter_monday"),
        (39, "ascension"), (49, "whit_sunday"),
    ])
    days += [
        (dt.date(year, 5, 1), "may_day"),
        (dt.date(year, 6, 6), "national_day"),
        (_weekday_in(year, 6, 19, 4), "midsummer_eve"),
        (_weekday_in(year, 6, 20, 5), "midsummer_day"),
        (_weekday_in(year, 10, 31, 5), "all_saints_day"),
        (dt.date(year, 12, 24), "christmas_eve"),
        (dt.date(year, 12, 25), "christmas_day"),
        (dt.date(year, 12, 26), "boxing_day"),
        (dt.date(year, 12, 31), "new_years_eve"),
    ]
    return days


def _substitute(d):
    while d.weekday() >= 5:
        d += dt.timedelta(days=1)
    return d


def great_britain(year):
    # England & Wales bank holidays, observed dates.
    days = [(_substitute(dt.date(year, 1, 1)), "new_year")]
    days += _easter_based(year, [(-2, "good_friday"), (1, "easter_monday")])
    early_may = _weekday_in(year, 5, 1, 0)
    if year == 2020:
        early_may = dt.date(2020, 5, 8)
    last_may = _weekday_in(year, 5, 25, 0)
    last_aug = _weekday_in(year, 8, 25, 0)
    days += [(early_may, "early_may"), (last_may, "spring_bank"), (last_aug, "summer_bank")]
    xmas = _substitute(dt.date(year, 12, 25))
    boxing = _substitute(max(dt.date(year, 12, 26), xmas + dt.timedelta(days=1)))
    days += [(xmas, "christmas_day"), (boxing, "boxing_day")]
    return days


RULES = {"DK2": denmark, "FI": finland, "NO": norway, "SE": sweden, "GB": great_britain}


def write(region, entries, years):
    path = OUT / f"{region}.txt"
    with path.open("w", encoding="utf-8") as fh:
        fh.write(f"# {region} public holidays {years[0]}-{years[-1]}\n")
        for d, name in sorted(entries):
            fh.write(f"{d.isoformat()}  # {name}\n")
    print(f"wrote {path} ({len(entries)} dates)")


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--years", nargs=2, type=int, default=[2015, 2021])
    args = parser.parse_args()
    years = list(range(args.years[0], args.years[1] + 1))
    OUT.mkdir(parents=True, exist_ok=True)
    per_region = {}
    for region, rule in RULES.items():
        entries = [e for y in years for e in rule(y)]
        per_region[region] = entries
        write(region, entries, years)
    # Nordic-wide calendar: dates shared by all four Nordic regions.
    nordic = ["DK2", "FI", "NO", "SE"]
    shared = set.intersection(*({d for d, _ in per_region[r]} for r in nordic))
    names = dict(per_region["SE"])
    write("NORDIC_TOTAL", [(d, names[d]) for d in shared], years)


if __name__ == "__main__":
    main()
