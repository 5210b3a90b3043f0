"""Hourly series, datasets, holiday calendars, CSV ingestion and splitting.

Time is represented as integer hours since 1970-01-01T00:00Z ("hour
stamps").  All series in a dataset are aligned on the same hour grid;
gaps are stored as NaN.
"""
from __future__ import annotations

import csv
import dataclasses
import datetime as dt
import math
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping, Sequence
from zoneinfo import ZoneInfo

import numpy as np

from .errors import (
    DataError,
    IntegrityError,
    ParseError,
    ResampleError,
    SchemaError,
    SplitError,
)

SECONDS_PER_HOUR = 3600
_EPOCH = dt.datetime(1970, 1, 1, tzinfo=dt.timezone.utc)


# ---------------------------------------------------------------------------
# hour stamps


def to_hour(value) -> int:
    """Convert an int, ISO-8601 string, date or datetime to an hour stamp.

    Naive datetimes and strings without an offset are taken as UTC.  Values
    that are not on an exact hour boundary raise ``ValueError``.
    """
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return int(value)
    if isinstance(value, str):
        text = value.strip()
        if text.endswith(("Z", "z")):
            text = text[:-1] + "+00:00"
        value = dt.datetime.fromisoformat(text)
    if isinstance(value, np.datetime64):
        value = value.astype("datetime64[s]").astype(int)
        if value % SECONDS_PER_HOUR:
            raise ValueError(f"{value} is not on an hour boundary")
        return int(value // SECONDS_PER_HOUR)
    if isinstance(value, dt.datetime):
        if value.tzinfo is None:
            value = value.replace(tzinfo=dt.timezone.utc)
        seconds = (value - _EPOCH).total_seconds()
    elif isinstance(value, dt.date):
        seconds = (dt.datetime(value.year, value.month, value.day, tzinfo=dt.timezone.utc) - _EPOCH).total_seconds()
    else:
        raise TypeError(f"cannot interpret {value!r} as an hour stamp")
    if seconds % SECONDS_PER_HOUR:
        raise ValueError(f"{value} is not on an hour boundary")
    return int(seconds // SECONDS_PER_HOUR)


def hour_to_datetime(hour: int) -> dt.datetime:
    return _EPOCH + dt.timedelta(hours=int(hour))


def format_hour(hour: int) -> str:
    return hour_to_datetime(hour).strftime("%Y-%m-%dT%H:00:00Z")


def utc_month(hours: np.ndarray) -> np.ndarray:
    """Calendar month (1..12) in UTC for each hour stamp."""
    months = np.asarray(hours, dtype="int64").astype("datetime64[h]").astype("datetime64[M]").astype("int64")
    return months % 12 + 1


# ---------------------------------------------------------------------------
# series


class Unit(str, Enum):
    MVAS = "MVA·s"
    MW = "MW"


@dataclass(frozen=True, eq=False)
class HourlySeries:
    """Uniformly sampled hourly series; ``values[i]`` is the value at ``start + i``.

    Gaps are NaN and present values must be finite.  Non-negativity of
    measured inertial energy is checked on ingestion; forecasts are stored
    as produced.
    """

    name: str
    unit: Unit
    start: int
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "start", int(self.start))
        object.__setattr__(self, "unit", Unit(self.unit))
        if values.ndim != 1:
            raise DataError(f"series {self.name!r} must be one-dimensional")
        present = values[~np.isnan(values)]
        if not np.all(np.isfinite(present)):
            raise DataError(f"series {self.name!r} contains infinite values")

    def __len__(self):
        return self.values.shape[0]

    @property
    def end(self) -> int:
        return self.start + len(self)

    @property
    def hours(self) -> np.ndarray:
        return np.arange(self.start, self.end, dtype=np.int64)

    @property
    def gaps(self) -> np.ndarray:
        return np.isnan(self.values)

    def at(self, hours) -> np.ndarray:
        """Values at arbitrary hour stamps; NaN outside the series range."""
        hours = np.asarray(hours, dtype=np.int64)
        idx = hours - self.start
        inside = (idx >= 0) & (idx < len(self))
        out = np.full(hours.shape, np.nan)
        out[inside] = self.values[idx[inside]]
        return out

    def window(self, start: int, end: int) -> HourlySeries:
        """Series over ``[start, end)``, padded with gaps outside the stored range."""
        return HourlySeries(self.name, self.unit, start, self.at(np.arange(start, end)))

    def scaled(self, factor: float) -> HourlySeries:
        return dataclasses.replace(self, values=self.values * factor)

    def equals(self, other: HourlySeries) -> bool:
        return (
            self.name == other.name
            and self.unit == other.unit
            and self.start == other.start
            and np.array_equal(self.values, other.values, equal_nan=True)
        )


def resample_to_hourly(times, values, *, name: str, unit: Unit | str, reducer: str = "mean") -> HourlySeries:
    """Aggregate a regular sub-hourly series onto the hour grid.

    ``times`` are epoch seconds (or anything ``numpy.datetime64`` accepts);
    the spacing must be constant and divide one hour.  Missing samples are
    NaN.  ``reducer`` is ``"mean"`` (of present samples) or ``"first"``
    (first present sample).  Hours with no present sample become gaps.
    """
    if reducer not in ("mean", "first"):
        raise ResampleError(f"unknown reducer {reducer!r}")
    t = np.asarray(times)
    if t.dtype.kind == "M":
        t = t.astype("datetime64[s]").astype(np.int64)
    else:
        t = np.asarray([_to_seconds(x) for x in t], dtype=np.int64) if t.dtype == object else t.astype(np.int64)
    v = np.asarray(values, dtype=float)
    if t.shape != v.shape or t.ndim != 1 or len(t) == 0:
        raise ResampleError("times and values must be equal-length non-empty 1-D arrays")
    if len(t) > 1:
        steps = np.diff(t)
        step = int(steps[0])
        if step <= 0 or np.any(steps != step) or SECONDS_PER_HOUR % step:
            raise ResampleError("sample spacing must be constant and divide one hour evenly")
    bins = t // SECONDS_PER_HOUR
    start = int(bins[0])
    n_out = int(bins[-1]) - start + 1
    idx = bins - start
    present = ~np.isnan(v)
    out = np.full(n_out, np.nan)
    if reducer == "mean":
        sums = np.bincount(idx[present], weights=v[present], minlength=n_out)
        counts = np.bincount(idx[present], minlength=n_out)
        has = counts > 0
        out[has] = sums[has] / counts[has]
    else:
        uniq, first = np.unique(idx[present], return_index=True)
        out[uniq] = v[present][first]
    return HourlySeries(name, unit, start, out)


def _to_seconds(value) -> int:
    if isinstance(value, dt.datetime):
        if value.tzinfo is None:
            value = value.replace(tzinfo=dt.timezone.utc)
        return int((value - _EPOCH).total_seconds())
    return int(value)


# ---------------------------------------------------------------------------
# regions and calendars


class RegionId(str, Enum):
    NORDIC_TOTAL = "NORDIC_TOTAL"
    DK2 = "DK2"
    FI = "FI"
    NO = "NO"
    SE = "SE"
    GB = "GB"


NORDIC_REGIONS = (RegionId.DK2, RegionId.FI, RegionId.NO, RegionId.SE)

TIMEZONES = {
    RegionId.NORDIC_TOTAL: "Europe/Stockholm",
    RegionId.DK2: "Europe/Copenhagen",
    RegionId.FI: "Europe/Helsinki",
    RegionId.NO: "Europe/Oslo",
    RegionId.SE: "Europe/Stockholm",
    RegionId.GB: "Europe/London",
}


class DayType(Enum):
    WEEKDAY = "weekday"
    WEEKEND_OR_HOLIDAY = "weekend_or_holiday"


@lru_cache(maxsize=64)
def _local_days(tz_name: str, start: int, end: int) -> np.ndarray:
    """Local civil day number (days since 1970-01-01) for each hour in [start, end)."""
    tz = ZoneInfo(tz_name)
    hours = np.arange(start, end, dtype=np.int64)
    offsets = np.fromiter(
        (hour_to_datetime(h).astimezone(tz).utcoffset().total_seconds() for h in hours.tolist()),
        dtype=np.int64,
        count=len(hours),
    )
    days = (hours * SECONDS_PER_HOUR + offsets) // 86400
    days.setflags(write=False)
    return days


@dataclass(frozen=True)
class HolidayCalendar:
    """Set of public-holiday dates for a region, interpreted in local civil time."""

    region: RegionId
    dates: frozenset
    names: Mapping = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "region", RegionId(self.region))
        object.__setattr__(self, "dates", frozenset(self.dates))

    def __contains__(self, date) -> bool:
        return date in self.dates

    def __len__(self):
        return len(self.dates)

    @property
    def timezone(self) -> str:
        return TIMEZONES[self.region]

    def name_of(self, date: dt.date) -> str:
        return self.names.get(date, "holiday")

    @classmethod
    def load(cls, path, region) -> HolidayCalendar:
        return cls.parse(Path(path).read_text(encoding="utf-8"), region)

    @classmethod
    def parse(cls, text: str, region) -> HolidayCalendar:
        dates, names = set(), {}
        for lineno, raw in enumerate(text.splitlines(), start=1):
            body, _, comment = raw.partition("#")
            body = body.strip()
            if not body:
                continue
            try:
                date = dt.date.fromisoformat(body)
            except ValueError:
                raise ParseError(f"bad holiday date {body!r}", row=lineno) from None
            dates.add(date)
            if comment.strip():
                names[date] = comment.strip()
        return cls(RegionId(region), frozenset(dates), names)

    @classmethod
    def default(cls, region) -> HolidayCalendar:
        region = RegionId(region)
        text = resources.files("inertia_forecast").joinpath(f"data/holidays/{region.value}.txt").read_text(encoding="utf-8")
        return cls.parse(text, region)

    @classmethod
    def common(cls, calendars: Iterable[HolidayCalendar], region=RegionId.NORDIC_TOTAL) -> HolidayCalendar:
        """Intersection of several calendars (holidays shared by every region)."""
        calendars = list(calendars)
        if not calendars:
            raise ValueError("need at least one calendar")
        dates = frozenset.intersection(*(c.dates for c in calendars))
        names = {d: calendars[0].name_of(d) for d in dates}
        return cls(RegionId(region), dates, names)

    def write(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for d in sorted(self.dates):
                fh.write(f"{d.isoformat()}  # {self.name_of(d)}\n" if d in self.names else f"{d.isoformat()}\n")

    def local_days(self, start: int, end: int) -> np.ndarray:
        return _local_days(self.timezone, int(start), int(end))

    def holiday_mask(self, start: int, end: int) -> np.ndarray:
        days = self.local_days(start, end)
        return np.isin(days, self._day_numbers())

    def weekend_or_holiday_mask(self, start: int, end: int) -> np.ndarray:
        """True where the hour falls on a local Saturday/Sunday or holiday."""
        days = self.local_days(start, end)
        weekday = (days + 3) % 7  # 1970-01-01 was a Thursday; Monday == 0
        return (weekday >= 5) | np.isin(days, self._day_numbers())

    def _day_numbers(self) -> np.ndarray:
        return _day_numbers(self.dates)


@lru_cache(maxsize=64)
def _day_numbers(dates: frozenset) -> np.ndarray:
    epoch = dt.date(1970, 1, 1)
    return np.array(sorted((d - epoch).days for d in dates), dtype=np.int64)


def day_type(ts, cal: HolidayCalendar) -> DayType:
    h = to_hour(ts)
    if cal.weekend_or_holiday_mask(h, h + 1)[0]:
        return DayType.WEEKEND_OR_HOLIDAY
    return DayType.WEEKDAY


# ---------------------------------------------------------------------------
# dataset

# canonical CSV column -> (dataset attribute, unit, mandatory)
COLUMNS = {
    "inertia_mvas": ("target", Unit.MVAS, True),
    "hydro_inertia_mvas": ("hydro_inertia", Unit.MVAS, False),
    "demand_fc_mw": ("demand_fc", Unit.MW, True),
    "wind_fc_mw": ("wind_fc", Unit.MW, True),
    "solar_fc_mw": ("solar_fc", Unit.MW, True),
    "ic_flow_mw": ("ic_flow", Unit.MW, True),
    "demand_mw": ("demand_actual", Unit.MW, False),
    "wind_mw": ("wind_actual", Unit.MW, False),
    "solar_mw": ("solar_actual", Unit.MW, False),
}
_SERIES_FIELDS = tuple(attr for attr, _, _ in COLUMNS.values())


@dataclass(frozen=True, eq=False)
class InertiaDataset:
    """Aligned bundle of the model inputs and target for one region."""

    region: RegionId
    target: HourlySeries
    demand_fc: HourlySeries
    wind_fc: HourlySeries
    solar_fc: HourlySeries
    ic_flow: HourlySeries
    calendar: HolidayCalendar
    hydro_inertia: HourlySeries | None = None
    demand_actual: HourlySeries | None = None
    wind_actual: HourlySeries | None = None
    solar_actual: HourlySeries | None = None

    def __post_init__(self):
        object.__setattr__(self, "region", RegionId(self.region))
        for name, s in self.series().items():
            if s.start != self.target.start or len(s) != len(self.target):
                raise IntegrityError(f"series {name!r} is not aligned with the target")

    @property
    def start(self) -> int:
        return self.target.start

    @property
    def end(self) -> int:
        return self.target.end

    @property
    def hours(self) -> np.ndarray:
        return self.target.hours

    def series(self) -> dict[str, HourlySeries]:
        """Present series keyed by dataset attribute name."""
        return {f: getattr(self, f) for f in _SERIES_FIELDS if getattr(self, f) is not None}

    def replace(self, **changes) -> InertiaDataset:
        return dataclasses.replace(self, **changes)

    def restrict(self, start: int, end: int) -> InertiaDataset:
        """View of the dataset over ``[start, end)``; must lie inside the dataset range."""
        if not (self.start <= start < end <= self.end):
            raise SplitError(f"interval [{format_hour(start)}, {format_hour(end)}) outside dataset range")
        lo, hi = start - self.start, end - self.start
        changes = {
            name: HourlySeries(s.name, s.unit, start, s.values[lo:hi]) for name, s in self.series().items()
        }
        return dataclasses.replace(self, **changes)

    def equals(self, other: InertiaDataset) -> bool:
        mine, theirs = self.series(), other.series()
        return (
            self.region == other.region
            and mine.keys() == theirs.keys()
            and all(mine[k].equals(theirs[k]) for k in mine)
        )


@dataclass(frozen=True)
class SplitSpec:
    """Half-open train and test intervals in hour stamps."""

    train_start: int
    train_end: int
    test_start: int
    test_end: int

    def __post_init__(self):
        for f in ("train_start", "train_end", "test_start", "test_end"):
            object.__setattr__(self, f, to_hour(getattr(self, f)))
        if self.train_end <= self.train_start:
            raise SplitError("empty training interval")
        if self.test_end <= self.test_start:
            raise SplitError("empty test interval")
        if self.train_end > self.test_start:
            raise SplitError("training interval overlaps the test interval")

    @property
    def train(self) -> tuple[int, int]:
        return self.train_start, self.train_end

    @property
    def test(self) -> tuple[int, int]:
        return self.test_start, self.test_end

    def to_dict(self) -> dict:
        return {"train": [format_hour(self.train_start), format_hour(self.train_end)],
                "test": [format_hour(self.test_start), format_hour(self.test_end)]}


def split(ds: InertiaDataset, spec: SplitSpec) -> tuple[InertiaDataset, InertiaDataset]:
    for lo, hi in (spec.train, spec.test):
        if lo < ds.start or hi > ds.end:
            raise SplitError(f"interval [{format_hour(lo)}, {format_hour(hi)}) outside dataset range")
    return ds.restrict(*spec.train), ds.restrict(*spec.test)


# ---------------------------------------------------------------------------
# CSV I/O


def load_csv(
    path,
    region: RegionId | str | None = None,
    schema: Mapping[str, str] | None = None,
    units: Mapping[str, float] | None = None,
    calendar: HolidayCalendar | None = None,
) -> InertiaDataset:
    """Read one wide per-region CSV into an :class:`InertiaDataset`.

    ``schema`` maps canonical column names to the file's header names and
    ``units`` maps canonical names to a multiplicative factor converting the
    file's unit into MVA·s / MW.  Hours missing from the file become gaps.
    """
    path = Path(path)
    if region is None:
        region = RegionId(path.stem) if path.stem in RegionId.__members__ else RegionId.NORDIC_TOTAL
    region = RegionId(region)
    schema = {c: c for c in COLUMNS} | dict(schema or {})
    schema.setdefault("timestamp", "timestamp")
    units = dict(units or {})
    unknown = set(units) - set(COLUMNS)
    if unknown:
        raise SchemaError(f"unit map names unknown columns {sorted(unknown)}")

    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise SchemaError(f"{path}: empty file") from None
        position = {h: i for i, h in enumerate(header)}
        if schema["timestamp"] not in position:
            raise SchemaError(f"{path}: missing timestamp column {schema['timestamp']!r}")
        present = [c for c in COLUMNS if schema[c] in position]
        missing = [schema[c] for c, (_, _, mandatory) in COLUMNS.items() if mandatory and c not in present]
        if missing:
            raise SchemaError(f"{path}: missing mandatory column(s) {missing}")
        ts_col = position[schema["timestamp"]]
        cols = [position[schema[c]] for c in present]

        rows: dict[int, tuple] = {}
        for rowno, record in enumerate(reader, start=2):
            if not record or all(not cell.strip() for cell in record):
                continue
            if len(record) != len(header):
                raise ParseError(f"expected {len(header)} fields, got {len(record)}", row=rowno)
            try:
                hour = to_hour(record[ts_col])
            except (ValueError, TypeError):
                raise ParseError(f"malformed timestamp {record[ts_col]!r}", row=rowno) from None
            values = tuple(_parse_cell(record[i], rowno) for i in cols)
            prior = rows.get(hour)
            if prior is not None and not np.array_equal(prior, values, equal_nan=True):
                raise IntegrityError(f"row {rowno}: duplicate timestamp {format_hour(hour)} with conflicting values")
            rows[hour] = values

    if not rows:
        raise DataError(f"{path}: no data rows")
    start, end = min(rows), max(rows) + 1
    table = np.full((end - start, len(present)), np.nan)
    for hour, values in rows.items():
        table[hour - start] = values
    series = {}
    for j, canonical in enumerate(present):
        attr, unit, _ = COLUMNS[canonical]
        values = table[:, j] * units.get(canonical, 1.0)
        if unit is Unit.MVAS and np.any(values[~np.isnan(values)] < 0):
            bad = int(np.flatnonzero(values < 0)[0]) + start
            raise IntegrityError(f"{path}: negative inertial energy in {canonical!r} at {format_hour(bad)}")
        series[attr] = HourlySeries(canonical, unit, start, values)
    return InertiaDataset(region=region, calendar=calendar or HolidayCalendar.default(region), **series)


def _parse_cell(cell: str, rowno: int) -> float:
    cell = cell.strip()
    if not cell:
        return math.nan
    try:
        value = float(cell)
    except ValueError:
        raise ParseError(f"non-numeric value {cell!r}", row=rowno) from None
    if math.isinf(value):
        raise ParseError(f"infinite value {cell!r}", row=rowno)
    return value


def write_csv(ds: InertiaDataset, path) -> None:
    """Write a dataset using the canonical schema; gaps become empty cells."""
    present = [(c, getattr(ds, attr)) for c, (attr, _, _) in COLUMNS.items() if getattr(ds, attr) is not None]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["timestamp"] + [c for c, _ in present])
        for i, hour in enumerate(range(ds.start, ds.end)):
            writer.writerow([format_hour(hour)] + [_format_cell(s.values[i]) for _, s in present])


def _format_cell(value: float) -> str:
    return "" if math.isnan(value) else repr(float(value))


def load_dataset_dir(directory, regions: Sequence[RegionId | str] | None = None) -> dict[RegionId, InertiaDataset]:
    """Load ``<dir>/<REGION>.csv`` files, using ``<dir>/holidays/<REGION>.txt`` when present."""
    directory = Path(directory)
    wanted = [RegionId(r) for r in regions] if regions is not None else list(RegionId)
    out = {}
    for region in wanted:
        path = directory / f"{region.value}.csv"
        if not path.exists():
            if regions is not None:
                raise DataError(f"dataset file {path} not found")
            continue
        hol = directory / "holidays" / f"{region.value}.txt"
        cal = HolidayCalendar.load(hol, region) if hol.exists() else HolidayCalendar.default(region)
        out[region] = load_csv(path, region=region, calendar=cal)
    return out
