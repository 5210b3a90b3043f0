import datetime as dt

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from inertia_forecast import (
    DayType,
    HolidayCalendar,
    HourlySeries,
    RegionId,
    SplitSpec,
    day_type,
    load_csv,
    resample_to_hourly,
    split,
    to_hour,
    write_csv,
)
from inertia_forecast.errors import IntegrityError, ParseError, ResampleError, SchemaError, SplitError
from inertia_forecast.timeseries import format_hour, utc_month

HEADER = "timestamp,inertia_mvas,demand_fc_mw,wind_fc_mw,solar_fc_mw,ic_flow_mw\n"


def write(tmp_path, body, header=HEADER, name="NORDIC_TOTAL.csv"):
    p = tmp_path / name
    p.write_text(header + body, encoding="utf-8")
    return p


def test_hour_stamps_round_trip():
    h = to_hour("2018-01-31T05:00:00Z")
    assert format_hour(h) == "2018-01-31T05:00:00Z"
    assert to_hour(dt.datetime(2018, 1, 31, 6, tzinfo=dt.timezone(dt.timedelta(hours=1)))) == h
    assert to_hour(dt.date(1970, 1, 2)) == 24
    with pytest.raises(ValueError):
        to_hour("2018-01-31T05:30:00Z")


def test_utc_month():
    hours = np.array([to_hour("2019-01-31T23:00:00Z"), to_hour("2019-02-01T00:00:00Z"), to_hour("2020-12-31T12:00:00Z")])
    assert utc_month(hours).tolist() == [1, 2, 12]


def test_load_three_rows_no_gaps(tmp_path):
    p = write(tmp_path, "2018-01-01T00:00:00Z,1,2,3,4,5\n"
                        "2018-01-01T01:00:00Z,1,2,3,4,5\n"
                        "2018-01-01T02:00:00Z,1,2,3,4,5\n")
    ds = load_csv(p)
    assert len(ds.demand_fc) == 3
    assert not ds.demand_fc.gaps.any()
    assert ds.region is RegionId.NORDIC_TOTAL


def test_missing_hour_becomes_gap(tmp_path):
    p = write(tmp_path, "2018-01-01T00:00:00Z,1,2,3,4,5\n2018-01-01T02:00:00Z,1,2,3,4,5\n")
    ds = load_csv(p)
    assert len(ds.target) == 3
    assert ds.target.gaps.tolist() == [False, True, False]


def test_row_order_irrelevant(tmp_path):
    a = load_csv(write(tmp_path, "2018-01-01T00:00:00Z,1,2,3,4,5\n2018-01-01T01:00:00Z,6,7,8,9,10\n", name="a.csv"))
    b = load_csv(write(tmp_path, "2018-01-01T01:00:00Z,6,7,8,9,10\n2018-01-01T00:00:00Z,1,2,3,4,5\n", name="b.csv"))
    assert a.equals(b)


def test_empty_cell_is_gap_and_optional_columns(tmp_path):
    header = HEADER.strip() + ",hydro_inertia_mvas,demand_mw\n"
    ds = load_csv(write(tmp_path, "2018-01-01T00:00:00Z,1,,3,4,5,6,7\n", header=header))
    assert np.isnan(ds.demand_fc.values[0])
    assert ds.hydro_inertia.values[0] == 6
    assert ds.demand_actual.values[0] == 7
    assert ds.wind_actual is None


def test_malformed_timestamp_reports_row(tmp_path):
    p = write(tmp_path, "2018-01-01T00:00:00Z,1,2,3,4,5\nnot-a-time,1,2,3,4,5\n")
    with pytest.raises(ParseError) as err:
        load_csv(p)
    assert err.value.row == 3


def test_conflicting_duplicate(tmp_path):
    p = write(tmp_path, "2018-01-01T00:00:00Z,1,2,3,4,5\n2018-01-01T00:00:00Z,1,2,3,4,6\n")
    with pytest.raises(IntegrityError):
        load_csv(p)
    # identical duplicates are tolerated
    q = write(tmp_path, "2018-01-01T00:00:00Z,1,2,3,4,5\n2018-01-01T00:00:00Z,1,2,3,4,5\n", name="q.csv")
    assert len(load_csv(q).target) == 1


def test_missing_mandatory_column(tmp_path):
    p = write(tmp_path, "2018-01-01T00:00:00Z,1,2,3,4\n", header="timestamp,inertia_mvas,demand_fc_mw,wind_fc_mw,solar_fc_mw\n")
    with pytest.raises(SchemaError):
        load_csv(p)


def test_schema_and_unit_maps(tmp_path):
    header = "time,E_GWs,demand_fc_mw,wind_fc_mw,solar_fc_mw,ic_flow_mw\n"
    p = write(tmp_path, "2018-01-01T00:00:00Z,200,2,3,4,5\n", header=header)
    ds = load_csv(p, schema={"timestamp": "time", "inertia_mvas": "E_GWs"}, units={"inertia_mvas": 1000.0})
    assert ds.target.values[0] == 200000.0


def test_negative_inertia_rejected(tmp_path):
    with pytest.raises(IntegrityError):
        load_csv(write(tmp_path, "2018-01-01T00:00:00Z,-1,2,3,4,5\n"))


def test_csv_round_trip(tmp_path, noisy_dataset):
    ds = noisy_dataset.restrict(noisy_dataset.start, noisy_dataset.start + 500)
    # punch a gap to check it survives
    target = ds.target.values.copy()
    target[17] = np.nan
    ds = ds.replace(target=HourlySeries(ds.target.name, ds.target.unit, ds.start, target))
    path = tmp_path / "NORDIC_TOTAL.csv"
    write_csv(ds, path)
    again = load_csv(path)
    assert again.equals(ds)


# -- resampling ---------------------------------------------------------------

def test_resample_mean_of_two_half_hours():
    s = resample_to_hourly([0, 1800], [10.0, 20.0], name="d", unit="MW")
    assert s.values.tolist() == [15.0]


def test_resample_mean_skips_gaps():
    s = resample_to_hourly([0, 1800], [10.0, np.nan], name="d", unit="MW")
    assert s.values.tolist() == [10.0]


def test_resample_first_and_empty_hour():
    t = np.arange(0, 3 * 3600, 1800)
    v = [1.0, 2.0, np.nan, np.nan, 5.0, 6.0]
    assert resample_to_hourly(t, v, name="d", unit="MW", reducer="first").values[[0, 2]].tolist() == [1.0, 5.0]
    assert np.isnan(resample_to_hourly(t, v, name="d", unit="MW").values[1])


def test_resample_irregular_spacing():
    with pytest.raises(ResampleError):
        resample_to_hourly([0, 60, 180], [1.0, 2.0, 3.0], name="d", unit="MW")
    with pytest.raises(ResampleError):
        resample_to_hourly([0, 7 * 60], [1.0, 2.0], name="d", unit="MW")


def test_resample_datetime64_input():
    t = np.arange("2018-01-01T00:00", "2018-01-01T02:00", dtype="datetime64[m]")
    s = resample_to_hourly(t, np.arange(120.0), name="d", unit="MW")
    assert s.start == to_hour("2018-01-01") and s.values.tolist() == [29.5, 89.5]


@settings(max_examples=50, deadline=None)
@given(c=st.floats(-1e6, 1e6, allow_nan=False), hours=st.integers(1, 30))
def test_resample_constant_is_constant(c, hours):
    t = np.arange(0, hours * 3600, 60)
    s = resample_to_hourly(t, np.full(len(t), c), name="d", unit="MW")
    assert np.allclose(s.values, c, rtol=1e-12, atol=1e-9)


# -- calendars and day types --------------------------------------------------

@pytest.fixture(scope="module")
def nordic_cal():
    return HolidayCalendar.default(RegionId.NORDIC_TOTAL)


def test_day_type_examples(nordic_cal):
    assert day_type("2018-02-03T12:00:00Z", nordic_cal) is DayType.WEEKEND_OR_HOLIDAY
    assert day_type("2018-01-01T12:00:00Z", nordic_cal) is DayType.WEEKEND_OR_HOLIDAY
    assert day_type("2018-01-03T12:00:00Z", nordic_cal) is DayType.WEEKDAY


def test_day_type_uses_local_civil_date(nordic_cal):
    # Good Friday 2018-03-30 starts at 2018-03-29T22:00Z in Stockholm (CEST, UTC+2).
    assert day_type("2018-03-29T22:00:00Z", nordic_cal) is DayType.WEEKEND_OR_HOLIDAY
    assert day_type("2018-03-29T21:00:00Z", nordic_cal) is DayType.WEEKDAY


def test_nordic_calendar_is_intersection():
    parts = [HolidayCalendar.default(r) for r in ("DK2", "FI", "NO", "SE")]
    common = HolidayCalendar.common(parts)
    assert common.dates == HolidayCalendar.default("NORDIC_TOTAL").dates
    assert dt.date(2018, 5, 17) in HolidayCalendar.default("NO")
    assert dt.date(2018, 5, 17) not in common


def test_holiday_file_parsing(tmp_path):
    p = tmp_path / "h.txt"
    p.write_text("# comment\n2018-12-25  # christmas\n\n2018-12-26\n", encoding="utf-8")
    cal = HolidayCalendar.load(p, "SE")
    assert cal.dates == {dt.date(2018, 12, 25), dt.date(2018, 12, 26)}
    assert cal.name_of(dt.date(2018, 12, 25)) == "christmas"
    p.write_text("2018-13-01\n", encoding="utf-8")
    with pytest.raises(ParseError):
        HolidayCalendar.load(p, "SE")


def test_day_type_disjunction_over_a_year():
    cal = HolidayCalendar(RegionId.SE, frozenset({dt.date(2019, 1, 1), dt.date(2019, 6, 6), dt.date(2019, 6, 8)}))
    start = to_hour("2019-01-01T00:00:00+01:00")
    mask = cal.weekend_or_holiday_mask(start, start + 8760)
    for i, h in enumerate(range(start, start + 8760)):
        local = dt.datetime.fromtimestamp(h * 3600, tz=dt.timezone.utc).astimezone(__import__("zoneinfo").ZoneInfo("Europe/Stockholm"))
        expected = local.weekday() >= 5 or local.date() in cal.dates
        assert mask[i] == expected, local


# -- split ----------------------------------------------------------------------

def test_split_table_windows(noisy_dataset):
    spec = SplitSpec("2019-01-01", "2020-01-01", "2020-01-01", "2020-07-01")
    train, test = split(noisy_dataset, spec)
    assert (train.start, train.end) == spec.train
    assert (test.start, test.end) == spec.test
    assert len(train.target) == 8760
    assert set(train.hours).isdisjoint(test.hours)


def test_split_errors(noisy_dataset):
    with pytest.raises(SplitError):
        SplitSpec("2019-01-01", "2019-01-01", "2020-01-01", "2020-02-01")
    with pytest.raises(SplitError):
        SplitSpec("2019-01-01", "2019-06-01", "2019-05-01", "2019-07-01")
    with pytest.raises(SplitError):
        split(noisy_dataset, SplitSpec("2017-01-01", "2018-06-01", "2019-01-01", "2019-02-01"))


@settings(max_examples=40, deadline=None)
@given(a=st.integers(0, 5000), la=st.integers(1, 3000), gap=st.integers(0, 500), lb=st.integers(1, 3000))
def test_split_lengths_sum(noisy_dataset, a, la, gap, lb):
    s = noisy_dataset.start + a
    spec = SplitSpec(s, s + la, s + la + gap, s + la + gap + lb)
    train, test = split(noisy_dataset, spec)
    assert len(train.target) + len(test.target) == la + lb
    assert train.end <= test.start
