import io

import pytest

from resplan.accidents import (
    HeaderMismatchError,
    IncidentRecord,
    parse_accidents_csv,
    records_to_csv,
    render_incident_report,
)
from resplan.config import data_path
from resplan.errors import ResplanError

# Reference report text for the stalled-truck fixture record.
REFERENCE_REPORT = (
    "Accident ID: A-2760450, Source: Source2, Start Latitude: 43.090641, "
    "Start Longitude: -76.168594, Accident extent (miles): 0.49, "
    "Description: Entry ramp to I-81 Southbound from 7th North St closed due "
    "to stalled truck., Street: 7th North St, City: Liverpool, County: "
    "Onondaga, State: NY, ZipCode: 13088, Timezone: US/Eastern, "
    "Airport Code: KSYR, Temperature (F): 62.1, Humidity (%): 72.0, "
    "Pressure (inch): 29.86, Visibility (miles): 10.0, Wind Direction: WNW, "
    "Wind Speed (mph): 15.0, Weather Condition: Overcast, Traffic Signal, "
    "Sunrise/Sunset: Day, Civil Twilight: Day, Nautical Twilight: Day, "
    "Astronomical Twilight: Day, Start_Time_hour: 14, Start_Time_month: 6, "
    "Weather_Timestamp_hour: 14, Weather_Timestamp_month: 6"
)


@pytest.fixture(scope="module")
def fixture_records():
    return parse_accidents_csv(data_path("accidents.csv"))


def test_parse_fixture_subset(fixture_records):
    assert not fixture_records.errors
    record = fixture_records.by_id()["A-2760450"]
    assert record.city == "Liverpool"
    assert record.state == "NY"
    assert record.weather.wind_direction == "WNW"
    assert record.weather.wind_speed_mph == 15.0
    assert record.poi_flags == ("Traffic Signal",)
    assert record.severity is None  # the reference row carries no severity


def test_fixture_contains_all_referenced_incidents(fixture_records):
    ids = set(fixture_records.by_id())
    expected = {
        "A-2760450", "A-4259643", "A-5128843", "A-4227983", "A-4888575",
        "A-5968770", "A-6137133", "A-4428281", "A-4732415", "A-6060568",
        "A-3996497",
    }
    assert expected <= ids


def test_missing_weather_columns_become_absent():
    stream = io.StringIO("ID,Source,City\nA-1,Source1,Austin\n")
    parsed = parse_accidents_csv(stream)
    record = parsed.records[0]
    assert record.weather.temperature_f is None
    assert record.weather.condition is None
    assert record.city == "Austin"


def test_out_of_range_latitude_collected_as_row_error():
    stream = io.StringIO("ID,Start_Lat\nA-1,999\nA-2,43.0\n")
    parsed = parse_accidents_csv(stream)
    assert [r.id for r in parsed.records] == ["A-2"]
    assert len(parsed.errors) == 1
    assert parsed.errors[0].field == "start_lat"
    assert parsed.errors[0].line == 2


def test_header_mismatch():
    with pytest.raises(HeaderMismatchError):
        parse_accidents_csv(io.StringIO("Ident,City\nA-1,Austin\n"))


def test_error_budget_aborts():
    rows = "\n".join(f"A-{i},999" for i in range(5))
    stream = io.StringIO("ID,Start_Lat\n" + rows)
    with pytest.raises(ResplanError, match="budget"):
        parse_accidents_csv(stream, error_budget=2)


def test_column_permutation_is_irrelevant():
    a = parse_accidents_csv(io.StringIO("ID,City,State\nA-1,Austin,TX\n"))
    b = parse_accidents_csv(io.StringIO("State,ID,City\nTX,A-1,Austin\n"))
    assert a.records == b.records


def test_duplicate_ids_rejected():
    parsed = parse_accidents_csv(io.StringIO("ID\nA-1\nA-1\n"))
    assert len(parsed.records) == 1
    assert parsed.errors[0].field == "ID"


def test_render_reference_record_exactly(fixture_records):
    record = fixture_records.by_id()["A-2760450"]
    assert render_incident_report(record) == REFERENCE_REPORT


def test_render_minimal_record():
    record = IncidentRecord(id="A-9", description="Debris on road.")
    assert render_incident_report(record) == (
        "Accident ID: A-9, Description: Debris on road."
    )


def test_render_is_deterministic(fixture_records):
    record = fixture_records.by_id()["A-2760450"]
    assert render_incident_report(record) == render_incident_report(record)


def test_csv_round_trip(fixture_records):
    csv_text = records_to_csv(fixture_records.records)
    reparsed = parse_accidents_csv(io.StringIO(csv_text))
    assert not reparsed.errors
    assert reparsed.records == fixture_records.records
