"""US-Accidents record ingestion and incident report rendering.

The rendered report is the exact text block embedded in plan-generation
prompts: comma-separated "Label: value" fields in a fixed order, absent
fields omitted, point-of-interest flags rendered as bare flag names. Field
labels keep the source dataset's units ("Temperature (F)") because prompts
must match the dataset conventions.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Iterable

from .errors import ResplanError


class HeaderMismatchError(ResplanError):
    """The CSV header lacks the columns required to identify records."""


@dataclass(frozen=True)
class RowError:
    """One collected per-row parse diagnostic (not an exception)."""

    line: int
    field: str
    message: str


@dataclass(frozen=True)
class Weather:
    temperature_f: float | None = None
    humidity_pct: float | None = None
    pressure_inch: float | None = None
    visibility_miles: float | None = None
    wind_direction: str | None = None
    wind_speed_mph: float | None = None
    condition: str | None = None


@dataclass(frozen=True)
class Daylight:
    sunrise_sunset: str | None = None
    civil: str | None = None
    nautical: str | None = None
    astronomical: str | None = None


@dataclass(frozen=True)
class IncidentRecord:
    id: str
    source: str | None = None
    severity: int | None = None
    start_lat: float | None = None
    start_lng: float | None = None
    extent_miles: float | None = None
    description: str | None = None
    street: str | None = None
    city: str | None = None
    county: str | None = None
    state: str | None = None
    zipcode: str | None = None
    timezone: str | None = None
    airport_code: str | None = None
    weather: Weather = field(default_factory=Weather)
    poi_flags: tuple[str, ...] = ()
    daylight: Daylight = field(default_factory=Daylight)
    start_hour: int | None = None
    start_month: int | None = None
    weather_hour: int | None = None
    weather_month: int | None = None
    # source row for diagnostics; not part of record identity
    line: int | None = field(default=None, compare=False)


_POI_COLUMNS = (
    "Amenity", "Bump", "Crossing", "Give_Way", "Junction", "No_Exit", "Railway",
    "Roundabout", "Station", "Stop", "Traffic_Calming", "Traffic_Signal",
    "Turning_Loop",
)

_TRUE = {"true", "1", "yes"}


def _opt_str(row, key):
    value = row.get(key)
    if value is None:
        return None
    value = value.strip()
    return value or None


@dataclass
class ParsedAccidents:
    records: list[IncidentRecord]
    errors: list[RowError]

    def by_id(self) -> dict[str, IncidentRecord]:
        return {r.id: r for r in self.records}


def parse_accidents_csv(
    stream: IO[str] | str | Path, error_budget: int = 25
) -> ParsedAccidents:
    """Parse a US-Accidents style CSV, header-driven and column-order agnostic.

    Missing optional fields become None, never zero. Type and range
    violations are collected as RowError diagnostics (the offending record
    is dropped); parsing aborts only when the budget is exhausted.
    """
    if isinstance(stream, (str, Path)):
        with open(stream, newline="", encoding="utf-8") as handle:
            return parse_accidents_csv(handle, error_budget)

    reader = csv.DictReader(stream)
    if not reader.fieldnames or "ID" not in reader.fieldnames:
        raise HeaderMismatchError("CSV header must contain an 'ID' column")

    records: list[IncidentRecord] = []
    errors: list[RowError] = []
    seen_ids: set[str] = set()

    def fail(line: int, field_name: str, message: str) -> None:
        errors.append(RowError(line, field_name, message))
        if len(errors) > error_budget:
            raise ResplanError(
                f"aborted after {len(errors)} row errors (budget {error_budget})"
            )

    for line, row in enumerate(reader, start=2):
        rid = _opt_str(row, "ID")
        if not rid:
            fail(line, "ID", "missing record id")
            continue
        if rid in seen_ids:
            fail(line, "ID", f"duplicate record id {rid!r}")
            continue

        problems: list[RowError] = []

        def number(key, field_name, lo=None, hi=None, cast=float):
            raw = _opt_str(row, key)
            if raw is None:
                return None
            try:
                value = cast(raw)
            except ValueError:
                problems.append(RowError(line, field_name, f"not a number: {raw!r}"))
                return None
            if lo is not None and value < lo or hi is not None and value > hi:
                problems.append(
                    RowError(line, field_name, f"value {value} outside [{lo}, {hi}]")
                )
                return None
            return value

        record = IncidentRecord(
            id=rid,
            source=_opt_str(row, "Source"),
            severity=number("Severity", "severity", 1, 4, cast=int),
            start_lat=number("Start_Lat", "start_lat", -90, 90),
            start_lng=number("Start_Lng", "start_lng", -180, 180),
            extent_miles=number("Distance(mi)", "extent_miles", 0),
            description=_opt_str(row, "Description"),
            street=_opt_str(row, "Street"),
            city=_opt_str(row, "City"),
            county=_opt_str(row, "County"),
            state=_opt_str(row, "State"),
            zipcode=_opt_str(row, "Zipcode"),
            timezone=_opt_str(row, "Timezone"),
            airport_code=_opt_str(row, "Airport_Code"),
            weather=Weather(
                temperature_f=number("Temperature(F)", "temperature_f"),
                humidity_pct=number("Humidity(%)", "humidity_pct", 0, 100),
                pressure_inch=number("Pressure(in)", "pressure_inch", 0),
                visibility_miles=number("Visibility(mi)", "visibility_miles", 0),
                wind_direction=_opt_str(row, "Wind_Direction"),
                wind_speed_mph=number("Wind_Speed(mph)", "wind_speed_mph", 0),
                condition=_opt_str(row, "Weather_Condition"),
            ),
            poi_flags=tuple(
                col.replace("_", " ")
                for col in _POI_COLUMNS
                if (_opt_str(row, col) or "").lower() in _TRUE
            ),
            daylight=Daylight(
                sunrise_sunset=_opt_str(row, "Sunrise_Sunset"),
                civil=_opt_str(row, "Civil_Twilight"),
                nautical=_opt_str(row, "Nautical_Twilight"),
                astronomical=_opt_str(row, "Astronomical_Twilight"),
            ),
            start_hour=number("Start_Time_hour", "start_hour", 0, 23, cast=int),
            start_month=number("Start_Time_month", "start_month", 1, 12, cast=int),
            weather_hour=number("Weather_Timestamp_hour", "weather_hour", 0, 23, cast=int),
            weather_month=number("Weather_Timestamp_month", "weather_month", 1, 12, cast=int),
            line=line,
        )
        if problems:
            for problem in problems:
                fail(problem.line, problem.field, problem.message)
            continue
        seen_ids.add(rid)
        records.append(record)
    return ParsedAccidents(records=records, errors=errors)


def _fmt(value) -> str:
    return str(value)


def render_incident_report(record: IncidentRecord) -> str:
    """Render the canonical prompt text for one record.

    Deterministic; absent fields are omitted. POI flags appear between the
    weather condition and the daylight fields, as bare flag names.
    """
    parts: list[str] = [f"Accident ID: {record.id}"]

    def add(label, value):
        if value is not None:
            parts.append(f"{label}: {_fmt(value)}")

    add("Source", record.source)
    add("Severity", record.severity)
    add("Start Latitude", record.start_lat)
    add("Start Longitude", record.start_lng)
    add("Accident extent (miles)", record.extent_miles)
    add("Description", record.description)
    add("Street", record.street)
    add("City", record.city)
    add("County", record.county)
    add("State", record.state)
    add("ZipCode", record.zipcode)
    add("Timezone", record.timezone)
    add("Airport Code", record.airport_code)
    add("Temperature (F)", record.weather.temperature_f)
    add("Humidity (%)", record.weather.humidity_pct)
    add("Pressure (inch)", record.weather.pressure_inch)
    add("Visibility (miles)", record.weather.visibility_miles)
    add("Wind Direction", record.weather.wind_direction)
    add("Wind Speed (mph)", record.weather.wind_speed_mph)
    add("Weather Condition", record.weather.condition)
    parts.extend(record.poi_flags)
    add("Sunrise/Sunset", record.daylight.sunrise_sunset)
    add("Civil Twilight", record.daylight.civil)
    add("Nautical Twilight", record.daylight.nautical)
    add("Astronomical Twilight", record.daylight.astronomical)
    add("Start_Time_hour", record.start_hour)
    add("Start_Time_month", record.start_month)
    add("Weather_Timestamp_hour", record.weather_hour)
    add("Weather_Timestamp_month", record.weather_month)
    return ", ".join(parts)


def reports_to_jsonl(records: Iterable[IncidentRecord]) -> str:
    """JSON-lines batch of rendered reports: {"id", "report"} per line."""
    return "".join(
        json.dumps({"id": r.id, "report": render_incident_report(r)}) + "\n"
        for r in records
    )


_CSV_HEADER = [
    "ID", "Source", "Severity", "Start_Lat", "Start_Lng", "Distance(mi)",
    "Description", "Street", "City", "County", "State", "Zipcode", "Timezone",
    "Airport_Code", "Temperature(F)", "Humidity(%)", "Pressure(in)",
    "Visibility(mi)", "Wind_Direction", "Wind_Speed(mph)", "Weather_Condition",
    *_POI_COLUMNS,
    "Sunrise_Sunset", "Civil_Twilight", "Nautical_Twilight",
    "Astronomical_Twilight", "Start_Time_hour", "Start_Time_month",
    "Weather_Timestamp_hour", "Weather_Timestamp_month",
]


def records_to_csv(records: Iterable[IncidentRecord]) -> str:
    """CSV-equivalent of records, inverse of parse on present fields."""

    def cell(value):
        return "" if value is None else str(value)

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(_CSV_HEADER)
    for r in records:
        flags = {flag.replace(" ", "_") for flag in r.poi_flags}
        writer.writerow(
            [
                r.id, cell(r.source), cell(r.severity), cell(r.start_lat),
                cell(r.start_lng), cell(r.extent_miles), cell(r.description),
                cell(r.street), cell(r.city), cell(r.county), cell(r.state),
                cell(r.zipcode), cell(r.timezone), cell(r.airport_code),
                cell(r.weather.temperature_f), cell(r.weather.humidity_pct),
                cell(r.weather.pressure_inch), cell(r.weather.visibility_miles),
                cell(r.weather.wind_direction), cell(r.weather.wind_speed_mph),
                cell(r.weather.condition),
            ]
            + ["True" if col in flags else "False" for col in _POI_COLUMNS]
            + [
                cell(r.daylight.sunrise_sunset), cell(r.daylight.civil),
                cell(r.daylight.nautical), cell(r.daylight.astronomical),
                cell(r.start_hour), cell(r.start_month),
                cell(r.weather_hour), cell(r.weather_month),
            ]
        )
    return buf.getvalue()
