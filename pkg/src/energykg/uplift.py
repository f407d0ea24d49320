"""Uplift of tabular energy data into quads in the named cossmic graph.

Headings become topology quads (network, sites, grid, device links);
records become evaluation quads that a two-step evaluatedValue path can
traverse down to the numeric reading. IRIs are minted deterministically
so re-running the uplift is idempotent.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from datetime import datetime, timedelta, timezone
from decimal import Decimal, InvalidOperation
from enum import Enum
from typing import Optional, Sequence

from .errors import EnergyKgError
from .headings import DeviceHeading, DeviceRole, SiteKind, classify, parse_heading
from .namespaces import (
    DEFAULT_BASE,
    PROV,
    QUDT,
    RDF_TYPE,
    SEAS,
    cossmic_graph,
    device_resource,
)
from .terms import GraphName, Iri, Quad, datetime_literal, decimal_literal, parse_datetime

_ONE_DAY = timedelta(days=1)


class UpliftError(EnergyKgError):
    """Invalid energy table, heading mix or counter behaviour."""


class CounterMode(str, Enum):
    CUMULATIVE = "cumulative"
    INTERVAL = "interval"


@dataclass(frozen=True)
class EnergyRecord:
    device: DeviceHeading
    timestamp: datetime
    value: Decimal


@dataclass
class EnergyTable:
    timestamps: list[datetime]
    columns: dict[str, list[Optional[Decimal]]]
    counter_mode: CounterMode = CounterMode.CUMULATIVE

    def __post_init__(self) -> None:
        for heading, values in self.columns.items():
            if len(values) != len(self.timestamps):
                raise UpliftError(
                    f"column {heading!r} has {len(values)} values for "
                    f"{len(self.timestamps)} timestamps"
                )

    def records(self) -> list[EnergyRecord]:
        out = []
        for heading_text in self.columns:
            heading = parse_heading(heading_text)
            for ts, value in zip(self.timestamps, self.columns[heading_text]):
                if value is not None:
                    out.append(EnergyRecord(heading, ts, value))
        return out


# Columns the open power system data export carries besides the headings.
_PASSTHROUGH_COLUMNS = {"cet_cest_timestamp", "interpolated"}


def read_energy_csv(text: str, counter_mode: CounterMode = CounterMode.CUMULATIVE) -> EnergyTable:
    """Parse an energy CSV: utc_timestamp first, one column per heading."""
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise UpliftError("energy CSV is empty")
    if not header or header[0] != "utc_timestamp":
        raise UpliftError("energy CSV must start with a utc_timestamp column")
    keep = [
        i
        for i, name in enumerate(header[1:], start=1)
        if name not in _PASSTHROUGH_COLUMNS
    ]
    for i in keep:
        parse_heading(header[i])

    timestamps: list[datetime] = []
    columns: dict[str, list[Optional[Decimal]]] = {header[i]: [] for i in keep}
    for row_number, row in enumerate(reader, start=2):
        if not row or all(not cell for cell in row):
            continue
        if len(row) != len(header):
            raise UpliftError(f"row {row_number}: expected {len(header)} cells, got {len(row)}")
        try:
            ts = parse_datetime(row[0])
        except EnergyKgError as exc:
            raise UpliftError(f"row {row_number}: {exc}")
        if timestamps and ts <= timestamps[-1]:
            raise UpliftError(f"row {row_number}: timestamps not strictly increasing")
        timestamps.append(ts)
        for i in keep:
            cell = row[i].strip()
            if not cell:
                columns[header[i]].append(None)
                continue
            try:
                columns[header[i]].append(Decimal(cell))
            except InvalidOperation:
                raise UpliftError(
                    f"row {row_number}: column {header[i]!r} has non-numeric value {cell!r}"
                )
    return EnergyTable(timestamps, columns, counter_mode)


def to_daily(table: EnergyTable) -> EnergyTable:
    """Resample to one value per UTC day, timestamped at midnight.

    Cumulative counters are differenced day over day (a day without a
    previous-day reading is skipped); interval readings are summed within
    the day. A decreasing cumulative counter is an error.
    """
    daily: dict[str, dict[datetime, Decimal]] = {}
    all_days: set[datetime] = set()
    for heading, values in table.columns.items():
        series = [(ts, v) for ts, v in zip(table.timestamps, values) if v is not None]
        per_day: dict[datetime, Decimal] = {}
        if table.counter_mode is CounterMode.CUMULATIVE:
            last_by_day: dict[datetime, Decimal] = {}
            previous: Optional[Decimal] = None
            for ts, value in series:
                day = datetime(ts.year, ts.month, ts.day, tzinfo=timezone.utc)
                if previous is not None and value < previous:
                    raise UpliftError(
                        f"cumulative counter for {heading!r} decreased on "
                        f"{day.date().isoformat()} (counter reset?)"
                    )
                previous = value
                last_by_day[day] = value
            for day, value in last_by_day.items():
                before = day - _ONE_DAY
                if before in last_by_day:
                    per_day[day] = value - last_by_day[before]
        else:
            for ts, value in series:
                day = datetime(ts.year, ts.month, ts.day, tzinfo=timezone.utc)
                per_day[day] = per_day.get(day, Decimal(0)) + value
        daily[heading] = per_day
        all_days.update(per_day)

    days = sorted(all_days)
    columns = {
        heading: [per_day.get(day) for day in days] for heading, per_day in daily.items()
    }
    return EnergyTable(days, columns, table.counter_mode)


# -- IRI minting -------------------------------------------------------------


def mint_device_iri(heading: DeviceHeading, base: Iri = DEFAULT_BASE) -> Iri:
    return device_resource(base, heading.raw)


def compact_utc(instant: datetime) -> str:
    """Basic-format UTC timestamp, safe inside an IRI path segment."""
    return instant.astimezone(timezone.utc).strftime("%Y%m%dT%H%M%SZ")


def evaluation_iri(device: Iri, timestamp: datetime) -> Iri:
    return Iri(device.value + "/evaluation/" + compact_utc(timestamp))


# -- quad emission -----------------------------------------------------------


def topology_quads(
    headings: Sequence[DeviceHeading],
    base: Iri = DEFAULT_BASE,
    graph: Optional[GraphName] = None,
) -> set[Quad]:
    """Network, site, grid and device-link quads for a set of headings.

    All headings must share one country/city pair; the result does not
    depend on heading order.
    """
    if not headings:
        raise UpliftError("no headings to uplift")
    prefixes = {(h.country, h.city) for h in headings}
    if len(prefixes) > 1:
        raise UpliftError(f"headings mix countries/cities: {sorted(prefixes)}")
    g = cossmic_graph(base) if graph is None else graph

    first = headings[0]
    network = device_resource(base, first.network_name)
    grid = device_resource(base, first.grid_name)
    quads = {Quad(network, RDF_TYPE, SEAS.ElectricPowerDistributionNetwork, g)}

    for heading in headings:
        site = device_resource(base, heading.site_name)
        device = mint_device_iri(heading, base)
        quads.add(Quad(site, RDF_TYPE, SEAS.ElectricPowerSystem, g))
        if heading.site_kind is SiteKind.INDUSTRIAL:
            quads.add(Quad(site, RDF_TYPE, SEAS.IndustrialBuilding, g))
        quads.add(Quad(site, SEAS.subSystemOf, network, g))
        role = classify(heading)
        if role is DeviceRole.PRODUCER:
            quads.add(Quad(site, SEAS.producedElectricPower, device, g))
            quads.add(Quad(grid, SEAS.isPoweredBy, device, g))
            quads.add(Quad(grid, RDF_TYPE, SEAS.ElectricPowerTransmissionSystem, g))
        elif role is DeviceRole.GRID_IMPORT:
            quads.add(Quad(site, SEAS.isPoweredBy, device, g))
            quads.add(Quad(device, SEAS.subSystemOf, grid, g))
            quads.add(Quad(grid, RDF_TYPE, SEAS.ElectricPowerTransmissionSystem, g))
        elif role is DeviceRole.CONSUMER:
            quads.add(Quad(site, SEAS.consumedElectricPower, device, g))
            quads.add(Quad(device, RDF_TYPE, SEAS.ElectricPowerConsumer, g))
        # Grid export meters carry evaluations but no modelled topology.
    return quads


def evaluation_quads(
    records: Sequence[EnergyRecord],
    base: Iri = DEFAULT_BASE,
    graph: Optional[GraphName] = None,
) -> set[Quad]:
    """Five quads per record: evaluation node, type, time, value node, number."""
    g = cossmic_graph(base) if graph is None else graph
    seen: set[tuple[str, datetime]] = set()
    duplicates = []
    quads: set[Quad] = set()
    for record in records:
        key = (record.device.raw, record.timestamp)
        if key in seen:
            duplicates.append(key)
            continue
        seen.add(key)
        device = mint_device_iri(record.device, base)
        evaluation = evaluation_iri(device, record.timestamp)
        value_node = Iri(evaluation.value + "/value")
        quads.add(Quad(device, SEAS.evaluation, evaluation, g))
        quads.add(Quad(evaluation, RDF_TYPE, SEAS.ElectricPowerEvaluation, g))
        quads.add(Quad(evaluation, PROV.generatedAtTime, datetime_literal(record.timestamp), g))
        quads.add(Quad(evaluation, SEAS.evaluatedValue, value_node, g))
        quads.add(Quad(value_node, QUDT.numericalValue, decimal_literal(record.value), g))
    if duplicates:
        listing = ", ".join(f"{raw}@{ts.isoformat()}" for raw, ts in duplicates)
        raise UpliftError(f"duplicate (device, timestamp) records: {listing}")
    return quads
