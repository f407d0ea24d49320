"""Device-level correlation of daily energy against climate observations.

The alignment runs the day-matching join query against the store, so the
analysis exercises exactly the data an external endpoint client would
see. Correlations are plain Pearson coefficients over the inner-joined
daily pairs.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from datetime import date
from decimal import Decimal
from enum import Enum
from typing import Optional, Sequence

from .dataset import ANY, Dataset
from .errors import EnergyKgError
from .headings import DeviceHeading, parse_heading
from .namespaces import DEFAULT_BASE, ca_property, cossmic_graph
from .sparql import evaluate, parse_query
from .terms import Iri, Literal, parse_datetime, parse_numeric


class AnalysisError(EnergyKgError):
    """Alignment or correlation input problem."""


class UndefinedCorrelationError(AnalysisError):
    """Zero variance on one side; the coefficient does not exist."""


@dataclass(frozen=True)
class AlignedSeries:
    device: DeviceHeading
    climate_code: str
    pairs: tuple[tuple[date, Decimal, Decimal], ...]
    auxiliary: dict[str, tuple[Optional[Decimal], ...]] = field(default_factory=dict)

    def energy(self) -> list[float]:
        return [float(v) for _, v, _ in self.pairs]

    def climate(self) -> list[float]:
        return [float(v) for _, _, v in self.pairs]


class CategoryKind(str, Enum):
    PV = "pv"
    REFRIGERATOR_FREEZER = "refrigerator_freezer"
    GRID_IMPORT = "grid_import"
    GRID_EXPORT = "grid_export"
    HEAT_PUMP = "heat_pump"
    CIRCULATION_PUMP = "circulation_pump"
    OTHER = "other"


@dataclass(frozen=True)
class DeviceCategory:
    kind: CategoryKind
    label: Optional[str] = None


def categorize(heading: DeviceHeading) -> DeviceCategory:
    segments = heading.device_segments
    if segments[0] == "pv":
        return DeviceCategory(CategoryKind.PV)
    if segments[0] in ("refrigerator", "freezer"):
        return DeviceCategory(CategoryKind.REFRIGERATOR_FREEZER)
    if segments == ("grid", "import"):
        return DeviceCategory(CategoryKind.GRID_IMPORT)
    if segments == ("grid", "export"):
        return DeviceCategory(CategoryKind.GRID_EXPORT)
    if segments == ("heat", "pump"):
        return DeviceCategory(CategoryKind.HEAT_PUMP)
    if segments == ("circulation", "pump"):
        return DeviceCategory(CategoryKind.CIRCULATION_PUMP)
    return DeviceCategory(CategoryKind.OTHER, "_".join(segments))


# -- Pearson correlation -----------------------------------------------------


def pcc(x: Sequence[float], y: Sequence[float]) -> float:
    """Pearson correlation coefficient, clamped into [-1, 1]."""
    if len(x) != len(y):
        raise AnalysisError(f"length mismatch: {len(x)} vs {len(y)}")
    n = len(x)
    if n < 2:
        raise AnalysisError(f"need at least 2 samples, got {n}")
    mean_x = math.fsum(x) / n
    mean_y = math.fsum(y) / n
    dx = [value - mean_x for value in x]
    dy = [value - mean_y for value in y]
    sxx = math.fsum(d * d for d in dx)
    syy = math.fsum(d * d for d in dy)
    if sxx == 0.0 or syy == 0.0:
        raise UndefinedCorrelationError("undefined correlation: zero variance input")
    sxy = math.fsum(a * b for a, b in zip(dx, dy))
    r = sxy / math.sqrt(sxx * syy)
    return max(-1.0, min(1.0, r))


# -- alignment via the store -------------------------------------------------

_ALIGN_QUERY = """\
BASE <{base}>
PREFIX seas: <https://w3id.org/seas/>
PREFIX qudt: <http://qudt.org/1.1/schema/qudt#>
PREFIX prov: <http://www.w3.org/ns/prov#>
PREFIX sosa: <http://www.w3.org/ns/sosa/>

SELECT ?edate ?val ?cval ?date
FROM <urn:x-arq:DefaultGraph>
FROM NAMED <{graph}>
WHERE
{{
  ?obsv a <ca/class/Observation> ;
        <ca/property/sourceStation> <{station}> ;
        sosa:resultTime ?date ;
        sosa:hasResult/qudt:numericValue ?cval ;
        sosa:hasResult/<ca/property/withDataType> <resource/datatype/{code}> .
  GRAPH <{graph}>
  {{
    <{network}> <ca/property/retrieveWeatherFrom> <{station}> .
    <{device}> seas:evaluation ?eval .
    ?eval prov:generatedAtTime ?edate ;
          seas:evaluatedValue/qudt:numericalValue ?val .
  }}
  FILTER (year(?date)=year(?edate) && month(?date)=month(?edate) && day(?date)=day(?edate))
}}
"""

_CLIMATE_ONLY_QUERY = """\
BASE <{base}>
PREFIX qudt: <http://qudt.org/1.1/schema/qudt#>
PREFIX sosa: <http://www.w3.org/ns/sosa/>

SELECT ?date ?cval
FROM <urn:x-arq:DefaultGraph>
WHERE
{{
  ?obsv a <ca/class/Observation> ;
        <ca/property/sourceStation> <{station}> ;
        sosa:resultTime ?date ;
        sosa:hasResult/qudt:numericValue ?cval ;
        sosa:hasResult/<ca/property/withDataType> <resource/datatype/{code}> .
}}
"""


def _linked_network(ds: Dataset, station: Iri, base: Iri, graph: Iri) -> Iri:
    links = ds.match(ANY, ca_property(base, "retrieveWeatherFrom"), station, graph)
    if not links:
        raise AnalysisError(f"network not linked to station {station.value}")
    subject = links[0].subject
    if not isinstance(subject, Iri):
        raise AnalysisError("network link subject is not an IRI")
    return subject


def _heading_from_iri(device: Iri, base: Iri) -> DeviceHeading:
    prefix = base.value + "resource/cossmic/"
    if not device.value.startswith(prefix):
        raise AnalysisError(f"device IRI {device.value} is not under {prefix}")
    return parse_heading(device.value[len(prefix):])


def climate_series(
    ds: Dataset, station: Iri, climate_code: str, base: Iri = DEFAULT_BASE
) -> dict[date, Decimal]:
    """Day-to-value map of one datatype's observations for a station."""
    query = parse_query(
        _CLIMATE_ONLY_QUERY.format(base=base.value, station=station.value, code=climate_code)
    )
    out: dict[date, Decimal] = {}
    for row in evaluate(ds, query):
        day = parse_datetime(_lex(row["date"])).date()
        out[day] = parse_numeric(_as_literal(row["cval"]))
    return out


def align(
    ds: Dataset,
    device: Iri,
    climate_code: str,
    station: Iri,
    base: Iri = DEFAULT_BASE,
    graph: Optional[Iri] = None,
    auxiliary: Sequence[str] = (),
) -> AlignedSeries:
    """Inner-join the device's daily readings with same-day observations."""
    g = cossmic_graph(base) if graph is None else graph
    network = _linked_network(ds, station, base, g)
    query = parse_query(
        _ALIGN_QUERY.format(
            base=base.value,
            graph=g.value,
            station=station.value,
            code=climate_code,
            network=network.value,
            device=device.value,
        )
    )
    rows = evaluate(ds, query)
    pairs: list[tuple[date, Decimal, Decimal]] = []
    seen: set[date] = set()
    for row in rows:
        day = parse_datetime(_lex(row["edate"])).date()
        if day in seen:
            raise AnalysisError(
                f"duplicate day {day.isoformat()} for {device.value}; "
                "store is not at daily resolution"
            )
        seen.add(day)
        pairs.append((day, parse_numeric(_as_literal(row["val"])), parse_numeric(_as_literal(row["cval"]))))
    pairs.sort(key=lambda pair: pair[0])

    aux: dict[str, tuple[Optional[Decimal], ...]] = {}
    for code in auxiliary:
        series = climate_series(ds, station, code, base)
        aux[code] = tuple(series.get(day) for day, _, _ in pairs)
    return AlignedSeries(_heading_from_iri(device, base), climate_code, tuple(pairs), aux)


def _lex(term) -> str:
    if not isinstance(term, Literal):
        raise AnalysisError(f"expected a literal, got {term!r}")
    return term.lexical


def _as_literal(term) -> Literal:
    if not isinstance(term, Literal):
        raise AnalysisError(f"expected a literal, got {term!r}")
    return term


# -- reports -----------------------------------------------------------------


@dataclass(frozen=True)
class CorrelationEntry:
    device: str
    climate_code: str
    pcc: float
    n: int


@dataclass
class CorrelationReport:
    climate_code: str
    threshold: float
    entries: list[CorrelationEntry]
    warnings: list[str]
    category_stats: dict[str, dict[str, float]]


def _quartiles(values: list[float]) -> dict[str, float]:
    ordered = sorted(values)
    n = len(ordered)

    def at(q: float) -> float:
        if n == 1:
            return ordered[0]
        position = q * (n - 1)
        low = math.floor(position)
        high = math.ceil(position)
        if low == high:
            return ordered[low]
        weight = position - low
        return ordered[low] * (1 - weight) + ordered[high] * weight

    return {
        "count": float(n),
        "min": ordered[0],
        "q1": at(0.25),
        "median": at(0.5),
        "q3": at(0.75),
        "max": ordered[-1],
    }


def correlation_table(
    ds: Dataset,
    devices: Sequence[Iri],
    climate_code: str,
    threshold: float,
    station: Iri,
    base: Iri = DEFAULT_BASE,
    graph: Optional[Iri] = None,
    min_samples: int = 2,
) -> CorrelationReport:
    """Per-device coefficients, filtered to |pcc| >= threshold.

    Devices with undefined correlations or too few joined days are
    excluded and listed in the warnings section.
    """
    if not (0.0 <= threshold <= 1.0):
        raise AnalysisError(f"threshold must be within [0, 1], got {threshold}")
    entries: list[CorrelationEntry] = []
    warnings: list[str] = []
    by_category: dict[str, list[float]] = {}
    for device in devices:
        series = align(ds, device, climate_code, station, base, graph)
        raw = series.device.raw
        if len(series.pairs) < min_samples:
            warnings.append(f"{raw}: only {len(series.pairs)} joined days, need {min_samples}")
            continue
        try:
            value = pcc(series.energy(), series.climate())
        except UndefinedCorrelationError as exc:
            warnings.append(f"{raw}: {exc}")
            continue
        kind = categorize(series.device).kind.value
        by_category.setdefault(kind, []).append(value)
        if abs(value) >= threshold:
            entries.append(CorrelationEntry(raw, climate_code, value, len(series.pairs)))
    entries.sort(key=lambda entry: entry.device)
    stats = {kind: _quartiles(values) for kind, values in sorted(by_category.items())}
    return CorrelationReport(climate_code, threshold, entries, warnings, stats)


def report_tsv(report: CorrelationReport) -> str:
    lines = ["device\tdatatype\tpcc\tn"]
    for entry in report.entries:
        lines.append(f"{entry.device}\t{entry.climate_code}\t{entry.pcc:.2f}\t{entry.n}")
    return "\n".join(lines) + "\n"


def report_json(report: CorrelationReport) -> str:
    payload = {
        "climate_code": report.climate_code,
        "threshold": report.threshold,
        "entries": [
            {
                "device": entry.device,
                "datatype": entry.climate_code,
                "pcc": entry.pcc,
                "pcc_display": f"{entry.pcc:.2f}",
                "n": entry.n,
            }
            for entry in report.entries
        ],
        "warnings": report.warnings,
        "categories": report.category_stats,
    }
    return json.dumps(payload, indent=2, ensure_ascii=False) + "\n"


def scatter_export(series: AlignedSeries) -> str:
    """CSV rows of day, energy and climate value plus optional precipitation."""
    if not series.pairs:
        raise AnalysisError("cannot export an empty series")
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["device", "date", "energy_kwh", series.climate_code, "prcp"])
    prcp = series.auxiliary.get("PRCP", (None,) * len(series.pairs))
    for (day, energy, climate), extra in zip(series.pairs, prcp):
        writer.writerow(
            [
                series.device.raw,
                day.isoformat(),
                format(energy, "f"),
                format(climate, "f"),
                "" if extra is None else format(extra, "f"),
            ]
        )
    return buffer.getvalue()
