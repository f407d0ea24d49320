#!/usr/bin/env python3
"""End-to-end demo on generated data.

Writes a 30-day synthetic energy CSV (one pv-like device tracking
temperature linearly, one noisy appliance) and matching TMAX/PRCP
observations, uplifts both to Turtle, runs the day-join query, and
produces the correlation report plus scatter exports.

Usage: python scripts/run_demo.py [workdir]
"""

from __future__ import annotations

import random
import sys
from datetime import datetime, timedelta, timezone
from decimal import Decimal
from pathlib import Path

from energykg.cli import cmd_analyze, cmd_climate, cmd_query, cmd_uplift
from energykg.config import load_config

STATION = "GHCND:GME00102404"

JOIN_QUERY = """\
BASE <http://jresearch.ucd.ie/climate-kg/>
PREFIX seas: <https://w3id.org/seas/>
PREFIX qudt: <http://qudt.org/1.1/schema/qudt#>
PREFIX prov: <http://www.w3.org/ns/prov#>
PREFIX sosa: <http://www.w3.org/ns/sosa/>

SELECT ?eval ?val ?maxTprt ?date
FROM <urn:x-arq:DefaultGraph>
FROM NAMED <graph/cossmic>
WHERE
{
  ?obsv a <ca/class/Observation> ;
        <ca/property/sourceStation> <resource/station/GHCND:GME00102404> ;
        sosa:resultTime ?date ;
        sosa:hasResult/qudt:numericValue ?maxTprt ;
        sosa:hasResult/<ca/property/withDataType> <resource/datatype/TMAX> .
  GRAPH <graph/cossmic>
  {
    <resource/cossmic/DE_KN_COSSMIC> <ca/property/retrieveWeatherFrom> <resource/station/GHCND:GME00102404>.
    <resource/cossmic/DE_KN_residential1_pv> seas:evaluation ?eval.
    ?eval prov:generatedAtTime ?edate;
          seas:evaluatedValue/qudt:numericalValue ?val.
  }
  FILTER (year(?date)=year(?edate) && month(?date)=month(?edate) && day(?date)=day(?edate))
}
LIMIT 5
"""


def generate_inputs(workdir: Path) -> tuple[Path, Path]:
    rnd = random.Random(7)
    days = [datetime(2016, 4, 30, tzinfo=timezone.utc) + timedelta(days=i) for i in range(31)]
    pv_counter = Decimal("500")
    freezer_counter = Decimal("120")
    energy = ["utc_timestamp,DE_KN_residential1_pv,DE_KN_residential1_freezer"]
    climate = ["station,date,datatype,value"]
    for i, day in enumerate(days):
        tmax = Decimal(rnd.randint(80, 260)) / 10
        if i > 0:
            pv_counter += Decimal("0.5") * tmax + 3
            freezer_counter += Decimal("0.8") + Decimal(rnd.randint(-30, 30)) / 100
            climate.append(f"{STATION},{day.date().isoformat()},TMAX,{tmax}")
            climate.append(f"{STATION},{day.date().isoformat()},PRCP,{Decimal(rnd.randint(0, 120)) / 10}")
        stamp = day.strftime("%Y-%m-%dT23:00:00Z")
        energy.append(f"{stamp},{pv_counter},{freezer_counter}")
    energy_path = workdir / "energy.csv"
    energy_path.write_text("\n".join(energy) + "\n")
    climate_path = workdir / "climate.csv"
    climate_path.write_text("\n".join(climate) + "\n")
    return energy_path, climate_path


def main() -> None:
    workdir = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("demo_out")
    workdir.mkdir(parents=True, exist_ok=True)
    config = load_config(cli_overrides={"out": str(workdir)})

    energy_csv, climate_csv = generate_inputs(workdir)
    print(f"inputs: {energy_csv}, {climate_csv}")

    cossmic_ttl = cmd_uplift(str(energy_csv), config)
    climate_ttl = cmd_climate(str(climate_csv), config)
    print(f"uplifted: {cossmic_ttl}, {climate_ttl}")

    print("\nfirst five joined rows:")
    print(cmd_query([cossmic_ttl, climate_ttl], JOIN_QUERY, config))

    print("report and scatter files:")
    for path in cmd_analyze([cossmic_ttl, climate_ttl], config):
        print(f"  {path}")
    print(f"\nreport.tsv:\n{(workdir / 'report.tsv').read_text()}")


if __name__ == "__main__":
    main()
