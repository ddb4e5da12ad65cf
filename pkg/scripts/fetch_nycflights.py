#!/usr/bin/env python3
"""Fetch the 2013 New York City flights table and build the interval dataset.

Downloads the raw flights CSV (about 30 MB), keeps departure delay, arrival
delay, air time, and distance, aggregates by month and carrier with a 5%
trim on each tail, drops rows with degenerate cells, and writes

    nycflights_intervals.csv
    nycflights_scaled.csv

into the target directory (default: $IVDA_DATA_DIR, falling back to
./external_data). Point IVDA_DATA_DIR at that directory so the optional
reproduction test picks the files up:

    python scripts/fetch_nycflights.py
    IVDA_DATA_DIR=./external_data pytest tests/test_acceptance.py -k nyflights

Requires network access; nothing in the test suite calls this script.
"""

from __future__ import annotations

import csv
import io
import os
import sys
import urllib.request
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from ivda.ingest import MicroRecord, aggregate, write_interval_csv, write_scaled_csv

URL = "https://raw.githubusercontent.com/tidyverse/nycflights13/main/data-raw/flights.csv"
VARIABLES = ("dep_delay", "arr_delay", "air_time", "distance")


def main():
    target = Path(os.environ.get("IVDA_DATA_DIR", "external_data"))
    target.mkdir(parents=True, exist_ok=True)

    print(f"downloading {URL} ...")
    with urllib.request.urlopen(URL, timeout=120) as response:
        text = response.read().decode("utf-8")

    records = []
    reader = csv.DictReader(io.StringIO(text))
    kept = 0
    for row in reader:
        try:
            values = {name: float(row[name]) for name in VARIABLES}
        except (ValueError, TypeError, KeyError):
            continue        # rows with missing fields are skipped
        key = (row["month"], row["carrier"])
        for name, value in values.items():
            records.append(MicroRecord(key=key, variable=name, value=value))
        kept += 1
    print(f"parsed {kept} flights")

    result = aggregate(records, trim=0.05)
    print(f"aggregated into {result.frame.n} month x carrier observations "
          f"({len(result.report.dropped_rows)} rows dropped)")
    write_interval_csv(result.frame, target / "nycflights_intervals.csv")
    write_scaled_csv(result.scaled, target / "nycflights_scaled.csv")
    print(f"wrote {target}/nycflights_intervals.csv and nycflights_scaled.csv")
    print(f"export IVDA_DATA_DIR={target.resolve()} to enable the reproduction test")


if __name__ == "__main__":
    sys.exit(main())
