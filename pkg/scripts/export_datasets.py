#!/usr/bin/env python3
"""Export the three UCI benchmark datasets to CSV files under ``datasets/``.

The UCI archive is not reachable from every machine, so the data is taken from
two PyPI distributions that ship copies of it:

* ``keel-ds`` wheel: Statlog Australian credit (690 x 14) and Connectionist
  Bench Sonar (208 x 60).
* ``SurvSet`` wheel: Wisconsin Prognostic Breast Cancer, WPBC (198 rows).

Neither package needs to be installed (keel-ds pins an old numpy); fetch the
wheels with

    pip download keel-ds SurvSet --no-deps -d /tmp/wheels

and run ``python scripts/export_datasets.py /tmp/wheels``. Reading the WPBC
pickle needs pandas.

WPBC rows with a missing lymph-node count are dropped (4 rows), leaving
194 x 33: recurrence time, the 30 nucleus measurements, tumour size and
lymph-node count. The label is the outcome, N (non-recurrent) or R (recurrent).
"""

from __future__ import annotations

import argparse
import csv
import io
import pickle
import sys
import zipfile
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def _wheel(directory: Path, prefix: str) -> zipfile.ZipFile:
    matches = sorted(directory.glob(f"{prefix}*.whl"))
    if not matches:
        sys.exit(f"no {prefix}*.whl in {directory}")
    return zipfile.ZipFile(matches[-1])


def _keel_rows(wheel: zipfile.ZipFile, name: str) -> list[list[str]]:
    text = wheel.read(f"keel_ds/data/balanced/raw/{name}.dat").decode()
    return [[v.strip() for v in line.split(",")] for line in text.splitlines()
            if line.strip() and not line.startswith("@")]


def _write(path: Path, header: list[str], rows: list[list[str]]) -> None:
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    print(f"wrote {path} ({len(rows)} rows, {len(header) - 1} features)")


def export(wheels: Path, out: Path) -> None:
    out.mkdir(parents=True, exist_ok=True)
    keel = _wheel(wheels, "keel_ds")

    rows = _keel_rows(keel, "australian")
    _write(out / "australian.csv", [f"A{i}" for i in range(1, 15)] + ["class"], rows)

    rows = _keel_rows(keel, "sonar")
    _write(out / "sonar.csv", [f"Band{i}" for i in range(1, 61)] + ["class"], rows)

    survset = _wheel(wheels, "survset")
    frame = pickle.load(io.BytesIO(survset.read("SurvSet/resources/pickles/wpbc.pickle")))
    frame = frame.dropna()
    features = ["time"] + [c for c in frame.columns if c.startswith("num_")]
    header = [c.removeprefix("num_") for c in features] + ["outcome"]
    rows = [[repr(float(v)) for v in rec[features]] + ["R" if rec["event"] == 1 else "N"]
            for _, rec in frame.iterrows()]
    _write(out / "wpbc.csv", header, rows)


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("wheels", type=Path, help="directory holding the keel-ds and SurvSet wheels")
    parser.add_argument("--out", type=Path, default=ROOT / "datasets")
    args = parser.parse_args(argv)
    export(args.wheels, args.out)


if __name__ == "__main__":
    main()
