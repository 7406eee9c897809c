#!/usr/bin/env python3
"""Fetch the larger UCI datasets that are not committed to the repository.

Downloads the Statlog Landsat satellite data (sat.trn / sat.tst) and converts
it to the CSV layout the CLI ingests (36 comma-separated features, class
token last):

    data/landsat_train.csv   4435 rows
    data/landsat_test.csv    2000 rows

Optionally (--original-wbc) also fetches the original 699-row Wisconsin
Breast Cancer file, dropping the id column and the 16 rows with missing
values.

Requires network access to archive.ics.uci.edu.
"""

import argparse
import os
import urllib.request

HERE = os.path.dirname(os.path.abspath(__file__))
BASE = "https://archive.ics.uci.edu/ml/machine-learning-databases"


def fetch(url: str) -> str:
    print(f"fetching {url}")
    with urllib.request.urlopen(url) as response:
        return response.read().decode("utf-8")


def convert_landsat(text: str, out_path: str) -> int:
    rows = 0
    with open(out_path, "w") as f:
        for line in text.splitlines():
            fields = line.split()
            if not fields:
                continue
            f.write(",".join(fields) + "\n")
            rows += 1
    print(f"wrote {out_path}: {rows} rows")
    return rows


def convert_original_wbc(text: str, out_path: str) -> int:
    rows = 0
    with open(out_path, "w") as f:
        for line in text.splitlines():
            fields = line.strip().split(",")
            if len(fields) != 11 or "?" in fields:
                continue
            f.write(",".join(fields[1:]) + "\n")  # drop the sample id
            rows += 1
    print(f"wrote {out_path}: {rows} rows")
    return rows


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--original-wbc", action="store_true",
                        help="also fetch the original 699-row Wisconsin Breast Cancer file")
    args = parser.parse_args()

    train = convert_landsat(fetch(f"{BASE}/statlog/satimage/sat.trn"),
                            os.path.join(HERE, "landsat_train.csv"))
    test = convert_landsat(fetch(f"{BASE}/statlog/satimage/sat.tst"),
                           os.path.join(HERE, "landsat_test.csv"))
    assert train == 4435, f"expected 4435 training rows, got {train}"
    assert test == 2000, f"expected 2000 test rows, got {test}"

    if args.original_wbc:
        convert_original_wbc(
            fetch(f"{BASE}/breast-cancer-wisconsin/breast-cancer-wisconsin.data"),
            os.path.join(HERE, "breast_cancer_original.csv"))


if __name__ == "__main__":
    main()
