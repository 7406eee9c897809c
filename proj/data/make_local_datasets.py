#!/usr/bin/env python3
"""Regenerate the small datasets committed under data/.

iris.csv and breast_cancer.csv are the UCI Iris and Wisconsin Diagnostic
Breast Cancer datasets, written from the copies bundled with scikit-learn so
no network access is needed. xor.csv is the canonical 4-row XOR truth table.
"""

import os

from sklearn.datasets import load_breast_cancer, load_iris

HERE = os.path.dirname(os.path.abspath(__file__))


def snake(name: str) -> str:
    return (
        name.replace(" (cm)", "_cm")
        .replace(" ", "_")
        .replace("(", "")
        .replace(")", "")
        .lower()
    )


def write_csv(path, feature_names, rows, labels, class_names):
    with open(path, "w") as f:
        f.write(",".join(feature_names) + ",class\n")
        for row, label in zip(rows, labels):
            values = ",".join(repr(float(v)) for v in row)
            f.write(f"{values},{class_names[label]}\n")
    print(f"wrote {path}: {len(rows)} rows, {len(feature_names)} features")


def main():
    iris = load_iris()
    write_csv(
        os.path.join(HERE, "iris.csv"),
        [snake(n) for n in iris.feature_names],
        iris.data,
        iris.target,
        list(iris.target_names),
    )

    bc = load_breast_cancer()
    write_csv(
        os.path.join(HERE, "breast_cancer.csv"),
        [snake(n) for n in bc.feature_names],
        bc.data,
        bc.target,
        list(bc.target_names),
    )

    with open(os.path.join(HERE, "xor.csv"), "w") as f:
        f.write("0,0,0\n0,1,1\n1,0,1\n1,1,0\n")
    print("wrote xor.csv: 4 rows")


if __name__ == "__main__":
    main()
