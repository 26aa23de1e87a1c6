"""Convert the raw UCI Adult files into header-row CSVs.

Download ``adult.data`` and ``adult.test`` by hand from
https://archive.ics.uci.edu/ml/machine-learning-databases/adult/ and run::

    python scripts/prepare_adult.py /path/to/raw data/adult
"""

import argparse
import csv
from pathlib import Path

COLUMNS = [
    "age", "workclass", "fnlwgt", "education", "education-num", "marital-status",
    "occupation", "relationship", "race", "sex", "capital-gain", "capital-loss",
    "hours-per-week", "native-country", "income",
]


def convert(src: Path, dst: Path) -> int:
    count = 0
    with open(src, encoding="utf-8") as fin, open(dst, "w", newline="", encoding="utf-8") as fout:
        writer = csv.writer(fout)
        writer.writerow(COLUMNS)
        for line in fin:
            fields = [f.strip() for f in line.strip().split(",")]
            if len(fields) != len(COLUMNS):
                continue  # blank lines and the "|1x3 Cross validator" banner
            writer.writerow(fields)
            count += 1
    return count


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("raw_dir", type=Path)
    parser.add_argument("out_dir", type=Path)
    args = parser.parse_args()
    args.out_dir.mkdir(parents=True, exist_ok=True)
    for name, out in (("adult.data", "train.csv"), ("adult.test", "test.csv")):
        n = convert(args.raw_dir / name, args.out_dir / out)
        print(f"{out}: {n} rows")


if __name__ == "__main__":
    main()
