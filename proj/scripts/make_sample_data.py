#!/usr/bin/env python3
# Copyright 2026 The TabPerturb Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Regenerates data/sample_loans.csv, a synthetic 10-column table.

Every value is fictitious. The output is a pure function of SEED.
"""

import argparse
import csv
import pathlib

import numpy as np

SEED = 20260101
ROWS = 10_000
DATA = pathlib.Path(__file__).resolve().parent.parent / "data"


def read_names(path):
    lines = path.read_text(encoding="utf-8").splitlines()
    return [s.strip() for s in lines if s.strip() and not s.startswith("#")]


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", type=pathlib.Path,
                        default=DATA / "sample_loans.csv")
    args = parser.parse_args()

    rng = np.random.default_rng(SEED)
    first = read_names(DATA / "first_names.txt")
    last = read_names(DATA / "last_names.txt")
    streets = ["Any Street", "Maple Avenue", "Oak Road", "Hill Lane",
               "Park Drive", "Cedar Court", "River Way"]
    regions = ["North", "South", "East", "West", "Central"]

    age = rng.integers(18, 90, ROWS)
    income = np.round(rng.normal(50_000, 10_000, ROWS), 2)
    income = np.maximum(income, 5_000.0)
    # Loan size tracks income so the correlation check has signal.
    loan = np.round(0.6 * income + rng.normal(0, 4_000, ROWS), 2)
    loan = np.maximum(loan, 1_000.0)
    credit = np.clip(np.round(rng.normal(680, 60, ROWS)), 300, 850).astype(int)
    accounts = rng.poisson(4, ROWS)
    region = rng.choice(regions, ROWS)
    smoker = np.where(rng.random(ROWS) < 0.3, "yes", "no")

    with args.out.open("w", newline="", encoding="utf-8") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["customer_id", "age", "income", "credit_score",
                    "loan_amount", "num_accounts", "region", "smoker",
                    "phone", "notes"])
        for i in range(ROWS):
            phone = "555.{:03d}.{:04d}".format(rng.integers(100, 1000),
                                              rng.integers(0, 10_000))
            name = "{} {}".format(first[rng.integers(len(first))],
                                  last[rng.integers(len(last))])
            kind = rng.integers(4)
            if kind == 0:
                note = "Customer {} called about the loan".format(name)
            elif kind == 1:
                note = "Lives at {} {}".format(rng.integers(1, 2000),
                                               streets[rng.integers(len(streets))])
            elif kind == 2:
                note = "Contact {}.{}@example.com".format(
                    name.split()[0].lower(), name.split()[1].lower())
            else:
                note = ""
            if i % 97 == 0:
                note = ""  # some missing cells
            w.writerow([i + 1, int(age[i]), "{:.2f}".format(income[i]),
                        int(credit[i]), "{:.2f}".format(loan[i]),
                        int(accounts[i]), region[i], smoker[i],
                        "" if i % 131 == 0 else phone, note])


if __name__ == "__main__":
    main()
